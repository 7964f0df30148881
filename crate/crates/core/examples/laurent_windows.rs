//! Gauss norms, the tripartite split and the twisted derivations.

use amice_core::amice::{apply, DerivOp, LaurentWindow, QParam};
use amice_core::NormValue;

fn main() -> amice_core::Result<()> {
    let f = LaurentWindow::from_ints(2, 20, &[(-2, 2), (0, 4)]);
    println!("|2T^-2 + 4|_1 = {}", f.gauss_norm(NormValue::one()));

    let g = LaurentWindow::from_ints(3, 20, &[(-2, 3), (0, 3), (5, 1)]);
    let (minus, a0, plus) = g.tripartite();
    println!("split of {g}: g- = {minus}, a0 = {a0}, g+ = {plus}");

    let t3 = LaurentWindow::from_ints(5, 20, &[(3, 1)]);
    println!("theta(T^3) = {}", apply(DerivOp::Theta, &t3, None)?);

    let q = QParam::from_int(5, 6, 20)?;
    let t = LaurentWindow::from_ints(5, 20, &[(1, 1), (-1, 1)]);
    println!("d_q(T + T^-1) = {}", apply(DerivOp::DQ, &t, Some(&q))?);
    println!("sigma_q(T + T^-1) = {}", apply(DerivOp::SigmaQ, &t, Some(&q))?);
    Ok(())
}
