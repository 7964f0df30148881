//! q-deformation of a differential operator and the limit q -> 1.

use amice_core::amice::{LaurentWindow, QParam};
use amice_core::radius::OperatorSpec;
use amice_core::solvability::q_deform;

fn main() -> amice_core::Result<()> {
    let p = 3;
    let prec = 30;
    let g = OperatorSpec::diff(LaurentWindow::from_ints(p, prec, &[(1, 1)]).with_window(0, 9).with_norm_faithful(true));
    for k in 3..=6 {
        let q = QParam::one_plus_p_pow(p, k, prec)?;
        let d = q_deform(&g, &q, prec)?;
        let c = d.op.series().coeff_or_zero(1).div(q.q_minus_one())?;
        let err = c.sub(&amice_core::PAdic::one(p, prec));
        println!("|q - 1| = |3|^{k}: coefficient of T in (a-1)/(q-1) = {c}, error valuation {:?}", err.valuation());
    }
    Ok(())
}
