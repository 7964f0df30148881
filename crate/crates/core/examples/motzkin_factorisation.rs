//! Motzkin factorisation a = lambda T^N a^- a^+ and its norm predicates.

use amice_core::amice::LaurentWindow;
use amice_core::motzkin::{decompose, factor_predicates, recompose};
use amice_core::NormValue;

fn main() -> amice_core::Result<()> {
    let a = LaurentWindow::from_ints(2, 20, &[(0, 2), (1, 1)]);
    let f = decompose(&a)?;
    println!("T + 2 = {} * T^{} * ({}) * ({})", f.lambda, f.n, f.a_minus, f.a_plus);

    let u = LaurentWindow::from_ints(3, 20, &[(-2, 9), (-1, 3), (0, 2), (1, 6), (3, 27)]);
    let f = decompose(&u)?;
    println!("two-sided unit: N = {}, residual exponents per pass {:?}", f.n, f.residuals);
    println!("recompose agrees: {}", recompose(&f).agrees_with(&u));
    let pr = factor_predicates(&f, NormValue::one())?;
    println!("strict bounds: minus {}, plus {}; product bound {}", pr.minus_strict(), pr.plus_strict(), pr.product_bound);
    Ok(())
}
