//! Iterates g_[k], finite-k radius estimates, closed forms and sharp tests.

use amice_core::amice::{LaurentWindow, QParam};
use amice_core::radius::{constant_qdiff_profile, iterates, ray_estimate, sharp_test, OperatorSpec};
use amice_core::{NormValue, PAdic};

fn main() -> amice_core::Result<()> {
    let g = LaurentWindow::from_terms(2, 1, 1, [(1, PAdic::parse_rational(2, "1/2", 20)?)])?;
    let op = OperatorSpec::diff(g);
    let rep = ray_estimate(&op, NormValue::one(), 16)?;
    println!("d/dT - T/2 over Q_2: exact radius {:?}", rep.exact);

    let t = OperatorSpec::diff(LaurentWindow::from_ints(2, 20, &[(1, 1)]));
    for (k, gk) in iterates(&t, 4)?.iter().enumerate() {
        println!("g_[{}] = {gk}", k + 1);
    }
    println!("sharp test for g = T: {:?}", sharp_test(&t, 16)?);

    let pt = OperatorSpec::diff(LaurentWindow::from_ints(3, 20, &[(1, 3)]));
    println!("sharp test for g = 3T: {:?}", sharp_test(&pt, 16)?);

    let q = QParam::from_int(3, 10, 20)?;
    let prof = constant_qdiff_profile(&PAdic::from_int(3, 4, 20), &q, 12)?;
    println!("constant sigma_q - 4 profile stabilises at {:?}", prof.stabilized);
    Ok(())
}
