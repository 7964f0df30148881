//! Generating differential operators from Witt data and checking them.

use amice_core::amice::LaurentWindow;
use amice_core::radius::{OpKind, OperatorSpec};
use amice_core::solvability::{check, generate, witt_extract, WittFamily};
use amice_core::witt::WittVector;
use amice_core::PAdic;

fn main() -> amice_core::Result<()> {
    let mut fam = WittFamily::empty(2, 0, 8);
    fam.insert(1, WittVector::teichmuller(PAdic::from_int(2, 1, 24), 4))?;
    let op = generate(&fam, OpKind::Diff, None, 24)?;
    println!("generated g = {}", op.series());
    println!("check: {}", check(&op)?.verdict);
    println!("extraction roundtrip: {}", witt_extract(&op)?.agrees_with(&fam));

    let bad = OperatorSpec::diff(LaurentWindow::from_terms(2, 0, 1, [(1, PAdic::parse_rational(2, "1/2", 24)?)])?.with_norm_faithful(true));
    println!("g = T/2: {}", check(&bad)?.verdict);

    let a0 = OperatorSpec::diff(LaurentWindow::constant(PAdic::parse_rational(3, "1/3", 24)?).with_norm_faithful(true));
    println!("g = 1/3: {}", check(&a0)?.verdict);
    Ok(())
}
