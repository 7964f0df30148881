//! Canonical forms: dropping the positive part through an explicit gauge.

use amice_core::radius::OpKind;
use amice_core::solvability::{canonical_form, generate, WittFamily};
use amice_core::witt::WittVector;
use amice_core::PAdic;

fn main() -> amice_core::Result<()> {
    let prec = 40;
    let mut fam = WittFamily::new(2, PAdic::from_int(2, 3, prec), 4, 8)?;
    fam.insert(1, WittVector::teichmuller(PAdic::from_int(2, 1, prec), 4))?;
    fam.insert(-1, WittVector::from_ints(2, &[2, 4, 8], prec)?)?;
    let op = generate(&fam, OpKind::Diff, None, prec)?;
    println!("g = {}", op.series());
    let c = canonical_form(&op)?;
    println!("canonical g = {}", c.op.series());
    println!("gauge h to degree {}: {}", c.degree, c.gauge);
    println!("theta(h)/h = g+ verified: {}", c.gauge_verified);
    Ok(())
}
