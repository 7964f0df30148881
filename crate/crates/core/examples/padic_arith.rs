//! Capped-precision arithmetic, valuations and norms in Q_p.

use amice_core::padic::{arith, ArithOp, Operand};
use amice_core::PAdic;

fn main() -> amice_core::Result<()> {
    let one = PAdic::from_int(2, 1, 5);
    let two = arith(ArithOp::Add, &one, &Operand::Int(1))?;
    println!("1 + 1 in Z_2 mod 2^5: {two}");

    let twelve = PAdic::from_int(2, 12, 8);
    println!("12 = {twelve}, |12| = {}", twelve.norm()?);

    let half = PAdic::from_int(3, 2, 3).inv()?;
    println!("1/2 mod 3^3 = {half}");

    let x = PAdic::parse_rational(5, "7/25", 10)?;
    println!("7/25 = {x}, valuation {:?}", x.valuation());

    let lost = arith(ArithOp::Sub, &PAdic::from_int(5, 7, 4), &Operand::Int(7));
    println!("7 - 7 at finite precision: {lost:?}");
    Ok(())
}
