//! Ghost components and Witt ring operations through ghost coordinates.

use amice_core::witt::{unghost, witt_ring, WittOp, WittVector};

fn main() -> amice_core::Result<()> {
    let x = WittVector::from_ints(2, &[1, 1], 16)?;
    let ph = x.ghost();
    println!("ghost(1, 1) = {:?}", ph.components().iter().map(|c| c.to_i64()).collect::<Vec<_>>());

    let back = unghost(&ph)?;
    println!("unghost recovers x: {}", back.agrees_with(&x));

    let one = WittVector::from_ints(2, &[1, 0], 16)?;
    let s = witt_ring(WittOp::Add, &one, &one)?;
    println!("(1,0) + (1,0) = {:?}", s.components().iter().map(|c| c.to_i64()).collect::<Vec<_>>());

    let y = WittVector::from_ints(3, &[3, 9, 1], 16)?;
    println!("strict integrality of (3, 9, 1): {:?}", y.integrality(true)?);
    Ok(())
}
