//! Artin-Hasse type exponentials of Witt families and their integrality.

use std::collections::BTreeMap;

use amice_core::amice::Side;
use amice_core::solvability::{artin_hasse, exp_decompose, WittFamily};
use amice_core::witt::WittVector;
use amice_core::{NormValue, PAdic};

fn main() -> amice_core::Result<()> {
    let prec = 64;
    let mut fam = WittFamily::empty(2, 0, 32);
    fam.insert(1, WittVector::teichmuller(PAdic::from_int(2, 1, prec), 6))?;
    let e = artin_hasse(&fam, 32, Side::Plus)?;
    println!("E(T, 1) to degree 4: {}", e.restrict(0, 4));
    let worst = e.terms().map(|(_, c)| c.norm_bound()).max().unwrap_or(NormValue::ZERO);
    println!("largest coefficient norm to degree 32: {worst}");

    let mut bad = WittFamily::empty(2, 0, 32);
    bad.insert(1, WittVector::new(2, vec![PAdic::parse_rational(2, "1/2", prec)?])?)?;
    let e = artin_hasse(&bad, 8, Side::Plus)?;
    let first = e.terms().find(|(_, c)| c.norm_bound() > NormValue::one()).map(|(i, _)| i);
    println!("lambda_1 = (1/2): first non-integral coefficient at degree {first:?}");

    let b = BTreeMap::from([(1, PAdic::from_int(2, 1, prec))]);
    let dec = exp_decompose(2, &b, 4)?;
    println!(
        "exp(T) decomposes with lambda_1 = {:?}",
        dec.get(1).map(|w| w.components().iter().map(|c| c.to_small_rational()).collect::<Vec<_>>())
    );
    Ok(())
}
