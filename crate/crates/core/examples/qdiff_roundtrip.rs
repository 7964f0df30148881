//! q-difference operators built from Witt data, extracted back and checked.

use amice_core::amice::QParam;
use amice_core::motzkin::decompose;
use amice_core::radius::OpKind;
use amice_core::solvability::{check_with, extract_with, generate, CheckConfig, WittFamily};
use amice_core::witt::WittVector;
use amice_core::PAdic;

fn main() -> amice_core::Result<()> {
    let prec = 20;
    let q = QParam::one_plus_p_pow(3, 2, prec)?;
    let mut fam = WittFamily::new(3, PAdic::from_int(3, 2, prec), 6, 9)?;
    fam.insert(1, WittVector::from_ints(3, &[1, 2], prec)?)?;
    fam.insert(-1, WittVector::from_ints(3, &[3, 9], prec)?)?;
    fam.insert(-2, WittVector::from_ints(3, &[9], prec)?)?;
    let op = generate(&fam, OpKind::QDiff, Some(&q), prec)?;
    println!("a has {} terms on [{}, {}]", op.series().len(), op.series().i_min(), op.series().i_max());

    let f = decompose(op.series())?;
    println!("Motzkin: N = {}, lambda = {}", f.n, f.lambda);

    let cfg = CheckConfig { window: fam.window(), ..CheckConfig::default() };
    let ex = extract_with(&op, &cfg.window)?;
    println!("family recovered: {}", ex.family.agrees_with(&fam));
    println!("check: {}", check_with(&op, &cfg)?.verdict);
    Ok(())
}
