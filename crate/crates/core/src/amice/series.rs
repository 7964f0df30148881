//! One-sided power series in `T` or `T^{-1}`: inverse, exp and log.

use super::LaurentWindow;
use crate::error::{Error, Result};
use crate::padic::PAdic;

/// Which variable a one-sided series is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Power series in `T`.
    Plus,
    /// Power series in `T^{-1}`.
    Minus,
}

impl Side {
    pub fn sign(self) -> i64 {
        match self {
            Side::Plus => 1,
            Side::Minus => -1,
        }
    }
}

fn to_ps(f: &LaurentWindow, side: Side, degree: i64) -> Result<Vec<PAdic>> {
    let s = side.sign();
    if f.terms().any(|(i, _)| i * s < 0) {
        return Err(Error::PreconditionViolated(format!("series has terms on the wrong side for {side:?}")));
    }
    Ok((0..=degree).map(|j| f.coeff_or_zero(j * s)).collect())
}

fn from_ps(p: u32, side: Side, v: Vec<PAdic>, meta: &LaurentWindow) -> LaurentWindow {
    let d = v.len() as i64 - 1;
    let (lo, hi) = match side {
        Side::Plus => (0, d),
        Side::Minus => (-d, 0),
    };
    let mut w = LaurentWindow::new(p, lo, hi);
    w.norm_faithful = meta.norm_faithful;
    for (j, c) in v.into_iter().enumerate() {
        w.put(j as i64 * side.sign(), c);
    }
    w
}

pub(super) fn inverse(f: &LaurentWindow, side: Side, degree: i64, cap: Option<i64>) -> Result<LaurentWindow> {
    let p = f.prime();
    let a = to_ps(f, side, degree)?;
    let c0inv = a[0].inv()?;
    let nz: Vec<(usize, &PAdic)> = a.iter().enumerate().skip(1).filter(|(_, c)| !c.is_exact_zero()).collect();
    let mut b: Vec<PAdic> = Vec::with_capacity(a.len());
    b.push(c0inv.clone());
    for j in 1..a.len() {
        let mut acc = PAdic::zero(p);
        for &(i, ai) in nz.iter().take_while(|(i, _)| *i <= j) {
            let bj = &b[j - i];
            if bj.is_exact_zero() {
                continue;
            }
            acc = acc.add(&ai.mul(bj));
        }
        let mut bj = acc.mul(&c0inv).neg();
        if let Some(c) = cap {
            bj = bj.reduce_abs(c);
        }
        b.push(bj);
    }
    Ok(from_ps(p, side, b, f))
}

pub(super) fn exp(f: &LaurentWindow, side: Side, degree: i64) -> Result<LaurentWindow> {
    let p = f.prime();
    let a = to_ps(f, side, degree)?;
    if !a[0].is_zero() {
        return Err(Error::PreconditionViolated("exp needs a series without constant term".into()));
    }
    let ia: Vec<(usize, PAdic)> =
        a.iter().enumerate().skip(1).filter(|(_, c)| !c.is_exact_zero()).map(|(i, c)| (i, c.mul_int(i as i64))).collect();
    let mut e: Vec<PAdic> = vec![PAdic::one(p, f.unit_precision())];
    for j in 1..a.len() {
        let mut acc = PAdic::zero(p);
        for (i, iai) in ia.iter().take_while(|(i, _)| *i <= j) {
            acc = acc.add(&iai.mul(&e[j - i]));
        }
        e.push(acc.div_int(j as i64)?);
    }
    Ok(from_ps(p, side, e, f))
}

pub(super) fn log(f: &LaurentWindow, side: Side, degree: i64) -> Result<LaurentWindow> {
    let p = f.prime();
    let a = to_ps(f, side, degree)?;
    let one = PAdic::one(p, f.unit_precision());
    if !a[0].agrees_with(&one) {
        return Err(Error::LogDomain("constant term must be 1".into()));
    }
    let s: Vec<PAdic> = a.iter().enumerate().map(|(i, c)| if i == 0 { PAdic::zero(p) } else { c.clone() }).collect();
    let mut l: Vec<PAdic> = vec![PAdic::zero(p)];
    for j in 1..s.len() {
        let mut acc = s[j].mul_int(j as i64);
        for i in 1..j {
            if l[i].is_exact_zero() || s[j - i].is_exact_zero() {
                continue;
            }
            acc = acc.sub(&l[i].mul_int(i as i64).mul(&s[j - i]));
        }
        l.push(acc.div_int(j as i64)?);
    }
    Ok(from_ps(p, side, l, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_one_plus_pt() {
        let f = LaurentWindow::from_ints(3, 20, &[(0, 1), (1, 3)]);
        let g = f.inverse_one_sided(Side::Plus, 6, None).unwrap();
        let prod = f.mul_full(&g).restrict(0, 6);
        assert!(prod.agrees_with(&LaurentWindow::one(3, 20)));
        assert_eq!(g.coeff(2).unwrap().to_i64(), Some(9));
    }

    #[test]
    fn exp_log_roundtrip_minus_side() {
        let f = LaurentWindow::from_ints(2, 30, &[(-1, 4), (-3, 8)]);
        let e = f.exp_one_sided(Side::Minus, 10).unwrap();
        let back = e.log_one_sided(Side::Minus, 10).unwrap();
        assert!(back.agrees_with(&f));
    }

    #[test]
    fn exp_of_t_has_factorial_coefficients() {
        let f = LaurentWindow::from_ints(5, 20, &[(1, 1)]);
        let e = f.exp_one_sided(Side::Plus, 6).unwrap();
        let c = e.coeff(6).unwrap().mul_int(720);
        assert_eq!(c.to_i64(), Some(1));
    }
}
