//! Factorisation of window units as `a = λ T^N a^-(T) a^+(T)`.

use crate::amice::{LaurentWindow, Side};
use crate::error::{Error, Result};
use crate::norm::{Exponent, NormValue};
use crate::padic::PAdic;

pub const MAX_ITERATIONS: u32 = 64;
/// Largest factor window the fixed point will use.
pub const WINDOW_BUDGET: i64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotzkinFactors {
    pub lambda: PAdic,
    pub n: i64,
    /// `1 + Σ_{i≤-1} α_i T^i`
    pub a_minus: LaurentWindow,
    /// `1 + Σ_{i≥1} α_i T^i`
    pub a_plus: LaurentWindow,
    pub iterations: u32,
    /// Valuation of the residual `|h|_1` after each pass.
    pub residuals: Vec<i64>,
    /// Absolute precision the factors are known to.
    pub precision: i64,
}

impl MotzkinFactors {
    pub fn residual_norm_exponent(&self) -> Option<i64> {
        self.residuals.last().copied()
    }

    /// Factors built by hand; `iterations` and residuals are empty.
    pub fn new(lambda: PAdic, n: i64, a_minus: LaurentWindow, a_plus: LaurentWindow) -> Result<Self> {
        let check = |w: &LaurentWindow, side: Side| -> Result<()> {
            if w.terms().any(|(i, _)| i * side.sign() < 0) {
                return Err(Error::PreconditionViolated(format!("{side:?} factor has terms on the wrong side")));
            }
            let one = PAdic::one(w.prime(), w.max_rel_precision());
            if !w.coeff_or_zero(0).agrees_with(&one) {
                return Err(Error::PreconditionViolated(format!("{side:?} factor must have constant term 1")));
            }
            Ok(())
        };
        check(&a_minus, Side::Minus)?;
        check(&a_plus, Side::Plus)?;
        let precision = [lambda.abs_precision(), a_minus.abs_precision_floor(), a_plus.abs_precision_floor()]
            .into_iter()
            .flatten()
            .min()
            .unwrap_or(i64::MAX);
        Ok(MotzkinFactors { lambda, n, a_minus, a_plus, iterations: 0, residuals: Vec::new(), precision })
    }

    /// Same `λ`, `N` and factor coefficients within precision.
    pub fn agrees_with(&self, o: &MotzkinFactors) -> bool {
        self.n == o.n
            && self.lambda.valuation() == o.lambda.valuation()
            && self.lambda.agrees_with(&o.lambda)
            && self.a_minus.agrees_with(&o.a_minus)
            && self.a_plus.agrees_with(&o.a_plus)
    }
}

fn one_plus(h: &LaurentWindow, lo: i64, hi: i64) -> LaurentWindow {
    let one = PAdic::one(h.prime(), h.unit_precision());
    let mut w = h.with_window(lo, hi);
    w.add_term(0, &one);
    w
}

/// Motzkin decomposition of a unit of the window ring.
pub fn decompose(a: &LaurentWindow) -> Result<MotzkinFactors> {
    let p = a.prime();
    if !a.norm_faithful() {
        return Err(Error::PreconditionViolated("window is not marked norm_faithful".into()));
    }
    let vmin = a.min_valuation().ok_or_else(|| Error::NotAUnit("series is zero at working precision".into()))?;
    if let Some(f) = a.floor() {
        if f <= vmin {
            return Err(Error::IndeterminateValuation { at_least: f });
        }
    }
    let n = a.terms().find(|(_, c)| c.valuation() == Some(vmin)).map(|(i, _)| i).expect("attained");
    let lambda0 = a.coeff(n).expect("stored").clone();
    let u = a.scale(&lambda0.inv()?).shift(-n);
    let prec = u.abs_precision_floor().unwrap_or(1);
    if prec <= 0 {
        return Err(Error::PrecisionExhausted("normalised unit has no digits".into()));
    }
    let mut h = u.minus_one().reduce_abs(prec);
    let e = match h.min_valuation() {
        None => {
            return Ok(MotzkinFactors {
                lambda: lambda0,
                n,
                a_minus: LaurentWindow::one(p, prec as u32),
                a_plus: LaurentWindow::one(p, prec as u32),
                iterations: 0,
                residuals: vec![prec],
                precision: prec,
            })
        }
        Some(e) if e <= 0 => {
            return Err(Error::NotAUnit(format!("normalised remainder has |h|_1 = |p|^{e} >= 1")));
        }
        Some(e) => e,
    };
    let mult = (prec + e - 1) / e;
    let big_l = (u.i_min().min(0) * mult).max(-WINDOW_BUDGET);
    let big_r = (u.i_max().max(0) * mult).min(WINDOW_BUDGET);
    let mut am = LaurentWindow::one(p, prec as u32).with_window(big_l, 0);
    let mut ap = LaurentWindow::one(p, prec as u32).with_window(0, big_r);
    let mut mu = PAdic::one(p, prec as u32);
    let mut residuals = Vec::new();
    let mut last = e;
    for iter in 1..=MAX_ITERATIONS {
        let (hm, h0, hp) = h.tripartite();
        am = am.mul_window(&one_plus(&hm, big_l, 0), big_l, 0, Some(prec));
        ap = ap.mul_window(&one_plus(&hp, 0, big_r), 0, big_r, Some(prec));
        mu = mu.mul(&PAdic::one(p, prec as u32).add(&h0)).reduce_abs(prec);
        let inv_m = am.inverse_one_sided(Side::Minus, -big_l, Some(prec))?;
        let inv_p = ap.inverse_one_sided(Side::Plus, big_r, Some(prec))?;
        let w =
            u.mul_window(&inv_m, big_l, big_r, Some(prec)).mul_window(&inv_p, big_l, big_r, Some(prec)).scale(&mu.inv()?).reduce_abs(prec);
        h = w.minus_one().reduce_abs(prec);
        let res = h.min_valuation().unwrap_or(prec);
        residuals.push(res);
        if res <= last {
            return Err(Error::NotConverged(format!("residual |p|^{res} did not shrink below |p|^{last} at pass {iter}")));
        }
        last = res;
        if h.is_zero() {
            let a_minus = am.reduce_abs(prec);
            let a_plus = ap.reduce_abs(prec);
            return Ok(MotzkinFactors { lambda: lambda0.mul(&mu), n, a_minus, a_plus, iterations: iter, residuals, precision: prec });
        }
    }
    Err(Error::NotConverged(format!("no convergence after {MAX_ITERATIONS} passes")))
}

/// `λ T^N a^- a^+`.
pub fn recompose(f: &MotzkinFactors) -> LaurentWindow {
    f.a_minus.mul_full(&f.a_plus).scale(&f.lambda).shift(f.n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffVerdict {
    pub index: i64,
    /// Exponent of `|α_i| ρ^i`.
    pub exponent: Exponent,
    /// `|α_i| ρ^i < 1`
    pub strict: bool,
    /// `|α_i| ρ^i ≤ 1`
    pub weak: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorPredicates {
    pub rho: NormValue,
    pub minus: Vec<CoeffVerdict>,
    pub plus: Vec<CoeffVerdict>,
    pub product_norm: NormValue,
    /// `|a^- a^+ - 1|_ρ < 1`
    pub product_bound: bool,
}

impl FactorPredicates {
    pub fn minus_strict(&self) -> bool {
        self.minus.iter().all(|c| c.strict)
    }

    pub fn plus_strict(&self) -> bool {
        self.plus.iter().all(|c| c.strict)
    }
}

fn verdicts(w: &LaurentWindow, rho: NormValue) -> Result<Vec<CoeffVerdict>> {
    let r = rho.exponent().expect("positive");
    if let Some(f) = w.floor() {
        let worst = [w.i_min(), w.i_max()].iter().map(|i| NormValue::from_exponent(Exponent::from_integer(f) + r * *i)).max();
        if worst.is_some_and(|x| x >= NormValue::one()) {
            return Err(Error::IndeterminateValuation { at_least: f });
        }
    }
    Ok(w.terms()
        .filter(|(i, _)| *i != 0)
        .map(|(i, c)| {
            let x = c.norm_bound().mul(NormValue::from_exponent(r * i));
            CoeffVerdict { index: i, exponent: x.exponent().expect("nonzero"), strict: x < NormValue::one(), weak: x <= NormValue::one() }
        })
        .collect())
}

/// Coefficient bounds of the factors at `ρ` and the product bound.
pub fn factor_predicates(f: &MotzkinFactors, rho: NormValue) -> Result<FactorPredicates> {
    let minus = verdicts(&f.a_minus, rho)?;
    let plus = verdicts(&f.a_plus, rho)?;
    let product_norm = f.a_minus.mul_full(&f.a_plus).minus_one().gauss_norm_bound(rho);
    Ok(FactorPredicates { rho, minus, plus, product_norm, product_bound: product_norm < NormValue::one() })
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u32 = 20;

    #[test]
    fn trivial_cases() {
        let f = decompose(&LaurentWindow::one(3, N)).unwrap();
        assert_eq!(f.n, 0);
        assert_eq!(f.lambda.to_i64(), Some(1));
        assert!(f.a_minus.agrees_with(&LaurentWindow::one(3, N)));
        let c = decompose(&LaurentWindow::from_ints(5, N, &[(0, 7)])).unwrap();
        assert_eq!(c.lambda.to_i64(), Some(7));
        assert!(c.a_plus.agrees_with(&LaurentWindow::one(5, N)));
    }

    #[test]
    fn t_plus_two() {
        let a = LaurentWindow::from_ints(2, N, &[(0, 2), (1, 1)]);
        let f = decompose(&a).unwrap();
        assert_eq!(f.n, 1);
        assert_eq!(f.lambda.to_i64(), Some(1));
        assert!(f.a_minus.agrees_with(&LaurentWindow::from_ints(2, N, &[(-1, 2), (0, 1)])));
        assert!(f.a_plus.agrees_with(&LaurentWindow::one(2, N)));
        assert!(recompose(&f).agrees_with(&a));
        let pr = factor_predicates(&f, NormValue::one()).unwrap();
        assert_eq!(pr.minus.len(), 1);
        assert!(pr.minus[0].strict);
        assert!(pr.product_bound);
    }

    #[test]
    fn closure_case_flags_weak_bound() {
        let am = LaurentWindow::from_ints(3, N, &[(-1, 1), (0, 1)]);
        let f = MotzkinFactors::new(PAdic::one(3, N), 0, am, LaurentWindow::one(3, N)).unwrap();
        let pr = factor_predicates(&f, NormValue::one()).unwrap();
        assert!(pr.minus[0].weak && !pr.minus[0].strict);
        assert!(!pr.product_bound);
    }

    #[test]
    fn two_sided_unit_roundtrip() {
        let a = LaurentWindow::from_ints(3, N, &[(-2, 9), (-1, 3), (0, 2), (1, 6), (3, 27)]);
        let f = decompose(&a).unwrap();
        let back = recompose(&f);
        assert!(back.agrees_with(&a), "{back} vs {a}");
        assert!(f.residuals.windows(2).all(|w| w[0] < w[1]));
        let again = decompose(&recompose(&f)).unwrap();
        assert!(again.agrees_with(&f));
    }

    #[test]
    fn non_units_are_rejected() {
        let a = LaurentWindow::from_ints(2, N, &[(0, 1), (1, 1)]);
        assert!(matches!(decompose(&a), Err(Error::NotAUnit(_))));
    }
}
