//! Finite Laurent windows standing for elements of the Amice ring.

mod ops;
mod qnum;
mod series;

pub use ops::{apply, DerivOp};
pub use qnum::{kappa, omega, omega_q, padic_log, q_factorial_root_exponent, q_numerics, QNumeric, QParam, QValue};
pub use series::Side;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::norm::NormValue;
use crate::padic::{PAdic, DEFAULT_PREC};

/// A finitely supported Laurent series `Σ a_i T^i` on the index window
/// `[i_min, i_max]`.
///
/// Coefficients that cancel below their precision are not stored; the
/// coarsest such bound is kept as the noise `floor`, meaning every
/// unstored coefficient inside the window is only known modulo `p^floor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentWindow {
    prime: u32,
    coeffs: BTreeMap<i64, PAdic>,
    i_min: i64,
    i_max: i64,
    norm_faithful: bool,
    truncated: bool,
    floor: Option<i64>,
}

impl LaurentWindow {
    pub fn new(prime: u32, i_min: i64, i_max: i64) -> Self {
        LaurentWindow {
            prime,
            coeffs: BTreeMap::new(),
            i_min: i_min.min(i_max),
            i_max: i_max.max(i_min),
            norm_faithful: true,
            truncated: false,
            floor: None,
        }
    }

    pub fn zero(prime: u32) -> Self {
        LaurentWindow::new(prime, 0, 0)
    }

    pub fn one(prime: u32, prec: u32) -> Self {
        LaurentWindow::constant(PAdic::one(prime, prec))
    }

    pub fn constant(c: PAdic) -> Self {
        LaurentWindow::monomial(c, 0)
    }

    pub fn monomial(c: PAdic, i: i64) -> Self {
        let mut w = LaurentWindow::new(c.prime(), i, i);
        w.put(i, c);
        w
    }

    /// Sums the given terms on the window `[i_min, i_max]`.
    pub fn from_terms<I>(prime: u32, i_min: i64, i_max: i64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, PAdic)>,
    {
        let mut w = LaurentWindow::new(prime, i_min, i_max);
        for (i, c) in terms {
            if c.prime() != prime {
                return Err(Error::PrimeMismatch(prime, c.prime()));
            }
            w.add_term(i, &c);
        }
        Ok(w)
    }

    /// Integer coefficients on the hull of their indices.
    pub fn from_ints(prime: u32, prec: u32, terms: &[(i64, i64)]) -> Self {
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(0);
        let hi = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let it = terms.iter().map(|&(i, a)| (i, PAdic::from_int(prime, a, prec)));
        LaurentWindow::from_terms(prime, lo, hi, it).expect("same prime")
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn i_min(&self) -> i64 {
        self.i_min
    }

    pub fn i_max(&self) -> i64 {
        self.i_max
    }

    pub fn norm_faithful(&self) -> bool {
        self.norm_faithful
    }

    pub fn set_norm_faithful(&mut self, v: bool) {
        self.norm_faithful = v;
    }

    pub fn with_norm_faithful(mut self, v: bool) -> Self {
        self.norm_faithful = v;
        self
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn set_truncated(&mut self, v: bool) {
        self.truncated = v;
    }

    /// Records that unstored coefficients are only known modulo `p^abs`.
    pub fn add_floor(&mut self, abs: i64) {
        self.note_floor(abs);
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn coeff(&self, i: i64) -> Option<&PAdic> {
        self.coeffs.get(&i)
    }

    /// Stored coefficient, or zero (bounded by the floor when one is set).
    pub fn coeff_or_zero(&self, i: i64) -> PAdic {
        match (self.coeffs.get(&i), self.floor) {
            (Some(c), _) => c.clone(),
            (None, Some(f)) if i >= self.i_min && i <= self.i_max => PAdic::bounded_zero(self.prime, f),
            _ => PAdic::zero(self.prime),
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &PAdic)> + '_ {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// No coefficient is distinguishable from zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Zero with no precision noise at all.
    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.floor.is_none()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Largest relative precision among the coefficients.
    pub fn max_rel_precision(&self) -> u32 {
        self.coeffs.values().filter_map(PAdic::rel_precision).max().unwrap_or(DEFAULT_PREC)
    }

    /// Precision for an exact constant combined with this window: enough
    /// digits to cover every coefficient.
    pub fn unit_precision(&self) -> u32 {
        let abs = self.coeffs.values().filter_map(PAdic::abs_precision).max().unwrap_or(0);
        (abs.max(self.max_rel_precision() as i64).max(1)) as u32
    }

    /// Smallest absolute precision among coefficients and floor.
    pub fn abs_precision_floor(&self) -> Option<i64> {
        self.coeffs.values().filter_map(PAdic::abs_precision).chain(self.floor).min()
    }

    /// Smallest valuation among the stored coefficients.
    pub fn min_valuation(&self) -> Option<i64> {
        self.coeffs.values().filter_map(PAdic::valuation).min()
    }

    fn note_floor(&mut self, abs: i64) {
        self.floor = Some(self.floor.map_or(abs, |f| f.min(abs)));
    }

    /// Stores `c` at `i` (replacing), dropping zeros into the floor.
    pub fn put(&mut self, i: i64, c: PAdic) {
        debug_assert_eq!(c.prime(), self.prime);
        if i < self.i_min || i > self.i_max {
            if !c.is_zero() {
                self.truncated = true;
            }
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&i);
            if let Some(a) = c.abs_precision() {
                self.note_floor(a);
            }
        } else {
            self.coeffs.insert(i, c);
        }
    }

    pub fn add_term(&mut self, i: i64, c: &PAdic) {
        let s = match self.coeffs.get(&i) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        self.put(i, s);
    }

    fn with_same_meta(&self, i_min: i64, i_max: i64) -> LaurentWindow {
        let mut w = LaurentWindow::new(self.prime, i_min, i_max);
        w.norm_faithful = self.norm_faithful;
        w.truncated = self.truncated;
        w.floor = self.floor;
        w
    }

    fn merge_meta(&mut self, o: &LaurentWindow) {
        self.norm_faithful &= o.norm_faithful;
        self.truncated |= o.truncated;
        if let Some(f) = o.floor {
            self.note_floor(f);
        }
    }

    /// Restricts or widens the window; dropped nonzero terms mark truncation.
    pub fn with_window(&self, i_min: i64, i_max: i64) -> LaurentWindow {
        let mut w = self.with_same_meta(i_min, i_max);
        for (i, c) in self.terms() {
            w.put(i, c.clone());
        }
        w
    }

    /// Restricts the window without recording a truncation.
    pub fn restrict(&self, i_min: i64, i_max: i64) -> LaurentWindow {
        let mut w = self.with_window(i_min, i_max);
        w.truncated = self.truncated;
        w
    }

    pub fn map_coeffs<F: Fn(i64, &PAdic) -> PAdic>(&self, f: F) -> LaurentWindow {
        let mut w = self.with_same_meta(self.i_min, self.i_max);
        for (i, c) in self.terms() {
            w.put(i, f(i, c));
        }
        w
    }

    pub fn add(&self, o: &LaurentWindow) -> LaurentWindow {
        assert_eq!(self.prime, o.prime, "prime mismatch");
        let mut w = self.with_window(self.i_min.min(o.i_min), self.i_max.max(o.i_max));
        w.merge_meta(o);
        for (i, c) in o.terms() {
            w.add_term(i, c);
        }
        w
    }

    pub fn neg(&self) -> LaurentWindow {
        self.map_coeffs(|_, c| c.neg())
    }

    pub fn sub(&self, o: &LaurentWindow) -> LaurentWindow {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &PAdic) -> LaurentWindow {
        let mut w = self.map_coeffs(|_, a| a.mul(c));
        if let (Some(f), Some(v)) = (self.floor, c.valuation_lower_bound()) {
            w.floor = Some(f + v);
        }
        w
    }

    pub fn mul_int(&self, n: i64) -> LaurentWindow {
        self.map_coeffs(|_, a| a.mul_int(n))
    }

    /// Multiplication by `T^k`.
    pub fn shift(&self, k: i64) -> LaurentWindow {
        let mut w = self.with_same_meta(self.i_min + k, self.i_max + k);
        for (i, c) in self.terms() {
            w.put(i + k, c.clone());
        }
        w
    }

    /// Drops all digits below `p^abs`.
    pub fn reduce_abs(&self, abs: i64) -> LaurentWindow {
        let mut w = self.map_coeffs(|_, c| c.reduce_abs(abs));
        if self.floor.is_some() {
            w.floor = self.floor.map(|f| f.min(abs));
        }
        w
    }

    /// Product restricted to `[lo, hi]`, skipping pairs whose valuation
    /// reaches `cap` when given.
    pub fn mul_window(&self, o: &LaurentWindow, lo: i64, hi: i64, cap: Option<i64>) -> LaurentWindow {
        assert_eq!(self.prime, o.prime, "prime mismatch");
        let p = self.prime;
        let mut out = LaurentWindow::new(p, lo, hi);
        out.norm_faithful = self.norm_faithful && o.norm_faithful;
        out.truncated = self.truncated || o.truncated;
        let noise = |f: Option<i64>, other: &LaurentWindow| {
            f.map(|f| f + other.min_valuation().unwrap_or(0).min(other.floor.unwrap_or(i64::MAX / 4)))
        };
        for f in [noise(self.floor, o), noise(o.floor, self)].into_iter().flatten() {
            out.note_floor(cap.map_or(f, |c| f.min(c)));
        }
        let a: Vec<(i64, &PAdic, i64)> = self.terms().map(|(i, c)| (i, c, c.valuation().unwrap_or(0))).collect();
        let b: Vec<(i64, &PAdic, i64)> = o.terms().map(|(i, c)| (i, c, c.valuation().unwrap_or(0))).collect();
        if a.is_empty() || b.is_empty() {
            return out;
        }
        let width = (hi - lo + 1) as usize;
        let mut acc: Vec<Option<PAdic>> = vec![None; width];
        for &(i, x, vx) in &a {
            for &(j, y, vy) in &b {
                let k = i + j;
                if k < lo || k > hi {
                    out.truncated = true;
                    continue;
                }
                if let Some(c) = cap {
                    if vx + vy >= c {
                        let slot = &mut acc[(k - lo) as usize];
                        let z = PAdic::bounded_zero(p, c);
                        *slot = Some(match slot.take() {
                            Some(s) => s.add(&z),
                            None => z,
                        });
                        continue;
                    }
                }
                let t = x.mul(y);
                let slot = &mut acc[(k - lo) as usize];
                *slot = Some(match slot.take() {
                    Some(s) => s.add(&t),
                    None => t,
                });
            }
        }
        for (off, c) in acc.into_iter().enumerate() {
            if let Some(c) = c {
                let c = match cap {
                    Some(cap) => c.reduce_abs(cap),
                    None => c,
                };
                out.put(lo + off as i64, c);
            }
        }
        out
    }

    /// Product on the hull of the two windows.
    pub fn mul(&self, o: &LaurentWindow) -> LaurentWindow {
        self.mul_window(o, self.i_min.min(o.i_min), self.i_max.max(o.i_max), None)
    }

    /// Product on the natural window `[a+c, b+d]`; never truncates.
    pub fn mul_full(&self, o: &LaurentWindow) -> LaurentWindow {
        self.mul_window(o, self.i_min + o.i_min, self.i_max + o.i_max, None)
    }

    /// `|f|_ρ = sup |a_i| ρ^i` over stored coefficients.
    pub fn gauss_norm(&self, rho: NormValue) -> NormValue {
        let r = rho.exponent().expect("rho must be positive");
        self.coeffs.iter().map(|(i, c)| c.norm_bound().mul(NormValue::from_exponent(r * *i))).max().unwrap_or(NormValue::ZERO)
    }

    /// Upper bound on `|f|_ρ` that also covers the precision floor.
    pub fn gauss_norm_bound(&self, rho: NormValue) -> NormValue {
        let r = rho.exponent().expect("rho must be positive");
        let base = self.gauss_norm(rho);
        match self.floor {
            None => base,
            Some(f) => {
                let fl = NormValue::from_valuation(f);
                let edge =
                    [self.i_min, self.i_max].iter().map(|i| fl.mul(NormValue::from_exponent(r * *i))).max().unwrap_or(NormValue::ZERO);
                base.max(edge)
            }
        }
    }

    /// `(g^-, a_0, g^+)` with `g^-` on indices `≤ -1` and `g^+` on `≥ 1`.
    pub fn tripartite(&self) -> (LaurentWindow, PAdic, LaurentWindow) {
        let minus = self.restrict(self.i_min.min(-1), -1);
        let plus = self.restrict(1, self.i_max.max(1));
        let a0 = self.coeff(0).cloned().unwrap_or_else(|| PAdic::zero(self.prime));
        (minus, a0, plus)
    }

    /// Coefficientwise agreement within precision, ignoring window bounds.
    pub fn agrees_with(&self, o: &LaurentWindow) -> bool {
        let idx: std::collections::BTreeSet<i64> = self.coeffs.keys().chain(o.coeffs.keys()).copied().collect();
        idx.into_iter().all(|i| {
            let a = self.coeffs.get(&i).cloned().unwrap_or_else(|| PAdic::zero(self.prime));
            let b = o.coeffs.get(&i).cloned().unwrap_or_else(|| PAdic::zero(self.prime));
            a.agrees_with(&b)
        })
    }

    /// Smallest valuation of the difference, `None` if it vanishes.
    pub fn distance_valuation(&self, o: &LaurentWindow) -> Option<i64> {
        self.sub(o).min_valuation()
    }

    /// `f - 1`.
    pub fn minus_one(&self) -> LaurentWindow {
        let one = PAdic::one(self.prime, self.unit_precision());
        let mut w = self.clone();
        w.add_term(0, &one.neg());
        w
    }

    /// One-sided part on `side`, including the constant term.
    pub fn side(&self, side: Side) -> LaurentWindow {
        match side {
            Side::Plus => self.restrict(0, self.i_max.max(0)),
            Side::Minus => self.restrict(self.i_min.min(0), 0),
        }
    }

    /// `1 / f` for a one-sided `f = 1 + s`, to `degree` terms.
    pub fn inverse_one_sided(&self, side: Side, degree: i64, cap: Option<i64>) -> Result<LaurentWindow> {
        series::inverse(self, side, degree, cap)
    }

    /// `exp(f)` for one-sided `f` with zero constant term.
    pub fn exp_one_sided(&self, side: Side, degree: i64) -> Result<LaurentWindow> {
        series::exp(self, side, degree)
    }

    /// `log(f)` for one-sided `f = 1 + s`.
    pub fn log_one_sided(&self, side: Side, degree: i64) -> Result<LaurentWindow> {
        series::log(self, side, degree)
    }
}

impl fmt::Display for LaurentWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        let mut first = true;
        for (i, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let shown = c.to_small_rational().map(|r| r.to_string()).unwrap_or_else(|| c.to_string());
            match i {
                0 => write!(f, "({shown})")?,
                1 => write!(f, "({shown})*T")?,
                _ => write!(f, "({shown})*T^{i}")?,
            }
        }
        if let Some(fl) = self.floor {
            write!(f, " + O({}^{fl})", self.prime)?;
        }
        write!(f, "  [{}, {}]", self.i_min, self.i_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u32 = 16;

    fn w(p: u32, t: &[(i64, i64)]) -> LaurentWindow {
        LaurentWindow::from_ints(p, N, t)
    }

    #[test]
    fn gauss_norm_examples() {
        let f = LaurentWindow::from_terms(3, -1, 1, [(1, PAdic::one(3, N)), (0, PAdic::from_int(3, 3, N)), (-1, PAdic::from_int(3, 3, N))])
            .unwrap();
        assert_eq!(f.gauss_norm(NormValue::one()), NormValue::one());
        let t5 = w(5, &[(5, 1)]);
        let rho = NormValue::from_exponent(crate::Exponent::new(1, 3));
        assert_eq!(t5.gauss_norm(rho), rho.powi(5).unwrap());
        assert_eq!(w(2, &[(-2, 2), (0, 4)]).gauss_norm(NormValue::one()), NormValue::from_valuation(1));
        assert_eq!(LaurentWindow::zero(2).gauss_norm(NormValue::one()), NormValue::ZERO);
    }

    #[test]
    fn tripartite_examples() {
        let f = w(3, &[(-2, 3), (0, 3), (5, 1)]);
        let (m, a0, pl) = f.tripartite();
        assert!(m.agrees_with(&w(3, &[(-2, 3)])));
        assert_eq!(a0.to_i64(), Some(3));
        assert!(pl.agrees_with(&w(3, &[(5, 1)])));
        assert!(m.add(&LaurentWindow::constant(a0)).add(&pl).agrees_with(&f));
        let (m, _, pl) = w(2, &[(1, 1), (2, 1)]).tripartite();
        assert!(m.is_zero());
        assert_eq!(pl.len(), 2);
    }

    #[test]
    fn products_and_truncation() {
        let f = w(5, &[(0, 1), (1, 1)]);
        let sq = f.mul_full(&f);
        assert!(sq.agrees_with(&w(5, &[(0, 1), (1, 2), (2, 1)])));
        assert!(!sq.truncated());
        let hull = f.mul(&f);
        assert!(hull.truncated());
        assert!(hull.agrees_with(&w(5, &[(0, 1), (1, 2)])));
    }

    #[test]
    fn cancellation_goes_to_floor() {
        let f = w(3, &[(0, 1), (2, 5)]);
        let d = f.sub(&f);
        assert!(d.is_zero());
        assert_eq!(d.floor(), Some(N as i64));
        assert!(!d.is_exact_zero());
    }
}
