//! Capped relative-precision arithmetic in `Q_p`.
//!
//! A nonzero value is stored as `p^v * u` with `u` a unit known modulo `p^N`.
//! Cancellation in a sum can leave a value only known to be divisible by a
//! power of `p`; such a value is a *bounded zero* `O(p^A)` and its valuation
//! is indeterminate. Exact zero is a separate state.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num::bigint::{BigInt, BigUint, Sign};
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::norm::NormValue;

/// Default number of unit digits.
pub const DEFAULT_PREC: u32 = 32;

thread_local! {
    static POW_CACHE: RefCell<HashMap<(u32, u32), Rc<BigUint>>> = RefCell::new(HashMap::new());
}

/// `p^n`, cached per thread.
pub fn p_pow(p: u32, n: u32) -> Rc<BigUint> {
    POW_CACHE.with(|c| c.borrow_mut().entry((p, n)).or_insert_with(|| Rc::new(num::pow(BigUint::from(p), n as usize))).clone())
}

/// Splits `n = p^k * m` with `p ∤ m`, for `n ≠ 0`.
fn strip_p(p: u32, n: &BigUint) -> (u32, BigUint) {
    let pb = BigUint::from(p);
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (k, m);
        }
        m = q;
        k += 1;
    }
}

/// p-adic valuation of a nonzero integer.
pub fn val_int(p: u32, n: &BigInt) -> u32 {
    strip_p(p, n.magnitude()).0
}

fn mod_pos(n: &BigInt, m: &BigUint) -> BigUint {
    let mi = BigInt::from_biguint(Sign::Plus, m.clone());
    n.mod_floor(&mi).to_biguint().expect("nonnegative")
}

fn inv_mod(u: &BigUint, m: &BigUint) -> BigUint {
    let a = BigInt::from_biguint(Sign::Plus, u.clone());
    let mi = BigInt::from_biguint(Sign::Plus, m.clone());
    let g = a.extended_gcd(&mi);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(&mi).to_biguint().expect("nonnegative")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Exact,
    Bounded { abs: i64 },
    Unit { v: i64, unit: BigUint, prec: u32 },
}

/// An element of `Q_p` with capped relative precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdic {
    p: u32,
    repr: Repr,
}

impl PAdic {
    pub fn zero(p: u32) -> Self {
        PAdic { p, repr: Repr::Exact }
    }

    /// A value known only to lie in `p^abs Z_p`.
    pub fn bounded_zero(p: u32, abs: i64) -> Self {
        PAdic { p, repr: Repr::Bounded { abs } }
    }

    pub fn one(p: u32, prec: u32) -> Self {
        PAdic::from_parts_unchecked(p, 0, BigUint::one(), prec)
    }

    fn from_parts_unchecked(p: u32, v: i64, unit: BigUint, prec: u32) -> Self {
        PAdic { p, repr: Repr::Unit { v, unit, prec } }
    }

    /// `p^v * unit` with `prec` unit digits; the unit must be prime to `p`.
    pub fn from_parts(p: u32, v: i64, unit: &BigInt, prec: u32) -> Result<Self> {
        check_prime(p)?;
        if prec == 0 {
            return Err(Error::PreconditionViolated("precision must be at least 1".into()));
        }
        let m = p_pow(p, prec);
        let u = mod_pos(unit, &m);
        if (&u % p).is_zero() {
            return Err(Error::Parse(format!("unit {unit} is divisible by {p}")));
        }
        Ok(PAdic::from_parts_unchecked(p, v, u, prec))
    }

    /// `p^shift * n` with `prec` relative digits.
    pub fn from_bigint_shifted(p: u32, n: &BigInt, shift: i64, prec: u32) -> Self {
        if n.is_zero() {
            return PAdic::zero(p);
        }
        let (k, m) = strip_p(p, n.magnitude());
        let m = BigInt::from_biguint(n.sign(), m);
        let unit = mod_pos(&m, &p_pow(p, prec));
        PAdic::from_parts_unchecked(p, shift + k as i64, unit, prec)
    }

    pub fn from_bigint(p: u32, n: &BigInt, prec: u32) -> Self {
        PAdic::from_bigint_shifted(p, n, 0, prec)
    }

    pub fn from_int(p: u32, n: i64, prec: u32) -> Self {
        PAdic::from_bigint(p, &BigInt::from(n), prec)
    }

    pub fn from_rational(p: u32, r: &BigRational, prec: u32) -> Self {
        if r.is_zero() {
            return PAdic::zero(p);
        }
        let num = PAdic::from_bigint(p, r.numer(), prec);
        let den = PAdic::from_bigint(p, r.denom(), prec);
        num.div(&den).expect("nonzero denominator")
    }

    /// Parses an integer or `num/den`.
    pub fn parse_rational(p: u32, s: &str, prec: u32) -> Result<Self> {
        let s = s.trim();
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
                let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))?),
        };
        Ok(PAdic::from_rational(p, &r, prec))
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Exact)
    }

    /// Exact zero or indistinguishable from zero.
    pub fn is_zero(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    pub fn is_bounded_zero(&self) -> bool {
        matches!(self.repr, Repr::Bounded { .. })
    }

    /// Valuation when determined.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Unit { v, .. } => Some(v),
            _ => None,
        }
    }

    /// Lower bound on the valuation; `None` means `+∞` (exact zero).
    pub fn valuation_lower_bound(&self) -> Option<i64> {
        match self.repr {
            Repr::Exact => None,
            Repr::Bounded { abs } => Some(abs),
            Repr::Unit { v, .. } => Some(v),
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Number of known unit digits.
    pub fn rel_precision(&self) -> Option<u32> {
        match self.repr {
            Repr::Unit { prec, .. } => Some(prec),
            _ => None,
        }
    }

    /// The value is known modulo `p^abs`; `None` for exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match self.repr {
            Repr::Exact => None,
            Repr::Bounded { abs } => Some(abs),
            Repr::Unit { v, prec, .. } => Some(v + prec as i64),
        }
    }

    /// Unit as a signed representative in `(-p^N/2, p^N/2]`.
    pub fn signed_unit(&self) -> Option<BigInt> {
        match &self.repr {
            Repr::Unit { unit, prec, .. } => {
                let m = p_pow(self.p, *prec);
                let u = BigInt::from_biguint(Sign::Plus, unit.clone());
                let mi = BigInt::from_biguint(Sign::Plus, (*m).clone());
                if &u * 2 > mi {
                    Some(u - mi)
                } else {
                    Some(u)
                }
            }
            _ => None,
        }
    }

    /// Rational representative `p^v * signed_unit`; zero for zero states.
    pub fn to_rational(&self) -> BigRational {
        match (&self.repr, self.signed_unit()) {
            (Repr::Unit { v, .. }, Some(u)) => {
                let pv = BigInt::from_biguint(Sign::Plus, (*p_pow(self.p, v.unsigned_abs() as u32)).clone());
                if *v >= 0 {
                    BigRational::from_integer(u * pv)
                } else {
                    BigRational::new(u, pv)
                }
            }
            _ => BigRational::zero(),
        }
    }

    /// Shortest rational `a/b` congruent to the unit, scaled by `p^v`.
    pub fn to_small_rational(&self) -> Option<BigRational> {
        let Repr::Unit { v, unit, prec } = &self.repr else {
            return if self.is_exact_zero() { Some(BigRational::zero()) } else { None };
        };
        let m = BigInt::from_biguint(Sign::Plus, (*p_pow(self.p, *prec)).clone());
        let bound = (&m / 2u32).sqrt();
        let (mut r0, mut r1) = (m.clone(), BigInt::from_biguint(Sign::Plus, unit.clone()));
        let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
        while r1 > bound {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let s2 = &s0 - &q * &s1;
            r0 = std::mem::replace(&mut r1, r2);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if s1.is_zero() || s1.magnitude() > bound.magnitude() || !s1.gcd(&m).is_one() {
            return None;
        }
        let pv = BigRational::from_integer(BigInt::from(self.p)).pow(*v as i32);
        Some(BigRational::new(r1, s1) * pv)
    }

    /// Small integer value when the representative is an integer fitting `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        let r = self.to_rational();
        if r.is_integer() {
            r.to_integer().to_i64()
        } else {
            None
        }
    }

    /// `|x|` when determined.
    pub fn norm(&self) -> Result<NormValue> {
        match self.repr {
            Repr::Exact => Ok(NormValue::ZERO),
            Repr::Bounded { abs } => Err(Error::IndeterminateValuation { at_least: abs }),
            Repr::Unit { v, .. } => Ok(NormValue::from_valuation(v)),
        }
    }

    /// An upper bound for `|x|` that is exact whenever the valuation is.
    pub fn norm_bound(&self) -> NormValue {
        match self.repr {
            Repr::Exact => NormValue::ZERO,
            Repr::Bounded { abs } => NormValue::from_valuation(abs),
            Repr::Unit { v, .. } => NormValue::from_valuation(v),
        }
    }

    /// `|x| < 1` (strict) or `|x| <= 1`; undecidable bounded zeros are an error.
    pub fn is_integral(&self, strict: bool) -> Result<bool> {
        let need = if strict { 1 } else { 0 };
        match self.repr {
            Repr::Exact => Ok(true),
            Repr::Unit { v, .. } => Ok(v >= need),
            Repr::Bounded { abs } if abs >= need => Ok(true),
            Repr::Bounded { abs } => Err(Error::IndeterminateValuation { at_least: abs }),
        }
    }

    /// Drops digits below `p^abs`.
    pub fn reduce_abs(&self, abs: i64) -> PAdic {
        match &self.repr {
            Repr::Exact => PAdic::bounded_zero(self.p, abs),
            Repr::Bounded { abs: a } => PAdic::bounded_zero(self.p, (*a).min(abs)),
            Repr::Unit { v, unit, prec } => {
                if *v >= abs {
                    return PAdic::bounded_zero(self.p, abs);
                }
                let keep = ((abs - v) as u64).min(*prec as u64) as u32;
                if keep == *prec {
                    return self.clone();
                }
                let u = unit % &*p_pow(self.p, keep);
                PAdic::from_parts_unchecked(self.p, *v, u, keep)
            }
        }
    }

    /// Caps the relative precision at `prec` digits.
    pub fn with_rel_precision(&self, prec: u32) -> PAdic {
        match self.repr {
            Repr::Unit { v, .. } => self.reduce_abs(v + prec as i64),
            _ => self.clone(),
        }
    }

    /// `self * p^k`, exact.
    pub fn shift(&self, k: i64) -> PAdic {
        match &self.repr {
            Repr::Exact => self.clone(),
            Repr::Bounded { abs } => PAdic::bounded_zero(self.p, abs + k),
            Repr::Unit { v, unit, prec } => PAdic::from_parts_unchecked(self.p, v + k, unit.clone(), *prec),
        }
    }

    pub fn neg(&self) -> PAdic {
        match &self.repr {
            Repr::Unit { v, unit, prec } => {
                let m = p_pow(self.p, *prec);
                PAdic::from_parts_unchecked(self.p, *v, &*m - unit, *prec)
            }
            _ => self.clone(),
        }
    }

    pub fn add(&self, o: &PAdic) -> PAdic {
        assert_eq!(self.p, o.p, "prime mismatch");
        let p = self.p;
        match (&self.repr, &o.repr) {
            (Repr::Exact, _) => o.clone(),
            (_, Repr::Exact) => self.clone(),
            (Repr::Bounded { abs: a }, Repr::Bounded { abs: b }) => PAdic::bounded_zero(p, (*a).min(*b)),
            (Repr::Bounded { abs }, Repr::Unit { .. }) => o.reduce_abs(*abs),
            (Repr::Unit { .. }, Repr::Bounded { abs }) => self.reduce_abs(*abs),
            (Repr::Unit { v: v1, unit: u1, prec: r1 }, Repr::Unit { v: v2, unit: u2, prec: r2 }) => {
                let abs = (v1 + *r1 as i64).min(v2 + *r2 as i64);
                let vmin = (*v1).min(*v2);
                if abs <= vmin {
                    return PAdic::bounded_zero(p, abs);
                }
                let digits = (abs - vmin) as u32;
                let m = p_pow(p, digits);
                let term = |v: i64, u: &BigUint| -> BigUint {
                    let d = v - vmin;
                    if d >= digits as i64 {
                        BigUint::zero()
                    } else if d == 0 {
                        u % &*m
                    } else {
                        (u * &*p_pow(p, d as u32)) % &*m
                    }
                };
                let s = (term(*v1, u1) + term(*v2, u2)) % &*m;
                if s.is_zero() {
                    return PAdic::bounded_zero(p, abs);
                }
                let (t, s) = strip_p(p, &s);
                PAdic::from_parts_unchecked(p, vmin + t as i64, s, digits - t)
            }
        }
    }

    pub fn sub(&self, o: &PAdic) -> PAdic {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &PAdic) -> PAdic {
        assert_eq!(self.p, o.p, "prime mismatch");
        let p = self.p;
        match (&self.repr, &o.repr) {
            (Repr::Exact, _) | (_, Repr::Exact) => PAdic::zero(p),
            (Repr::Bounded { abs: a }, Repr::Bounded { abs: b }) => PAdic::bounded_zero(p, a + b),
            (Repr::Bounded { abs }, Repr::Unit { v, .. }) | (Repr::Unit { v, .. }, Repr::Bounded { abs }) => {
                PAdic::bounded_zero(p, abs + v)
            }
            (Repr::Unit { v: v1, unit: u1, prec: r1 }, Repr::Unit { v: v2, unit: u2, prec: r2 }) => {
                let prec = (*r1).min(*r2);
                let u = (u1 * u2) % &*p_pow(p, prec);
                PAdic::from_parts_unchecked(p, v1 + v2, u, prec)
            }
        }
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, n: i64) -> PAdic {
        if n == 0 {
            return PAdic::zero(self.p);
        }
        match &self.repr {
            Repr::Exact => self.clone(),
            Repr::Bounded { abs } => PAdic::bounded_zero(self.p, abs + val_int(self.p, &BigInt::from(n)) as i64),
            Repr::Unit { prec, .. } => self.mul(&PAdic::from_int(self.p, n, *prec)),
        }
    }

    /// Division by an exact nonzero integer.
    pub fn div_int(&self, n: i64) -> Result<PAdic> {
        if n == 0 {
            return Err(Error::DivisionByZero);
        }
        match &self.repr {
            Repr::Exact => Ok(self.clone()),
            Repr::Bounded { abs } => Ok(PAdic::bounded_zero(self.p, abs - val_int(self.p, &BigInt::from(n)) as i64)),
            Repr::Unit { prec, .. } => self.div(&PAdic::from_int(self.p, n, *prec)),
        }
    }

    pub fn inv(&self) -> Result<PAdic> {
        match &self.repr {
            Repr::Unit { v, unit, prec } => {
                let u = inv_mod(unit, &p_pow(self.p, *prec));
                Ok(PAdic::from_parts_unchecked(self.p, -v, u, *prec))
            }
            _ => Err(Error::DivisionByZero),
        }
    }

    pub fn div(&self, o: &PAdic) -> Result<PAdic> {
        Ok(self.mul(&o.inv()?))
    }

    /// Integer power; negative exponents need an invertible base.
    pub fn pow(&self, e: i64) -> Result<PAdic> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        match &self.repr {
            Repr::Unit { v, unit, prec } => {
                let u = unit.modpow(&BigUint::from(e as u64), &p_pow(self.p, *prec));
                Ok(PAdic::from_parts_unchecked(self.p, v * e, u, *prec))
            }
            _ if e == 0 => Ok(PAdic::one(self.p, DEFAULT_PREC)),
            Repr::Exact => Ok(self.clone()),
            Repr::Bounded { abs } => Ok(PAdic::bounded_zero(self.p, abs * e)),
        }
    }

    /// `x^(p^k)`.
    pub fn pow_p(&self, k: u32) -> PAdic {
        let e = &*p_pow(self.p, k);
        match &self.repr {
            Repr::Unit { v, unit, prec } => {
                let u = unit.modpow(e, &p_pow(self.p, *prec));
                let vv = e.to_i64().map(|e| v.saturating_mul(e)).unwrap_or(if *v >= 0 { i64::MAX / 4 } else { i64::MIN / 4 });
                PAdic::from_parts_unchecked(self.p, vv, u, *prec)
            }
            Repr::Exact => self.clone(),
            Repr::Bounded { abs } => {
                let a = e.to_i64().map(|e| abs.saturating_mul(e)).unwrap_or(i64::MAX / 4);
                PAdic::bounded_zero(self.p, if *abs > 0 { a } else { *abs })
            }
        }
    }

    /// True when the difference is indistinguishable from zero.
    pub fn agrees_with(&self, o: &PAdic) -> bool {
        self.sub(o).is_zero()
    }

    /// True when the two values provably agree modulo `p^abs`.
    pub fn agrees_mod(&self, o: &PAdic, abs: i64) -> bool {
        self.sub(o).valuation_lower_bound().is_none_or(|v| v >= abs)
    }
}

fn check_prime(p: u32) -> Result<()> {
    if p < 2 || !(2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
        return Err(Error::PreconditionViolated(format!("{p} is not a prime")));
    }
    Ok(())
}

pub fn validate_prime(p: u32) -> Result<u32> {
    check_prime(p).map(|_| p)
}

/// Operations exposed by [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Pow,
}

/// Second operand of [`arith`].
#[derive(Clone, Debug)]
pub enum Operand {
    Value(PAdic),
    Int(i64),
}

/// Checked arithmetic: prime mismatches, inverses of zero and sums that
/// cancel below the precision floor are reported as errors.
pub fn arith(op: ArithOp, x: &PAdic, y: &Operand) -> Result<PAdic> {
    let yv = |prec: u32| match y {
        Operand::Value(v) => v.clone(),
        Operand::Int(n) => PAdic::from_int(x.p, *n, prec),
    };
    let prec = x.rel_precision().unwrap_or(DEFAULT_PREC);
    if let Operand::Value(v) = y {
        if v.p != x.p {
            return Err(Error::PrimeMismatch(x.p, v.p));
        }
    }
    let r = match op {
        ArithOp::Add => x.add(&yv(prec)),
        ArithOp::Sub => x.sub(&yv(prec)),
        ArithOp::Mul => x.mul(&yv(prec)),
        ArithOp::Div => x.div(&yv(prec))?,
        ArithOp::Inv => x.inv()?,
        ArithOp::Pow => match y {
            Operand::Int(e) => x.pow(*e)?,
            Operand::Value(v) => x.pow(v.to_i64().ok_or_else(|| Error::Parse("exponent must be an integer".into()))?)?,
        },
    };
    if r.is_bounded_zero() && matches!(op, ArithOp::Add | ArithOp::Sub) {
        return Err(Error::PrecisionExhausted(format!("cancellation leaves {r}")));
    }
    Ok(r)
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        match &self.repr {
            Repr::Exact => write!(f, "0"),
            Repr::Bounded { abs } => write!(f, "O({p}^{abs})"),
            Repr::Unit { v, unit, prec } => write!(f, "{p}^{v} * {unit} :: O({p}^{})", v + *prec as i64),
        }
    }
}

impl std::str::FromStr for PAdic {
    type Err = Error;

    /// Parses the display form `p^v * u :: O(p^(v+N))`, `O(p^A)` or `p:0`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("cannot parse p-adic {s:?}"));
        let s = s.trim();
        let parse_pow = |t: &str| -> Result<(u32, i64)> {
            let t = t.trim().trim_start_matches("O(").trim_end_matches(')');
            let (b, e) = t.split_once('^').ok_or_else(bad)?;
            let e = e.trim().trim_start_matches('(').trim_end_matches(')');
            Ok((b.trim().parse().map_err(|_| bad())?, e.trim().parse().map_err(|_| bad())?))
        };
        if let Some(rest) = s.strip_prefix("O(") {
            let (p, a) = parse_pow(rest)?;
            check_prime(p)?;
            return Ok(PAdic::bounded_zero(p, a));
        }
        if let Some(p) = s.strip_suffix(":0") {
            let p = p.trim().parse().map_err(|_| bad())?;
            check_prime(p)?;
            return Ok(PAdic::zero(p));
        }
        let (lhs, rhs) = s.split_once("::").ok_or_else(bad)?;
        let (pv, u) = lhs.split_once('*').ok_or_else(bad)?;
        let (p, v) = parse_pow(pv)?;
        let (p2, abs) = parse_pow(rhs)?;
        if p != p2 || abs <= v {
            return Err(bad());
        }
        let u: BigInt = u.trim().parse().map_err(|_| bad())?;
        PAdic::from_parts(p, v, &u, (abs - v) as u32)
    }
}

/// Shared helper: `p^k` as a p-adic with the given precision.
pub fn p_power(p: u32, k: i64, prec: u32) -> PAdic {
    PAdic::one(p, prec).shift(k)
}

/// True for integers prime to `p`.
pub fn coprime(n: i64, p: u32) -> bool {
    n.rem_euclid(p as i64) != 0
}

/// Valuation of a nonzero rational.
pub fn rational_valuation(p: u32, r: &BigRational) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    Some(val_int(p, r.numer()) as i64 - val_int(p, r.denom()) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pa(p: u32, n: i64) -> PAdic {
        PAdic::from_int(p, n, 5)
    }

    #[test]
    fn add_one_one_base_two() {
        let s = pa(2, 1).add(&pa(2, 1));
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.unit(), Some(&BigUint::from(1u32)));
        assert_eq!(s.rel_precision(), Some(4));
        assert_eq!(s.abs_precision(), Some(5));
    }

    #[test]
    fn mul_twelve_by_one() {
        let m = pa(2, 12).mul(&pa(2, 1));
        assert_eq!(m.valuation(), Some(2));
        assert_eq!(m.unit(), Some(&BigUint::from(3u32)));
    }

    #[test]
    fn inverse_of_two_mod_27() {
        let i = PAdic::from_int(3, 2, 3).inv().unwrap();
        assert_eq!(i.unit(), Some(&BigUint::from(14u32)));
        assert_eq!(i.valuation(), Some(0));
    }

    #[test]
    fn norms() {
        assert_eq!(pa(2, 6).norm().unwrap(), NormValue::from_valuation(1));
        assert_eq!(pa(3, 1).norm().unwrap(), NormValue::one());
        assert_eq!(PAdic::zero(2).norm().unwrap(), NormValue::ZERO);
        let c = pa(2, 3).sub(&pa(2, 3));
        assert_eq!(c.norm(), Err(Error::IndeterminateValuation { at_least: 5 }));
    }

    #[test]
    fn cancellation_is_reported_by_arith() {
        let r = arith(ArithOp::Sub, &pa(5, 7), &Operand::Int(7));
        assert!(matches!(r, Err(Error::PrecisionExhausted(_))));
        assert!(matches!(arith(ArithOp::Inv, &PAdic::zero(5), &Operand::Int(0)), Err(Error::DivisionByZero)));
        let c = PAdic::from_int(3, 1, 4);
        assert!(matches!(arith(ArithOp::Add, &c, &Operand::Value(PAdic::one(5, 4))), Err(Error::PrimeMismatch(3, 5))));
    }

    #[test]
    fn rationals_and_negatives() {
        let x = PAdic::parse_rational(3, "-1/6", 10).unwrap();
        assert_eq!(x.valuation(), Some(-1));
        assert_eq!(x.to_small_rational(), Some(BigRational::new((-1).into(), 6.into())));
        assert!(PAdic::from_rational(3, &x.to_rational(), 10).agrees_with(&x));
        let back = x.mul_int(-6);
        assert_eq!(back.to_i64(), Some(1));
        assert_eq!(pa(7, -5).to_i64(), Some(-5));
    }

    #[test]
    fn display_roundtrip() {
        for x in [pa(2, 12), PAdic::zero(3), PAdic::bounded_zero(5, 4), PAdic::parse_rational(3, "5/9", 6).unwrap()] {
            let s = x.to_string();
            let y: PAdic = s.parse().unwrap_or_else(|_| PAdic::zero(x.prime()));
            if x.is_exact_zero() {
                assert_eq!(s, "0");
            } else {
                assert_eq!(x, y, "{s}");
            }
        }
        assert_eq!(pa(2, 12).to_string(), "2^2 * 3 :: O(2^7)");
    }

    #[test]
    fn strict_integrality_on_bounded_zero() {
        assert_eq!(PAdic::bounded_zero(2, 3).is_integral(true), Ok(true));
        assert!(PAdic::bounded_zero(2, 0).is_integral(true).is_err());
        assert_eq!(PAdic::bounded_zero(2, 0).is_integral(false), Ok(true));
    }

    #[test]
    fn powers() {
        let x = PAdic::from_int(3, 2, 6);
        assert_eq!(x.pow(5).unwrap().to_i64(), Some(32));
        assert_eq!(x.pow_p(2).to_i64(), Some(512 - 729));
        assert_eq!(x.pow(-1).unwrap().mul(&x).to_i64(), Some(1));
    }
}
