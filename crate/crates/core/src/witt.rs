//! Finite-length p-typical Witt vectors and their ghost coordinates.

use crate::error::{Error, Result};
use crate::norm::{Exponent, NormValue};
use crate::padic::{p_pow, PAdic};
use num::ToPrimitive;

/// `(λ_0, …, λ_L)` over `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    prime: u32,
    components: Vec<PAdic>,
}

/// Ghost components `⟨φ_0, …, φ_L⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhantomVector {
    prime: u32,
    components: Vec<PAdic>,
}

fn check_components(p: u32, c: &[PAdic]) -> Result<()> {
    if c.is_empty() {
        return Err(Error::PreconditionViolated("Witt vectors have length at least 1".into()));
    }
    match c.iter().find(|x| x.prime() != p) {
        Some(x) => Err(Error::PrimeMismatch(p, x.prime())),
        None => Ok(()),
    }
}

impl WittVector {
    pub fn new(prime: u32, components: Vec<PAdic>) -> Result<Self> {
        check_components(prime, &components)?;
        Ok(WittVector { prime, components })
    }

    pub fn zero(prime: u32, len: usize) -> Self {
        WittVector { prime, components: vec![PAdic::zero(prime); len.max(1)] }
    }

    /// `(a, 0, 0, …)`.
    pub fn teichmuller(a: PAdic, len: usize) -> Self {
        let p = a.prime();
        let mut components = vec![PAdic::zero(p); len.max(1)];
        components[0] = a;
        WittVector { prime: p, components }
    }

    pub fn from_ints(prime: u32, xs: &[i64], prec: u32) -> Result<Self> {
        WittVector::new(prime, xs.iter().map(|&x| PAdic::from_int(prime, x, prec)).collect())
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[PAdic] {
        &self.components
    }

    pub fn component(&self, m: usize) -> &PAdic {
        &self.components[m]
    }

    pub fn set_component(&mut self, m: usize, x: PAdic) {
        self.components[m] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(PAdic::is_zero)
    }

    pub fn ghost(&self) -> PhantomVector {
        ghost(self)
    }

    /// Per-slot integrality verdicts (`|λ_m| < 1` when `strict`, else `≤ 1`).
    pub fn integrality(&self, strict: bool) -> Result<Vec<bool>> {
        integrality(self, strict)
    }

    /// `max_j |p|^j |λ_j|^{p^{m-j}}`, the a priori bound on `|φ_m|`.
    pub fn phantom_bound(&self, m: usize) -> NormValue {
        let p = self.prime as i64;
        (0..=m.min(self.len() - 1))
            .map(|j| {
                let lam = self.components[j].norm_bound();
                let e = Exponent::from_integer(p.pow((m - j) as u32));
                lam.powr(e).unwrap_or(NormValue::ZERO).mul(NormValue::from_valuation(j as i64))
            })
            .max()
            .unwrap_or(NormValue::ZERO)
    }

    /// Truncates or zero-pads to `len` slots.
    pub fn resized(&self, len: usize) -> WittVector {
        let mut c = self.components.clone();
        c.resize(len.max(1), PAdic::zero(self.prime));
        WittVector { prime: self.prime, components: c }
    }

    /// Componentwise agreement within precision.
    pub fn agrees_with(&self, other: &WittVector) -> bool {
        self.prime == other.prime
            && self.len() == other.len()
            && self.components.iter().zip(&other.components).all(|(a, b)| a.agrees_with(b))
    }
}

impl PhantomVector {
    pub fn new(prime: u32, components: Vec<PAdic>) -> Result<Self> {
        check_components(prime, &components)?;
        Ok(PhantomVector { prime, components })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[PAdic] {
        &self.components
    }

    pub fn unghost(&self) -> Result<WittVector> {
        unghost(self)
    }

    pub fn agrees_with(&self, other: &PhantomVector) -> bool {
        self.prime == other.prime
            && self.len() == other.len()
            && self.components.iter().zip(&other.components).all(|(a, b)| a.agrees_with(b))
    }
}

/// `φ_m = Σ_{i≤m} p^i λ_i^{p^{m-i}}`.
pub fn ghost(lam: &WittVector) -> PhantomVector {
    let p = lam.prime;
    let comps = (0..lam.len()).map(|m| partial_ghost(lam, m, m + 1)).collect();
    PhantomVector { prime: p, components: comps }
}

/// `Σ_{i<upto} p^i λ_i^{p^{m-i}}`.
fn partial_ghost(lam: &WittVector, m: usize, upto: usize) -> PAdic {
    let p = lam.prime;
    let mut acc = PAdic::zero(p);
    for i in 0..upto {
        let c = &lam.components[i];
        if c.is_exact_zero() {
            continue;
        }
        acc = acc.add(&c.pow_p((m - i) as u32).shift(i as i64));
    }
    acc
}

/// Triangular solve `λ_m = (φ_m - Σ_{i<m} p^i λ_i^{p^{m-i}}) / p^m`.
pub fn unghost(phi: &PhantomVector) -> Result<WittVector> {
    let p = phi.prime;
    let mut out = WittVector { prime: p, components: Vec::with_capacity(phi.len()) };
    for m in 0..phi.len() {
        out.components.push(PAdic::zero(p));
        let rest = partial_ghost(&out, m, m);
        let lam = phi.components[m].sub(&rest).shift(-(m as i64));
        if let Some(abs) = lam.abs_precision() {
            if lam.is_bounded_zero() && abs <= 0 {
                return Err(Error::PrecisionExhausted(format!("Witt slot {m} retains no digits")));
            }
        }
        out.components[m] = lam;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WittOp {
    Add,
    Mul,
}

/// Ring operations transported through ghost coordinates.
pub fn witt_ring(op: WittOp, x: &WittVector, y: &WittVector) -> Result<WittVector> {
    if x.prime != y.prime {
        return Err(Error::PrimeMismatch(x.prime, y.prime));
    }
    if x.len() != y.len() {
        return Err(Error::PreconditionViolated(format!("lengths differ: {} vs {}", x.len(), y.len())));
    }
    let gx = ghost(x);
    let gy = ghost(y);
    let comps = gx
        .components
        .iter()
        .zip(&gy.components)
        .map(|(a, b)| match op {
            WittOp::Add => a.add(b),
            WittOp::Mul => a.mul(b),
        })
        .collect();
    unghost(&PhantomVector { prime: x.prime, components: comps })
}

/// Per-slot `|λ_m| < 1` (strict) or `|λ_m| ≤ 1`.
pub fn integrality(lam: &WittVector, strict: bool) -> Result<Vec<bool>> {
    lam.components.iter().map(|c| c.is_integral(strict)).collect()
}

/// Largest `m` with `n p^m ≤ bound`, or `None` when `n > bound`.
pub fn column_height(p: u32, n: u64, bound: u64) -> Option<usize> {
    if n == 0 || n > bound {
        return None;
    }
    let mut m = 0;
    while p_pow(p, m + 1).to_u64().is_some_and(|pm| n.saturating_mul(pm) <= bound) {
        m += 1;
    }
    Some(m as usize)
}
