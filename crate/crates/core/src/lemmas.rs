//! Brute-force checks of the numerical lemmas in exact exponent arithmetic.
//!
//! Everything here works on integers and rationals directly and shares no
//! code with the p-adic types.  Exponents `e` stand for norms `|p|^e`.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norm::Exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[allow(non_camel_case_types)]
pub enum LemmaId {
    /// `ρ^{p^j}/|p^j|` dominates `ρ^r/|r|`.
    L3_0_9,
    /// `|k!/n!|^{1/(k-n)} ≥ |p|^{l(n)+1}`.
    L3_0_10,
    /// `(q^α - 1)/(q - 1) → α`.
    L3_0_12,
    /// `|q^d - 1| = |p^{m-i}| |q - 1|^{p^i}`.
    L3_0_13,
    /// `|d_q^k/[k]_q! (f)|_ρ ≤ ρ^{-k} |f|_ρ`.
    L5_1_2,
    /// `|h^- + h^+ + h^- h^+| = sup(|h^-|, |h^+|)`.
    L5_3_3,
    /// `|n!| = ω^{n - S_n}` against Legendre's formula.
    Legendre,
}

impl LemmaId {
    pub const ALL: [LemmaId; 7] =
        [LemmaId::L3_0_9, LemmaId::L3_0_10, LemmaId::L3_0_12, LemmaId::L3_0_13, LemmaId::L5_1_2, LemmaId::L5_3_3, LemmaId::Legendre];

    pub fn parse(s: &str) -> Option<LemmaId> {
        LemmaId::ALL.into_iter().find(|l| l.name().eq_ignore_ascii_case(s))
    }

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::L3_0_9 => "L3_0_9",
            LemmaId::L3_0_10 => "L3_0_10",
            LemmaId::L3_0_12 => "L3_0_12",
            LemmaId::L3_0_13 => "L3_0_13",
            LemmaId::L5_1_2 => "L5_1_2",
            LemmaId::L5_3_3 => "L5_3_3",
            LemmaId::Legendre => "Legendre",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of a lemma run.  Fields a lemma does not use are ignored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaRange {
    pub which: LemmaId,
    pub p: u32,
    /// `j` of L3_0_9 and L3_0_13.
    pub j: u32,
    /// `ρ = |p|^rho` for L3_0_9 and L5_1_2.
    #[serde(serialize_with = "ser_exponent")]
    pub rho: Exponent,
    pub n_min: u64,
    pub n_max: u64,
    pub k_min: u64,
    pub k_max: u64,
    pub r_max: u64,
    pub m_max: u32,
    /// Values of `q` (L3_0_13, L5_1_2).
    pub q: Vec<i64>,
    /// Values of `α` (L3_0_12, L3_0_13).
    pub alpha: Vec<i64>,
    pub samples: usize,
    pub seed: u64,
}

fn ser_exponent<S: serde::Serializer>(e: &Exponent, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

impl LemmaRange {
    /// The shipped default range for `which` at `p`.
    pub fn default_for(which: LemmaId, p: u32) -> Self {
        let pi = p as i64;
        let base = LemmaRange {
            which,
            p,
            j: 0,
            rho: Exponent::from_integer(2),
            n_min: 1,
            n_max: 100,
            k_min: 1,
            k_max: 1000,
            r_max: 1000,
            m_max: 6,
            q: Vec::new(),
            alpha: Vec::new(),
            samples: 50,
            seed: 0,
        };
        match which {
            LemmaId::L3_0_9 => base,
            LemmaId::L3_0_10 => base,
            LemmaId::L3_0_12 => LemmaRange { k_min: 2, k_max: 8, alpha: (-6..=6).collect(), ..base },
            LemmaId::L3_0_13 => {
                let t0 = if p == 2 { 2 } else { 1 };
                LemmaRange { q: (t0..t0 + 3).map(|t| 1 + pi.pow(t)).collect(), alpha: (-7..=7).filter(|a| a % pi != 0).collect(), ..base }
            }
            LemmaId::L5_1_2 => LemmaRange { rho: Exponent::zero(), k_min: 1, k_max: 16, q: vec![1 + pi, 1 + pi * pi], ..base },
            LemmaId::L5_3_3 => LemmaRange { samples: 1000, ..base },
            LemmaId::Legendre => LemmaRange { n_max: 10_000, ..base },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseVerdict {
    Holds,
    Counterexample,
}

/// Claimed relation between the norms `|p|^lhs` and `|p|^rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "<")]
    Less,
    #[serde(rename = ">=")]
    GreaterEq,
    #[serde(rename = "<=")]
    LessEq,
    #[serde(rename = "=")]
    Equal,
}

impl Relation {
    /// Whether `|p|^lhs  rel  |p|^rhs`; `None` exponents are the zero norm.
    fn holds(self, lhs: Option<Exponent>, rhs: Option<Exponent>) -> bool {
        use std::cmp::Ordering::*;
        let ord = match (lhs, rhs) {
            (None, None) => Equal,
            (None, Some(_)) => Less,
            (Some(_), None) => Greater,
            (Some(a), Some(b)) => b.cmp(&a),
        };
        match self {
            Relation::Greater => ord == Greater,
            Relation::Less => ord == Less,
            Relation::GreaterEq => ord != Less,
            Relation::LessEq => ord != Greater,
            Relation::Equal => ord == Equal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Case {
    pub case: String,
    pub lhs_exponent: String,
    pub rhs_exponent: String,
    pub relation: Relation,
    pub verdict: CaseVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub which: LemmaId,
    pub range: LemmaRange,
    pub cases: Vec<Case>,
    pub counterexamples: usize,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.counterexamples == 0
    }
}

fn show(e: Option<Exponent>) -> String {
    e.map_or_else(|| "zero".to_string(), |e| e.to_string())
}

struct Cases(Vec<Case>);

impl Cases {
    fn push(&mut self, case: String, lhs: Option<Exponent>, rel: Relation, rhs: Option<Exponent>) {
        let verdict = if rel.holds(lhs, rhs) { CaseVerdict::Holds } else { CaseVerdict::Counterexample };
        self.0.push(Case { case, lhs_exponent: show(lhs), rhs_exponent: show(rhs), relation: rel, verdict });
    }
}

fn ex(n: i64) -> Exponent {
    Exponent::from_integer(n)
}

fn vp_u64(p: u64, mut n: u64) -> i64 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn vp_big(p: u32, n: &BigInt) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

fn vp_rat(p: u32, r: &BigRational) -> Option<i64> {
    Some(vp_big(p, r.numer())? - vp_big(p, r.denom())?)
}

fn digit_sum(p: u64, mut n: u64) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// `v_p(n!) = (n - S_n)/(p - 1)`.
fn vp_factorial(p: u64, n: u64) -> Exponent {
    Exponent::new((n - digit_sum(p, n)) as i64, p as i64 - 1)
}

/// `[log_p n]`.
fn floor_log(p: u64, n: u64) -> i64 {
    let mut l = 0;
    let mut x = n;
    while x >= p {
        x /= p;
        l += 1;
    }
    l
}

/// `v_p(q^d - 1)`, exact as long as it stays below `cap`.
fn vp_q_pow_minus_one(p: u32, q: i64, d: u64, cap: u32) -> Option<i64> {
    let modulus = BigInt::from(p).pow(cap);
    let x = BigInt::from(q).mod_floor(&modulus).modpow(&BigInt::from(d), &modulus);
    let y = (x - BigInt::one()).mod_floor(&modulus);
    if y.is_zero() {
        None
    } else {
        vp_big(p, &y)
    }
}

fn omega_exp(p: u32) -> Exponent {
    Exponent::new(1, p as i64 - 1)
}

/// Runs one lemma over its range.
pub fn run(range: &LemmaRange) -> Result<LemmaReport> {
    if range.p < 2 || !(2..range.p).all(|d| !range.p.is_multiple_of(d)) {
        return Err(Error::PreconditionViolated(format!("{} is not prime", range.p)));
    }
    let mut cases = Cases(Vec::new());
    match range.which {
        LemmaId::L3_0_9 => l3_0_9(range, &mut cases)?,
        LemmaId::L3_0_10 => l3_0_10(range, &mut cases),
        LemmaId::L3_0_12 => l3_0_12(range, &mut cases)?,
        LemmaId::L3_0_13 => l3_0_13(range, &mut cases)?,
        LemmaId::L5_1_2 => l5_1_2(range, &mut cases)?,
        LemmaId::L5_3_3 => l5_3_3(range, &mut cases),
        LemmaId::Legendre => legendre(range, &mut cases),
    }
    let counterexamples = cases.0.iter().filter(|c| c.verdict == CaseVerdict::Counterexample).count();
    Ok(LemmaReport { which: range.which, range: range.clone(), cases: cases.0, counterexamples })
}

fn l3_0_9(r: &LemmaRange, cases: &mut Cases) -> Result<()> {
    let p = r.p as i64;
    let e = r.rho;
    let w = omega_exp(r.p);
    let pj = p.checked_pow(r.j).ok_or_else(|| Error::PreconditionViolated("p^j overflows".into()))?;
    let placed = if r.j == 0 { e > w } else { w / ex(pj) < e && e < w / ex(pj / p) };
    if !placed {
        return Err(Error::HypothesisViolated(format!("rho = |p|^{e} is not placed for j = {}", r.j)));
    }
    let term = |k: i64, vk: i64| e * ex(k) - ex(vk);
    let top = term(pj, r.j as i64);
    for s in 1..=r.r_max {
        if s as i64 == pj {
            continue;
        }
        let rhs = term(s as i64, vp_u64(p as u64, s));
        cases.push(format!("r={s}"), Some(top), Relation::Greater, Some(rhs));
    }
    let mut k = 1u32;
    while p.checked_pow(k).is_some_and(|pk| pk as u64 <= r.r_max.max(pj as u64)) {
        let a = term(p.pow(k - 1), k as i64 - 1);
        let b = term(p.pow(k), k as i64);
        let rel = if k <= r.j { Relation::Less } else { Relation::Greater };
        cases.push(format!("chain k={k}"), Some(a), rel, Some(b));
        k += 1;
    }
    Ok(())
}

fn l3_0_10(r: &LemmaRange, cases: &mut Cases) {
    let p = r.p as u64;
    for n in r.n_min.max(1)..=r.n_max {
        let bound = ex(floor_log(p, n) + 1);
        let vn = vp_factorial(p, n);
        for k in (n + 1).max(r.k_min)..=r.k_max {
            let lhs = (vp_factorial(p, k) - vn) / ex((k - n) as i64);
            cases.push(format!("n={n} k={k}"), Some(lhs), Relation::GreaterEq, Some(bound));
        }
    }
}

fn legendre(r: &LemmaRange, cases: &mut Cases) {
    let p = r.p as u64;
    for n in r.n_min.max(1)..=r.n_max {
        let mut s = 0u64;
        let mut pk = p;
        while pk <= n {
            s += n / pk;
            pk = pk.saturating_mul(p);
        }
        cases.push(format!("n={n}"), Some(vp_factorial(p, n)), Relation::Equal, Some(ex(s as i64)));
    }
}

fn rat_pow(q: &BigInt, a: i64) -> BigRational {
    let x = BigRational::from_integer(q.pow(a.unsigned_abs() as u32));
    if a >= 0 {
        x
    } else {
        x.recip()
    }
}

fn l3_0_12(r: &LemmaRange, cases: &mut Cases) -> Result<()> {
    let p = r.p;
    if r.k_min < 1 {
        return Err(Error::HypothesisViolated("|q - 1| < 1 needs k >= 1".into()));
    }
    let threshold = floor_log(p as u64, 2) + 1;
    for &alpha in &r.alpha {
        let a = BigRational::from_integer(alpha.into());
        let mut prev: Option<Option<Exponent>> = None;
        for k in r.k_min..=r.k_max {
            let q = BigInt::from(1) + BigInt::from(p).pow(k as u32);
            let qm1 = BigRational::from_integer(&q - BigInt::one());
            let err = (rat_pow(&q, alpha) - BigRational::one()) / &qm1 - &a;
            let v = vp_rat(p, &err).map(ex);
            if let Some(pv) = prev {
                cases.push(format!("alpha={alpha} k={k} monotone"), v, Relation::LessEq, pv);
            }
            if k as i64 >= threshold {
                cases.push(format!("alpha={alpha} k={k} bound"), v, Relation::LessEq, Some(ex(k as i64)));
            }
            prev = Some(v);
        }
    }
    Ok(())
}

fn l3_0_13(r: &LemmaRange, cases: &mut Cases) -> Result<()> {
    let p = r.p;
    let w = omega_exp(p);
    for &q in &r.q {
        let t = vp_big(p, &(BigInt::from(q) - 1)).ok_or_else(|| Error::HypothesisViolated("q = 1".into()))?;
        let te = ex(t);
        let placed = if r.j == 0 {
            te > w
        } else {
            let pj = ex((p as i64).pow(r.j));
            w / pj < te && te < w * ex(p as i64) / pj
        };
        if !placed {
            return Err(Error::HypothesisViolated(format!(
                "|q - 1| = |p|^{t} for q = {q} is not placed for j = {}{}",
                r.j,
                if r.j > 0 { " (no rational q satisfies the j >= 1 placement)" } else { "" }
            )));
        }
        for &alpha in &r.alpha {
            if alpha % p as i64 == 0 {
                return Err(Error::HypothesisViolated(format!("alpha = {alpha} is divisible by p")));
            }
            for m in 0..=r.m_max {
                let d = alpha.unsigned_abs() * (p as u64).pow(m);
                let i = m.min(r.j) as i64;
                let rhs = ex(m as i64 - i) + te * ex((p as i64).pow(i as u32));
                let cap = (m as i64 + t * (p as i64).pow(i as u32) + 8) as u32;
                let lhs = vp_q_pow_minus_one(p, q, d, cap).map(ex);
                cases.push(format!("q={q} d={alpha}*{p}^{m}"), lhs, Relation::Equal, Some(rhs));
            }
        }
    }
    Ok(())
}

fn random_rational(rng: &mut ChaCha8Rng, p: u32, vmin: i64, vmax: i64) -> BigRational {
    let pi = p as i64;
    let unit = |rng: &mut ChaCha8Rng| loop {
        let u: i64 = rng.gen_range(-50..=50);
        if u != 0 && u % pi != 0 {
            return u;
        }
    };
    let v = rng.gen_range(vmin..=vmax);
    let num = BigInt::from(unit(rng));
    let den = BigInt::from(unit(rng).abs());
    let pv = BigRational::from_integer(BigInt::from(p).pow(v.unsigned_abs() as u32));
    let x = BigRational::new(num, den);
    if v >= 0 {
        x * pv
    } else {
        x / pv
    }
}

type Poly = BTreeMap<i64, BigRational>;

fn random_poly(rng: &mut ChaCha8Rng, p: u32, lo: i64, hi: i64, vmin: i64, vmax: i64) -> Poly {
    let mut f = Poly::new();
    let terms = rng.gen_range(1..=6);
    for _ in 0..terms {
        let i = rng.gen_range(lo..=hi);
        f.insert(i, random_rational(rng, p, vmin, vmax));
    }
    f
}

/// `min_i v(a_i) + i ρ`, the exponent of `|f|_ρ`.
fn gauss_exp(p: u32, f: &Poly, rho: Exponent) -> Option<Exponent> {
    f.iter().filter_map(|(i, c)| vp_rat(p, c).map(|v| ex(v) + rho * ex(*i))).min()
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (i, c) in b {
        let s = out.get(i).cloned().unwrap_or_else(BigRational::zero) + c;
        if s.is_zero() {
            out.remove(i);
        } else {
            out.insert(*i, s);
        }
    }
    out
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (i, x) in a {
        for (j, y) in b {
            let t = Poly::from([(i + j, x * y)]);
            out = poly_add(&out, &t);
        }
    }
    out
}

fn l5_1_2(r: &LemmaRange, cases: &mut Cases) -> Result<()> {
    let p = r.p;
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    for &q in &r.q {
        let t = vp_big(p, &(BigInt::from(q) - 1)).ok_or_else(|| Error::HypothesisViolated("q = 1".into()))?;
        if t < 1 {
            return Err(Error::HypothesisViolated(format!("|q - 1| < 1 fails for q = {q}")));
        }
        let cap = 64 + t as u32;
        let mut qint: BTreeMap<i64, i64> = BTreeMap::new();
        let mut vq = |m: i64| -> Result<i64> {
            if let Some(v) = qint.get(&m) {
                return Ok(*v);
            }
            let v = vp_q_pow_minus_one(p, q, m.unsigned_abs(), cap)
                .ok_or_else(|| Error::PreconditionViolated(format!("v(q^{m} - 1) exceeds the scan cap")))?
                - t;
            qint.insert(m, v);
            Ok(v)
        };
        for s in 0..r.samples {
            let f = random_poly(&mut rng, p, -8, 8, -3, 3);
            let fnorm = gauss_exp(p, &f, r.rho);
            for k in r.k_min.max(1)..=r.k_max {
                let k = k as i64;
                let mut fact = 0;
                for j in 1..=k {
                    fact += vq(j)?;
                }
                let mut lhs: Option<Exponent> = None;
                for (i, c) in &f {
                    if (0..k).any(|j| i - j == 0) {
                        continue;
                    }
                    let mut v = vp_rat(p, c).expect("nonzero coefficient") - fact;
                    for j in 0..k {
                        v += vq(i - j)?;
                    }
                    let e = ex(v) + r.rho * ex(i - k);
                    lhs = Some(lhs.map_or(e, |l| l.min(e)));
                }
                let rhs = fnorm.map(|n| n - r.rho * ex(k));
                cases.push(format!("q={q} f#{s} k={k}"), lhs, Relation::LessEq, rhs);
            }
        }
    }
    Ok(())
}

fn l5_3_3(r: &LemmaRange, cases: &mut Cases) {
    let p = r.p;
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    let zero = Exponent::zero();
    let mut s = 0;
    while s < r.samples {
        let hm = random_poly(&mut rng, p, -6, 6, 1, 5);
        let hp = random_poly(&mut rng, p, -6, 6, -3, 5);
        let (Some(em), Some(ep)) = (gauss_exp(p, &hm, zero), gauss_exp(p, &hp, zero)) else { continue };
        let sup = em.min(ep);
        if gauss_exp(p, &poly_add(&hm, &hp), zero) != Some(sup) {
            continue;
        }
        let total = poly_add(&poly_add(&hm, &hp), &poly_mul(&hm, &hp));
        cases.push(format!("pair#{s}"), gauss_exp(p, &total, zero), Relation::Equal, Some(sup));
        s += 1;
    }
}

/// All lemma suites at their default ranges for `p`.
pub fn run_defaults(p: u32) -> Result<Vec<LemmaReport>> {
    LemmaId::ALL.into_iter().map(|w| run(&LemmaRange::default_for(w, p))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l3_0_10_example() {
        let r = LemmaRange { n_min: 3, n_max: 3, k_max: 40, ..LemmaRange::default_for(LemmaId::L3_0_10, 2) };
        let rep = run(&r).unwrap();
        assert_eq!(rep.cases.len(), 37);
        assert!(rep.holds());
        assert!(rep.cases.iter().all(|c| c.rhs_exponent == "2"));
    }

    #[test]
    fn l3_0_13_example() {
        let r = LemmaRange { q: vec![5], alpha: vec![1], m_max: 1, ..LemmaRange::default_for(LemmaId::L3_0_13, 2) };
        let rep = run(&r).unwrap();
        let d2 = &rep.cases[1];
        assert_eq!(d2.lhs_exponent, "3");
        assert_eq!(d2.rhs_exponent, "3");
        assert!(rep.holds());
    }

    #[test]
    fn l3_0_9_example() {
        let r = LemmaRange { r_max: 1000, ..LemmaRange::default_for(LemmaId::L3_0_9, 2) };
        let rep = run(&r).unwrap();
        assert!(rep.holds());
        assert!(rep.cases.len() >= 999);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let r = LemmaRange { rho: Exponent::new(1, 2), ..LemmaRange::default_for(LemmaId::L3_0_9, 2) };
        assert!(matches!(run(&r), Err(Error::HypothesisViolated(_))));
        let r = LemmaRange { j: 1, ..LemmaRange::default_for(LemmaId::L3_0_13, 3) };
        assert!(matches!(run(&r), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn j_one_placement_for_rho() {
        let r = LemmaRange { j: 1, rho: Exponent::new(3, 4), r_max: 200, ..LemmaRange::default_for(LemmaId::L3_0_9, 2) };
        assert!(run(&r).unwrap().holds());
    }

    #[test]
    fn default_ranges_hold() {
        for p in [2, 3, 5] {
            for rep in run_defaults(p).unwrap() {
                assert!(rep.holds(), "{} p={p}: {:?}", rep.which, rep.cases.iter().find(|c| c.verdict == CaseVerdict::Counterexample));
                assert!(!rep.cases.is_empty());
            }
        }
    }

    #[test]
    fn l5_1_2_at_three_radii() {
        for rho in [-1, 0, 1] {
            let r = LemmaRange { rho: ex(rho), ..LemmaRange::default_for(LemmaId::L5_1_2, 3) };
            assert!(run(&r).unwrap().holds());
        }
    }

    #[test]
    fn a_false_claim_is_caught() {
        let mut c = Cases(Vec::new());
        c.push("x".into(), Some(ex(1)), Relation::Greater, Some(ex(0)));
        assert_eq!(c.0[0].verdict, CaseVerdict::Counterexample);
    }
}
