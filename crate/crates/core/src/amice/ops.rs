//! The derivations `d/dT`, `∂_T = T d/dT` and their q-analogues.

use super::{LaurentWindow, QParam};
use crate::error::{Error, Result};
use crate::padic::PAdic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivOp {
    /// `a_i T^i ↦ i a_i T^{i-1}`
    DdT,
    /// `a_i T^i ↦ i a_i T^i`
    Theta,
    /// `a_i T^i ↦ q^i a_i T^i`
    SigmaQ,
    /// `a_i T^i ↦ [i]_q a_i T^{i-1}`
    DQ,
    /// `a_i T^i ↦ [i]_q a_i T^i`
    DeltaQ,
}

impl DerivOp {
    pub fn needs_q(self) -> bool {
        matches!(self, DerivOp::SigmaQ | DerivOp::DQ | DerivOp::DeltaQ)
    }

    pub fn name(self) -> &'static str {
        match self {
            DerivOp::DdT => "ddT",
            DerivOp::Theta => "theta",
            DerivOp::SigmaQ => "sigma_q",
            DerivOp::DQ => "d_q",
            DerivOp::DeltaQ => "delta_q",
        }
    }

    pub fn parse(s: &str) -> Option<DerivOp> {
        [DerivOp::DdT, DerivOp::Theta, DerivOp::SigmaQ, DerivOp::DQ, DerivOp::DeltaQ].into_iter().find(|o| o.name() == s)
    }
}

/// `q^i` and `[i]_q` for consecutive `i`, built incrementally.
struct QTable {
    lo: i64,
    pow: Vec<PAdic>,
    int: Vec<PAdic>,
}

impl QTable {
    fn new(q: &QParam, lo: i64, hi: i64) -> QTable {
        let mut pow = Vec::with_capacity((hi - lo + 1) as usize);
        let mut int = Vec::with_capacity(pow.capacity());
        let mut x = q.q_pow(lo);
        let mut s = q.q_int(lo);
        for _ in lo..=hi {
            pow.push(x.clone());
            int.push(s.clone());
            s = s.add(&x);
            x = x.mul(q.q());
        }
        QTable { lo, pow, int }
    }

    fn pow(&self, i: i64) -> &PAdic {
        &self.pow[(i - self.lo) as usize]
    }

    fn int(&self, i: i64) -> &PAdic {
        &self.int[(i - self.lo) as usize]
    }
}

pub fn apply(op: DerivOp, f: &LaurentWindow, q: Option<&QParam>) -> Result<LaurentWindow> {
    if op.needs_q() != q.is_some() {
        return Err(Error::PreconditionViolated(format!(
            "{} {} a q parameter",
            op.name(),
            if op.needs_q() { "needs" } else { "takes no" }
        )));
    }
    let table = q.map(|q| QTable::new(q, f.i_min(), f.i_max()));
    let (lo, hi) = match op {
        DerivOp::DdT | DerivOp::DQ => (f.i_min() - 1, f.i_max() - 1),
        _ => (f.i_min(), f.i_max()),
    };
    let mut out = f.restrict(lo, hi);
    out = out.map_coeffs(|_, _| PAdic::zero(f.prime()));
    for (i, c) in f.terms() {
        let (j, v) = match op {
            DerivOp::DdT => (i - 1, c.mul_int(i)),
            DerivOp::Theta => (i, c.mul_int(i)),
            DerivOp::SigmaQ => (i, c.mul(table.as_ref().expect("q").pow(i))),
            DerivOp::DQ => (i - 1, c.mul(table.as_ref().expect("q").int(i))),
            DerivOp::DeltaQ => (i, c.mul(table.as_ref().expect("q").int(i))),
        };
        out.put(j, v);
    }
    Ok(out)
}
