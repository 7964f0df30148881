//! The `amice` command line: argument parsing, file I/O and report output.
//!
//! Every report is wrapped as `{"version", "config", "result"}`.  Exit codes:
//! 0 success or PASS, 1 FAIL, 2 INDETERMINATE or a domain error, 64 usage
//! errors, 65 unreadable input.

use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::amice::{apply, q_numerics, DerivOp, LaurentWindow, QNumeric, QParam, QValue, Side};
use crate::error::Error;
use crate::json::{self as j, OperatorInput};
use crate::lemmas::{self, LemmaId, LemmaRange};
use crate::motzkin;
use crate::norm::{Exponent, NormValue};
use crate::padic::{arith, ArithOp, Operand, PAdic, DEFAULT_PREC};
use crate::radius::{self, OpKind, DEFAULT_K_MAX, DEFAULT_S_MAX};
use crate::solvability::{self as solv, CheckConfig, FamilyWindow, DEFAULT_DECAY_CUT};
use crate::witt::{self, WittOp};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_DOMAIN: i32 = 2;
pub const PREC_ENV: &str = "AMICE_DEFAULT_PREC";

#[derive(Parser, Debug)]
#[command(name = "amice", version, about = "Exact p-adic solvability toolkit for the Amice ring")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Prime for inputs that do not carry one.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Digits of precision (default: $AMICE_DEFAULT_PREC, then 32).
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    /// Iterates used by radius estimates and lemma scans
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Iterates scanned by the sharp test
    #[arg(long, global = true)]
    pub smax: Option<usize>,
    /// Cap on Witt length when reading families.
    #[arg(long, global = true)]
    pub wittlen: Option<usize>,
    /// Decay cut exponent `e`, meaning `|p|^e`.
    #[arg(long = "decay-cut", global = true)]
    pub decay_cut: Option<String>,
    /// Negative family bound: slots with `|n| p^m` up to this value.
    #[arg(long = "neg-bound", global = true)]
    pub neg_bound: Option<i64>,
    /// Positive family bound
    #[arg(long = "pos-bound", global = true)]
    pub pos_bound: Option<i64>,
    /// Output as pretty JSON or flattened `path<TAB>value` lines
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Arithmetic and norms of single p-adic numbers.
    #[command(subcommand)]
    Padic(PadicCmd),
    /// Witt vectors, ghost components and family extraction.
    #[command(subcommand)]
    Witt(WittCmd),
    /// Laurent windows: Gauss norms, splitting, derivations, q-numerics.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Radius of convergence report for an operator.
    Radius(RadiusArgs),
    /// Motzkin factorisation of window units.
    #[command(subcommand)]
    Motzkin(MotzkinCmd),
    /// Solvability criteria, generators and canonical forms.
    #[command(subcommand)]
    Solvable(SolvableCmd),
    /// Oracle suites for the numerical lemmas.
    #[command(subcommand)]
    Lemmas(LemmasCmd),
}

#[derive(Subcommand, Debug)]
pub enum PadicCmd {
    /// Binary operation on two p-adic numbers.
    Arith {
        #[arg(long)]
        op: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: Option<String>,
    },
    /// Norm as an exact exponent of |p|.
    Norm {
        #[arg(long)]
        x: String,
    },
    /// Canonical JSON and display form.
    Show {
        #[arg(long)]
        x: String,
    },
}

#[derive(Args, Debug)]
pub struct InArg {
    /// Input file, `-` for stdin, or inline JSON.
    #[arg(long = "in")]
    pub input: Option<String>,
}

#[derive(Args, Debug)]
pub struct OpArgs {
    #[command(flatten)]
    pub input: InArg,
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum WittCmd {
    /// Ghost components of a Witt vector.
    Ghost(InArg),
    /// Witt vector with the given ghost components.
    Unghost(InArg),
    /// Witt vector sum.
    Add {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Witt vector product.
    Mul {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Per-slot integrality, or strict integrality with --strict.
    Integrality {
        #[command(flatten)]
        input: InArg,
        #[arg(long)]
        strict: bool,
    },
    /// Witt family read off an operator.
    Extract(OpArgs),
}

#[derive(Subcommand, Debug)]
pub enum SeriesCmd {
    /// Gauss norm at a radius.
    Norm {
        #[command(flatten)]
        input: InArg,
        /// `ρ = |p|^rho`.
        #[arg(long, default_value = "0")]
        rho: String,
    },
    /// Split into negative part, constant and positive part.
    Tripartite(InArg),
    /// Apply a derivation or the q-shift.
    Apply {
        #[command(flatten)]
        input: InArg,
        /// One of ddT, theta, sigma_q, d_q, delta_q.
        #[arg(long)]
        op: String,
        #[arg(long)]
        q: Option<String>,
    },
    /// q-integers, q-factorials, q-binomials, q-powers and the constants omega, omega_q, kappa.
    Qnum {
        /// One of q_int, q_factorial, q_binomial, q_power, omega, omega_q, kappa.
        #[arg(long)]
        what: String,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        terms: Option<usize>,
    },
}

#[derive(Args, Debug)]
pub struct RadiusArgs {
    #[command(flatten)]
    pub op: OpArgs,
    /// `ρ = |p|^rho`.
    #[arg(long, default_value = "0")]
    pub rho: String,
    /// Comma-separated exponents for the `(log ρ, log Ray/ρ)` table.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub profile: Vec<String>,
    /// Constant q-difference profile for `σ_q - λ` instead of an operator file.
    #[arg(long)]
    pub lambda: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum MotzkinCmd {
    /// Factor a unit as lambda T^N a^- a^+.
    Decompose(InArg),
    /// Multiply factors back into a unit.
    Recompose(InArg),
    /// Coefficient bounds of the factors at a radius.
    Predicates {
        #[command(flatten)]
        input: InArg,
        #[arg(long, default_value = "0")]
        rho: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum SolvableCmd {
    /// Solvability verdict with a witness slot on failure.
    Check(OpArgs),
    /// Operator built from a Witt family.
    Generate {
        #[arg(long)]
        family: String,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        q: Option<String>,
    },
    /// Canonical form and gauge of a solvable operator.
    Canonical(OpArgs),
    /// q-difference operator with the same Witt family.
    Qdeform(OpArgs),
    /// Expansion of the Artin-Hasse type exponential.
    ArtinHasse {
        #[arg(long)]
        family: String,
        #[arg(long)]
        degree: i64,
        #[arg(long, default_value = "plus")]
        direction: String,
    },
    /// Witt family of exp(sum b_d T^d / d).
    ExpDecompose {
        #[command(flatten)]
        input: InArg,
        #[arg(long)]
        degree: Option<i64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum LemmasCmd {
    /// Run one suite, or all of them.
    Run(LemmaArgs),
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    /// L3_0_9, L3_0_10, L3_0_12, L3_0_13, L5_1_2, L5_3_3, Legendre or all.
    #[arg(long)]
    pub which: String,
    /// Single `n` (sets both ends of the n range).
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub nmin: Option<u64>,
    #[arg(long)]
    pub nmax: Option<u64>,
    #[arg(long)]
    pub kmin: Option<u64>,
    #[arg(long)]
    pub rmax: Option<u64>,
    #[arg(long)]
    pub mmax: Option<u32>,
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Vec<i64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON object overriding any of the range fields.
    #[arg(long)]
    pub params: Option<String>,
}

/// The effective run configuration, embedded in every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub p: u32,
    pub prec: u32,
    pub neg_bound: Option<i64>,
    pub pos_bound: Option<i64>,
    pub wittlen: Option<usize>,
    pub kmax: usize,
    pub smax: usize,
    pub decay_cut: String,
    pub format: Format,
}

impl RunConfig {
    /// Flags first, then `AMICE_DEFAULT_PREC`, then built-in defaults.
    pub fn resolve(g: &GlobalArgs, env_prec: Option<&str>) -> Result<Self, CliError> {
        let prec = match (g.prec, env_prec) {
            (Some(n), _) => n,
            (None, Some(s)) => s.trim().parse().map_err(|_| CliError::usage(format!("{PREC_ENV}={s:?} is not a positive integer")))?,
            (None, None) => DEFAULT_PREC,
        };
        let cfg = RunConfig {
            p: g.p.unwrap_or(2),
            prec,
            neg_bound: g.neg_bound,
            pos_bound: g.pos_bound,
            wittlen: g.wittlen,
            kmax: g.kmax.unwrap_or(DEFAULT_K_MAX),
            smax: g.smax.unwrap_or(DEFAULT_S_MAX),
            decay_cut: g.decay_cut.clone().unwrap_or_else(|| DEFAULT_DECAY_CUT.to_string()),
            format: g.format.unwrap_or_default(),
        };
        crate::padic::validate_prime(cfg.p).map_err(|e| CliError::usage(e.to_string()))?;
        if cfg.prec == 0 || cfg.kmax == 0 || cfg.smax == 0 || cfg.wittlen == Some(0) {
            return Err(CliError::usage("precision and caps must be positive"));
        }
        if [cfg.neg_bound, cfg.pos_bound].into_iter().flatten().any(|b| b < 0) {
            return Err(CliError::usage("family bounds must be non-negative"));
        }
        cfg.decay_norm()?;
        Ok(cfg)
    }

    fn decay_norm(&self) -> Result<NormValue, CliError> {
        parse_norm(&self.decay_cut)
    }

    fn window(&self, file: Option<FamilyWindow>) -> FamilyWindow {
        let base = file.unwrap_or_default();
        FamilyWindow {
            neg_bound: self.neg_bound.or(base.neg_bound),
            pos_bound: self.pos_bound.or(base.pos_bound),
            max_len: self.wittlen.or(base.max_len),
        }
    }
}

/// A failure with its exit code and JSON kind.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, kind: "Usage".into(), message: msg.into() }
    }

    fn parse(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_PARSE, kind: "Parse".into(), message: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Parse(_)) { EXIT_PARSE } else { EXIT_DOMAIN };
        CliError { code, kind: e.kind().into(), message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

/// A command's result and the exit code it asks for.
struct Outcome {
    result: Value,
    code: i32,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome { result, code: 0 }
    }
}

fn parse_norm(s: &str) -> CliResult<NormValue> {
    NormValue::parse_exponent(s).ok_or_else(|| CliError::usage(format!("{s:?} is not a norm exponent")))
}

fn parse_exponent(s: &str) -> CliResult<Exponent> {
    parse_norm(s)?.exponent().ok_or_else(|| CliError::usage("exponent must be finite"))
}

fn load(src: Option<&str>) -> CliResult<Value> {
    let text = match src {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::parse(format!("stdin: {e}")))?;
            s
        }
        Some(s) if s.trim_start().starts_with(['{', '[']) => s.to_string(),
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::parse(format!("{path}: {e}")))?,
    };
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("invalid JSON: {e}")))
}

fn parse_kind(s: &str) -> CliResult<OpKind> {
    OpKind::parse(s).ok_or_else(|| CliError::usage(format!("unknown kind {s:?}; use diff or qdiff")))
}

fn read_op(a: &OpArgs, cfg: &RunConfig) -> CliResult<OperatorInput> {
    let kind = a.kind.as_deref().map(parse_kind).transpose()?;
    let v = load(a.input.input.as_deref())?;
    Ok(j::operator_from_json(&v, kind, a.q.as_deref(), cfg.p, cfg.prec)?)
}

fn read_q(p: u32, s: &str, prec: u32) -> CliResult<QParam> {
    Ok(QParam::new(j::parse_padic_str(p, s, prec)?)?)
}

fn check_config(cfg: &RunConfig, file: Option<FamilyWindow>) -> CliResult<CheckConfig> {
    Ok(CheckConfig { window: cfg.window(file), decay_cut: cfg.decay_norm()? })
}

fn run_padic(c: &PadicCmd, cfg: &RunConfig) -> CliResult<Outcome> {
    let p = cfg.p;
    let value = |x: &PAdic| json!({ "value": j::padic_to_json(x), "display": x.to_string() });
    Ok(Outcome::ok(match c {
        PadicCmd::Arith { op, x, y } => {
            let op = match op.as_str() {
                "add" => ArithOp::Add,
                "sub" => ArithOp::Sub,
                "mul" => ArithOp::Mul,
                "div" => ArithOp::Div,
                "inv" => ArithOp::Inv,
                "pow" => ArithOp::Pow,
                other => return Err(CliError::usage(format!("unknown op {other:?}"))),
            };
            let xv = j::parse_padic_str(p, x, cfg.prec)?;
            let yv = match (op, y) {
                (ArithOp::Inv, _) => Operand::Int(0),
                (ArithOp::Pow, Some(s)) => Operand::Int(s.trim().parse().map_err(|_| CliError::usage("pow needs an integer --y"))?),
                (_, Some(s)) => Operand::Value(j::parse_padic_str(p, s, cfg.prec)?),
                (_, None) => return Err(CliError::usage("this operation needs --y")),
            };
            value(&arith(op, &xv, &yv)?)
        }
        PadicCmd::Norm { x } => {
            let xv = j::parse_padic_str(p, x, cfg.prec)?;
            json!({ "norm": j::norm_to_json(xv.norm()?) })
        }
        PadicCmd::Show { x } => value(&j::parse_padic_str(p, x, cfg.prec)?),
    }))
}

fn run_witt(c: &WittCmd, cfg: &RunConfig) -> CliResult<Outcome> {
    let (p, prec) = (cfg.p, cfg.prec);
    let ring = |op: WittOp, x: &str, y: &str| -> CliResult<Value> {
        let a = j::witt_from_json(&load(Some(x))?, p, prec)?;
        let b = j::witt_from_json(&load(Some(y))?, p, prec)?;
        Ok(j::witt_to_json(&witt::witt_ring(op, &a, &b)?))
    };
    Ok(match c {
        WittCmd::Ghost(i) => {
            let w = j::witt_from_json(&load(i.input.as_deref())?, p, prec)?;
            Outcome::ok(j::phantom_to_json(&w.ghost()))
        }
        WittCmd::Unghost(i) => {
            let ph = j::phantom_from_json(&load(i.input.as_deref())?, p, prec)?;
            Outcome::ok(j::witt_to_json(&ph.unghost()?))
        }
        WittCmd::Add { x, y } => Outcome::ok(ring(WittOp::Add, x, y)?),
        WittCmd::Mul { x, y } => Outcome::ok(ring(WittOp::Mul, x, y)?),
        WittCmd::Integrality { input, strict } => {
            let w = j::witt_from_json(&load(input.input.as_deref())?, p, prec)?;
            let slots = w.integrality(*strict)?;
            let pass = slots.iter().all(|b| *b);
            Outcome { result: json!({ "strict": strict, "slots": slots, "pass": pass }), code: if pass { 0 } else { 1 } }
        }
        WittCmd::Extract(a) => {
            let inp = read_op(a, cfg)?;
            let ex = solv::extract_with(&inp.op, &cfg.window(inp.window))?;
            Outcome::ok(j::extraction_to_json(&ex))
        }
    })
}

fn run_series(c: &SeriesCmd, cfg: &RunConfig) -> CliResult<Outcome> {
    let read = |i: &InArg| -> CliResult<LaurentWindow> { Ok(j::series_from_json(&load(i.input.as_deref())?, cfg.p, cfg.prec)?) };
    Ok(Outcome::ok(match c {
        SeriesCmd::Norm { input, rho } => {
            let w = read(input)?;
            let rho = parse_norm(rho)?;
            json!({
                "rho": j::norm_to_json(rho),
                "norm": j::norm_to_json(w.gauss_norm(rho)),
                "norm_faithful": w.norm_faithful(),
            })
        }
        SeriesCmd::Tripartite(i) => {
            let (m, a0, pl) = read(i)?.tripartite();
            json!({ "g_minus": j::series_to_json(&m), "a0": j::padic_to_json(&a0), "g_plus": j::series_to_json(&pl) })
        }
        SeriesCmd::Apply { input, op, q } => {
            let w = read(input)?;
            let d = DerivOp::parse(op).ok_or_else(|| CliError::usage(format!("unknown operator {op:?}")))?;
            let qp = q.as_deref().map(|s| read_q(w.prime(), s, cfg.prec)).transpose()?;
            if d.needs_q() && qp.is_none() {
                return Err(CliError::usage(format!("{op} needs --q")));
            }
            j::series_to_json(&apply(d, &w, qp.as_ref())?)
        }
        SeriesCmd::Qnum { what, q, n, k, alpha, terms } => {
            let qp = q.as_deref().map(|s| read_q(cfg.p, s, cfg.prec)).transpose()?;
            let need_n = || n.ok_or_else(|| CliError::usage(format!("{what} needs --n")));
            let kind = match what.as_str() {
                "q_int" => QNumeric::QInt(need_n()?),
                "q_factorial" => QNumeric::QFactorial(need_n()?.max(0) as u64),
                "q_binomial" => QNumeric::QBinomial(need_n()?.max(0) as u64, k.ok_or_else(|| CliError::usage("q_binomial needs --k"))?),
                "q_power" => {
                    let a = alpha.as_deref().ok_or_else(|| CliError::usage("q_power needs --alpha"))?;
                    QNumeric::QPower { alpha: j::parse_padic_str(cfg.p, a, cfg.prec)?, terms: *terms }
                }
                "omega" => QNumeric::Omega,
                "omega_q" => QNumeric::OmegaQ,
                "kappa" => QNumeric::Kappa,
                other => return Err(CliError::usage(format!("unknown q-numeric {other:?}"))),
            };
            match q_numerics(&kind, cfg.p, qp.as_ref())? {
                QValue::Value(x) => json!({ "value": j::padic_to_json(&x), "display": x.to_string() }),
                QValue::Norm(nv) => json!({ "norm": j::norm_to_json(nv) }),
                QValue::Int(i) => json!({ "value": i }),
            }
        }
    }))
}

fn run_radius(a: &RadiusArgs, cfg: &RunConfig) -> CliResult<Outcome> {
    if let Some(l) = &a.lambda {
        let qs = a.op.q.as_deref().ok_or_else(|| CliError::usage("--lambda needs --q"))?;
        let q = read_q(cfg.p, qs, cfg.prec)?;
        let lam = j::parse_padic_str(cfg.p, l, cfg.prec)?;
        return Ok(Outcome::ok(j::profile_to_json(&radius::constant_qdiff_profile(&lam, &q, cfg.kmax)?)));
    }
    let op = read_op(&a.op, cfg)?.op;
    let rho = parse_norm(&a.rho)?;
    let report = radius::ray_estimate(&op, rho, cfg.kmax)?;
    let sharp = match radius::sharp_test(&op, cfg.smax) {
        Ok(s) => j::sharp_to_json(&s),
        Err(e) => json!({ "outcome": "NotApplicable", "reason": e.to_string() }),
    };
    let mut out = json!({ "report": j::radius_to_json(&report), "sharp_test": sharp });
    if !a.profile.is_empty() {
        let rhos: Vec<NormValue> = a.profile.iter().map(|s| parse_norm(s)).collect::<CliResult<_>>()?;
        let rows = radius::ray_profile(&op, &rhos, cfg.kmax)?;
        out["profile"] = serde_json::to_value(rows).expect("serialisable");
    }
    Ok(Outcome::ok(out))
}

fn run_motzkin(c: &MotzkinCmd, cfg: &RunConfig) -> CliResult<Outcome> {
    Ok(Outcome::ok(match c {
        MotzkinCmd::Decompose(i) => {
            let w = j::series_from_json(&load(i.input.as_deref())?, cfg.p, cfg.prec)?;
            j::factors_to_json(&motzkin::decompose(&w)?)
        }
        MotzkinCmd::Recompose(i) => {
            let f = j::factors_from_json(&load(i.input.as_deref())?, cfg.p, cfg.prec)?;
            let mut w = motzkin::recompose(&f);
            w.set_norm_faithful(f.a_minus.norm_faithful() && f.a_plus.norm_faithful());
            j::series_to_json(&w)
        }
        MotzkinCmd::Predicates { input, rho } => {
            let f = j::factors_from_json(&load(input.input.as_deref())?, cfg.p, cfg.prec)?;
            j::predicates_to_json(&motzkin::factor_predicates(&f, parse_norm(rho)?)?)
        }
    }))
}

fn run_solvable(c: &SolvableCmd, cfg: &RunConfig) -> CliResult<Outcome> {
    Ok(match c {
        SolvableCmd::Check(a) => {
            let inp = read_op(a, cfg)?;
            let rep = solv::check_with(&inp.op, &check_config(cfg, inp.window)?)?;
            Outcome { code: rep.verdict.exit_code(), result: j::report_to_json(&rep) }
        }
        SolvableCmd::Generate { family, kind, q } => {
            let fam = j::family_from_json(&load(Some(family))?, cfg.p, cfg.prec)?;
            let kind = parse_kind(kind)?;
            let qp = q.as_deref().map(|s| read_q(fam.prime(), s, cfg.prec)).transpose()?;
            let op = solv::generate(&fam, kind, qp.as_ref(), cfg.prec)?;
            let mut win = fam.window();
            win.max_len = cfg.wittlen;
            Outcome::ok(j::operator_to_json(&op, Some(&win)))
        }
        SolvableCmd::Canonical(a) => {
            let inp = read_op(a, cfg)?;
            Outcome::ok(j::canonical_to_json(&solv::canonical_form_with(&inp.op, &check_config(cfg, inp.window)?)?))
        }
        SolvableCmd::Qdeform(a) => {
            let qs = a.q.as_deref().ok_or_else(|| CliError::usage("qdeform needs --q"))?;
            let plain = OpArgs { input: InArg { input: a.input.input.clone() }, kind: a.kind.clone(), q: None };
            let inp = read_op(&plain, cfg)?;
            if inp.op.kind() != OpKind::Diff {
                return Err(CliError::usage("qdeform takes a differential operator"));
            }
            let q = read_q(inp.op.prime(), qs, cfg.prec)?;
            Outcome::ok(j::qdeform_to_json(&solv::q_deform(&inp.op, &q, cfg.prec)?))
        }
        SolvableCmd::ArtinHasse { family, degree, direction } => {
            let fam = j::family_from_json(&load(Some(family))?, cfg.p, cfg.prec)?;
            let side = match direction.as_str() {
                "plus" => Side::Plus,
                "minus" => Side::Minus,
                other => return Err(CliError::usage(format!("direction {other:?} is not plus or minus"))),
            };
            let e = solv::artin_hasse(&fam, *degree, side)?;
            let integral = e.terms().all(|(_, c)| c.norm_bound() <= NormValue::one());
            Outcome::ok(json!({ "series": j::series_to_json(&e), "integral": integral }))
        }
        SolvableCmd::ExpDecompose { input, degree } => {
            let (p, b) = j::exponent_data_from_json(&load(input.input.as_deref())?, cfg.p, cfg.prec)?;
            let deg = degree.unwrap_or_else(|| b.keys().next_back().copied().unwrap_or(1));
            Outcome::ok(j::family_to_json(&solv::exp_decompose(p, &b, deg)?))
        }
    })
}

fn lemma_range(which: LemmaId, a: &LemmaArgs, cfg: &RunConfig, kmax: Option<usize>) -> CliResult<LemmaRange> {
    let mut r = LemmaRange::default_for(which, cfg.p);
    if let Some(n) = a.n {
        r.n_min = n;
        r.n_max = n;
    }
    r.n_min = a.nmin.unwrap_or(r.n_min);
    r.n_max = a.nmax.unwrap_or(r.n_max);
    r.k_min = a.kmin.unwrap_or(r.k_min);
    r.k_max = kmax.map_or(r.k_max, |k| k as u64);
    r.r_max = a.rmax.unwrap_or(r.r_max);
    r.m_max = a.mmax.unwrap_or(r.m_max);
    r.j = a.j.unwrap_or(r.j);
    if let Some(s) = &a.rho {
        r.rho = parse_exponent(s)?;
    }
    if !a.q.is_empty() {
        r.q = a.q.clone();
    }
    if !a.alpha.is_empty() {
        r.alpha = a.alpha.clone();
    }
    r.samples = a.samples.unwrap_or(r.samples);
    r.seed = a.seed.unwrap_or(r.seed);
    if let Some(ps) = &a.params {
        let v: Value = serde_json::from_str(ps).map_err(|e| CliError::parse(format!("--params: {e}")))?;
        let obj = v.as_object().ok_or_else(|| CliError::parse("--params must be a JSON object"))?;
        for (key, x) in obj {
            let int = || x.as_i64().ok_or_else(|| CliError::parse(format!("--params {key} must be an integer")));
            let list = || -> CliResult<Vec<i64>> {
                x.as_array()
                    .ok_or_else(|| CliError::parse(format!("--params {key} must be a list")))?
                    .iter()
                    .map(|y| y.as_i64().ok_or_else(|| CliError::parse(format!("--params {key} holds a non-integer"))))
                    .collect()
            };
            match key.as_str() {
                "n" => {
                    r.n_min = int()? as u64;
                    r.n_max = r.n_min;
                }
                "n_min" => r.n_min = int()? as u64,
                "n_max" => r.n_max = int()? as u64,
                "k_min" => r.k_min = int()? as u64,
                "k_max" => r.k_max = int()? as u64,
                "r_max" => r.r_max = int()? as u64,
                "m_max" => r.m_max = int()? as u32,
                "j" => r.j = int()? as u32,
                "samples" => r.samples = int()? as usize,
                "seed" => r.seed = int()? as u64,
                "rho" => r.rho = parse_exponent(&x.as_str().map_or_else(|| x.to_string(), str::to_string))?,
                "q" => r.q = list()?,
                "alpha" => r.alpha = list()?,
                other => return Err(CliError::parse(format!("unknown --params key {other:?}"))),
            }
        }
    }
    Ok(r)
}

fn run_lemmas(c: &LemmasCmd, cfg: &RunConfig, kmax: Option<usize>) -> CliResult<Outcome> {
    let LemmasCmd::Run(a) = c;
    let ids: Vec<LemmaId> = if a.which.eq_ignore_ascii_case("all") {
        LemmaId::ALL.to_vec()
    } else {
        vec![LemmaId::parse(&a.which).ok_or_else(|| CliError::usage(format!("unknown lemma {:?}", a.which)))?]
    };
    let mut reports = Vec::new();
    for id in ids {
        reports.push(lemmas::run(&lemma_range(id, a, cfg, kmax)?)?);
    }
    let code = if reports.iter().all(|r| r.holds()) { 0 } else { 1 };
    let result = if reports.len() == 1 { serde_json::to_value(&reports[0]) } else { serde_json::to_value(&reports) }.expect("serialisable");
    Ok(Outcome { result, code })
}

fn execute(cli: &Cli, cfg: &RunConfig) -> CliResult<Outcome> {
    match &cli.command {
        Command::Padic(c) => run_padic(c, cfg),
        Command::Witt(c) => run_witt(c, cfg),
        Command::Series(c) => run_series(c, cfg),
        Command::Radius(a) => run_radius(a, cfg),
        Command::Motzkin(c) => run_motzkin(c, cfg),
        Command::Solvable(c) => run_solvable(c, cfg),
        Command::Lemmas(c) => run_lemmas(c, cfg, cli.global.kmax),
    }
}

pub fn version_string() -> String {
    format!("amice {}", env!("CARGO_PKG_VERSION"))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) if !a.is_empty() => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Tab-separated `path  value` lines for a JSON document.
pub fn render_table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    rows.iter().map(|(k, x)| format!("{k}\t{x}\n")).collect()
}

fn emit(out: &mut dyn Write, doc: &Value, format: Format) {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(doc).expect("serialisable") + "\n",
        Format::Table => render_table(doc),
    };
    let _ = out.write_all(text.as_bytes());
}

/// Parses `argv`, runs the command and writes the report; returns the exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let env_prec = std::env::var(PREC_ENV).ok();
    let cfg = match RunConfig::resolve(&cli.global, env_prec.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "{}", e.message);
            return e.code;
        }
    };
    let config = serde_json::to_value(&cfg).expect("serialisable");
    match execute(&cli, &cfg) {
        Ok(o) => {
            emit(out, &json!({ "version": version_string(), "config": config, "result": o.result }), cfg.format);
            o.code
        }
        Err(e) => {
            let doc = json!({
                "version": version_string(),
                "config": config,
                "error": { "kind": e.kind, "message": e.message },
            });
            emit(out, &doc, cfg.format);
            let _ = writeln!(err, "{}: {}", e.kind, e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, Value) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = dispatch(std::iter::once("amice").chain(args.iter().copied()), &mut out, &mut err);
        let v = serde_json::from_slice(&out).unwrap_or(Value::Null);
        (code, v)
    }

    #[test]
    fn padic_add_example() {
        let (code, v) = run(&["--p", "2", "--prec", "5", "padic", "arith", "--op", "add", "--x", "1", "--y", "1"]);
        assert_eq!(code, 0);
        assert_eq!(v["result"]["value"], json!({"v": 1, "unit": "1", "prec": 4}));
        assert_eq!(v["result"]["display"], json!("2^1 * 1 :: O(2^5)"));
        assert_eq!(v["config"]["prec"], json!(5));
    }

    #[test]
    fn env_precision_yields_to_flag() {
        let g = GlobalArgs { prec: Some(7), ..Default::default() };
        assert_eq!(RunConfig::resolve(&g, Some("12")).unwrap().prec, 7);
        let g = GlobalArgs::default();
        assert_eq!(RunConfig::resolve(&g, Some("12")).unwrap().prec, 12);
        assert_eq!(RunConfig::resolve(&g, None).unwrap().prec, DEFAULT_PREC);
        assert_eq!(RunConfig::resolve(&g, Some("x")).unwrap_err().code, EXIT_USAGE);
    }

    #[test]
    fn usage_and_parse_errors() {
        assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
        let (code, v) = run(&["motzkin", "decompose", "--in", "{not json"]);
        assert_eq!(code, EXIT_PARSE);
        assert_eq!(v["error"]["kind"], json!("Parse"));
        let (code, v) = run(&["motzkin", "decompose", "--in", r#"{"prime":2,"coeffs":[[0,1],[1,1]],"norm_faithful":true}"#]);
        assert_eq!(code, EXIT_DOMAIN);
        assert_eq!(v["error"]["kind"], json!("NotAUnit"));
    }

    #[test]
    fn lemma_example() {
        let (code, v) = run(&["lemmas", "run", "--which", "L3_0_10", "--p", "2", "--n", "3", "--kmax", "40"]);
        assert_eq!(code, 0);
        assert_eq!(v["result"]["counterexamples"], json!(0));
        assert_eq!(v["result"]["cases"].as_array().unwrap().len(), 37);
    }

    #[test]
    fn table_format_flattens() {
        let t = render_table(&json!({"a": {"b": [1, "x"]}, "c": null}));
        assert_eq!(t, "a.b.0\t1\na.b.1\tx\nc\tnull\n");
    }
}
