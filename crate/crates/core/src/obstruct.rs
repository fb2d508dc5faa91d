//! Necessary conditions for a surgery to be a lens space: the lifted torsion
//! equation in the group ring, norm and constant-`f` tests, the three
//! Alexander-polynomial forms for lens surgeries on knots, and a pipeline
//! combining them.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::alexander::hat_k_alexander;
use crate::cyclo::{CycNum, GroupRingElem, QuotientMode};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::surgery::{cyclic_order, lens_torsion_test, others_products, LensTestReport, SurgerySpec};

/// Residues to try for one unknown; `None` means every unit mod `p`.
pub type Range = Option<Vec<u64>>;

/// `F(u)(u^a - 1)(u^b - 1) = ±u^l (u - 1)(u^c - 1)` in `Z[u]/(1 + u + ... + u^{p-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedEquationProblem {
    pub f: GroupRingElem,
    pub a: Range,
    pub b: Range,
    pub c: Range,
}

impl LiftedEquationProblem {
    pub fn new(f: &LaurentPoly, p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::Precondition(format!("the lifted equation needs |p_k| ≥ 2, got {p}")));
        }
        if f.nvars() != 1 {
            return Err(Error::BadArity(format!("F must have one variable, got {}", f.nvars())));
        }
        Ok(LiftedEquationProblem {
            f: GroupRingElem::from_laurent(f, p, QuotientMode::Reduced),
            a: None,
            b: None,
            c: None,
        })
    }

    /// `F = m u^2 + n u + m`.
    pub fn symmetric_quadratic(m: i64, n: i64, p: u64) -> Result<Self> {
        Self::new(&LaurentPoly::from_coeffs(&[m, n, m]), p)
    }

    pub fn with_bounds(mut self, a: Range, b: Range, c: Range) -> Self {
        self.a = a;
        self.b = b;
        self.c = c;
        self
    }

    pub fn order(&self) -> u64 {
        self.f.order()
    }

    fn units(&self, r: &Range) -> Vec<u64> {
        let p = self.order();
        let mut v: Vec<u64> = match r {
            Some(v) => v.iter().map(|x| x % p).filter(|x| x.gcd(&p) == 1).collect(),
            None => (1..p).filter(|x| x.gcd(&p) == 1).collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiftedSolution {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub sign: i8,
    pub l: u64,
}

impl LiftedSolution {
    pub fn to_json(&self) -> Value {
        json!({"a": self.a, "b": self.b, "c": self.c, "sign": self.sign, "l": self.l})
    }
}

/// Enumerates all solutions within the bounds, sorted.
pub fn lifted_equation_solve(problem: &LiftedEquationProblem) -> Vec<LiftedSolution> {
    let p = problem.order();
    let mode = QuotientMode::Reduced;
    let mut rhs: HashMap<Vec<BigInt>, Vec<(u64, i8, u64)>> = HashMap::new();
    for c in problem.units(&problem.c) {
        let base = GroupRingElem::u_pow_minus_one(p, mode, 1).mul_u_pow_minus_one(c as i64);
        for l in 0..p {
            let shifted = base.shift(l as i64);
            let neg = -shifted.clone();
            rhs.entry(shifted.coeffs().to_vec()).or_default().push((c, 1, l));
            rhs.entry(neg.coeffs().to_vec()).or_default().push((c, -1, l));
        }
    }
    let mut out = Vec::new();
    let bs = problem.units(&problem.b);
    for a in problem.units(&problem.a) {
        let fa = problem.f.mul_u_pow_minus_one(a as i64);
        for &b in &bs {
            let lhs = fa.mul_u_pow_minus_one(b as i64);
            if let Some(hits) = rhs.get(lhs.coeffs()) {
                out.extend(hits.iter().map(|&(c, sign, l)| LiftedSolution { a, b, c, sign, l }));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Whether a tuple satisfies the equation in `Q(ζ_d)` for one divisor `d ≥ 2`.
pub fn lifted_holds_at(problem: &LiftedEquationProblem, s: &LiftedSolution, d: u64) -> Result<bool> {
    let f = problem.f.project_psi(d)?;
    let z = |e: i64| CycNum::zeta_pow_minus_one(d, e);
    let lhs = &(&f * &z(s.a as i64)) * &z(s.b as i64);
    let mut rhs = (&z(1) * &z(s.c as i64)).mul_zeta_pow(s.l);
    if s.sign < 0 {
        rhs = -rhs;
    }
    Ok(lhs == rhs)
}

/// The per-divisor diagnostic: tuples in the bounds satisfying the equation
/// in `Q(ζ_d)` alone.
pub fn lifted_equation_solve_at(problem: &LiftedEquationProblem, d: u64) -> Result<Vec<LiftedSolution>> {
    let p = problem.order();
    let mut out = Vec::new();
    for a in problem.units(&problem.a) {
        for b in problem.units(&problem.b) {
            for c in problem.units(&problem.c) {
                for l in 0..p {
                    for sign in [1, -1] {
                        let s = LiftedSolution { a, b, c, sign, l };
                        if lifted_holds_at(problem, &s, d)? {
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// With `f_k = 0` the torsion is `±P ζ (ζ-1)^{-2}`, whose norm is `±1`
/// only when `|P| = 1`. True means the test passes.
pub fn norm_test_fzero(p_prime: &BigInt, p_k: i64) -> Result<bool> {
    if p_k.abs() < 2 {
        return Err(Error::Precondition(format!("the norm test needs |p_k| ≥ 2, got {p_k}")));
    }
    Ok(p_prime.abs().is_one())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstFVerdict {
    /// The only products `Π_{j≠k} p_j` compatible with a lens space.
    Allowed(Vec<BigInt>),
    Excluded(String),
}

impl ConstFVerdict {
    pub fn admits(&self, p_prime: &BigInt) -> bool {
        matches!(self, ConstFVerdict::Allowed(v) if v.contains(p_prime))
    }

    pub fn to_json(&self) -> Value {
        match self {
            ConstFVerdict::Allowed(v) => json!({"allowed": v.iter().map(ToString::to_string).collect::<Vec<_>>()}),
            ConstFVerdict::Excluded(r) => json!({"excluded": r}),
        }
    }
}

/// Constant nonzero `f_k` and `|p_k| ≥ 5`: the bracketed factor must be a
/// unit times a cyclotomic quadratic, forcing `|f_k| = |η| = 1` and
/// `Π_{j≠k} p_j ∈ (-1)^{λ-1} f_k η {1, 2, 3}`.
pub fn const_f_classify(f_k: &BigInt, p_k: i64, eta: &BigInt, lambda: usize) -> Result<ConstFVerdict> {
    if f_k.is_zero() {
        return Err(Error::Precondition("constant f_k must be nonzero".into()));
    }
    if p_k.abs() < 5 {
        return Err(Error::Precondition(format!("the constant-f test needs |p_k| ≥ 5, got {p_k}")));
    }
    if !f_k.abs().is_one() {
        return Ok(ConstFVerdict::Excluded(format!("f_k = {f_k}, must be ±1")));
    }
    if !eta.abs().is_one() {
        return Ok(ConstFVerdict::Excluded(format!("product of the other q_j is {eta}, must be ±1")));
    }
    let sign = if lambda % 2 == 1 { BigInt::one() } else { -BigInt::one() };
    let unit = sign * f_k * eta;
    Ok(ConstFVerdict::Allowed((1..=3).map(|c| &unit * BigInt::from(c)).collect()))
}

fn univariate(delta: &LaurentPoly) -> Result<()> {
    if delta.nvars() != 1 {
        return Err(Error::BadArity(format!("expected one variable, got {}", delta.nvars())));
    }
    if delta.is_zero() {
        return Err(Error::Precondition("the zero polynomial has no form".into()));
    }
    Ok(())
}

/// `Δ ≐ (-1)^m + Σ (-1)^{k-1}(t^{n_k} + t^{-n_k})`; returns `n_1 > ... > n_m`.
pub fn os_form_check(delta: &LaurentPoly) -> Result<Option<Vec<i64>>> {
    univariate(delta)?;
    let (c, duality) = delta.duality_center()?;
    if !duality.is_exact_symmetry() {
        return Ok(None);
    }
    let mut exps = Vec::new();
    for (mono, coeff) in c.terms().rev() {
        let e = mono.exponents()[0];
        if e <= 0 {
            break;
        }
        let want = if exps.len() % 2 == 0 { 1 } else { -1 };
        if *coeff != BigInt::from(want) {
            return Ok(None);
        }
        exps.push(e);
    }
    let constant = if exps.len() % 2 == 0 { 1 } else { -1 };
    Ok((c.coeff_at(0) == BigInt::from(constant)).then_some(exps))
}

/// Root sum of the monic normalization of `Δ`; `0` for a unit.
pub fn trace(delta: &LaurentPoly) -> Result<BigRational> {
    univariate(delta)?;
    let (_, v) = delta.dense().expect("nonzero");
    if v.len() < 2 {
        return Ok(BigRational::zero());
    }
    let n = v.len() - 1;
    Ok(BigRational::new(-v[n - 1].clone(), v[n].clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangeVerdict {
    pub holds: bool,
    pub trace: BigRational,
}

/// Alexander form with `n_1 - n_2 = 1`, the constant counting as `n_{m+1} = 0`:
/// `t^{n} - t^{n-1} + ... + t^{-n}`. Never holds for a unit.
pub fn tange_check(delta: &LaurentPoly) -> Result<TangeVerdict> {
    let trace = trace(delta)?;
    let holds = match os_form_check(delta)? {
        Some(n) if !n.is_empty() => n[0] - n.get(1).copied().unwrap_or(0) == 1,
        _ => false,
    };
    Ok(TangeVerdict { holds, trace })
}

/// Searches `1 ≤ r ≤ s < p`, `gcd(rs, p) = 1`, `q r s ≡ ±1 (mod p)` with
/// `Δ (t^r-1)(t^s-1) ≐ (t^{rs}-1)(t-1)` modulo `(t^p-1)/(t-1)`. Pairs coprime
/// as integers are tried first; every residue pair lifts to a coprime one.
pub fn ky_form_check(delta: &LaurentPoly, p: u64, q: i64) -> Result<Option<(u64, u64)>> {
    univariate(delta)?;
    if p < 2 {
        return Err(Error::Precondition(format!("p must be at least 2, got {p}")));
    }
    let pi = p as i64;
    if q.gcd(&pi) != 1 {
        return Err(Error::Precondition(format!("gcd({q}, {p}) ≠ 1")));
    }
    let mode = QuotientMode::Reduced;
    let d = GroupRingElem::from_laurent(delta, p, mode);
    let units: Vec<u64> = (1..p).filter(|r| r.gcd(&p) == 1).collect();
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    for (i, &r) in units.iter().enumerate() {
        for &s in &units[i..] {
            let e = (q.rem_euclid(pi) as u128 * r as u128 * s as u128 % p as u128) as u64;
            if e == 1 % p || e == p - 1 {
                pairs.push((r, s));
            }
        }
    }
    pairs.sort_by_key(|&(r, s)| r.gcd(&s) != 1);
    for (r, s) in pairs {
        let lhs = d.mul_u_pow_minus_one(r as i64).mul_u_pow_minus_one(s as i64);
        let rhs = GroupRingElem::u_pow_minus_one(p, mode, (r * s) as i64).mul_u_pow_minus_one(1);
        if lhs.associate_eq(&rhs) {
            return Ok(Some((r, s)));
        }
    }
    Ok(None)
}

/// All three knot-surgery form tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormVerdict {
    pub os_form: Option<Vec<i64>>,
    pub ky_form: Option<(u64, u64)>,
    pub tange_form: bool,
    pub trace: BigRational,
}

impl FormVerdict {
    pub fn evaluate(delta: &LaurentPoly, p: u64, q: i64) -> Result<Self> {
        let tange = tange_check(delta)?;
        Ok(FormVerdict {
            os_form: os_form_check(delta)?,
            ky_form: ky_form_check(delta, p, q)?,
            tange_form: tange.holds,
            trace: tange.trace,
        })
    }

    pub fn all_hold(&self) -> bool {
        self.os_form.is_some() && self.ky_form.is_some() && self.tange_form
    }

    pub fn to_json(&self) -> Value {
        json!({
            "os_form": self.os_form.is_some(),
            "os_exponents": self.os_form,
            "ky_form": self.ky_form.is_some(),
            "ky_witness": self.ky_form.map(|(r, s)| json!({"r": r, "s": s})),
            "tange_form": self.tange_form,
            "trace": rational_json(&self.trace),
        })
    }
}

fn rational_json(r: &BigRational) -> Value {
    if r.is_integer() {
        r.to_integer().to_i64().map_or_else(|| Value::String(r.to_string()), Value::from)
    } else {
        Value::String(r.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Norm,
    ConstF,
    Forms,
    Torsion,
}

impl Stage {
    pub fn tag(&self) -> &'static str {
        match self {
            Stage::Norm => "norm",
            Stage::ConstF => "constf",
            Stage::Forms => "forms",
            Stage::Torsion => "torsion",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterStatus {
    Candidate,
    Excluded(Stage),
    /// `|p_k| < 2`: no divisor to test.
    Untested,
}

/// Outcome of [`lens_candidate_filter`] with whatever evidence was computed.
/// `k` is 0-based here and 1-based in JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterVerdict {
    pub k: usize,
    pub status: FilterStatus,
    pub reason: String,
    pub const_f: Option<ConstFVerdict>,
    pub hat_k: Option<LaurentPoly>,
    pub forms: Option<FormVerdict>,
    pub torsion: Option<LensTestReport>,
}

impl FilterVerdict {
    fn new(k: usize) -> Self {
        FilterVerdict {
            k,
            status: FilterStatus::Candidate,
            reason: String::new(),
            const_f: None,
            hat_k: None,
            forms: None,
            torsion: None,
        }
    }

    fn exclude(mut self, stage: Stage, reason: String) -> Self {
        self.status = FilterStatus::Excluded(stage);
        self.reason = reason;
        self
    }

    pub fn is_excluded(&self) -> bool {
        matches!(self.status, FilterStatus::Excluded(_))
    }

    pub fn excluded_by(&self) -> Option<Stage> {
        match self.status {
            FilterStatus::Excluded(s) => Some(s),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let status = match self.status {
            FilterStatus::Candidate => "candidate",
            FilterStatus::Excluded(_) => "excluded",
            FilterStatus::Untested => "untested",
        };
        let mut v = json!({
            "k": self.k + 1,
            "status": status,
            "excluded_by": self.excluded_by().map(|s| s.tag()),
        });
        if !self.reason.is_empty() {
            v["reason"] = json!(self.reason);
        }
        if let Some(c) = &self.const_f {
            v["const_f"] = c.to_json();
        }
        if let Some(h) = &self.hat_k {
            v["hat_k_alexander"] = json!(h.to_string());
        }
        if let Some(f) = &self.forms {
            v["forms"] = f.to_json();
        }
        if let Some(t) = &self.torsion {
            v["torsion"] = t.to_json();
        }
        v
    }
}

/// Runs the cheapest tests first: the norm test (`f_k = 0`) or the
/// constant-`f` test (`|p_k| ≥ 5`), then the knot forms when every other
/// `|p_j| = 1`, then the lens torsion test at each divisor of `p_k`.
pub fn lens_candidate_filter(spec: &SurgerySpec, k: usize) -> Result<FilterVerdict> {
    let lambda = spec.lambda();
    if lambda < 3 {
        return Err(Error::BadArity(format!("the filter needs at least 3 components, got {lambda}")));
    }
    if k >= lambda {
        return Err(Error::BadArity(format!("component {k} out of range")));
    }
    cyclic_order(spec)?;
    let mut v = FilterVerdict::new(k);
    let slope = spec.slopes[k];
    let pk = slope.p();
    if pk.abs() < 2 {
        v.status = FilterStatus::Untested;
        v.reason = format!("|p_k| = {} has no divisor d ≥ 2", pk.abs());
        return Ok(v);
    }
    let f_k = spec.link.f_k(k);
    let (eta, p_prime) = others_products(spec, k);

    if f_k.is_zero() {
        if !norm_test_fzero(&p_prime, pk)? {
            return Ok(v.exclude(Stage::Norm, format!("f_k = 0 and the other p_j multiply to {p_prime}")));
        }
    } else if let (Some(c), true) = (f_k.as_constant(), pk.abs() >= 5) {
        let verdict = const_f_classify(&c, pk, &eta, lambda)?;
        let ok = verdict.admits(&p_prime);
        v.const_f = Some(verdict);
        if !ok {
            return Ok(v.exclude(Stage::ConstF, format!("f_k = {c}, η = {eta}, Π p_j = {p_prime}")));
        }
    }

    let others_unit = spec.slopes.iter().enumerate().all(|(j, s)| j == k || s.p().abs() == 1);
    if others_unit {
        let q_others: Vec<i64> = spec
            .slopes
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, s)| s.p() * s.q())
            .collect();
        let hat = hat_k_alexander(&f_k, &q_others, lambda)?;
        let unknot = hat.is_associate(&LaurentPoly::one(1));
        v.hat_k = Some(hat.clone());
        if !unknot {
            let forms = FormVerdict::evaluate(&hat, pk.unsigned_abs(), slope.q())?;
            let ok = forms.all_hold();
            v.forms = Some(forms);
            if !ok {
                return Ok(v.exclude(Stage::Forms, format!("the knot left by the other surgeries has Alexander polynomial {hat}")));
            }
        }
    }

    let report = lens_torsion_test(spec, k, None)?;
    let ok = report.aggregate();
    v.torsion = Some(report);
    if !ok {
        let bad: Vec<String> = v
            .torsion
            .as_ref()
            .unwrap()
            .outcomes
            .iter()
            .filter(|o| !o.pass)
            .map(|o| o.d.to_string())
            .collect();
        return Ok(v.exclude(Stage::Torsion, format!("no lens torsion matches at d = {}", bad.join(","))));
    }
    Ok(v)
}
