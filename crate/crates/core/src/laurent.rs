//! Sparse multivariate Laurent polynomials with integer coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors, so iteration is
//! lexicographic and printing/hashing are deterministic. Coefficients are
//! arbitrary precision.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exponent vector of a Laurent monomial. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<i64>);

impl Monomial {
    pub fn new(exponents: Vec<i64>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn combine(&self, other: &Monomial, f: impl Fn(i64, i64) -> i64) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.combine(other, |a, b| a + b)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.combine(other, |a, b| a - b)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }
}

/// Image of one variable under [`LaurentPoly::specialize`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarImage {
    /// Substitute 1.
    One,
    /// Substitute `u^e` for the fresh variable `u`.
    Power(i64),
}

/// How a polynomial transforms under `t -> t^{-1}`:
/// `D(t^{-1}) = sign * t^{-twist} * D(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Duality {
    pub sign: i8,
    pub twist: Monomial,
}

impl Duality {
    /// True when `D(t^{-1}) = D(t)` holds on the nose.
    pub fn is_exact_symmetry(&self) -> bool {
        self.sign == 1 && self.twist.is_one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(Monomial::one(nvars), c)
    }

    pub fn monomial(m: Monomial, c: impl Into<BigInt>) -> Self {
        let nvars = m.len();
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { nvars, terms }
    }

    /// The variable `t_i` (0-based) in a ring with `nvars` variables.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(Monomial(e), 1)
    }

    /// `t_i^e` in a ring with `nvars` variables.
    pub fn var_pow(nvars: usize, i: usize, e: i64) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = e;
        Self::monomial(Monomial(exps), 1)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I, C>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "monomial length must equal the variable count");
            p.add_term(Monomial(e), c.into());
        }
        p
    }

    /// Univariate polynomial from `(exponent, coefficient)` pairs.
    pub fn univariate<C: Into<BigInt> + Clone>(terms: &[(i64, C)]) -> Self {
        Self::from_terms(1, terms.iter().map(|(e, c)| (vec![*e], c.clone().into())))
    }

    /// Univariate polynomial `c_0 + c_1 t + c_2 t^2 + ...`.
    pub fn from_coeffs<C: Into<BigInt> + Clone>(coeffs: &[C]) -> Self {
        Self::from_terms(
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (vec![i as i64], c.clone().into())),
        )
    }

    /// `t^e - 1` in one variable.
    pub fn t_pow_minus_one(e: i64) -> Self {
        Self::univariate(&[(e, 1), (0, -1)])
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lexicographic order of exponents.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Coefficient of `t^e` of a univariate polynomial.
    pub fn coeff_at(&self, e: i64) -> BigInt {
        self.coeff(&Monomial(vec![e]))
    }

    /// The lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// The lexicographically smallest term.
    pub fn trailing_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next()
    }

    /// Returns the constant value if the polynomial has no non-trivial monomials.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Minimum and maximum exponent of variable `var` over the support.
    pub fn exponent_range(&self, var: usize) -> Option<(i64, i64)> {
        let mut it = self.terms.keys().map(|m| m.0[var]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Multiplies by the monomial `t^m`.
    pub fn shift(&self, m: &Monomial) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitutes `t_i -> t^{images[i]}` where each image is an exponent
    /// vector over `target_nvars` variables. Exponents combine additively.
    pub fn substitute(&self, images: &[Vec<i64>], target_nvars: usize) -> Result<Self> {
        if images.len() != self.nvars {
            return Err(Error::BadArity(format!(
                "substitution covers {} of {} variables",
                images.len(),
                self.nvars
            )));
        }
        if let Some(bad) = images.iter().find(|v| v.len() != target_nvars) {
            return Err(Error::BadArity(format!(
                "image of length {} in a ring of {} variables",
                bad.len(),
                target_nvars
            )));
        }
        let mut out = Self::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0i64; target_nvars];
            for (&k, img) in m.0.iter().zip(images) {
                if k != 0 {
                    for (slot, &x) in e.iter_mut().zip(img) {
                        *slot += k * x;
                    }
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Sends every variable either to 1 or to a power of one fresh variable `u`.
    /// The result always has exactly one variable.
    pub fn specialize(&self, assignment: &[VarImage]) -> Result<Self> {
        let images: Vec<Vec<i64>> = assignment
            .iter()
            .map(|a| match a {
                VarImage::One => vec![0],
                VarImage::Power(e) => vec![*e],
            })
            .collect();
        self.substitute(&images, 1)
    }

    /// Sets variable `var` to 1 and drops it from the ring.
    pub fn set_one(&self, var: usize) -> Self {
        assert!(var < self.nvars);
        let mut out = Self::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.remove(var);
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// The one-variable polynomial obtained by setting every variable except
    /// `var` to 1.
    pub fn restrict_to(&self, var: usize) -> Self {
        let assignment: Vec<VarImage> = (0..self.nvars)
            .map(|i| if i == var { VarImage::Power(1) } else { VarImage::One })
            .collect();
        self.specialize(&assignment).expect("assignment covers all variables")
    }

    /// `P(t_1^{-1}, ..., t_n^{-1})`.
    pub fn invert_vars(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.inverse(), c.clone())).collect(),
        }
    }

    /// Value at `t_1 = ... = t_n = 1`.
    pub fn eval_at_ones(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Exact division in the Laurent ring.
    ///
    /// Division proceeds by lexicographic leading terms. Every quotient term
    /// must lie in the box cut out by the per-variable exponent ranges of
    /// numerator and denominator, which bounds the number of steps.
    pub fn exact_div(&self, den: &LaurentPoly) -> Result<LaurentPoly> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.nvars != den.nvars {
            return Err(Error::BadArity(format!(
                "dividing a {}-variable polynomial by a {}-variable one",
                self.nvars, den.nvars
            )));
        }
        if self.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        let mut bounds = Vec::with_capacity(self.nvars);
        for v in 0..self.nvars {
            let (nlo, nhi) = self.exponent_range(v).unwrap();
            let (dlo, dhi) = den.exponent_range(v).unwrap();
            let (lo, hi) = (nlo - dlo, nhi - dhi);
            if lo > hi {
                return Err(Error::NotDivisible);
            }
            bounds.push((lo, hi));
        }
        let (dm, dc) = {
            let (m, c) = den.leading_term().unwrap();
            (m.clone(), c.clone())
        };
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(&dm);
            let in_box = qm.0.iter().zip(&bounds).all(|(&e, &(lo, hi))| lo <= e && e <= hi);
            if !in_box {
                return Err(Error::NotDivisible);
            }
            let (qc, r) = c.div_rem(&dc);
            if !r.is_zero() {
                return Err(Error::NotDivisible);
            }
            let step = LaurentPoly::monomial(qm, qc);
            rem -= &(&step * den);
            quot += &step;
        }
        Ok(quot)
    }

    /// Returns `(sign, m)` with `self = sign * t^m * other` when the two are
    /// associates, i.e. differ by a unit of the Laurent ring.
    pub fn associate_witness(&self, other: &LaurentPoly) -> Option<(i8, Monomial)> {
        if self.nvars != other.nvars || self.len() != other.len() {
            return None;
        }
        if self.is_zero() {
            return Some((1, Monomial::one(self.nvars)));
        }
        let (am, ac) = self.leading_term().unwrap();
        let (bm, bc) = other.leading_term().unwrap();
        let sign: i8 = if ac == bc {
            1
        } else if *ac == -bc {
            -1
        } else {
            return None;
        };
        let shift = am.div(bm);
        let candidate = other.shift(&shift).scale(&BigInt::from(sign));
        (candidate == *self).then_some((sign, shift))
    }

    pub fn is_associate(&self, other: &LaurentPoly) -> bool {
        self.associate_witness(other).is_some()
    }

    /// Centers the polynomial under `t -> t^{-1}` and reports the duality
    /// it satisfies.
    ///
    /// Each variable is shifted so that its exponent range `[lo, hi]` has
    /// `lo + hi` equal to 0 (even spread) or 1 (odd spread). The result then
    /// must satisfy `D(t^{-1}) = ±t^{-twist} D(t)` with `twist` the vector of
    /// those parities; otherwise [`Error::NotSymmetric`]. The overall sign is
    /// fixed so that the lexicographically first term is positive.
    pub fn duality_center(&self) -> Result<(LaurentPoly, Duality)> {
        if self.is_zero() {
            return Ok((
                self.clone(),
                Duality {
                    sign: 1,
                    twist: Monomial::one(self.nvars),
                },
            ));
        }
        let mut shift = Vec::with_capacity(self.nvars);
        let mut twist = Vec::with_capacity(self.nvars);
        for v in 0..self.nvars {
            let (lo, hi) = self.exponent_range(v).unwrap();
            let s = lo + hi;
            shift.push(-Integer::div_floor(&s, &2));
            twist.push(Integer::mod_floor(&s, &2));
        }
        let mut centered = self.shift(&Monomial(shift));
        let twist = Monomial(twist);
        let mirror = centered.invert_vars().shift(&twist);
        let sign = if mirror == centered {
            1
        } else if mirror == -&centered {
            -1
        } else {
            return Err(Error::NotSymmetric);
        };
        if centered.trailing_term().is_some_and(|(_, c)| c.is_negative()) {
            centered = -centered;
        }
        Ok((centered, Duality { sign, twist }))
    }

    /// Monomial shift of `self` that is centered as in
    /// [`LaurentPoly::duality_center`], keeping the overall sign.
    pub fn center_keep_sign(&self) -> Result<LaurentPoly> {
        let (c, _) = self.duality_center()?;
        match c.associate_witness(self) {
            Some((s, _)) if s < 0 => Ok(-c),
            _ => Ok(c),
        }
    }

    /// The centered associate of [`LaurentPoly::duality_center`].
    pub fn duality_normalize(&self) -> Result<LaurentPoly> {
        self.duality_center().map(|(p, _)| p)
    }

    /// Dense coefficients of a univariate polynomial: `(lowest exponent, coeffs)`.
    pub fn dense(&self) -> Option<(i64, Vec<BigInt>)> {
        assert_eq!(self.nvars, 1, "dense form needs a univariate polynomial");
        let lo = self.terms.keys().next()?.0[0];
        let hi = self.terms.keys().next_back()?.0[0];
        let mut v = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (m, c) in &self.terms {
            v[(m.0[0] - lo) as usize] = c.clone();
        }
        Some((lo, v))
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.nvars, "one name per variable");
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { "-" } else { "+" });
            }
            let mono: Vec<String> = m
                .0
                .iter()
                .zip(names)
                .filter(|(e, _)| **e != 0)
                .map(|(&e, n)| if e == 1 { n.to_string() } else { format!("{n}^{e}") })
                .collect();
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }

    /// Parses the textual form using the given variable names, in order.
    pub fn parse_with(text: &str, names: &[&str]) -> Result<LaurentPoly> {
        let raw = parse_terms(text)?;
        let mut p = LaurentPoly::zero(names.len());
        for (coeff, factors) in raw {
            let mut e = vec![0i64; names.len()];
            for (name, k) in factors {
                let idx = names
                    .iter()
                    .position(|n| *n == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))?;
                e[idx] += k;
            }
            p.add_term(Monomial(e), coeff);
        }
        Ok(p)
    }

    /// Parses the textual form, collecting variable names from the text.
    /// Names are ordered `t1 < t2 < ... < t10 < t`; names without a numeric
    /// suffix sort after numbered ones with the same prefix.
    pub fn parse_auto(text: &str) -> Result<(LaurentPoly, Vec<String>)> {
        let raw = parse_terms(text)?;
        let mut names: Vec<String> = raw
            .iter()
            .flat_map(|(_, f)| f.iter().map(|(n, _)| n.clone()))
            .collect();
        names.sort_by_key(|n| name_key(n));
        names.dedup();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let p = Self::parse_with(text, &refs)?;
        Ok((p, names))
    }

    /// Parses a polynomial expected to live in `nvars` variables named by
    /// [`default_var_names`]. A one-variable polynomial may use any single name.
    pub fn parse_in(text: &str, nvars: usize) -> Result<LaurentPoly> {
        if nvars == 1 {
            let (p, names) = Self::parse_auto(text)?;
            return match names.len() {
                0 => Ok(Self::constant(1, p.as_constant().unwrap())),
                1 => Ok(p),
                _ => Err(Error::Parse(format!(
                    "expected one variable, found {}",
                    names.join(", ")
                ))),
            };
        }
        let names = default_var_names(nvars);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::parse_with(text, &refs)
    }
}

/// `t` for one variable, `t1, ..., tn` otherwise.
pub fn default_var_names(nvars: usize) -> Vec<String> {
    if nvars == 1 {
        vec!["t".to_string()]
    } else {
        (1..=nvars).map(|i| format!("t{i}")).collect()
    }
}

fn name_key(name: &str) -> (String, u64) {
    let split = name
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_digit())
        .last()
        .map(|(i, _)| i);
    match split {
        Some(i) if i > 0 => (name[..i].to_string(), name[i..].parse().unwrap_or(u64::MAX)),
        _ => (name.to_string(), u64::MAX),
    }
}

type RawTerm = (BigInt, Vec<(String, i64)>);

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.s[start..self.pos]).unwrap())
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphabetic() || self.s[self.pos] == b'_') {
            self.pos += 1;
            while self.pos < self.s.len()
                && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_' || self.s[self.pos] == b'\'')
            {
                self.pos += 1;
            }
            Some(String::from_utf8(self.s[start..self.pos].to_vec()).unwrap())
        } else {
            None
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {}", self.pos))
    }
}

fn parse_exponent(cur: &mut Cursor<'_>) -> Result<i64> {
    let close = if cur.eat(b'(') {
        Some(b')')
    } else if cur.eat(b'{') {
        Some(b'}')
    } else {
        None
    };
    let neg = if cur.eat(b'-') {
        true
    } else {
        cur.eat(b'+');
        false
    };
    let Some(d) = cur.digits().map(str::to_owned) else {
        return Err(cur.err("expected exponent"));
    };
    let v: i64 = d.parse().map_err(|_| cur.err("exponent out of range"))?;
    if let Some(c) = close {
        if !cur.eat(c) {
            return Err(cur.err("unclosed exponent"));
        }
    }
    Ok(if neg { -v } else { v })
}

fn parse_terms(text: &str) -> Result<Vec<RawTerm>> {
    let mut cur = Cursor {
        s: text.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    if cur.peek().is_none() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut first = true;
    loop {
        let mut sign = BigInt::one();
        if cur.eat(b'-') {
            sign = -sign;
        } else if !cur.eat(b'+') && !first {
            return Err(cur.err("expected `+` or `-`"));
        }
        first = false;
        let mut coeff = BigInt::one();
        let mut factors = Vec::new();
        let mut need_factor = true;
        if let Some(d) = cur.digits().map(str::to_owned) {
            coeff = d.parse::<BigInt>().map_err(|_| cur.err("bad coefficient"))?;
            need_factor = cur.eat(b'*');
        }
        while need_factor {
            let name = cur.ident().ok_or_else(|| cur.err("expected variable"))?;
            let e = if cur.eat(b'^') { parse_exponent(&mut cur)? } else { 1 };
            factors.push((name, e));
            need_factor = cur.eat(b'*');
        }
        out.push((sign * coeff, factors));
        if cur.peek().is_none() {
            break;
        }
    }
    Ok(out)
}

impl std::str::FromStr for LaurentPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_auto(s).map(|(p, _)| p)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_var_names(self.nvars);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.display_with(&refs))
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(mut self) -> LaurentPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -self.clone()
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = LaurentPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, rhs: LaurentPoly) -> LaurentPoly { (&self).$f(&rhs) }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, rhs: &LaurentPoly) -> LaurentPoly { (&self).$f(rhs) }
        }
        impl $tr<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, rhs: LaurentPoly) -> LaurentPoly { self.$f(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl std::iter::Sum for LaurentPoly {
    fn sum<I: Iterator<Item = LaurentPoly>>(mut iter: I) -> LaurentPoly {
        let Some(mut acc) = iter.next() else {
            panic!("summing an empty iterator of polynomials needs a variable count");
        };
        for p in iter {
            acc += &p;
        }
        acc
    }
}

/// `Δ(t_1, ..., t_λ, 1)`: drops the last variable by setting it to 1.
pub fn torres_specialize(delta: &LaurentPoly, linking_numbers: &[i64]) -> Result<LaurentPoly> {
    let lambda = linking_numbers.len();
    if lambda == 0 {
        return Err(Error::BadArity("at least one sublink component is needed".into()));
    }
    if delta.nvars() != lambda + 1 {
        return Err(Error::BadArity(format!(
            "expected a polynomial in {} variables, got {}",
            lambda + 1,
            delta.nvars()
        )));
    }
    Ok(delta.set_one(lambda))
}

/// The right-hand side the Torres specialization should match up to units:
/// `(t_1^{k_1}...t_λ^{k_λ} - 1) Δ'` for λ ≥ 2 and `(t^{k}-1)/(t-1) Δ'` for λ = 1.
pub fn torres_expected(sublink: &LaurentPoly, linking_numbers: &[i64]) -> Result<LaurentPoly> {
    let lambda = linking_numbers.len();
    if sublink.nvars() != lambda {
        return Err(Error::BadArity(format!(
            "sublink polynomial has {} variables, expected {lambda}",
            sublink.nvars()
        )));
    }
    if lambda == 1 {
        let k = linking_numbers[0];
        let factor = LaurentPoly::t_pow_minus_one(k).exact_div(&LaurentPoly::t_pow_minus_one(1))?;
        return Ok(&factor * sublink);
    }
    let m = LaurentPoly::monomial(Monomial(linking_numbers.to_vec()), 1);
    Ok(&(&m - &LaurentPoly::one(lambda)) * sublink)
}

/// Checks the Torres relation up to multiplication by `±t^m`.
pub fn torres_consistent(delta: &LaurentPoly, sublink: &LaurentPoly, linking_numbers: &[i64]) -> Result<bool> {
    let lhs = torres_specialize(delta, linking_numbers)?;
    let rhs = torres_expected(sublink, linking_numbers)?;
    Ok(lhs.is_associate(&rhs))
}
