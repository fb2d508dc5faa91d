//! Finite cyclic group rings `Z[u]/(u^p-1)`, their quotient by the orbit sum
//! `1+u+...+u^{p-1}`, and cyclotomic fields `Q(ζ_d)`.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

/// Which ideal the group ring is taken modulo.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuotientMode {
    /// `Z[u]/(u^p - 1)`, coefficient vectors of length `p`.
    Full,
    /// `Z[u]/(1 + u + ... + u^{p-1})`, coefficient vectors of length `p - 1`.
    Reduced,
}

impl fmt::Display for QuotientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuotientMode::Full => "full",
            QuotientMode::Reduced => "reduced",
        })
    }
}

impl std::str::FromStr for QuotientMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(QuotientMode::Full),
            "reduced" => Ok(QuotientMode::Reduced),
            _ => Err(Error::Parse(format!("unknown quotient mode `{s}`"))),
        }
    }
}

/// Element of `Z[u]/(u^p-1)` or `Z[u]/(1+...+u^{p-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupRingElem {
    order: u64,
    mode: QuotientMode,
    coeffs: Vec<BigInt>,
}

impl GroupRingElem {
    /// Builds `Σ c_i u^i`, folding exponents modulo `p` and reducing.
    pub fn new(order: u64, mode: QuotientMode, coeffs: &[BigInt]) -> Self {
        assert!(order >= 2, "group ring order must be at least 2");
        let mut full = vec![BigInt::zero(); order as usize];
        for (i, c) in coeffs.iter().enumerate() {
            full[i % order as usize] += c;
        }
        Self::from_full(order, mode, full)
    }

    pub fn from_i64(order: u64, mode: QuotientMode, coeffs: &[i64]) -> Self {
        let v: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        Self::new(order, mode, &v)
    }

    /// Takes a length-`p` vector modulo `u^p - 1` into the requested mode.
    fn from_full(order: u64, mode: QuotientMode, mut full: Vec<BigInt>) -> Self {
        debug_assert_eq!(full.len(), order as usize);
        if mode == QuotientMode::Reduced {
            let top = full.pop().unwrap();
            if !top.is_zero() {
                for c in &mut full {
                    *c -= &top;
                }
            }
        }
        GroupRingElem {
            order,
            mode,
            coeffs: full,
        }
    }

    /// Image of a one-variable Laurent polynomial under `t -> u`.
    pub fn from_laurent(poly: &LaurentPoly, order: u64, mode: QuotientMode) -> Self {
        assert_eq!(poly.nvars(), 1, "group ring images need a univariate polynomial");
        let mut full = vec![BigInt::zero(); order as usize];
        for (m, c) in poly.terms() {
            let e = m.exponents()[0].rem_euclid(order as i64) as usize;
            full[e] += c;
        }
        Self::from_full(order, mode, full)
    }

    pub fn zero(order: u64, mode: QuotientMode) -> Self {
        Self::from_full(order, mode, vec![BigInt::zero(); order as usize])
    }

    pub fn one(order: u64, mode: QuotientMode) -> Self {
        Self::u_pow(order, mode, 0)
    }

    /// `u^e`.
    pub fn u_pow(order: u64, mode: QuotientMode, e: i64) -> Self {
        let mut full = vec![BigInt::zero(); order as usize];
        full[e.rem_euclid(order as i64) as usize] = BigInt::one();
        Self::from_full(order, mode, full)
    }

    /// `u^e - 1`.
    pub fn u_pow_minus_one(order: u64, mode: QuotientMode, e: i64) -> Self {
        Self::u_pow(order, mode, e) - Self::one(order, mode)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn mode(&self) -> QuotientMode {
        self.mode
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Length-`p` representative modulo `u^p - 1`.
    fn to_full(&self) -> Vec<BigInt> {
        let mut v = self.coeffs.clone();
        v.resize(self.order as usize, BigInt::zero());
        v
    }

    /// Reduces a full-mode element to the reduced quotient; identity otherwise.
    pub fn reduce(&self) -> Self {
        Self::from_full(self.order, QuotientMode::Reduced, self.to_full())
    }

    fn check_same_ring(&self, other: &Self) {
        assert!(
            self.order == other.order && self.mode == other.mode,
            "group ring mismatch: ({}, {}) vs ({}, {})",
            self.order,
            self.mode,
            other.order,
            other.mode
        );
    }

    /// Multiplication by `u^l`.
    pub fn shift(&self, l: i64) -> Self {
        let p = self.order as usize;
        let full = self.to_full();
        let s = l.rem_euclid(p as i64) as usize;
        let mut out = vec![BigInt::zero(); p];
        for (i, c) in full.into_iter().enumerate() {
            out[(i + s) % p] = c;
        }
        Self::from_full(self.order, self.mode, out)
    }

    /// `self * (u^e - 1)` in linear time.
    pub fn mul_u_pow_minus_one(&self, e: i64) -> Self {
        self.shift(e) - self.clone()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        GroupRingElem {
            order: self.order,
            mode: self.mode,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Ring homomorphism `u -> ζ_d` into `Q(ζ_d)`.
    pub fn project_psi(&self, d: u64) -> Result<CycNum> {
        if d == 0 || !self.order.is_multiple_of(d) || (d == 1 && self.mode == QuotientMode::Reduced) {
            return Err(Error::BadDivisor { d, p: self.order });
        }
        Ok(CycNum::from_coeffs(d, &self.coeffs))
    }

    /// Returns `(sign, l)` with `self = sign * u^l * other`, trying `l = 0, 1, ...`
    /// and `+1` before `-1`.
    pub fn associate_witness(&self, other: &Self) -> Option<(i8, u64)> {
        self.check_same_ring(other);
        if self.is_zero() || other.is_zero() {
            return (self.is_zero() && other.is_zero()).then_some((1, 0));
        }
        let neg = -self.clone();
        for l in 0..self.order {
            let cand = other.shift(l as i64);
            if cand == *self {
                return Some((1, l));
            }
            if cand == neg {
                return Some((-1, l));
            }
        }
        None
    }

    pub fn associate_eq(&self, other: &Self) -> bool {
        self.associate_witness(other).is_some()
    }

    /// All `2p` elements `±u^l x`, in order `l = 0..p`, `+` before `-`.
    pub fn associates(&self) -> Vec<GroupRingElem> {
        let mut out = Vec::with_capacity(2 * self.order as usize);
        for l in 0..self.order {
            let s = self.shift(l as i64);
            out.push(s.clone());
            out.push(-s);
        }
        out
    }

    /// Deterministic representative of the associate class: the associate with
    /// the lexicographically greatest coefficient vector. A unit maps to `1`.
    pub fn canonical_rep(&self) -> Self {
        self.associates()
            .into_iter()
            .max_by(|a, b| a.coeffs.cmp(&b.coeffs))
            .unwrap()
    }

    /// Parses `[c0,c1,...]`.
    pub fn parse(text: &str, order: u64, mode: QuotientMode) -> Result<Self> {
        if order < 2 {
            return Err(Error::Precondition(format!("group ring order {order} is below 2")));
        }
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected `[c0,c1,...]`, got `{text}`")))?;
        let coeffs = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad coefficient `{}`", c.trim())))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Self::new(order, mode, &coeffs))
    }
}

impl fmt::Display for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Neg for GroupRingElem {
    type Output = GroupRingElem;
    fn neg(mut self) -> GroupRingElem {
        for c in &mut self.coeffs {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Add for GroupRingElem {
    type Output = GroupRingElem;
    fn add(mut self, rhs: GroupRingElem) -> GroupRingElem {
        self.check_same_ring(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl Sub for GroupRingElem {
    type Output = GroupRingElem;
    fn sub(mut self, rhs: GroupRingElem) -> GroupRingElem {
        self.check_same_ring(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a -= b;
        }
        self
    }
}

impl Mul for &GroupRingElem {
    type Output = GroupRingElem;
    fn mul(self, rhs: &GroupRingElem) -> GroupRingElem {
        self.check_same_ring(rhs);
        let p = self.order as usize;
        let mut full = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    full[(i + j) % p] += a * b;
                }
            }
        }
        GroupRingElem::from_full(self.order, self.mode, full)
    }
}

impl Mul for GroupRingElem {
    type Output = GroupRingElem;
    fn mul(self, rhs: GroupRingElem) -> GroupRingElem {
        &self * &rhs
    }
}

/// Associate class of a group ring element, keyed by its canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AssociateClass {
    rep: GroupRingElem,
}

impl AssociateClass {
    pub fn of(x: &GroupRingElem) -> Self {
        AssociateClass {
            rep: x.canonical_rep(),
        }
    }

    pub fn representative(&self) -> &GroupRingElem {
        &self.rep
    }

    pub fn contains(&self, x: &GroupRingElem) -> bool {
        self.rep.associate_eq(x)
    }
}

/// Data for `Q(ζ_d)`: the cyclotomic polynomial and the reductions of `ζ^k`.
#[derive(Debug)]
pub struct CycloField {
    d: u64,
    phi: usize,
    poly: Vec<BigInt>,
    powers: Vec<Vec<BigInt>>,
    units: Vec<u64>,
}

impl CycloField {
    fn build(d: u64) -> Self {
        let poly = cyclotomic_coeffs(d);
        let phi = poly.len() - 1;
        let mut powers = Vec::with_capacity(d as usize);
        let mut cur = vec![BigInt::zero(); phi];
        cur[0] = BigInt::one();
        for _ in 0..d {
            powers.push(cur.clone());
            let top = cur.pop().unwrap();
            cur.insert(0, BigInt::zero());
            if !top.is_zero() {
                for (c, a) in cur.iter_mut().zip(&poly) {
                    *c -= &top * a;
                }
            }
        }
        let units = (1..=d).filter(|&a| a.gcd(&d) == 1).map(|a| a % d).collect();
        CycloField {
            d,
            phi,
            poly,
            powers,
            units,
        }
    }

    pub fn order(&self) -> u64 {
        self.d
    }

    /// Euler's φ(d), the degree of the field.
    pub fn degree(&self) -> usize {
        self.phi
    }

    /// Exponents `a` in `[0, d)` coprime to `d`, indexing the Galois group.
    pub fn galois_exponents(&self) -> &[u64] {
        &self.units
    }

    /// Reduces `Σ c_i ζ^i` into the power basis.
    pub fn reduce(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.phi];
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &self.powers[i % self.d as usize];
            for (o, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *o += c * r;
                }
            }
        }
        out
    }

    /// Product of two power-basis vectors.
    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut prod = vec![BigInt::zero(); 2 * self.phi];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce(&prod)
    }

    /// Multiplication by `ζ^l`.
    pub fn shift(&self, a: &[BigInt], l: u64) -> Vec<BigInt> {
        let l = (l % self.d) as usize;
        let mut prod = vec![BigInt::zero(); self.phi + l];
        for (i, x) in a.iter().enumerate() {
            prod[i + l] = x.clone();
        }
        self.reduce(&prod)
    }

    /// The `2d` power-basis vectors `±ζ^l v`, tagged with `(sign, l)`.
    pub fn associates(&self, v: &[BigInt]) -> Vec<(i8, u64, Vec<BigInt>)> {
        let mut out = Vec::with_capacity(2 * self.d as usize);
        let mut cur = v.to_vec();
        for l in 0..self.d {
            out.push((1, l, cur.clone()));
            out.push((-1, l, cur.iter().map(|c| -c).collect()));
            cur = self.shift(&cur, 1);
        }
        out
    }

    fn conjugate(&self, a: &[BigInt], s: u64) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.d as usize];
        for (i, x) in a.iter().enumerate() {
            v[(i as u64 * s % self.d) as usize] += x;
        }
        self.reduce(&v)
    }

    /// `Res(Φ_d, a)`, the norm of `a(ζ_d)`.
    fn norm(&self, a: &[BigInt]) -> BigInt {
        let to_q = |v: &[BigInt]| v.iter().map(|c| BigRational::from_integer(c.clone())).collect::<Vec<_>>();
        let r = resultant(to_q(&self.poly), to_q(a));
        debug_assert!(r.is_integer());
        r.to_integer()
    }
}

fn trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

/// Resultant of two rational polynomials in ascending coefficient order.
fn resultant(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> BigRational {
    trim(&mut a);
    trim(&mut b);
    let mut acc = BigRational::one();
    loop {
        if a.is_empty() || b.is_empty() {
            return BigRational::zero();
        }
        let (m, n) = (a.len() - 1, b.len() - 1);
        if n == 0 {
            return acc * num_traits::pow(b[0].clone(), m);
        }
        if m == 0 {
            return acc * num_traits::pow(a[0].clone(), n);
        }
        if m < n {
            if m * n % 2 == 1 {
                acc = -acc;
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let lc = b[n].clone();
        let mut r = a;
        for k in (n..=m).rev() {
            if r[k].is_zero() {
                continue;
            }
            let q = &r[k] / &lc;
            for (j, bj) in b.iter().enumerate() {
                let t = &q * bj;
                r[k - n + j] -= t;
            }
        }
        r.truncate(n);
        trim(&mut r);
        if r.is_empty() {
            return BigRational::zero();
        }
        let deg_r = r.len() - 1;
        if m * n % 2 == 1 {
            acc = -acc;
        }
        acc *= num_traits::pow(lc, m - deg_r);
        a = b;
        b = r;
    }
}

fn cyclotomic_coeffs(d: u64) -> Vec<BigInt> {
    assert!(d >= 1, "cyclotomic index must be positive");
    let mut poly = LaurentPoly::t_pow_minus_one(d as i64);
    for e in 1..d {
        if d.is_multiple_of(e) {
            poly = poly
                .exact_div(&field(e).as_laurent())
                .expect("cyclotomic factors divide x^d - 1");
        }
    }
    let (lo, v) = poly.dense().unwrap();
    debug_assert_eq!(lo, 0);
    v
}

impl CycloField {
    fn as_laurent(&self) -> LaurentPoly {
        LaurentPoly::from_coeffs(&self.poly)
    }
}

static FIELDS: OnceLock<RwLock<HashMap<u64, Arc<CycloField>>>> = OnceLock::new();

/// Shared, lazily built field data for `Q(ζ_d)`.
pub fn field(d: u64) -> Arc<CycloField> {
    let cache = FIELDS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(f) = cache.read().unwrap().get(&d) {
        return f.clone();
    }
    let built = Arc::new(CycloField::build(d));
    cache.write().unwrap().entry(d).or_insert(built).clone()
}

/// The cyclotomic polynomial `Φ_d` in one variable.
pub fn cyclotomic_poly(d: u64) -> LaurentPoly {
    field(d).as_laurent()
}

/// Euler's totient.
pub fn euler_phi(d: u64) -> u64 {
    field(d).phi as u64
}

/// Positive divisors of `n` that are at least 2, ascending.
pub fn divisors_from_two(n: u64) -> Vec<u64> {
    (2..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Exact element `num(ζ_d) / den(ζ_d)` of `Q(ζ_d)`.
#[derive(Clone)]
pub struct CycNum {
    field: Arc<CycloField>,
    num: Vec<BigInt>,
    den: Vec<BigInt>,
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CycNum")
            .field("d", &self.field.d)
            .field("num", &self.num)
            .field("den", &self.den)
            .finish()
    }
}

impl CycNum {
    fn integral(field: Arc<CycloField>, num: Vec<BigInt>) -> Self {
        let mut den = vec![BigInt::zero(); field.phi];
        den[0] = BigInt::one();
        CycNum { field, num, den }
    }

    /// `Σ c_i ζ_d^i`.
    pub fn from_coeffs(d: u64, coeffs: &[BigInt]) -> Self {
        let f = field(d);
        let num = f.reduce(coeffs);
        Self::integral(f, num)
    }

    pub fn from_int(d: u64, n: impl Into<BigInt>) -> Self {
        Self::from_coeffs(d, &[n.into()])
    }

    /// `ζ_d^k`, any integer `k`.
    pub fn zeta_pow(d: u64, k: i64) -> Self {
        let f = field(d);
        let num = f.powers[k.rem_euclid(d as i64) as usize].clone();
        Self::integral(f, num)
    }

    /// `ζ_d^k - 1`.
    pub fn zeta_pow_minus_one(d: u64, k: i64) -> Self {
        Self::zeta_pow(d, k) - Self::from_int(d, 1)
    }

    /// Evaluates a one-variable Laurent polynomial at `ζ_d`.
    pub fn from_laurent(d: u64, poly: &LaurentPoly) -> Self {
        assert_eq!(poly.nvars(), 1, "evaluation needs a univariate polynomial");
        let mut v = vec![BigInt::zero(); d as usize];
        for (m, c) in poly.terms() {
            v[m.exponents()[0].rem_euclid(d as i64) as usize] += c;
        }
        Self::from_coeffs(d, &v)
    }

    pub fn order(&self) -> u64 {
        self.field.d
    }

    pub fn field(&self) -> &CycloField {
        &self.field
    }

    /// Numerator in the power basis `1, ζ, ..., ζ^{φ(d)-1}`.
    pub fn num(&self) -> &[BigInt] {
        &self.num
    }

    /// Denominator in the power basis.
    pub fn den(&self) -> &[BigInt] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    fn check_same_field(&self, other: &Self) {
        assert_eq!(self.field.d, other.field.d, "cyclotomic field mismatch");
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other);
        if other.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(CycNum {
            field: self.field.clone(),
            num: self.field.mul(&self.num, &other.den),
            den: self.field.mul(&self.den, &other.num),
        })
    }

    pub fn inv(&self) -> Result<Self> {
        CycNum::from_int(self.order(), 1).checked_div(self)
    }

    /// Galois conjugate `ζ -> ζ^s`; `s` must be coprime to `d`.
    pub fn galois(&self, s: u64) -> Self {
        assert_eq!(s.gcd(&self.field.d), 1, "Galois exponent must be coprime to d");
        CycNum {
            field: self.field.clone(),
            num: self.field.conjugate(&self.num, s),
            den: self.field.conjugate(&self.den, s),
        }
    }

    /// The field norm `N_d`, the product of all Galois conjugates.
    pub fn d_norm(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        BigRational::new(self.field.norm(&self.num), self.field.norm(&self.den))
    }

    /// `self * ζ^l`.
    pub fn mul_zeta_pow(&self, l: u64) -> Self {
        CycNum {
            field: self.field.clone(),
            num: self.field.shift(&self.num, l),
            den: self.den.clone(),
        }
    }

    /// Returns `(sign, l)` with `self = sign * ζ^l * other`, `l` in `[0, d)`,
    /// trying `+1` before `-1` at each `l`.
    pub fn associate_witness(&self, other: &Self) -> Option<(i8, u64)> {
        self.check_same_field(other);
        if self.is_zero() || other.is_zero() {
            return (self.is_zero() && other.is_zero()).then_some((1, 0));
        }
        let lhs = self.field.mul(&self.num, &other.den);
        let neg: Vec<BigInt> = lhs.iter().map(|c| -c).collect();
        let mut rhs = self.field.mul(&other.num, &self.den);
        for l in 0..self.field.d {
            if rhs == lhs {
                return Some((1, l));
            }
            if rhs == neg {
                return Some((-1, l));
            }
            rhs = self.field.shift(&rhs, 1);
        }
        None
    }

    pub fn associate_eq(&self, other: &Self) -> bool {
        self.associate_witness(other).is_some()
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        self.field.d == other.field.d
            && self.field.mul(&self.num, &other.den) == self.field.mul(&other.num, &self.den)
    }
}

impl Eq for CycNum {}

impl Hash for CycNum {
    /// Only the field order is hashed; equal values may have different
    /// numerator/denominator pairs.
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.d.hash(state);
    }
}

impl Add for CycNum {
    type Output = CycNum;
    fn add(self, rhs: CycNum) -> CycNum {
        self.check_same_field(&rhs);
        let f = &self.field;
        let (num, den) = if self.den == rhs.den {
            (self.num.iter().zip(&rhs.num).map(|(a, b)| a + b).collect(), self.den.clone())
        } else {
            let a = f.mul(&self.num, &rhs.den);
            let b = f.mul(&rhs.num, &self.den);
            (a.iter().zip(&b).map(|(x, y)| x + y).collect(), f.mul(&self.den, &rhs.den))
        };
        CycNum {
            field: self.field,
            num,
            den,
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(mut self) -> CycNum {
        for c in &mut self.num {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Sub for CycNum {
    type Output = CycNum;
    fn sub(self, rhs: CycNum) -> CycNum {
        self + (-rhs)
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.check_same_field(rhs);
        CycNum {
            field: self.field.clone(),
            num: self.field.mul(&self.num, &rhs.num),
            den: self.field.mul(&self.den, &rhs.den),
        }
    }
}

impl Mul for CycNum {
    type Output = CycNum;
    fn mul(self, rhs: CycNum) -> CycNum {
        &self * &rhs
    }
}

/// Inverse of `a` modulo `m` in `[0, m)`, if it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let m = m.abs();
    if m == 1 {
        return Some(0);
    }
    let g = Integer::extended_gcd(&a.rem_euclid(m), &m);
    (g.gcd == 1).then(|| g.x.rem_euclid(m))
}

/// True when `n` is a power `ℓ^k` (k ≥ 1) of a prime; returns `ℓ`.
pub fn prime_power_base(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let l = (2..=n).find(|q| n.is_multiple_of(*q)).unwrap();
    let mut m = n;
    while m.is_multiple_of(l) {
        m /= l;
    }
    (m == 1).then_some(l)
}

/// Absolute value of an integral norm equals 1.
pub fn is_unit_norm(r: &BigRational) -> bool {
    r.abs().is_one()
}
