//! Link families and their Alexander polynomials.
//!
//! Links are symbolic: a family tag plus the polynomial `f` in
//! `Δ_L = (t_1-1)...(t_λ-1) f`. Nothing here looks at diagrams.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Monomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinkModel {
    /// The Milnor link `M_λ`, `λ ≥ 3`; `M_3` is the Borromean rings.
    Milnor { components: usize },
    /// The `n`-twisted Whitehead link `W_n`, `n ≠ 0`. Modeled with `f = n`.
    TwistedWhitehead { twists: i64 },
    /// An algebraically split link of unknots whose proper sublinks have
    /// vanishing Alexander polynomial, given by its `f`.
    BrunnianType { components: usize, f: LaurentPoly },
    /// Satellite of a 2-component link with linking number `k` along the
    /// component it links, with a Brunnian-type pattern.
    Satellite2 { k: i64, inner: Box<LinkModel> },
}

impl LinkModel {
    pub fn milnor(components: usize) -> Result<Self> {
        if components < 3 {
            return Err(Error::BadArity(format!(
                "Milnor links need at least 3 components, got {components}"
            )));
        }
        Ok(LinkModel::Milnor { components })
    }

    pub fn twisted_whitehead(twists: i64) -> Result<Self> {
        if twists == 0 {
            return Err(Error::Precondition("the twist count must be nonzero".into()));
        }
        Ok(LinkModel::TwistedWhitehead { twists })
    }

    /// Stores `f` shifted so it is centered under `t -> t^{-1}`; its sign is kept.
    pub fn brunnian_type(components: usize, f: LaurentPoly) -> Result<Self> {
        if components < 2 {
            return Err(Error::BadArity(format!(
                "Brunnian-type links need at least 2 components, got {components}"
            )));
        }
        if f.nvars() != components {
            return Err(Error::BadArity(format!(
                "f has {} variables but the link has {components} components",
                f.nvars()
            )));
        }
        let f = f.center_keep_sign()?;
        Ok(LinkModel::BrunnianType { components, f })
    }

    pub fn satellite2(k: i64, inner: LinkModel) -> Result<Self> {
        if matches!(inner, LinkModel::Satellite2 { .. }) {
            return Err(Error::Precondition("nested satellite patterns are not modeled".into()));
        }
        Ok(LinkModel::Satellite2 {
            k,
            inner: Box::new(inner),
        })
    }

    pub fn component_count(&self) -> usize {
        match self {
            LinkModel::Milnor { components } | LinkModel::BrunnianType { components, .. } => *components,
            LinkModel::TwistedWhitehead { .. } => 2,
            LinkModel::Satellite2 { inner, .. } => inner.component_count(),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            LinkModel::Milnor { .. } => "milnor",
            LinkModel::TwistedWhitehead { .. } => "whitehead",
            LinkModel::BrunnianType { .. } => "brunnian_type",
            LinkModel::Satellite2 { .. } => "satellite2",
        }
    }

    /// The polynomial `f` with `Δ_L = (t_1-1)...(t_λ-1) f`.
    pub fn f_part(&self) -> LaurentPoly {
        let n = self.component_count();
        match self {
            LinkModel::Milnor { components: 3 } => LaurentPoly::one(3),
            LinkModel::Milnor { .. } => LaurentPoly::zero(n),
            LinkModel::TwistedWhitehead { twists } => LaurentPoly::constant(2, *twists),
            LinkModel::BrunnianType { f, .. } => f.clone(),
            LinkModel::Satellite2 { k, inner } => satellite_f(*k, &inner.f_part(), n)
                .expect("pattern f has one variable per pattern component"),
        }
    }

    /// `f_k(t) = f(1, ..., t, ..., 1)` with `t` in slot `k` (0-based).
    pub fn f_k(&self, k: usize) -> LaurentPoly {
        self.f_part().restrict_to(k)
    }

    pub fn alexander(&self) -> LaurentPoly {
        let n = self.component_count();
        &product_of_t_minus_one(n) * &self.f_part()
    }

    pub fn to_json(&self) -> Value {
        match self {
            LinkModel::Milnor { components } => json!({"family": "milnor", "components": components}),
            LinkModel::TwistedWhitehead { twists } => json!({"family": "whitehead", "twists": twists}),
            LinkModel::BrunnianType { components, f } => {
                json!({"family": "brunnian_type", "components": components, "f": f.to_string()})
            }
            LinkModel::Satellite2 { k, inner } => json!({"family": "satellite2", "k": k, "inner": inner.to_json()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let family = v
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("link descriptor needs a string `family`".into()))?;
        let int = |key: &str| {
            v.get(key)
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Parse(format!("link descriptor needs an integer `{key}`")))
        };
        let count = |key: &str| {
            int(key).and_then(|n| usize::try_from(n).map_err(|_| Error::Parse(format!("`{key}` must be nonnegative"))))
        };
        match family {
            "milnor" => Self::milnor(count("components")?),
            "milnor3" => Self::milnor(3),
            "whitehead" => Self::twisted_whitehead(int("twists")?),
            "brunnian_type" => {
                let n = count("components")?;
                let text = v
                    .get("f")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("brunnian_type needs a string `f`".into()))?;
                Self::brunnian_type(n, LaurentPoly::parse_in(text, n)?)
            }
            "satellite2" => {
                let inner = v
                    .get("inner")
                    .ok_or_else(|| Error::Parse("satellite2 needs an `inner` descriptor".into()))?;
                Self::satellite2(int("k")?, Self::from_json(inner)?)
            }
            other => Err(Error::Parse(format!("unknown link family `{other}`"))),
        }
    }
}

/// `(t_1-1)(t_2-1)...(t_n-1)`.
pub fn product_of_t_minus_one(n: usize) -> LaurentPoly {
    (0..n).fold(LaurentPoly::one(n), |acc, i| &acc * &(LaurentPoly::var(n, i) - LaurentPoly::one(n)))
}

/// Alexander polynomial of the Milnor link `M_λ`.
pub fn milnor_alexander(lambda: usize) -> Result<LaurentPoly> {
    Ok(LinkModel::milnor(lambda)?.alexander())
}

/// Splitting `Δ_{L ∪ K} = (t_1...t_λ - 1)(t_1-1)...(t_λ-1) f + (t-1) g`, where
/// `K` is the extra component with variable `t` (last).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FGParts {
    pub lambda: usize,
    pub f: LaurentPoly,
    pub g: LaurentPoly,
    /// `f_i(t_i) = f(1, ..., t_i, ..., 1)`.
    pub per_index_f: Vec<LaurentPoly>,
    /// The input equals `sign * t^unit * reassemble()`.
    pub sign: i8,
    pub unit: Monomial,
}

impl FGParts {
    pub fn reassemble(&self) -> LaurentPoly {
        &(&split_prefactor(self.lambda) * &self.f.substitute(&embed_first(self.lambda), self.lambda + 1).unwrap())
            + &(&t_minus_one_last(self.lambda + 1) * &self.g)
    }

    /// The input polynomial, undoing the normalization.
    pub fn original(&self) -> LaurentPoly {
        self.reassemble().shift(&self.unit).scale(&BigInt::from(self.sign))
    }
}

fn embed_first(lambda: usize) -> Vec<Vec<i64>> {
    (0..lambda)
        .map(|i| {
            let mut e = vec![0; lambda + 1];
            e[i] = 1;
            e
        })
        .collect()
}

fn t_minus_one_last(n: usize) -> LaurentPoly {
    LaurentPoly::var(n, n - 1) - LaurentPoly::one(n)
}

/// `(t_1...t_λ - 1)(t_1-1)...(t_λ-1)` in `λ + 1` variables.
fn split_prefactor(lambda: usize) -> LaurentPoly {
    let n = lambda + 1;
    let mut all = vec![1; lambda];
    all.push(0);
    let prod_t = LaurentPoly::monomial(Monomial::new(all), 1) - LaurentPoly::one(n);
    (0..lambda).fold(prod_t, |acc, i| &acc * &(LaurentPoly::var(n, i) - LaurentPoly::one(n)))
}

fn raw_split(bar: &LaurentPoly, lambda: usize) -> Result<(LaurentPoly, LaurentPoly)> {
    let at_t1 = bar.set_one(lambda);
    let pre = split_prefactor(lambda).set_one(lambda);
    let f = at_t1
        .exact_div(&pre)
        .map_err(|_| Error::NotDecomposable("Δ(t_1, ..., t_λ, 1) is not divisible by the split prefactor".into()))?;
    let lifted = &split_prefactor(lambda) * &f.substitute(&embed_first(lambda), lambda + 1)?;
    let g = (bar - &lifted)
        .exact_div(&t_minus_one_last(lambda + 1))
        .map_err(|_| Error::NotDecomposable("remainder is not divisible by t - 1".into()))?;
    Ok((f, g))
}

/// Splits `Δ̄` into its `f` and `g` parts, normalized so that
/// `g(1, ..., 1, t) = (t-1)^{λ-2}` and `f` is centered.
pub fn normalize_fg(bar: &LaurentPoly, lambda: usize) -> Result<FGParts> {
    if lambda < 2 {
        return Err(Error::BadArity(format!("need at least 2 components, got {lambda}")));
    }
    if bar.nvars() != lambda + 1 {
        return Err(Error::BadArity(format!(
            "expected {} variables, got {}",
            lambda + 1,
            bar.nvars()
        )));
    }
    let (_, g0) = raw_split(bar, lambda)?;
    let g_line = g0.restrict_to(lambda);
    let target = LaurentPoly::t_pow_minus_one(1).pow(lambda as u32 - 2);
    let (sign, m) = g_line.associate_witness(&target).ok_or_else(|| {
        Error::NotDecomposable(format!("g(1, ..., 1, t) = {g_line} is not a unit times (t-1)^{}", lambda - 2))
    })?;
    let mut unit = vec![0; lambda + 1];
    unit[lambda] = m.exponents()[0];
    let mut normalized = bar.shift(&Monomial::new(unit.clone()).inverse()).scale(&BigInt::from(sign));
    let (mut f, _) = raw_split(&normalized, lambda)?;
    if !f.is_zero() {
        if let Ok(c) = f.center_keep_sign() {
            let (_, shift) = c.associate_witness(&f).expect("centering is a monomial shift");
            let mut s = shift.exponents().to_vec();
            s.push(0);
            let s = Monomial::new(s);
            normalized = normalized.shift(&s);
            for (u, x) in unit.iter_mut().zip(s.exponents()) {
                *u -= x;
            }
            f = c;
        }
    }
    let (f2, g) = raw_split(&normalized, lambda)?;
    debug_assert_eq!(f2, f);
    let per_index_f = (0..lambda).map(|i| f.restrict_to(i)).collect();
    Ok(FGParts {
        lambda,
        f,
        g,
        per_index_f,
        sign,
        unit: Monomial::new(unit),
    })
}

/// The model `Δ̄ = (t_1...t_λ - 1)(t_1-1)...(t_λ-1) f + (t-1)^{λ-1} t_1...t_λ`
/// used for Brunnian-type links: each `L_i = K_i ∪ K` contributes
/// `Δ_{K_i}(t_i) = t_i` and all higher correction terms vanish.
pub fn modeled_bar_alexander(f: &LaurentPoly) -> LaurentPoly {
    let lambda = f.nvars();
    let n = lambda + 1;
    let mut all = vec![1; lambda];
    all.push(0);
    let g = &LaurentPoly::monomial(Monomial::new(all), 1) * &t_minus_one_last(n).pow(lambda as u32 - 2);
    &(&split_prefactor(lambda) * &f.substitute(&embed_first(lambda), n).unwrap()) + &(&t_minus_one_last(n) * &g)
}

/// Alexander polynomial of the knot `K̂_i` obtained from component `i` after
/// `1/q_j` surgery on every other component:
/// `t + (-1)^{λ-1} (Π q_j) f_i(t) (t-1)^2`.
pub fn hat_k_alexander(f_i: &LaurentPoly, q_others: &[i64], lambda: usize) -> Result<LaurentPoly> {
    if f_i.nvars() != 1 {
        return Err(Error::BadArity(format!("f_i must have one variable, got {}", f_i.nvars())));
    }
    if lambda < 2 || q_others.len() != lambda - 1 {
        return Err(Error::BadArity(format!(
            "{} surgery coefficients given for a {lambda}-component link",
            q_others.len()
        )));
    }
    let mut c: BigInt = q_others.iter().map(|&q| BigInt::from(q)).product();
    if lambda.is_multiple_of(2) {
        c = -c;
    }
    let t = LaurentPoly::var(1, 0);
    let sq = LaurentPoly::t_pow_minus_one(1).pow(2);
    Ok(&t + &(&f_i.scale(&c) * &sq))
}

/// `(t^k - 1)/(t - 1)` as a Laurent polynomial; zero for `k = 0`.
pub fn geometric_quotient(k: i64) -> LaurentPoly {
    LaurentPoly::t_pow_minus_one(k)
        .exact_div(&LaurentPoly::t_pow_minus_one(1))
        .expect("t - 1 divides t^k - 1")
}

/// The `f` of the satellite link in variables `(t_1, t_1', ..., t_{q-1}')`:
/// `((t_1^k-1)/(t_1-1))^2 f'(t_1', ..., t_{q-1}', t_1^k)`.
fn satellite_f(k: i64, f_prime: &LaurentPoly, q: usize) -> Result<LaurentPoly> {
    if q < 2 || f_prime.nvars() != q {
        return Err(Error::BadArity(format!(
            "pattern f' must have q = {q} ≥ 2 variables, got {}",
            f_prime.nvars()
        )));
    }
    let images: Vec<Vec<i64>> = (0..q)
        .map(|j| {
            let mut e = vec![0; q];
            if j + 1 < q {
                e[j + 1] = 1;
            } else {
                e[0] = k;
            }
            e
        })
        .collect();
    let fp = f_prime.substitute(&images, q)?;
    let mut first = vec![vec![0; q]];
    first[0][0] = 1;
    let geo = geometric_quotient(k).substitute(&first, q)?;
    Ok(&geo.pow(2) * &fp)
}

/// Alexander polynomial of the satellite of a 2-component link with linking
/// number `k` and a `q`-component Brunnian-type pattern with part `f'`.
/// Variables are `(t_1, t_1', ..., t_{q-1}')`.
pub fn satellite_alexander(k: i64, f_prime: &LaurentPoly, q: usize) -> Result<LaurentPoly> {
    satellite_alexander_outer(2, k, f_prime, q)
}

/// As [`satellite_alexander`] for an outer link with `outer` components; the
/// polynomial vanishes identically once `outer ≥ 3`.
pub fn satellite_alexander_outer(outer: usize, k: i64, f_prime: &LaurentPoly, q: usize) -> Result<LaurentPoly> {
    if outer < 2 {
        return Err(Error::BadArity(format!("outer link needs at least 2 components, got {outer}")));
    }
    let f = satellite_f(k, f_prime, q)?;
    let n = outer + q - 2;
    if outer >= 3 || k == 0 {
        return Ok(LaurentPoly::zero(n));
    }
    Ok(&product_of_t_minus_one(q) * &f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::VarImage;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn uni(s: &str) -> LaurentPoly {
        LaurentPoly::parse_in(s, 1).unwrap()
    }

    #[test]
    fn milnor_examples() {
        let m3 = milnor_alexander(3).unwrap();
        assert_eq!(m3, product_of_t_minus_one(3));
        assert!(milnor_alexander(4).unwrap().is_zero());
        assert!(milnor_alexander(5).unwrap().is_zero());
        assert!(matches!(milnor_alexander(2), Err(Error::BadArity(_))));
        for i in 0..3 {
            let mut a = vec![VarImage::Power(1); 3];
            a[i] = VarImage::One;
            assert!(m3.specialize(&a).unwrap().is_zero());
        }
        assert!(m3.specialize(&[VarImage::One; 3]).unwrap().is_zero());
    }

    #[test]
    fn hat_k_examples() {
        let zero = LaurentPoly::zero(1);
        let h = hat_k_alexander(&zero, &[3, -2], 3).unwrap();
        assert_eq!(h, uni("t"));
        assert!(h.is_associate(&LaurentPoly::one(1)));
        let one = LaurentPoly::one(1);
        assert_eq!(hat_k_alexander(&one, &[1, 1], 3).unwrap(), uni("t^2-t+1"));
        assert_eq!(hat_k_alexander(&one, &[1, -1], 3).unwrap(), uni("-t^2+3*t-1"));
        assert!(hat_k_alexander(&one, &[1], 3).is_err());
        // Whitehead link, 1/1 on the other component: the trefoil again.
        assert_eq!(hat_k_alexander(&uni("-1"), &[1], 2).unwrap(), uni("t^2-t+1"));
    }

    #[test]
    fn satellite_examples() {
        let one2 = LaurentPoly::one(2);
        assert!(satellite_alexander(0, &one2, 2).unwrap().is_zero());
        let s1 = satellite_alexander(1, &one2, 2).unwrap();
        assert_eq!(s1, LaurentPoly::parse_in("t1*t2-t1-t2+1", 2).unwrap());
        let s2 = satellite_alexander(2, &one2, 2).unwrap();
        let want = LaurentPoly::parse_in("t1^2+2*t1+1", 2).unwrap()
            * LaurentPoly::parse_in("t1*t2-t1-t2+1", 2).unwrap();
        assert_eq!(s2, want);
        assert!(satellite_alexander_outer(3, 2, &one2, 2).unwrap().is_zero());
    }

    #[test]
    fn normalize_fg_milnor3() {
        let f = LaurentPoly::one(3);
        let bar = modeled_bar_alexander(&f);
        let parts = normalize_fg(&bar, 3).unwrap();
        assert_eq!(parts.f, f);
        assert_eq!(parts.g.restrict_to(3), uni("t-1"));
        assert_eq!(parts.reassemble(), bar);
        let flipped = normalize_fg(&-&bar, 3).unwrap();
        assert_eq!(flipped.f, parts.f);
        assert_eq!(flipped.g, parts.g);
        assert_eq!(flipped.sign, -1);
        assert_eq!(flipped.original(), -&bar);
    }

    #[test]
    fn normalize_fg_zero_f() {
        let bar = modeled_bar_alexander(&LaurentPoly::zero(4));
        let parts = normalize_fg(&bar, 4).unwrap();
        assert!(parts.f.is_zero());
        assert!(parts.per_index_f.iter().all(LaurentPoly::is_zero));
    }

    #[test]
    fn normalize_fg_rejects_bad_input() {
        let bad = LaurentPoly::parse_in("t1+t2+t3+t4", 4).unwrap();
        assert!(matches!(normalize_fg(&bad, 3), Err(Error::NotDecomposable(_))));
        let bad_g = &split_prefactor(3) + &LaurentPoly::parse_in("t4^2-2*t4+1", 4).unwrap().scale(&BigInt::from(3));
        assert!(matches!(normalize_fg(&bad_g, 3), Err(Error::NotDecomposable(_))));
    }

    #[test]
    fn json_round_trip() {
        let models = vec![
            LinkModel::milnor(4).unwrap(),
            LinkModel::twisted_whitehead(-2).unwrap(),
            LinkModel::brunnian_type(3, LaurentPoly::parse_in("t1+t1^-1-1", 3).unwrap()).unwrap(),
            LinkModel::satellite2(2, LinkModel::milnor(3).unwrap()).unwrap(),
        ];
        for m in models {
            assert_eq!(LinkModel::from_json(&m.to_json()).unwrap(), m);
        }
        assert!(LinkModel::from_json(&json!({"family": "torus"})).is_err());
        assert!(LinkModel::from_json(&json!({"family": "milnor"})).is_err());
    }

    #[test]
    fn brunnian_type_centers_f() {
        let m = LinkModel::brunnian_type(3, LaurentPoly::parse_in("-t1^3+t1^2-t1", 3).unwrap()).unwrap();
        assert_eq!(m.f_part(), LaurentPoly::parse_in("-t1-t1^-1+1", 3).unwrap());
        assert!(LinkModel::brunnian_type(3, LaurentPoly::parse_in("t1+2", 3).unwrap()).is_err());
    }

    #[test]
    fn satellite_f_part_matches_formula() {
        let m = LinkModel::satellite2(3, LinkModel::milnor(3).unwrap()).unwrap();
        assert_eq!(m.component_count(), 3);
        assert_eq!(m.alexander(), satellite_alexander(3, &LaurentPoly::one(3), 3).unwrap());
    }

    fn trace(p: &LaurentPoly) -> num_rational::BigRational {
        let (_, v) = p.dense().unwrap();
        let n = v.len() - 1;
        if n == 0 {
            return num_rational::BigRational::zero();
        }
        -num_rational::BigRational::new(v[n - 1].clone(), v[n].clone())
    }

    proptest! {
        #[test]
        fn hat_k_is_normalized_at_one(coeffs in prop::collection::vec(-5i64..=5, 0..5), qs in prop::collection::vec(-4i64..=4, 2)) {
            let f = LaurentPoly::from_coeffs(&coeffs);
            let h = hat_k_alexander(&f, &qs, 3).unwrap();
            prop_assert!(h.eval_at_ones().is_one());
        }

        #[test]
        fn normalize_fg_reassembles(terms in prop::collection::vec((prop::collection::vec(-2i64..=2, 3), -4i64..=4), 0..5)) {
            let raw = LaurentPoly::from_terms(3, terms);
            let f = &raw + &raw.invert_vars();
            let bar = modeled_bar_alexander(&f);
            let parts = normalize_fg(&bar, 3).unwrap();
            prop_assert_eq!(parts.original(), bar);
            prop_assert!(parts.f.is_associate(&f) || f.is_zero());
            prop_assert_eq!(parts.g.restrict_to(3), uni("t-1"));
        }

        #[test]
        fn satellite_trace_is_minus_two(
            k in prop_oneof![-4i64..=-2, 2i64..=4],
            inner in prop::collection::vec(-2i64..=2, 2),
            sign in prop_oneof![Just(1i64), Just(-1i64)],
        ) {
            // f'(1, ..., 1, t) = sign + inner terms that cancel at t = 1.
            let fp = LaurentPoly::from_terms(2, vec![
                (vec![0, 0], sign),
                (vec![0, 1], inner[0]),
                (vec![0, -1], inner[0]),
                (vec![0, 0], -2 * inner[0]),
                (vec![1, 1], inner[1]),
                (vec![-1, -1], inner[1]),
                (vec![0, 0], -2 * inner[1]),
            ]);
            prop_assume!(fp.eval_at_ones() == BigInt::from(sign));
            let f_line = satellite_f(k, &fp, 2).unwrap().restrict_to(0);
            let want = &geometric_quotient(k).pow(2) * &fp.substitute(&[vec![0], vec![k]], 1).unwrap();
            prop_assert_eq!(&f_line, &want);
            prop_assert_eq!(trace(&f_line), num_rational::BigRational::from_integer((-2).into()));
        }
    }
}
