//! Closed-form lens-space classifications for Milnor links and twisted
//! Whitehead links, and canonical forms of lens spaces.

use std::fmt;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::cyclo::mod_inverse;
use crate::error::{Error, Result};
use crate::obstruct::{lens_candidate_filter, FilterVerdict};
use crate::surgery::{h1_of_orders, SurgerySlope, SurgerySpec};

/// `L(p, q)`, with `L(1, 0) = S^3` and `L(0, 1) = S^1 x S^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LensSpace {
    p: u64,
    q: i64,
}

impl LensSpace {
    /// Checks `gcd(p, q) = 1`; a negative `p` is folded into `q`.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p.gcd(&q) != 1 {
            return Err(Error::Precondition(format!("L({p},{q}) needs gcd(p, q) = 1")));
        }
        let (p, q) = if p < 0 { (-p, -q) } else { (p, q) };
        Ok(LensSpace { p: p as u64, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn canonical(&self) -> LensSpace {
        match self.p {
            0 => LensSpace { p: 0, q: 1 },
            1 => LensSpace { p: 1, q: 0 },
            p => {
                let p = p as i64;
                let q = self.q.rem_euclid(p);
                let qbar = mod_inverse(q, p).expect("q is a unit");
                let best = [q, p - q, qbar, p - qbar].into_iter().min().unwrap();
                LensSpace { p: p as u64, q: best }
            }
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }
}

impl fmt::Display for LensSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({},{})", self.p, self.q)
    }
}

/// Canonical representative of `L(p, q)` under `q' ≡ ±q^{±1} (mod p)`.
pub fn lens_canonical(p: i64, q: i64) -> Result<LensSpace> {
    Ok(LensSpace::new(p, q)?.canonical())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Lens(LensSpace),
    NotLens,
    NotCyclicH1,
    OutOfTableRange,
}

impl Outcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::Lens(_) => "lens",
            Outcome::NotLens => "not_lens",
            Outcome::NotCyclicH1 => "not_cyclic_h1",
            Outcome::OutOfTableRange => "out_of_table_range",
        }
    }

    pub fn lens(&self) -> Option<LensSpace> {
        match self {
            Outcome::Lens(l) => Some(*l),
            _ => None,
        }
    }
}

/// Which of the three lens families matched, for which sign and slope order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchedCase {
    pub case: u8,
    pub epsilon: i8,
    pub permutation: Vec<usize>,
    /// `L(p, q)` as produced by the case formula, before canonicalization.
    pub raw: (i64, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    PaperTheorem,
    TorsionCertificate,
}

impl Source {
    pub fn tag(&self) -> &'static str {
        match self {
            Source::PaperTheorem => "paper_theorem",
            Source::TorsionCertificate => "torsion_certificate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationVerdict {
    pub outcome: Outcome,
    pub matched: Option<MatchedCase>,
    pub source: Source,
    pub evidence: Option<Vec<FilterVerdict>>,
}

impl ClassificationVerdict {
    fn plain(outcome: Outcome) -> Self {
        ClassificationVerdict {
            outcome,
            matched: None,
            source: Source::PaperTheorem,
            evidence: None,
        }
    }

    pub fn is_lens(&self) -> bool {
        matches!(self.outcome, Outcome::Lens(_))
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({"outcome": self.outcome.tag()});
        if let Outcome::Lens(l) = self.outcome {
            v["lens"] = json!([l.p(), l.q()]);
        }
        if let Some(m) = &self.matched {
            v["case"] = json!(m.case);
            v["epsilon"] = json!(m.epsilon);
            v["permutation"] = json!(m.permutation);
        }
        v["source"] = json!(self.source.tag());
        if let Some(ev) = &self.evidence {
            v["evidence"] = Value::Array(ev.iter().map(FilterVerdict::to_json).collect());
        }
        v
    }
}

const PERMUTATIONS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn is_integer_slope(s: &SurgerySlope, value: i64) -> bool {
    s.q() == 1 && s.p() == value
}

/// The three families shared by both classifiers: a first slope `c ε`
/// (`c = 1, 2, 3`) and a second slope `p/q` with `|ε p - (6, 4, 3)_c q| = 1`.
fn lens_case(first: &SurgerySlope, second: &SurgerySlope, eps: i64) -> Option<(u8, i64, i64)> {
    let (p, q) = (second.p(), second.q());
    if is_integer_slope(first, eps) && (eps * p - 6 * q).abs() == 1 {
        return Some((1, p, 4 * eps * q));
    }
    if is_integer_slope(first, 2 * eps) && (eps * p - 4 * q).abs() == 1 {
        return Some((2, 2 * p, eps * (8 * q - p)));
    }
    if is_integer_slope(first, 3 * eps) && (eps * p - 3 * q).abs() == 1 {
        // `ε(3q - 2p)` is right for ε = 1 only; the torsion at the full
        // order `3p` picks `ε(3q - 2εp)` for both signs.
        return Some((3, 3 * p, eps * (3 * q - 2 * eps * p)));
    }
    None
}

fn lens_verdict(case: u8, eps: i64, permutation: Vec<usize>, raw: (i64, i64)) -> ClassificationVerdict {
    let lens = lens_canonical(raw.0, raw.1).expect("case formulas give coprime pairs");
    ClassificationVerdict {
        outcome: Outcome::Lens(lens),
        matched: Some(MatchedCase {
            case,
            epsilon: eps as i8,
            permutation,
            raw,
        }),
        source: Source::PaperTheorem,
        evidence: None,
    }
}

fn cyclic(slopes: &[SurgerySlope]) -> bool {
    h1_of_orders(&slopes.iter().map(|s| s.p().unsigned_abs()).collect::<Vec<_>>()).is_cyclic()
}

/// Lens surgeries on the Borromean rings.
pub fn classify_milnor3(slopes: &[SurgerySlope]) -> Result<ClassificationVerdict> {
    if slopes.len() != 3 {
        return Err(Error::BadArity(format!("Borromean rings take 3 slopes, got {}", slopes.len())));
    }
    if !cyclic(slopes) {
        return Ok(ClassificationVerdict::plain(Outcome::NotCyclicH1));
    }
    for perm in PERMUTATIONS3 {
        for eps in [1, -1] {
            let [a, b, c] = perm.map(|i| &slopes[i]);
            if !is_integer_slope(a, eps) {
                continue;
            }
            if let Some((case, p, q)) = lens_case(b, c, eps) {
                return Ok(lens_verdict(case, eps, perm.to_vec(), (p, q)));
            }
        }
    }
    Ok(ClassificationVerdict::plain(Outcome::NotLens))
}

/// Lens surgeries on the `n`-twisted Whitehead link.
pub fn classify_twisted_whitehead(n: i64, slopes: &[SurgerySlope]) -> Result<ClassificationVerdict> {
    if n == 0 {
        return Err(Error::Precondition("the twisted Whitehead link needs n ≠ 0".into()));
    }
    if slopes.len() != 2 {
        return Err(Error::BadArity(format!("the Whitehead link takes 2 slopes, got {}", slopes.len())));
    }
    if !cyclic(slopes) {
        return Ok(ClassificationVerdict::plain(Outcome::NotCyclicH1));
    }
    if n.abs() >= 2 {
        return Ok(ClassificationVerdict::plain(Outcome::NotLens));
    }
    for perm in [[0, 1], [1, 0]] {
        if let Some((case, p, q)) = lens_case(&slopes[perm[0]], &slopes[perm[1]], n) {
            return Ok(lens_verdict(case, n, perm.to_vec(), (p, q)));
        }
    }
    Ok(ClassificationVerdict::plain(Outcome::NotLens))
}

/// Milnor links: three components defer to [`classify_milnor3`], more never
/// give lens spaces. With `evidence`, the obstruction pipeline is run on
/// every component and attached.
pub fn classify_milnor(lambda: usize, slopes: &[SurgerySlope], evidence: bool) -> Result<ClassificationVerdict> {
    if lambda < 3 {
        return Err(Error::BadArity(format!("Milnor links have at least 3 components, got {lambda}")));
    }
    if slopes.len() != lambda {
        return Err(Error::BadArity(format!("{} slopes for {lambda} components", slopes.len())));
    }
    let mut verdict = if lambda == 3 {
        classify_milnor3(slopes)?
    } else if !cyclic(slopes) {
        ClassificationVerdict::plain(Outcome::NotCyclicH1)
    } else {
        ClassificationVerdict::plain(Outcome::NotLens)
    };
    if evidence && verdict.outcome != Outcome::NotCyclicH1 {
        let spec = SurgerySpec::new(crate::alexander::LinkModel::milnor(lambda)?, slopes.to_vec())?;
        let order = crate::surgery::h1_surgery(&spec).cyclic_order();
        if order.is_some() {
            verdict.evidence = Some((0..lambda).map(|k| lens_candidate_filter(&spec, k)).collect::<Result<_>>()?);
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slopes(s: &str) -> Vec<SurgerySlope> {
        SurgerySlope::parse_list(s).unwrap()
    }

    fn lens_of(v: &ClassificationVerdict) -> (u64, i64) {
        let l = v.outcome.lens().expect("lens verdict");
        (l.p(), l.q())
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(lens_canonical(7, 4).unwrap(), LensSpace::new(7, 2).unwrap());
        assert_eq!(lens_canonical(30, -11).unwrap(), LensSpace::new(30, 11).unwrap());
        assert_eq!(lens_canonical(1, 5).unwrap(), LensSpace::new(1, 0).unwrap());
        assert_eq!(lens_canonical(0, -1).unwrap(), LensSpace::new(0, 1).unwrap());
        assert_eq!(lens_canonical(-12, -11).unwrap(), LensSpace::new(12, 1).unwrap());
        assert_eq!(lens_canonical(2, 1).unwrap(), LensSpace::new(2, 1).unwrap());
        assert!(lens_canonical(6, 3).is_err());
    }

    #[test]
    fn canonical_respects_homeomorphisms() {
        for p in 2..=40i64 {
            for q in -p..=p {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let c = lens_canonical(p, q).unwrap();
                assert!(1 <= c.q() && c.q() <= p / 2 || p == 2);
                assert_eq!(lens_canonical(p, q + p).unwrap(), c);
                assert_eq!(lens_canonical(p, -q).unwrap(), c);
                assert_eq!(lens_canonical(p, mod_inverse(q, p).unwrap()).unwrap(), c);
                assert!(c.is_canonical());
            }
        }
    }

    #[test]
    fn milnor3_examples() {
        let v = classify_milnor3(&slopes("1/1,1/1,7/1")).unwrap();
        assert_eq!(lens_of(&v), (7, 2));
        let m = v.matched.as_ref().unwrap();
        assert_eq!((m.case, m.epsilon, m.raw), (1, 1, (7, 4)));
        assert_eq!(
            v.to_json(),
            json!({"outcome":"lens","lens":[7,2],"case":1,"epsilon":1,"permutation":[0,1,2],"source":"paper_theorem"})
        );

        let v = classify_milnor3(&slopes("1/1,2/1,9/2")).unwrap();
        assert_eq!(lens_of(&v), lens_canonical(18, 7).map(|l| (l.p(), l.q())).unwrap());
        assert_eq!(v.matched.unwrap().raw, (18, 7));

        let v = classify_milnor3(&slopes("1/1,3/1,10/3")).unwrap();
        assert_eq!(lens_of(&v), (30, 11));
        assert_eq!(v.matched.unwrap().raw, (30, -11));

        assert_eq!(classify_milnor3(&slopes("2/1,3/1,5/1")).unwrap().outcome, Outcome::NotLens);
        assert_eq!(classify_milnor3(&slopes("2/1,4/1,1/1")).unwrap().outcome, Outcome::NotCyclicH1);
        assert_eq!(classify_milnor3(&slopes("0/1,1/1,1/1")).unwrap().outcome, Outcome::NotLens);
        assert!(classify_milnor3(&slopes("1/1,1/1")).is_err());
    }

    #[test]
    fn milnor3_symmetries() {
        let cases = ["1/1,1/1,7/1", "1/1,2/1,9/2", "1/1,3/1,10/3", "-1/1,-1/1,-5/1", "-1/1,-2/1,-7/2", "2/1,3/1,5/1", "1/1,1/1,7/8"];
        for s in cases {
            let base = slopes(s);
            let v = classify_milnor3(&base).unwrap().outcome;
            for perm in PERMUTATIONS3 {
                let permuted: Vec<_> = perm.iter().map(|&i| base[i]).collect();
                assert_eq!(classify_milnor3(&permuted).unwrap().outcome, v, "{s} {perm:?}");
            }
            let flipped: Vec<_> = base.iter().map(|x| SurgerySlope::new(-x.p(), x.q()).unwrap()).collect();
            assert_eq!(classify_milnor3(&flipped).unwrap().outcome, v, "{s} flipped");
        }
    }

    #[test]
    fn whitehead_examples() {
        let v = classify_twisted_whitehead(1, &slopes("1/1,7/1")).unwrap();
        assert_eq!(lens_of(&v), (7, 2));
        assert_eq!(classify_twisted_whitehead(3, &slopes("1/1,7/1")).unwrap().outcome, Outcome::NotLens);
        assert_eq!(classify_twisted_whitehead(2, &slopes("3/1,5/1")).unwrap().outcome, Outcome::NotLens);
        let v = classify_twisted_whitehead(-1, &slopes("-3/1,-4/1")).unwrap();
        assert_eq!(lens_of(&v), (12, 5));
        let m = v.matched.unwrap();
        assert_eq!((m.case, m.raw), (3, (-12, 5)));
        let v = classify_twisted_whitehead(-1, &slopes("-4/1,-3/1")).unwrap();
        assert_eq!(v.matched.unwrap().permutation, vec![1, 0]);
        assert!(classify_twisted_whitehead(0, &slopes("1/1,1/1")).is_err());
    }

    /// Both slopes of a Whitehead lens surgery have `|p| ≥ 2` in cases (2)
    /// and (3), so the torsion is computable at the full order and must match
    /// the classified lens space there.
    #[test]
    fn whitehead_lens_matches_full_order_torsion() {
        use crate::alexander::LinkModel;
        use crate::surgery::{cyclic_order, match_lens_torsion, torsion_link_surgery};
        let mut grid = Vec::new();
        for p in -20i64..=20 {
            for q in 1..=8i64 {
                if p.abs() >= 2 && p.gcd(&q) == 1 {
                    grid.push(SurgerySlope::new(p, q).unwrap());
                }
            }
        }
        let mut checked = 0;
        for n in [1i64, -1] {
            for a in &grid {
                for b in &grid {
                    let v = classify_twisted_whitehead(n, &[*a, *b]).unwrap();
                    let Some(l) = v.outcome.lens() else { continue };
                    let spec = SurgerySpec::new(LinkModel::twisted_whitehead(n).unwrap(), vec![*a, *b]).unwrap();
                    let tau = torsion_link_surgery(&spec, cyclic_order(&spec).unwrap()).unwrap();
                    let qbar = mod_inverse(l.q(), l.p() as i64).unwrap();
                    assert!(match_lens_torsion(&tau, Some(qbar)).is_some(), "W_{n}({a}, {b}) -> {l}");
                    checked += 1;
                }
            }
        }
        assert!(checked >= 80);
    }

    #[test]
    fn milnor_examples() {
        assert_eq!(classify_milnor(4, &slopes("1/1,1/1,1/1,5/1"), false).unwrap().outcome, Outcome::NotLens);
        assert_eq!(lens_of(&classify_milnor(3, &slopes("1/1,1/1,5/1"), false).unwrap()), (5, 1));
        assert_eq!(classify_milnor(5, &slopes("1/1,1/1,1/1,1/1,7/3"), false).unwrap().outcome, Outcome::NotLens);
        let v = classify_milnor(4, &slopes("1/1,1/1,2/1,3/1"), true).unwrap();
        let ev = v.evidence.clone().unwrap();
        assert_eq!(ev.len(), 4);
        assert!(ev[3].is_excluded());
        assert_eq!(v.to_json()["evidence"].as_array().unwrap().len(), 4);
    }
}
