use num_integer::Integer;
use num_traits::One;
use proptest::prelude::*;

use surgelens::alexander::LinkModel;
use surgelens::catalog::{classify_milnor3, lens_canonical, LensSpace, Outcome};
use surgelens::obstruct::{lifted_equation_solve, tange_check, lens_candidate_filter, LiftedEquationProblem};
use surgelens::scan::grid_slopes;
use surgelens::surgery::{spec_torsion_factor, SurgerySlope, SurgerySpec};
use surgelens::LaurentPoly;

fn lens_specs(max_p: u64) -> Vec<(SurgerySpec, LensSpace)> {
    let link = LinkModel::milnor(3).unwrap();
    let grid = grid_slopes(max_p, 8);
    let mut out = Vec::new();
    for eps in [1i64, -1] {
        for c in [1i64, 2, 3] {
            let a = SurgerySlope::new(eps, 1).unwrap();
            let b = SurgerySlope::new(c * eps, 1).unwrap();
            for s in &grid {
                let slopes = vec![a, b, *s];
                if let Outcome::Lens(l) = classify_milnor3(&slopes).unwrap().outcome {
                    out.push((SurgerySpec::new(link.clone(), slopes).unwrap(), l));
                }
            }
        }
    }
    out
}

#[test]
fn genuine_lens_factors_solve_the_lifted_equation() {
    let specs = lens_specs(30);
    assert!(specs.len() > 50);
    for (spec, l) in &specs {
        for k in 0..3 {
            let p = spec.slopes[k].p().unsigned_abs();
            if p < 2 {
                continue;
            }
            let f = spec_torsion_factor(spec, k);
            let sols = lifted_equation_solve(&LiftedEquationProblem::new(&f, p).unwrap());
            assert!(!sols.is_empty(), "{:?} k={k} -> {l}", spec.slopes);
        }
    }
}

#[test]
fn lens_verdicts_are_never_excluded() {
    for (spec, l) in lens_specs(30) {
        for k in 0..3 {
            let v = lens_candidate_filter(&spec, k).unwrap();
            assert!(!v.is_excluded(), "{:?} k={k} -> {l}: {:?}", spec.slopes, v.excluded_by());
        }
    }
}

fn slope() -> impl Strategy<Value = SurgerySlope> {
    (-20i64..=20, 1i64..=8)
        .prop_filter("reduced", |(p, q)| p.gcd(q) == 1)
        .prop_map(|(p, q)| SurgerySlope::new(p, q).unwrap())
}

fn flip(s: &SurgerySlope) -> SurgerySlope {
    SurgerySlope::new(-s.p(), s.q()).unwrap()
}

proptest! {
    #[test]
    fn tange_implies_trace_one(coeffs in prop::collection::vec(-3i64..=3, 1..7)) {
        let delta = LaurentPoly::from_coeffs(&coeffs);
        if let Ok(v) = tange_check(&delta) {
            if v.holds {
                prop_assert!(v.trace.is_one());
            }
        }
    }

    #[test]
    fn classifier_symmetries(a in slope(), b in slope(), c in slope()) {
        let v = classify_milnor3(&[a, b, c]).unwrap().outcome;
        prop_assert_eq!(classify_milnor3(&[c, a, b]).unwrap().outcome, v);
        prop_assert_eq!(classify_milnor3(&[b, a, c]).unwrap().outcome, v);
        let flipped = classify_milnor3(&[flip(&a), flip(&b), flip(&c)]).unwrap().outcome;
        match (v, flipped) {
            (Outcome::Lens(x), Outcome::Lens(y)) => {
                // canonical forms absorb the mirror L(p,q) -> L(p,-q)
                prop_assert_eq!(lens_canonical(x.p() as i64, -x.q()).unwrap(), y);
            }
            (x, y) => prop_assert_eq!(x, y),
        }
    }

    #[test]
    fn canonical_is_a_class_invariant(p in 2i64..200, q in -400i64..400) {
        prop_assume!(p.gcd(&q) == 1);
        let c = lens_canonical(p, q).unwrap();
        let qbar = surgelens::cyclo::mod_inverse(q, p).unwrap();
        prop_assert_eq!(lens_canonical(p, q + p).unwrap(), c);
        prop_assert_eq!(lens_canonical(p, qbar).unwrap(), c);
        prop_assert_eq!(lens_canonical(p, -q).unwrap(), c);
    }
}
