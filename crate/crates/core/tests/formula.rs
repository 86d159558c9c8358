use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;
use strip_homology::combinat::binomial;
use strip_homology::formula::{
    betti_growth_formula, convolve_values, dominant_term, formula_from_skylines, labeled_convolution, predicted_growth,
    skyline_count, skylines, tadpole_count, tail_count, tail_shapes, FormulaCache, GrowthFormula, GrowthTerm, SizeMultiset,
    TadpoleShape,
};
use strip_homology::morse::critical_counts_strip;

fn ms(pairs: &[(u32, u32)]) -> SizeMultiset {
    pairs.iter().copied().collect()
}

#[test]
fn degree_zero_has_one_empty_skyline() {
    for w in 2..=5 {
        let s = skylines(0, w);
        assert_eq!(s.len(), 1);
        assert!(s[0].tadpoles.is_empty() && s[0].tail.wheels.is_empty());
    }
}

#[test]
fn skyline_degrees_add_up() {
    for w in 2..=5 {
        for j in 0..=4 {
            for s in skylines(j, w) {
                assert_eq!(s.degree(), j);
                assert!(s.tadpoles.iter().all(|t| t.disks() > w));
            }
        }
    }
}

#[test]
fn tadpoles_need_a_follower() {
    let bad = TadpoleShape { leader: 1, free: SizeMultiset::new(), follower: SizeMultiset::new() };
    assert!(tadpole_count(&bad).is_err());
}

#[test]
fn two_wheel_tail_is_a_binomial() {
    let t = &tail_shapes(2, 1)[0];
    let f = tail_count(t);
    for n in 0..12 {
        assert_eq!(f.evaluate(n), BigInt::from(binomial(n as u64, 2)));
    }
}

#[test]
fn convolution_examples() {
    assert_eq!(labeled_convolution(&GrowthTerm::new(1, 2, 1), &GrowthTerm::new(1, 1, 1)), GrowthTerm::new(3, 3, 2));
    assert_eq!(labeled_convolution(&GrowthTerm::new(2, 0, 1), &GrowthTerm::new(5, 0, 3)), GrowthTerm::new(10, 0, 4));
    let f = GrowthFormula::term(GrowthTerm::new(1, 2, 1)).convolve(&GrowthFormula::term(GrowthTerm::new(1, 1, 1)));
    assert_eq!(f.to_string(), "3*C(n,3)*2^(n-3)");
}

fn sample_terms() -> Vec<GrowthTerm> {
    vec![
        GrowthTerm::new(1, 0, 1),
        GrowthTerm::new(3, 2, 1),
        GrowthTerm::new(-2, 1, 2),
        GrowthTerm::new(5, 3, 0),
        GrowthTerm::new(7, 0, 3),
    ]
}

// Labeled convolution is multiplication of exponential generating functions.
#[test]
fn convolution_matches_term_by_term_sums() {
    for x in sample_terms() {
        for y in sample_terms() {
            let closed = labeled_convolution(&x, &y);
            for n in 0..=12 {
                assert_eq!(closed.evaluate(n), convolve_values(|i| x.evaluate(i), |i| y.evaluate(i), n), "{x:?} * {y:?} at {n}");
            }
        }
    }
}

#[test]
fn convolution_is_commutative_and_associative() {
    let fs: Vec<GrowthFormula> = sample_terms().into_iter().map(GrowthFormula::term).collect();
    for a in &fs {
        for b in &fs {
            assert_eq!(a.convolve(b), b.convolve(a));
            for c in &fs {
                assert_eq!(a.convolve(b).convolve(c), a.convolve(&b.convolve(c)));
            }
        }
    }
    let one = GrowthFormula::one();
    assert_eq!(one.convolve(&fs[2]), fs[2]);
}

#[test]
fn formulas_match_critical_counts() {
    for w in 2..=5u32 {
        for j in 0..=4u32 {
            let f = betti_growth_formula(j, w).unwrap();
            for n in 1..=10usize {
                let c = critical_counts_strip(n, w);
                let want = c.get(j as usize).map(|x| BigInt::from(x.clone())).unwrap_or_default();
                assert_eq!(f.evaluate(n as u32), want, "j={j} w={w} n={n}");
            }
        }
    }
}

#[test]
fn both_summations_agree() {
    for w in 2..=4 {
        for j in 0..=4 {
            assert_eq!(betti_growth_formula(j, w).unwrap(), formula_from_skylines(j, w).unwrap(), "j={j} w={w}");
        }
    }
    let mut total = GrowthFormula::default();
    for s in skylines(2, 3) {
        total.add(&skyline_count(&s).unwrap());
    }
    assert_eq!(total, betti_growth_formula(2, 3).unwrap());
}

#[test]
fn formulas_are_nonnegative() {
    for w in 2..=4 {
        for j in 0..=4 {
            let f = betti_growth_formula(j, w).unwrap();
            assert!((0..=30).all(|n| !f.evaluate(n).is_negative()), "j={j} w={w}");
        }
    }
}

#[test]
fn first_betti_number_at_width_two() {
    let f = betti_growth_formula(1, 2).unwrap();
    assert_eq!(f.evaluate(3), BigInt::from(7));
    assert_eq!(f.evaluate(12), BigInt::from(114687));
    assert!(betti_growth_formula(1, 1).is_err());
}

#[test]
fn dominant_terms() {
    for w in 2..=5 {
        let f = betti_growth_formula(w - 1, w).unwrap();
        assert_eq!(dominant_term(&f).unwrap().1, 2, "w={w}");
    }
    assert_eq!(dominant_term(&betti_growth_formula(2, 2).unwrap()), Some((4, 3)));
    assert_eq!(predicted_growth(2, 2), (4, 3));
    for w in 2..=4 {
        for j in 0..=5 {
            assert_eq!(dominant_term(&betti_growth_formula(j, w).unwrap()), Some(predicted_growth(j, w)), "j={j} w={w}");
        }
    }
}

#[test]
fn singleton_tadpoles_are_polynomials() {
    // leader 1 with one follower of size 2 at width 2
    let t = TadpoleShape { leader: 1, free: SizeMultiset::new(), follower: ms(&[(2, 1)]) };
    let f = tadpole_count(&t).unwrap();
    assert!(f.terms().iter().all(|x| x.b <= 1));
    assert_eq!(f.evaluate(2), BigInt::from(0));
}

#[test]
fn cache_round_trip() {
    let path = std::env::temp_dir().join(format!("strip-formula-cache-{}.json", std::process::id()));
    let mut c = FormulaCache::load(&path).unwrap();
    let f = c.get(2, 3).unwrap();
    c.save(&path).unwrap();
    let mut d = FormulaCache::load(&path).unwrap();
    assert_eq!(d.get(2, 3).unwrap(), f);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(GrowthFormula::from_json(&f.to_json()).unwrap(), f);
    let by_key: BTreeMap<(u32, u32), BigInt> = f.terms().into_iter().map(|t| ((t.a, t.b), t.coefficient)).collect();
    assert_eq!(by_key.len(), f.terms().len());
}
