use std::collections::BTreeMap;

use num_bigint::BigUint;
use strip_homology::complexes::{strip_cells, weighted_cells};
use strip_homology::morse::{
    canonical_matching, critical_cells_strip, critical_cells_weighted, critical_counts_strip, critical_counts_unordered,
    critical_counts_weighted, is_critical_weighted, matching_from_order, verify_gradient, MorseMatching,
};
use strip_homology::order::{contract, strip_cell_order};
use strip_homology::symbol::layer_permutation;
use strip_homology::unordered::{critical_cells_unordered, is_pair, UCell};
use strip_homology::{ComplexSpec, PCell, Symbol, Weights};

fn sym(s: &str) -> Symbol {
    s.parse().unwrap()
}

fn names(cells: &[Symbol]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

#[test]
fn hexagon_matching() {
    let spec = ComplexSpec::weighted(Weights::unit(3), 2);
    let m = canonical_matching(&spec).unwrap();
    assert!(verify_gradient(&m, &spec).unwrap());
    assert_eq!(names(&m.critical(0)), vec!["3 | 2 | 1"]);
    assert_eq!(names(&m.critical(1)), vec!["1 | 2 3"]);
    // every other cell is paired: 6 vertices and 6 edges, 5 pairs
    assert_eq!(m.pairs().len(), 5);
    for (f, g) in m.pairs() {
        assert_eq!(g.incidence(&f).abs(), 1, "{f} < {g}");
    }
}

#[test]
fn empty_matching_is_a_gradient() {
    let spec = ComplexSpec::weighted(Weights::unit(3), 2);
    let cells: Vec<Vec<Symbol>> = (0..3).map(|d| weighted_cells(&Weights::unit(3), 2, d)).collect();
    let m = MorseMatching::from_pairs(cells, &[]).unwrap();
    assert!(verify_gradient(&m, &spec).unwrap());
    assert_eq!(m.critical_counts(), vec![6, 6, 0]);
}

#[test]
fn corrupted_matching_has_a_closed_walk() {
    // pair every vertex of the hexagon with the edge on its clockwise side
    let spec = ComplexSpec::weighted(Weights::unit(3), 2);
    let cells: Vec<Vec<Symbol>> = (0..3).map(|d| weighted_cells(&Weights::unit(3), 2, d)).collect();
    let mut pairs = Vec::new();
    let mut used = Vec::new();
    let mut v = cells[0][0].clone();
    for _ in 0..6 {
        let e = cells[1].iter().find(|e| e.incidence(&v) != 0 && !used.contains(*e)).unwrap().clone();
        pairs.push((v.clone(), e.clone()));
        used.push(e.clone());
        v = e.faces().into_iter().map(|(f, _)| f).find(|f| *f != v).unwrap();
    }
    let m = MorseMatching::from_pairs(cells, &pairs).unwrap();
    assert!(!verify_gradient(&m, &spec).unwrap());
}

#[test]
fn matching_rejects_non_faces() {
    let cells: Vec<Vec<Symbol>> = (0..3).map(|d| weighted_cells(&Weights::unit(3), 2, d)).collect();
    assert!(MorseMatching::from_pairs(cells, &[(sym("1 | 2 | 3"), sym("2 | 1 3"))]).is_err());
}

#[test]
fn strip_order_matching_equals_listing() {
    for n in 1..=5 {
        for w in 1..=n as u32 {
            let spec = ComplexSpec::strip(n, w);
            let m = matching_from_order(&spec, strip_cell_order).unwrap();
            assert!(verify_gradient(&m, &spec).unwrap());
            let mut listed = critical_cells_strip(n, w).unwrap();
            listed.sort();
            let mut matched: Vec<Symbol> = (0..n).flat_map(|d| m.critical(d)).collect();
            matched.sort();
            assert_eq!(matched, listed, "n={n} w={w}");
        }
    }
}

#[test]
fn weighted_examples() {
    let two = Weights::new(vec![1, 2]).unwrap();
    assert_eq!(names(&critical_cells_weighted(&two, 2).unwrap().iter().map(PCell::to_symbol).collect::<Vec<_>>()), vec!["2 | 1", "1 | 2"]);
    let unit = critical_cells_weighted(&Weights::unit(3), 2).unwrap();
    let ones: Vec<String> = unit.iter().filter(|c| c.dim() == 1).map(|c| c.to_string()).collect();
    assert_eq!(ones, vec!["1 | 2 3"]);
}

#[test]
fn three_sphere_cell_is_critical() {
    let w = Weights::new(vec![1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3, 4]).unwrap();
    let e = PCell::from_symbol(&sym("6 | 8 11 | 9 | 13 | 7 | 5 | 1 | 3 4 12 | 10 | 2"));
    assert!(is_critical_weighted(&e, &w, 5));
    assert!(!is_critical_weighted(&e, &w, 6));
    assert_eq!(e.dim(), 3);
}

#[test]
fn strip_count_examples() {
    assert_eq!(critical_cells_strip(3, 2).unwrap().iter().filter(|s| s.dim() == 1).count(), 7);
    for n in 1..=7 {
        let c = critical_counts_strip(n, 1);
        assert_eq!(c[0], (1..=n as u32).map(BigUint::from).product::<BigUint>());
    }
    assert_eq!(critical_counts_strip(12, 12)[11], BigUint::from(39916800u32));
    assert_eq!(critical_counts_strip(12, 11)[11], BigUint::from(0u32));
}

#[test]
fn listing_and_counting_agree() {
    for n in 1..=7 {
        for w in 1..=n as u32 {
            let mut by_dim = vec![BigUint::from(0u32); n];
            for s in critical_cells_strip(n, w).unwrap() {
                by_dim[s.dim()] += 1u32;
            }
            assert_eq!(by_dim, critical_counts_strip(n, w), "n={n} w={w}");
        }
    }
}

// Critical cells of layer sigma are critical cells of the weighted complex on
// its wheels, shifted by the number of wheel degrees.
#[test]
fn layers_split_into_weighted_complexes() {
    for n in 1..=5 {
        for w in 1..=n as u32 {
            let mut layers: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
            for s in critical_cells_strip(n, w).unwrap() {
                let e = layers.entry(layer_permutation(&s)).or_insert_with(|| vec![0; n]);
                e[s.dim()] += 1;
            }
            for (sigma, counts) in layers {
                let (_, wheels) = contract(&Symbol::new(std::slice::from_ref(&sigma)).unwrap());
                let shift = n - wheels.len();
                let weights = Weights(wheels.iter().map(|x| x.len() as u32).collect());
                let weighted = critical_counts_weighted(&weights, w).unwrap();
                let mut expected = vec![0; n];
                for (d, c) in weighted.iter().enumerate() {
                    expected[d + shift] += c;
                }
                assert_eq!(counts, expected, "n={n} w={w} layer {sigma:?}");
            }
        }
    }
}

#[test]
fn weighted_listing_matches_morse_matching() {
    for weights in [vec![1, 1, 2], vec![1, 2, 2, 3], vec![1, 1, 1, 2]] {
        let w = Weights(weights);
        for k in *w.0.iter().max().unwrap()..=w.total() {
            let spec = ComplexSpec::weighted(w.clone(), k);
            let m = canonical_matching(&spec).unwrap();
            assert!(verify_gradient(&m, &spec).unwrap());
            let mut direct: Vec<Symbol> = critical_cells_weighted(&w, k).unwrap().iter().map(PCell::to_symbol).collect();
            direct.sort();
            let mut matched: Vec<Symbol> = (0..w.n()).flat_map(|d| m.critical(d)).collect();
            matched.sort();
            assert_eq!(matched, direct, "{:?} k={k}", w.0);
        }
    }
}

#[test]
fn unordered_examples() {
    assert!(critical_cells_unordered(2, 2, 2).contains(&UCell(vec![2])));
    let ones: Vec<UCell> = critical_cells_unordered(3, 2, 5).into_iter().filter(|c| c.dim() == 1).collect();
    assert_eq!(ones, vec![UCell(vec![1, 2]), UCell(vec![2, 1])]);
    assert!(!is_pair(1, 3, 3));
    assert_eq!(critical_counts_unordered(3, 2, 2), vec![1, 2, 0]);
}

#[test]
fn matching_refuses_large_complexes() {
    assert!(canonical_matching(&ComplexSpec::strip(8, 8)).is_err());
    assert!(strip_cells(3, 3, 5).is_empty());
}
