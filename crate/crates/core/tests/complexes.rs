use std::collections::BTreeSet;

use num_bigint::BigInt;
use strip_homology::combinat::{factorial, permutations};
use strip_homology::complexes::{boundary_matrix, enumerate_cells, euler_characteristic, strip_cells, weighted_cells, Cell};
use strip_homology::oracle::SparseMatrix;
use strip_homology::unordered::{ucel_boundary_coefficient, UCell};
use strip_homology::{ComplexSpec, Ring, Symbol, Weights};

#[test]
fn strip_cells_in_low_dimension() {
    assert_eq!(enumerate_cells(&ComplexSpec::strip(3, 2), 1).unwrap().len(), 12);
    for n in 1..=5 {
        let top = enumerate_cells(&ComplexSpec::strip(n, n as u32), n - 1).unwrap();
        assert_eq!(BigInt::from(top.len()), factorial(n).into());
        assert!(top.iter().all(|c| matches!(c, Cell::Symbol(s) if s.num_blocks() == 1)));
    }
}

#[test]
fn unordered_top_cell() {
    for w in 3..=5 {
        let cells = enumerate_cells(&ComplexSpec::unordered(3, w, 0), 2).unwrap();
        assert_eq!(cells, vec![Cell::Composition(UCell(vec![3]))]);
    }
}

#[test]
fn unordered_boundary_entries() {
    let spec = ComplexSpec::unordered(3, 3, 0);
    let m = boundary_matrix(&spec, 2, Ring::Integers).unwrap();
    let rows = enumerate_cells(&spec, 1).unwrap();
    let mut got: Vec<(String, i64)> = m.entries.iter().map(|&(i, _, v)| (rows[i as usize].to_string(), v)).collect();
    got.sort();
    let mut want = vec![(UCell(vec![1, 2]).to_string(), -1), (UCell(vec![2, 1]).to_string(), 1)];
    want.sort();
    assert_eq!(got, want);
    assert_eq!(ucel_boundary_coefficient(4, 2), BigInt::from(2));
    assert_eq!(ucel_boundary_coefficient(4, 1), BigInt::from(0));
}

#[test]
fn euler_characteristics() {
    assert_eq!(euler_characteristic(&ComplexSpec::strip(3, 2)), BigInt::from(-6));
    for n in 1..=6 {
        assert_eq!(euler_characteristic(&ComplexSpec::strip(n, 1)), factorial(n).into());
    }
    assert_eq!(euler_characteristic(&ComplexSpec::weighted(Weights::unit(3), 2)), BigInt::from(0));
}

#[test]
fn permutohedral_complex_size() {
    for n in 1..=8usize {
        let spec = ComplexSpec::strip(n, n as u32);
        let counted: u128 = (0..n).map(|d| spec.cell_count(d)).sum();
        let expected = (1u128 << (n - 1)) * (1..=n as u128).product::<u128>();
        assert_eq!(counted, expected);
        if n <= 7 {
            let streamed: usize = (0..n).map(|d| strip_cells(n, n, d).len()).sum();
            assert_eq!(streamed as u128, expected);
        }
    }
}

#[test]
fn cell_dimension_rule() {
    for n in 1..=5 {
        for w in 1..=n {
            for d in 0..n {
                for s in strip_cells(n, w, d) {
                    assert_eq!(s.num_blocks(), n - d);
                    assert!(s.max_block_len() <= w);
                }
            }
        }
    }
}

// Independent generator: ordered set partitions of {1..n} with blocks of at
// most k elements, blocks written ascending.
fn ordered_partitions(n: usize, k: usize) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    for p in permutations(n) {
        for mask in 0u32..(1 << (n - 1)) {
            let mut blocks: Vec<Vec<u8>> = vec![vec![p[0]]];
            for i in 1..n {
                if mask & (1 << (i - 1)) != 0 {
                    blocks.push(vec![p[i]]);
                } else {
                    blocks.last_mut().unwrap().push(p[i]);
                }
            }
            if blocks.iter().all(|b| b.len() <= k && b.windows(2).all(|x| x[0] < x[1])) {
                out.insert(Symbol::new(&blocks).unwrap());
            }
        }
    }
    out
}

#[test]
fn unit_weights_give_the_no_k_equal_complex() {
    for n in 1..=6 {
        for k in 1..=n {
            let cells: BTreeSet<Symbol> = (0..n).flat_map(|d| weighted_cells(&Weights::unit(n), k as u32, d)).collect();
            assert_eq!(cells, ordered_partitions(n, k), "n={n} k={k}");
        }
    }
}

#[test]
fn boundary_squares_to_zero_on_every_family() {
    let specs = [
        ComplexSpec::strip(5, 3),
        ComplexSpec::weighted(Weights(vec![1, 1, 2, 3]), 4),
        ComplexSpec::unordered(9, 4, 0),
    ];
    for spec in specs {
        for d in 2..spec.n {
            let a = boundary_matrix(&spec, d - 1, Ring::Integers).unwrap();
            let b = boundary_matrix(&spec, d, Ring::Integers).unwrap();
            assert!(a.compose_is_zero(&b), "{spec:?} in degree {d}");
        }
    }
}

#[test]
fn triplet_export_is_deterministic_and_parses() {
    let spec = ComplexSpec::strip(3, 2);
    let text = boundary_matrix(&spec, 1, Ring::Integers).unwrap().to_triplets(1);
    assert!(text.starts_with("1 6 12 24\n"), "{text}");
    assert_eq!(text, boundary_matrix(&spec, 1, Ring::Integers).unwrap().to_triplets(1));
    let (dim, m): (usize, SparseMatrix) = SparseMatrix::from_triplets(&text).unwrap();
    assert_eq!(dim, 1);
    assert_eq!(m.to_triplets(1), text);
}

#[test]
fn prime_coefficients_reduce_entries() {
    let spec = ComplexSpec::unordered(4, 4, 2);
    let m = boundary_matrix(&spec, 3, Ring::Prime(2)).unwrap();
    // d(o^4) = 2 (o^2 | o^2) vanishes mod 2
    assert!(m.entries.iter().all(|&(_, _, v)| v != 0));
    assert_eq!(m.nnz(), 0);
}
