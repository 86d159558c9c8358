use num_bigint::BigInt;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strip_homology::combinat::factorial;
use strip_homology::complexes::boundary_matrix;
use strip_homology::oracle::{homology_field, homology_z, persistent_homology_field, rank_mod_p, smith_normal_form, Field, SparseMatrix};
use strip_homology::persistence::count_barcode;
use strip_homology::{ComplexSpec, Ring};

fn factors(m: &SparseMatrix) -> Vec<i64> {
    smith_normal_form(m).invariant_factors.iter().map(|d| i64::try_from(d).unwrap()).collect()
}

#[test]
fn identity_and_diagonal() {
    let id = SparseMatrix::from_dense(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    assert_eq!(factors(&id), vec![1, 1, 1]);
    let d = SparseMatrix::from_dense(&[vec![2, 0], vec![0, 6]]);
    assert_eq!(factors(&d), vec![2, 6]);
    let mixed = SparseMatrix::from_dense(&[vec![4, 0], vec![0, 6]]);
    assert_eq!(factors(&mixed), vec![2, 12]);
}

#[test]
fn first_boundary_of_the_three_disk_complex() {
    let m = boundary_matrix(&ComplexSpec::strip(3, 2), 1, Ring::Integers).unwrap();
    let snf = smith_normal_form(&m);
    assert_eq!(snf.rank, 5);
    assert!(snf.invariant_factors.iter().all(|d| *d == BigInt::from(1)));
}

#[test]
fn homology_of_the_three_disk_complex() {
    let h = homology_z(&ComplexSpec::strip(3, 2)).unwrap();
    assert_eq!(h.betti(), vec![1, 7, 0]);
    assert!(h.torsion_free());
    assert!(h.to_json().contains("\"betti\":7"));
}

#[test]
fn top_homology_of_the_full_complex() {
    for n in 2..=5 {
        let h = homology_z(&ComplexSpec::strip(n, n as u32)).unwrap();
        let top = factorial(n - 1);
        assert_eq!(BigInt::from(h.betti()[n - 1]), top.into(), "n = {n}");
    }
}

#[test]
fn unordered_torsion_is_recorded() {
    let torsion = |n, w| -> Vec<Vec<BigInt>> {
        homology_z(&ComplexSpec::unordered(n, w, 0)).unwrap().degrees.iter().map(|d| d.torsion.clone()).collect()
    };
    let two = BigInt::from(2);
    // w = 2: every boundary map vanishes, so no torsion
    let h = homology_z(&ComplexSpec::unordered(4, 2, 0)).unwrap();
    assert!(h.torsion_free());
    assert_eq!(h.betti(), vec![1, 3, 1, 0]);
    // d(o^4) = 2 (o^2 | o^2)
    assert_eq!(torsion(4, 4), vec![vec![], vec![], vec![two.clone()], vec![]]);
    assert_eq!(torsion(6, 6), vec![vec![], vec![], vec![two.clone()], vec![two], vec![BigInt::from(3)], vec![]]);
    // field dimensions differ exactly where torsion sits
    let dims = |n, w, p| homology_field(&ComplexSpec::unordered(n, w, p), p).unwrap();
    assert_eq!(dims(4, 2, 2), dims(4, 2, 3));
    assert_ne!(dims(4, 4, 2), dims(4, 4, 3));
}

#[test]
fn field_ranks_agree_with_integers_when_torsion_free() {
    for n in 1..=5 {
        for w in 1..=n as u32 {
            let spec = ComplexSpec::strip(n, w);
            let z = homology_z(&spec).unwrap();
            assert!(z.torsion_free());
            for p in [0, 2, 3, 5] {
                assert_eq!(homology_field(&spec, p).unwrap(), z.betti(), "n={n} w={w} p={p}");
            }
        }
    }
}

#[test]
fn persistence_of_three_disks() {
    let b = persistent_homology_field(3, Field::Rationals, 2).unwrap();
    assert_eq!(b.multiplicity(0, 1, Some(2)), 5u32.into());
    assert_eq!(b.multiplicity(0, 1, None), 1u32.into());
    assert_eq!(b.multiplicity(1, 2, Some(3)), 4u32.into());
    assert_eq!(b.multiplicity(1, 2, None), 3u32.into());
    assert_eq!(b.multiplicity(2, 3, None), 2u32.into());
    assert_eq!(b.len(), 5);
    assert_eq!(b, count_barcode(3));
}

#[test]
fn persistence_of_two_disks() {
    let b = persistent_homology_field(2, Field::Prime(2), 1).unwrap();
    assert_eq!(b.multiplicity(0, 1, Some(2)), 1u32.into());
    assert_eq!(b.multiplicity(0, 1, None), 1u32.into());
    assert_eq!(b.multiplicity(1, 2, None), 1u32.into());
    assert_eq!(b.len(), 3);
}

#[test]
fn persistence_of_one_disk_has_no_empty_steps() {
    let b = persistent_homology_field(1, Field::Rationals, 0).unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(b.multiplicity(0, 1, None), 1u32.into());
}

#[test]
fn persistence_is_field_independent_here() {
    for n in 1..=5 {
        let q = persistent_homology_field(n, Field::Rationals, n - 1).unwrap();
        for p in [2, 3, 7] {
            assert_eq!(persistent_homology_field(n, Field::Prime(p), n - 1).unwrap(), q, "n={n} p={p}");
        }
    }
}

#[test]
fn persistence_of_seven_disks_in_low_degrees() {
    let got = persistent_homology_field(7, Field::Prime(2), 2).unwrap();
    assert_eq!(got, count_barcode(7).restrict_degrees(0, 1));
}

#[test]
fn snf_survives_large_entries() {
    let big = 1i64 << 40;
    let m = SparseMatrix::from_dense(&[vec![big, big + 1], vec![big - 1, big]]);
    // determinant big^2 - (big^2 - 1) = 1
    assert_eq!(factors(&m), vec![1, 1]);
    assert_eq!(rank_mod_p(&m, 2), 2);
}

fn random_matrix(seed: u64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<i64>> = (0..6)
        .map(|_| (0..5).map(|_| *[-3i64, -1, 0, 0, 0, 1, 2, 4].choose(&mut rng).unwrap()).collect())
        .collect();
    SparseMatrix::from_dense(&rows)
}

proptest! {
    #[test]
    fn snf_ignores_row_and_column_order(seed in any::<u64>(), shuffle in any::<u64>()) {
        let m = random_matrix(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(shuffle);
        let mut rp: Vec<u32> = (0..m.rows as u32).collect();
        let mut cp: Vec<u32> = (0..m.cols as u32).collect();
        rp.shuffle(&mut rng);
        cp.shuffle(&mut rng);
        prop_assert_eq!(smith_normal_form(&m), smith_normal_form(&m.permuted(&rp, &cp)));
    }

    #[test]
    fn invariant_factors_divide(seed in any::<u64>()) {
        let f = smith_normal_form(&random_matrix(seed)).invariant_factors;
        for w in f.windows(2) {
            prop_assert!((&w[1] % &w[0]) == BigInt::from(0));
        }
    }
}
