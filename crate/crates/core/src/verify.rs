//! Self-checks: each criterion compares a fast path against an independent
//! computation and reports pass or fail with a short detail line.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{verify_basis, verify_weighted_basis};
use crate::combinat::permutations;
use crate::complexes::{boundary_matrix, strip_cells, ComplexSpec, Ring};
use crate::error::Result;
use crate::formula::{betti_growth_formula, convolve_values, dominant_term, labeled_convolution, predicted_growth, GrowthTerm};
use crate::morse::{canonical_matching, critical_counts_strip, critical_counts_unordered, critical_counts_weighted, verify_gradient};
use crate::oracle::{homology_field, homology_z, persistent_homology_field, Field};
use crate::order::Weights;
use crate::persistence::{check_barlength, count_barcode, Barcode};
use crate::unordered::growth_check_unordered;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!("{} {} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

struct Limits {
    oracle_n: usize,
    basis_n: usize,
    weighted_n: usize,
    count_n: usize,
    unordered_n: u32,
    unordered_boundary_n: u32,
    growth_n: u32,
    structure_n: usize,
    relabel_n: usize,
}

impl Limits {
    fn of(level: Level) -> Self {
        match level {
            Level::Quick => Limits {
                oracle_n: 4,
                basis_n: 4,
                weighted_n: 4,
                count_n: 4,
                unordered_n: 4,
                unordered_boundary_n: 4,
                growth_n: 12,
                structure_n: 4,
                relabel_n: 4,
            },
            Level::Full => Limits {
                oracle_n: 6,
                basis_n: 5,
                weighted_n: 6,
                count_n: 12,
                unordered_n: 8,
                unordered_boundary_n: 10,
                growth_n: 20,
                structure_n: 6,
                relabel_n: 5,
            },
        }
    }
}

/// Collects failures, keeping the first few for the report.
#[derive(Default)]
struct Failures {
    count: usize,
    first: Vec<String>,
}

impl Failures {
    fn push(&mut self, msg: String) {
        self.count += 1;
        if self.first.len() < 5 {
            self.first.push(msg);
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.push(msg());
        }
    }

    fn into_result(self, ok_detail: String) -> (bool, String) {
        if self.count == 0 {
            (true, ok_detail)
        } else {
            (false, format!("{} failure(s): {}", self.count, self.first.join("; ")))
        }
    }
}

fn timed(id: u32, name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> CriterionReport {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport { id, name: name.into(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

type Anchor = (usize, Vec<(u32, Option<u32>, u64)>);

fn anchors() -> Vec<Anchor> {
    vec![
        (0, vec![(1, Some(2), 479001599), (1, None, 1)]),
        (1, vec![(2, Some(3), 114621), (2, None, 66)]),
        (2, vec![(2, Some(3), 45412532), (2, Some(4), 1485), (2, None, 1485), (3, Some(4), 560779), (3, None, 440)]),
        (11, vec![(12, None, 39916800)]),
    ]
}

fn check_anchors(barcode: &Barcode) -> (bool, String) {
    let mut f = Failures::default();
    for (j, rows) in anchors() {
        let want: BTreeMap<(u32, Option<u32>), BigUint> = rows.iter().map(|&(b, d, m)| ((b, d), BigUint::from(m))).collect();
        let got = barcode.degree(j);
        f.check(got == want, || format!("degree {j}: got {got:?}"));
    }
    f.into_result("degrees 0, 1, 2 and 11 of n = 12 match exactly".into())
}

/// Bars of `cell(12)` in degrees 0, 1, 2 and 11, computed by counting.
pub fn criterion_anchors() -> CriterionReport {
    timed(1, "n=12 barcode anchors", || Ok(check_anchors(&count_barcode(12))))
}

/// Critical cell counts against integral homology.
pub fn criterion_homology(n_max: usize) -> CriterionReport {
    timed(2, "critical counts equal integral Betti numbers", || {
        let mut f = Failures::default();
        let mut complexes = 0;
        for n in 1..=n_max {
            for w in 1..=n as u32 {
                let h = homology_z(&ComplexSpec::strip(n, w))?;
                let counts: Vec<u64> = critical_counts_strip(n, w).iter().map(|c| c.to_u64().unwrap()).collect();
                f.check(counts == h.betti(), || format!("cell({n},{w}): critical {counts:?}, oracle {:?}", h.betti()));
                f.check(h.torsion_free(), || format!("cell({n},{w}) has torsion"));
                complexes += 1;
            }
        }
        Ok(f.into_result(format!("{complexes} complexes, n <= {n_max}, torsion-free")))
    })
}

/// Persistence by column reduction against the counted barcode.
pub fn criterion_persistence(n_max: usize) -> CriterionReport {
    timed(3, "reduction barcode equals counted barcode", || {
        let mut f = Failures::default();
        for n in 1..=n_max {
            let want = count_barcode(n);
            for field in [Field::Rationals, Field::Prime(2)] {
                let got = persistent_homology_field(n, field, n - 1)?;
                f.check(got == want, || format!("n = {n} over {field:?}: {} vs {}", got.to_text().trim(), want.to_text().trim()));
            }
        }
        Ok(f.into_result(format!("n <= {n_max} over Q and F2")))
    })
}

/// Nondecreasing weight vectors drawn from a fixed seed.
pub fn random_weights(count: usize, n_max: usize, seed: u64) -> Vec<Weights> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=n_max);
            let mut w: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
            w.sort_unstable();
            Weights(w)
        })
        .collect()
}

/// Weighted no-(k+1)-equal spaces: critical counts and the cycles `z(e)`.
pub fn criterion_weighted(n_max: usize) -> CriterionReport {
    timed(4, "weighted critical counts and cycles", || {
        let mut f = Failures::default();
        let mut cases = 0;
        let mut cycles = 0;
        let vectors = random_weights(10, n_max, 0x5eed);
        // exhaustive z(e) checks run on every vector with n <= 5
        for weights in &vectors {
            let top = *weights.0.iter().max().unwrap();
            for k in top..=weights.total() {
                let spec = ComplexSpec::weighted(weights.clone(), k);
                let oracle: Vec<usize> = homology_z(&spec)?.betti().iter().map(|&b| b as usize).collect();
                let counts = critical_counts_weighted(weights, k)?;
                f.check(counts == oracle, || format!("{:?}, k = {k}: critical {counts:?}, oracle {oracle:?}", weights.0));
                cases += 1;
                if weights.n() <= 5 {
                    let r = verify_weighted_basis(weights, k)?;
                    cycles += r.elements;
                    for msg in r.failures {
                        f.push(format!("{:?}, k = {k}: {msg}", weights.0));
                    }
                }
            }
        }
        Ok(f.into_result(format!("{cases} (weights, k) cases, {cycles} cycles checked")))
    })
}

/// Basic cycles of the strip complexes.
pub fn criterion_basis(n_max: usize) -> CriterionReport {
    timed(5, "strip basis cycles are triangular", || {
        let mut f = Failures::default();
        let mut elements = 0;
        for n in 1..=n_max {
            for w in 1..=n as u32 {
                let r = verify_basis(n, w)?;
                elements += r.elements;
                for msg in r.failures {
                    f.push(format!("cell({n},{w}): {msg}"));
                }
            }
        }
        Ok(f.into_result(format!("{elements} basis cycles, n <= {n_max}")))
    })
}

/// Closed formulas against counts, and their dominant terms.
pub fn criterion_formula(n_max: usize) -> CriterionReport {
    timed(6, "Betti growth formulas", || {
        let mut f = Failures::default();
        let barcodes: Vec<Barcode> = (0..=n_max).map(count_barcode).collect();
        for j in 0..=3u32 {
            for w in 2..=4u32 {
                let formula = betti_growth_formula(j, w)?;
                for n in 1..=n_max {
                    let want = barcodes[n].betti_at(w, j as usize);
                    let got = formula.evaluate(n as u32);
                    f.check(got == want.clone().into(), || format!("j = {j}, w = {w}, n = {n}: formula {got}, count {want}"));
                }
            }
        }
        for j in 0..=5u32 {
            for w in 2..=4u32 {
                let got = dominant_term(&betti_growth_formula(j, w)?);
                let want = predicted_growth(j, w);
                f.check(got == Some(want), || format!("j = {j}, w = {w}: dominant {got:?}, predicted {want:?}"));
            }
        }
        Ok(f.into_result(format!("values for j <= 3, 2 <= w <= 4, n <= {n_max}; growth for j <= 5")))
    })
}

/// Bar lengths and stability.
pub fn criterion_barlength(n_max: usize) -> CriterionReport {
    timed(7, "bars die by twice their birth", || {
        let mut f = Failures::default();
        let mut bars = 0;
        for n in 1..=n_max {
            let b = count_barcode(n);
            bars += b.len();
            let r = check_barlength(&b);
            f.check(r.passed(), || format!("n = {n}: long {:?}, unstable {:?}", r.long_bars, r.unstable_bars));
        }
        Ok(f.into_result(format!("{bars} bar classes, n <= {n_max}")))
    })
}

/// Unordered complexes in several characteristics.
pub fn criterion_unordered(n_max: u32, boundary_n: u32, growth_n: u32) -> CriterionReport {
    timed(8, "unordered counts, boundaries and growth", || {
        let mut f = Failures::default();
        let mut cases = 0;
        for p in [2, 3, 5, 0] {
            for w in 1..=5u32 {
                for n in 1..=n_max {
                    let spec = ComplexSpec::unordered(n as usize, w, p);
                    let oracle: Vec<u128> = homology_field(&spec, p)?.iter().map(|&b| b as u128).collect();
                    let counts = critical_counts_unordered(n, w, p);
                    f.check(counts == oracle, || format!("ucel({n},{w}), p = {p}: critical {counts:?}, oracle {oracle:?}"));
                    cases += 1;
                }
            }
        }
        for n in 1..=boundary_n as usize {
            for w in 1..=n as u32 {
                let spec = ComplexSpec::unordered(n, w, 0);
                for d in 2..n {
                    let a = boundary_matrix(&spec, d - 1, Ring::Integers)?;
                    let b = boundary_matrix(&spec, d, Ring::Integers)?;
                    f.check(a.compose_is_zero(&b), || format!("ucel({n},{w}): boundary squared nonzero in degree {d}"));
                }
            }
        }
        for p in [2, 3, 5, 0] {
            for j in 0..=2 {
                let r = growth_check_unordered(j, 3, p, growth_n);
                // constant over at least the last quarter of the range
                let ok = r.constant_from.is_some_and(|s| s <= growth_n - growth_n / 4);
                f.check(ok, || format!("w = 3, j = {j}, p = {p}: not eventually constant: {:?}", r.values));
            }
        }
        Ok(f.into_result(format!("{cases} complexes, boundaries to n = {boundary_n}, growth to n = {growth_n}")))
    })
}

/// Boundary squares, relabelling, acyclicity and convolution.
pub fn criterion_structure(n_max: usize, relabel_n: usize, count_n: usize) -> CriterionReport {
    timed(9, "structural properties", || {
        let mut f = Failures::default();
        for n in 1..=n_max {
            let spec = ComplexSpec::strip(n, n as u32);
            for d in 2..n {
                let a = boundary_matrix(&spec, d - 1, Ring::Integers)?;
                let b = boundary_matrix(&spec, d, Ring::Integers)?;
                f.check(a.compose_is_zero(&b), || format!("cell({n}): boundary squared nonzero in degree {d}"));
            }
        }
        for n in 1..=relabel_n {
            let perms = permutations(n);
            for dim in 0..n {
                for s in strip_cells(n, n, dim) {
                    let ds = crate::chain::boundary(&s);
                    for p in &perms {
                        let pi = |x: u8| p[x as usize - 1];
                        let lhs = crate::chain::boundary(&s.relabel(pi));
                        f.check(lhs == ds.relabel(pi), || format!("relabelling {p:?} does not commute with the boundary of {s}"));
                    }
                }
            }
        }
        let mut matchings = 0;
        for n in 1..=relabel_n.min(crate::morse::MATCHING_MAX_N) {
            for w in 1..=n as u32 {
                let spec = ComplexSpec::strip(n, w);
                let m = canonical_matching(&spec)?;
                f.check(verify_gradient(&m, &spec)?, || format!("cell({n},{w}): matching has a cycle"));
                matchings += 1;
            }
        }
        let terms = [GrowthTerm::new(1, 0, 1), GrowthTerm::new(3, 1, 2), GrowthTerm::new(-2, 2, 0), GrowthTerm::new(5, 0, 3), GrowthTerm::new(1, 3, 1)];
        for t1 in &terms {
            for t2 in &terms {
                let c = labeled_convolution(t1, t2);
                for n in 0..=count_n as u32 {
                    let brute = convolve_values(|i| t1.evaluate(i), |i| t2.evaluate(i), n);
                    f.check(c.evaluate(n) == brute, || format!("{t1:?} * {t2:?} at n = {n}"));
                }
            }
        }
        Ok(f.into_result(format!("n <= {n_max} boundaries, n <= {relabel_n} relabelling, {matchings} matchings acyclic")))
    })
}

/// Run every criterion at the given level.
pub fn run(level: Level) -> Vec<CriterionReport> {
    let l = Limits::of(level);
    let mut out = Vec::new();
    if level == Level::Full {
        out.push(criterion_anchors());
    }
    out.push(criterion_homology(l.oracle_n));
    out.push(criterion_persistence(l.oracle_n));
    out.push(criterion_weighted(l.weighted_n));
    out.push(criterion_basis(l.basis_n));
    out.push(criterion_formula(l.count_n));
    out.push(criterion_barlength(l.count_n));
    out.push(criterion_unordered(l.unordered_n, l.unordered_boundary_n, l.growth_n));
    out.push(criterion_structure(l.structure_n, l.relabel_n, l.count_n));
    out
}

pub fn all_passed(reports: &[CriterionReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
