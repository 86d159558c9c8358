//! Exact homology by Smith normal form and field ranks, and persistence by
//! column reduction. Independent of the Morse-theoretic code paths.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::complexes::{boundary_matrix, strip_cells, ComplexSpec, Ring};
use crate::error::{invalid, Error, Result};
use crate::persistence::{Bar, Barcode};
use crate::symbol::Symbol;

/// Sparse integer matrix as (row, col, value) triplets.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(u32, u32, i64)>,
}

impl SparseMatrix {
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    entries.push((i as u32, j as u32, v));
                }
            }
        }
        SparseMatrix { rows: rows.len(), cols, entries }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn reduce_mod(&self, p: u32) -> SparseMatrix {
        let p = p as i64;
        let entries = self
            .entries
            .iter()
            .filter_map(|&(i, j, v)| {
                let r = v.rem_euclid(p);
                (r != 0).then_some((i, j, r))
            })
            .collect();
        SparseMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Apply row and column permutations: entry (i, j) moves to (rp[i], cp[j]).
    pub fn permuted(&self, rp: &[u32], cp: &[u32]) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&(i, j, v)| (rp[i as usize], cp[j as usize], v)).collect(),
        }
    }

    /// Compose `self * other` (for checking that consecutive boundaries vanish).
    pub fn compose_is_zero(&self, other: &SparseMatrix) -> bool {
        let mut by_row: HashMap<u32, Vec<(u32, i64)>> = HashMap::new();
        for &(i, j, v) in &other.entries {
            by_row.entry(i).or_default().push((j, v));
        }
        let mut acc: HashMap<(u32, u32), i128> = HashMap::new();
        for &(i, k, a) in &self.entries {
            if let Some(r) = by_row.get(&k) {
                for &(j, b) in r {
                    *acc.entry((i, j)).or_default() += a as i128 * b as i128;
                }
            }
        }
        acc.values().all(|&v| v == 0)
    }

    /// Text export: header `dim rows cols nnz`, then `row col value` lines
    /// sorted by (row, col).
    pub fn to_triplets(&self, dim: usize) -> String {
        let mut e = self.entries.clone();
        e.sort_unstable();
        let mut s = format!("{} {} {} {}\n", dim, self.rows, self.cols, e.len());
        for (i, j, v) in e {
            let _ = writeln!(s, "{i} {j} {v}");
        }
        s
    }

    pub fn from_triplets(text: &str) -> Result<(usize, SparseMatrix)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header `{header}`"))))
            .collect::<Result<_>>()?;
        if h.len() != 4 {
            return Err(Error::Parse("header must be `dim rows cols nnz`".into()));
        }
        let mut entries = Vec::with_capacity(h[3]);
        for l in lines {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(Error::Parse(format!("bad entry line `{l}`")));
            }
            let parse = |s: &str| s.parse::<i64>().map_err(|_| Error::Parse(format!("bad number `{s}`")));
            let (i, j, v) = (parse(t[0])?, parse(t[1])?, parse(t[2])?);
            if i < 0 || j < 0 || i as usize >= h[1] || j as usize >= h[2] {
                return Err(Error::Parse(format!("entry out of range `{l}`")));
            }
            entries.push((i as u32, j as u32, v));
        }
        if entries.len() != h[3] {
            return Err(Error::Parse(format!("expected {} entries, found {}", h[3], entries.len())));
        }
        Ok((h[0], SparseMatrix { rows: h[1], cols: h[2], entries }))
    }
}

/// Coefficient arithmetic used by the eliminations. Operations return `None`
/// on machine-integer overflow.
trait Coeffs {
    type E: Clone + std::fmt::Debug;
    fn from_i64(&self, v: i64) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn unit_inverse(&self, a: &Self::E) -> Option<Self::E>;
    /// `a - f * b`
    fn mul_sub(&self, a: &Self::E, f: &Self::E, b: &Self::E) -> Option<Self::E>;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Option<Self::E>;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn to_big(&self, a: &Self::E) -> BigInt;
}

struct SmallZ;
struct BigZ;
struct PrimeField(u64);

impl Coeffs for SmallZ {
    type E = i64;
    fn from_i64(&self, v: i64) -> i64 {
        v
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn unit_inverse(&self, a: &i64) -> Option<i64> {
        (*a == 1 || *a == -1).then_some(*a)
    }
    fn mul_sub(&self, a: &i64, f: &i64, b: &i64) -> Option<i64> {
        a.checked_sub(f.checked_mul(*b)?)
    }
    fn mul(&self, a: &i64, b: &i64) -> Option<i64> {
        a.checked_mul(*b)
    }
    fn neg(&self, a: &i64) -> i64 {
        -a
    }
    fn to_big(&self, a: &i64) -> BigInt {
        BigInt::from(*a)
    }
}

impl Coeffs for BigZ {
    type E = BigInt;
    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn unit_inverse(&self, a: &BigInt) -> Option<BigInt> {
        a.abs().is_one().then(|| a.clone())
    }
    fn mul_sub(&self, a: &BigInt, f: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(a - f * b)
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(a * b)
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn to_big(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
}

impl Coeffs for PrimeField {
    type E = u64;
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn unit_inverse(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Fermat inverse
        let (mut base, mut e, mut r) = (*a, self.0 - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % self.0;
            }
            base = base * base % self.0;
            e >>= 1;
        }
        Some(r)
    }
    fn mul_sub(&self, a: &u64, f: &u64, b: &u64) -> Option<u64> {
        Some((a + self.0 - f * b % self.0) % self.0)
    }
    fn mul(&self, a: &u64, b: &u64) -> Option<u64> {
        Some(a * b % self.0)
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }
    fn to_big(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }
}

struct Elimination<E> {
    unit_pivots: usize,
    remainder: Vec<(u32, u32, E)>,
}

/// Sparse Gaussian elimination on unit pivots, choosing pivots of low
/// Markowitz cost. Each pivot contributes an invariant factor 1; the rows and
/// columns left without unit entries are returned.
fn eliminate_units<C: Coeffs>(c: &C, m: &SparseMatrix) -> Option<Elimination<C::E>> {
    let mut rows: Vec<Vec<(u32, C::E)>> = vec![Vec::new(); m.rows];
    for &(i, j, v) in &m.entries {
        let e = c.from_i64(v);
        if !c.is_zero(&e) {
            rows[i as usize].push((j, e));
        }
    }
    for r in &mut rows {
        r.sort_by_key(|x| x.0);
        // merge duplicates
        let mut merged: Vec<(u32, C::E)> = Vec::with_capacity(r.len());
        for (j, e) in r.drain(..) {
            match merged.last_mut() {
                Some((lj, le)) if *lj == j => {
                    let neg = c.neg(&e);
                    *le = c.mul_sub(le, &neg, &c.from_i64(1))?;
                }
                _ => merged.push((j, e)),
            }
        }
        merged.retain(|(_, e)| !c.is_zero(e));
        *r = merged;
    }
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); m.cols];
    let mut col_count = vec![0usize; m.cols];
    for (i, r) in rows.iter().enumerate() {
        for (j, _) in r {
            col_rows[*j as usize].push(i as u32);
            col_count[*j as usize] += 1;
        }
    }
    let mut row_alive = vec![true; m.rows];
    let mut col_alive = vec![true; m.cols];
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> = (0..m.cols).map(|j| Reverse((col_count[j], j as u32))).collect();
    let mut pivots = 0usize;
    let find = |row: &Vec<(u32, C::E)>, j: u32| row.binary_search_by_key(&j, |x| x.0).ok();

    while let Some(Reverse((cnt, j))) = heap.pop() {
        let ju = j as usize;
        if !col_alive[ju] || cnt != col_count[ju] {
            continue;
        }
        if cnt == 0 {
            col_alive[ju] = false;
            continue;
        }
        // live rows in this column
        let mut live: Vec<u32> = col_rows[ju]
            .iter()
            .copied()
            .filter(|&i| row_alive[i as usize] && find(&rows[i as usize], j).is_some())
            .collect();
        live.sort_unstable();
        live.dedup();
        col_rows[ju] = live.clone();
        let mut best: Option<(usize, u32)> = None;
        for &i in &live {
            let r = &rows[i as usize];
            let e = &r[find(r, j).unwrap()].1;
            if c.unit_inverse(e).is_some() && best.is_none_or(|(len, _)| r.len() < len) {
                best = Some((r.len(), i));
            }
        }
        let Some((_, pr)) = best else { continue };
        let prow = std::mem::take(&mut rows[pr as usize]);
        let pval = &prow[find(&prow, j).unwrap()].1;
        let inv = c.unit_inverse(pval).unwrap();
        for &i in &live {
            if i == pr {
                continue;
            }
            let row = std::mem::take(&mut rows[i as usize]);
            let a = &row[find(&row, j).unwrap()].1;
            let f = c.mul(a, &inv)?;
            let mut out: Vec<(u32, C::E)> = Vec::with_capacity(row.len() + prow.len());
            let (mut x, mut y) = (0, 0);
            while x < row.len() || y < prow.len() {
                let jx = row.get(x).map_or(u32::MAX, |t| t.0);
                let jy = prow.get(y).map_or(u32::MAX, |t| t.0);
                if jx < jy {
                    out.push(row[x].clone());
                    x += 1;
                } else if jy < jx {
                    let zero = c.from_i64(0);
                    let v = c.mul_sub(&zero, &f, &prow[y].1)?;
                    if !c.is_zero(&v) {
                        col_rows[jy as usize].push(i);
                        col_count[jy as usize] += 1;
                        heap.push(Reverse((col_count[jy as usize], jy)));
                        out.push((jy, v));
                    }
                    y += 1;
                } else {
                    let v = c.mul_sub(&row[x].1, &f, &prow[y].1)?;
                    if c.is_zero(&v) {
                        col_count[jx as usize] -= 1;
                        heap.push(Reverse((col_count[jx as usize], jx)));
                    } else {
                        if jx != j {
                            heap.push(Reverse((col_count[jx as usize], jx)));
                        }
                        out.push((jx, v));
                    }
                    x += 1;
                    y += 1;
                }
            }
            rows[i as usize] = out;
        }
        for (jj, _) in &prow {
            col_count[*jj as usize] -= 1;
            heap.push(Reverse((col_count[*jj as usize], *jj)));
        }
        row_alive[pr as usize] = false;
        col_alive[ju] = false;
        pivots += 1;
    }
    let mut remainder = Vec::new();
    for (i, r) in rows.into_iter().enumerate() {
        if !row_alive[i] {
            continue;
        }
        for (j, e) in r {
            if col_alive[j as usize] {
                remainder.push((i as u32, j, e));
            }
        }
    }
    Some(Elimination { unit_pivots: pivots, remainder })
}

/// Invariant factors of a dense integer matrix, in divisibility order.
fn dense_snf(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot of least absolute value
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &a[t][j] * &q;
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    changed = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let v = &a[i][t] * &q;
                    a[i][j] -= v;
                }
                if !a[t][j].is_zero() {
                    for r in a.iter_mut() {
                        r.swap(t, j);
                    }
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // divisibility of the rest
            let mut fix = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        fix = Some(i);
                        break 'scan;
                    }
                }
            }
            match fix {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnfResult {
    /// Nonzero invariant factors in divisibility order.
    #[serde(serialize_with = "ser_bigints")]
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl SnfResult {
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

fn remainder_snf<C: Coeffs>(c: &C, e: Elimination<C::E>) -> SnfResult {
    let mut ri: HashMap<u32, usize> = HashMap::new();
    let mut ci: HashMap<u32, usize> = HashMap::new();
    for (i, j, _) in &e.remainder {
        let l = ri.len();
        ri.entry(*i).or_insert(l);
        let l = ci.len();
        ci.entry(*j).or_insert(l);
    }
    let mut dense = vec![vec![BigInt::zero(); ci.len()]; ri.len()];
    for (i, j, v) in &e.remainder {
        dense[ri[i]][ci[j]] = c.to_big(v);
    }
    let mut factors = vec![BigInt::one(); e.unit_pivots];
    factors.extend(dense_snf(dense));
    factors.sort();
    let rank = factors.len();
    SnfResult { invariant_factors: factors, rank }
}

/// Smith normal form over the integers. Runs in 64-bit arithmetic and
/// restarts with big integers on overflow.
pub fn smith_normal_form(m: &SparseMatrix) -> SnfResult {
    match eliminate_units(&SmallZ, m) {
        Some(e) => remainder_snf(&SmallZ, e),
        None => remainder_snf(&BigZ, eliminate_units(&BigZ, m).expect("big integers do not overflow")),
    }
}

/// Rank over the prime field `F_p`.
pub fn rank_mod_p(m: &SparseMatrix, p: u32) -> usize {
    let e = eliminate_units(&PrimeField(p as u64), m).expect("field arithmetic does not overflow");
    debug_assert!(e.remainder.is_empty());
    e.unit_pivots
}

/// Rank over the rationals.
pub fn rank_rational(m: &SparseMatrix) -> usize {
    smith_normal_form(m).rank
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeHomology {
    pub degree: usize,
    pub betti: u64,
    #[serde(serialize_with = "ser_bigints")]
    pub torsion: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub degrees: Vec<DegreeHomology>,
}

impl HomologySummary {
    pub fn betti(&self) -> Vec<u64> {
        self.degrees.iter().map(|d| d.betti).collect()
    }

    pub fn torsion_free(&self) -> bool {
        self.degrees.iter().all(|d| d.torsion.is_empty())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serialization")
    }
}

fn cell_counts(spec: &ComplexSpec) -> Vec<u64> {
    (0..spec.n).map(|d| spec.cell_count(d) as u64).collect()
}

/// Integral homology of the complex.
pub fn homology_z(spec: &ComplexSpec) -> Result<HomologySummary> {
    spec.validate()?;
    spec.check_size()?;
    let counts = cell_counts(spec);
    let n = spec.n;
    let mut snfs: Vec<Option<SnfResult>> = vec![None; n + 1];
    for d in 1..n {
        if counts[d] == 0 || counts[d - 1] == 0 {
            continue;
        }
        snfs[d] = Some(smith_normal_form(&boundary_matrix(spec, d, Ring::Integers)?));
    }
    let rank = |d: usize| snfs.get(d).and_then(|s| s.as_ref()).map_or(0, |s| s.rank as u64);
    let degrees = (0..n)
        .map(|d| DegreeHomology {
            degree: d,
            betti: counts[d] - rank(d) - rank(d + 1),
            torsion: snfs.get(d + 1).and_then(|s| s.as_ref()).map(|s| s.torsion()).unwrap_or_default(),
        })
        .collect();
    Ok(HomologySummary { degrees })
}

/// Betti numbers over `F_p`, or over the rationals when `p = 0`.
pub fn homology_field(spec: &ComplexSpec, p: u32) -> Result<Vec<u64>> {
    spec.validate()?;
    spec.check_size()?;
    let counts = cell_counts(spec);
    let n = spec.n;
    let mut ranks = vec![0u64; n + 1];
    for d in 1..n {
        if counts[d] == 0 || counts[d - 1] == 0 {
            continue;
        }
        let m = boundary_matrix(spec, d, Ring::Integers)?;
        ranks[d] = if p == 0 { rank_rational(&m) } else { rank_mod_p(&m, p) } as u64;
    }
    Ok((0..n).map(|d| counts[d] - ranks[d] - ranks[d + 1]).collect())
}

/// Field for persistence computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Rationals,
    Prime(u32),
}

/// Column arithmetic for reduction: fraction-free over the integers for the
/// rationals, plain modular arithmetic for prime fields.
trait ColumnOps {
    type E: Clone;
    fn from_i64(&self, v: i64) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    /// `b*x - a*y` entrywise
    fn combine(&self, b: &Self::E, x: &Self::E, a: &Self::E, y: &Self::E) -> Option<Self::E>;
    fn normalize(&self, col: &mut [(u32, Self::E)]);
}

struct ModP(u64);
struct FracFree;
struct FracFreeBig;

impl ColumnOps for ModP {
    type E = u64;
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn combine(&self, b: &u64, x: &u64, a: &u64, y: &u64) -> Option<u64> {
        Some((b * x % self.0 + self.0 - a * y % self.0) % self.0)
    }
    fn normalize(&self, _col: &mut [(u32, u64)]) {}
}

impl ColumnOps for FracFree {
    type E = i64;
    fn from_i64(&self, v: i64) -> i64 {
        v
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn combine(&self, b: &i64, x: &i64, a: &i64, y: &i64) -> Option<i64> {
        b.checked_mul(*x)?.checked_sub(a.checked_mul(*y)?)
    }
    fn normalize(&self, col: &mut [(u32, i64)]) {
        let g = col.iter().fold(0i64, |g, (_, v)| g.gcd(v));
        if g > 1 {
            for (_, v) in col.iter_mut() {
                *v /= g;
            }
        }
    }
}

impl ColumnOps for FracFreeBig {
    type E = BigInt;
    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn combine(&self, b: &BigInt, x: &BigInt, a: &BigInt, y: &BigInt) -> Option<BigInt> {
        Some(b * x - a * y)
    }
    fn normalize(&self, col: &mut [(u32, BigInt)]) {
        let g = col.iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v));
        if g > BigInt::one() {
            for (_, v) in col.iter_mut() {
                *v = &*v / &g;
            }
        }
    }
}

/// Filtered complex: cells in filtration order with birth values and
/// boundary columns indexed by filtration position.
pub struct FilteredComplex {
    pub dims: Vec<usize>,
    pub births: Vec<u32>,
    pub columns: Vec<Vec<(u32, i64)>>,
}

/// The width filtration `cell(n,1) ⊆ … ⊆ cell(n,n)` restricted to cells of
/// dimension at most `max_dim`.
pub fn width_filtration(n: usize, max_dim: usize) -> Result<FilteredComplex> {
    let max_dim = max_dim.min(n - 1);
    let total: u128 = (0..=max_dim).map(|d| ComplexSpec::strip(n, n as u32).cell_count(d)).sum();
    let limit = crate::complexes::cell_limit();
    if total > limit {
        return Err(Error::TooLarge { cells: total, limit });
    }
    let mut cells: Vec<(u32, usize, Symbol)> = Vec::new();
    for d in 0..=max_dim {
        for s in strip_cells(n, n, d) {
            cells.push((s.max_block_len() as u32, d, s));
        }
    }
    cells.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then_with(|| a.2.cmp(&b.2)));
    let index: HashMap<&Symbol, u32> = cells.iter().enumerate().map(|(i, c)| (&c.2, i as u32)).collect();
    let columns = crate::par::map(&cells, |(_, _, s)| {
        let mut col: Vec<(u32, i64)> = s.faces().into_iter().map(|(f, v)| (index[&f], v as i64)).collect();
        col.sort_unstable();
        col
    });
    Ok(FilteredComplex {
        dims: cells.iter().map(|c| c.1).collect(),
        births: cells.iter().map(|c| c.0).collect(),
        columns,
    })
}

fn reduce<C: ColumnOps>(c: &C, fc: &FilteredComplex, max_dim: usize, complete: bool) -> Option<Barcode> {
    let ncell = fc.dims.len();
    let mut low_owner: HashMap<u32, usize> = HashMap::new();
    let mut reduced: Vec<Vec<(u32, C::E)>> = vec![Vec::new(); ncell];
    let mut cleared = vec![false; ncell];
    let mut bars = Barcode::default();
    // clearing: reduce higher dimensions first
    for d in (1..=max_dim).rev() {
        for j in 0..ncell {
            if fc.dims[j] != d || cleared[j] {
                continue;
            }
            let mut col: Vec<(u32, C::E)> = fc.columns[j].iter().map(|&(i, v)| (i, c.from_i64(v))).collect();
            while let Some((low, lv)) = col.last().cloned() {
                let Some(&k) = low_owner.get(&low) else { break };
                let other = &reduced[k];
                let ov = &other.last().unwrap().1;
                // col := ov*col - lv*other
                let mut out: Vec<(u32, C::E)> = Vec::with_capacity(col.len() + other.len());
                let (mut x, mut y) = (0, 0);
                let zero = c.from_i64(0);
                while x < col.len() || y < other.len() {
                    let ix = col.get(x).map_or(u32::MAX, |t| t.0);
                    let iy = other.get(y).map_or(u32::MAX, |t| t.0);
                    let (i, v) = if ix < iy {
                        x += 1;
                        (ix, c.combine(ov, &col[x - 1].1, &lv, &zero)?)
                    } else if iy < ix {
                        y += 1;
                        (iy, c.combine(ov, &zero, &lv, &other[y - 1].1)?)
                    } else {
                        x += 1;
                        y += 1;
                        (ix, c.combine(ov, &col[x - 1].1, &lv, &other[y - 1].1)?)
                    };
                    if !c.is_zero(&v) {
                        out.push((i, v));
                    }
                }
                c.normalize(&mut out);
                col = out;
            }
            if let Some(&(low, _)) = col.last() {
                low_owner.insert(low, j);
                cleared[low as usize] = true;
                let (b, dth) = (fc.births[low as usize], fc.births[j]);
                if b < dth {
                    bars.add(Bar::new(d - 1, b, Some(dth)), 1u32.into());
                }
            }
            reduced[j] = col;
        }
    }
    // unpaired cycles never die
    for i in 0..ncell {
        let d = fc.dims[i];
        if (d < max_dim || (complete && d == max_dim)) && !cleared[i] && reduced[i].is_empty() {
            bars.add(Bar::new(d, fc.births[i], None), 1u32.into());
        }
    }
    Some(bars)
}

/// Barcode of the width filtration over a field, in degrees below
/// `max_dim` (all degrees when `max_dim >= n-1`).
pub fn persistent_homology_field(n: usize, field: Field, max_dim: usize) -> Result<Barcode> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let md = max_dim.min(n - 1);
    let complete = md == n - 1;
    let fc = width_filtration(n, md)?;
    Ok(match field {
        Field::Prime(p) => reduce(&ModP(p as u64), &fc, md, complete).expect("field arithmetic does not overflow"),
        Field::Rationals => reduce(&FracFree, &fc, md, complete)
            .unwrap_or_else(|| reduce(&FracFreeBig, &fc, md, complete).expect("big integers do not overflow")),
    })
}

/// Largest absolute entry, for diagnostics.
pub fn max_abs_entry(m: &SparseMatrix) -> i64 {
    m.entries.iter().map(|e| e.2.abs()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_small() {
        let id = SparseMatrix::from_dense(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(smith_normal_form(&id).invariant_factors, vec![BigInt::one(); 3]);
        let d = SparseMatrix::from_dense(&[vec![2, 0], vec![0, 6]]);
        assert_eq!(smith_normal_form(&d).invariant_factors, vec![BigInt::from(2), BigInt::from(6)]);
        let m = SparseMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(smith_normal_form(&m).invariant_factors, vec![BigInt::from(2), BigInt::from(4)]);
        let z = SparseMatrix::from_dense(&[vec![0, 0], vec![0, 0]]);
        assert_eq!(smith_normal_form(&z).rank, 0);
    }

    #[test]
    fn ranks_mod_p() {
        let m = SparseMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(rank_mod_p(&m, 2), 1);
        assert_eq!(rank_mod_p(&m, 3), 1);
        assert_eq!(rank_mod_p(&m, 5), 2);
    }

    #[test]
    fn triplets_round_trip() {
        let m = SparseMatrix::from_dense(&[vec![1, -1], vec![0, 2]]);
        let (d, back) = SparseMatrix::from_triplets(&m.to_triplets(3)).unwrap();
        assert_eq!(d, 3);
        assert_eq!(back.entries, {
            let mut e = m.entries.clone();
            e.sort_unstable();
            e
        });
    }
}
