//! Cell enumeration and boundary matrices for `cell(n, w)`, `P(n, W, k)` and
//! `ucel(n, w)`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::combinat::{composition_count, compositions, factorial, next_permutation};
use crate::error::{invalid, Error, Result};
use crate::oracle::SparseMatrix;
use crate::order::{strip_cell_order, weighted_cell_order, PCell, Weights};
use crate::par;
use crate::symbol::{Label, Symbol};
use crate::unordered::UCell;

/// Default ceiling on the number of cells any oracle computation may touch.
pub const DEFAULT_CELL_LIMIT: u128 = 1_000_000;

pub const CELL_LIMIT_VAR: &str = "STRIP_HOMOLOGY_CELL_LIMIT";

/// Cell ceiling, overridable through `STRIP_HOMOLOGY_CELL_LIMIT`.
pub fn cell_limit() -> u128 {
    std::env::var(CELL_LIMIT_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CELL_LIMIT)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComplexKind {
    Strip,
    WeightedPermutohedron,
    UnorderedStrip,
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplexKind::Strip => "strip",
            ComplexKind::WeightedPermutohedron => "weighted",
            ComplexKind::UnorderedStrip => "unordered",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexSpec {
    pub kind: ComplexKind,
    pub n: usize,
    /// Strip width `w`, or weight threshold `k` for the weighted kind.
    pub w_or_k: u32,
    pub weights: Option<Weights>,
    /// Characteristic for the unordered kind (0 or a prime).
    pub characteristic: u32,
}

impl ComplexSpec {
    pub fn strip(n: usize, w: u32) -> Self {
        ComplexSpec { kind: ComplexKind::Strip, n, w_or_k: w, weights: None, characteristic: 0 }
    }

    pub fn weighted(weights: Weights, k: u32) -> Self {
        ComplexSpec { kind: ComplexKind::WeightedPermutohedron, n: weights.n(), w_or_k: k, weights: Some(weights), characteristic: 0 }
    }

    pub fn unordered(n: usize, w: u32, p: u32) -> Self {
        ComplexSpec { kind: ComplexKind::UnorderedStrip, n, w_or_k: w, weights: None, characteristic: p }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return invalid("n must be positive");
        }
        if self.w_or_k == 0 {
            return invalid("width or threshold must be positive");
        }
        if self.n > crate::symbol::MAX_LABEL {
            return invalid(format!("n = {} exceeds {}", self.n, crate::symbol::MAX_LABEL));
        }
        match self.kind {
            ComplexKind::WeightedPermutohedron => {
                let w = self.weights.as_ref().ok_or_else(|| Error::InvalidInput("weighted complex needs weights".into()))?;
                if w.n() != self.n {
                    return invalid("weight vector length differs from n");
                }
                if self.w_or_k < *w.0.iter().max().unwrap() {
                    return invalid("threshold is below a single weight; the complex is empty");
                }
            }
            ComplexKind::UnorderedStrip => {
                let p = self.characteristic;
                if p != 0 && (p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d))) {
                    return invalid(format!("{p} is not prime"));
                }
            }
            ComplexKind::Strip => {}
        }
        Ok(())
    }

    pub fn top_dim(&self) -> usize {
        self.n - 1
    }

    /// Number of cells of dimension `dim`.
    pub fn cell_count(&self, dim: usize) -> u128 {
        if dim >= self.n {
            return 0;
        }
        let parts = self.n - dim;
        let w = self.w_or_k as usize;
        match self.kind {
            ComplexKind::Strip => {
                composition_count(self.n, parts, w) * factorial(self.n).to_u128().unwrap_or(u128::MAX)
            }
            ComplexKind::UnorderedStrip => composition_count(self.n, parts, w),
            ComplexKind::WeightedPermutohedron => weighted_cells(self.weights.as_ref().unwrap(), self.w_or_k, dim).len() as u128,
        }
    }

    pub fn total_cells(&self) -> u128 {
        (0..self.n).map(|d| self.cell_count(d)).sum()
    }

    pub fn check_size(&self) -> Result<()> {
        if self.kind == ComplexKind::WeightedPermutohedron && self.n > 10 {
            return Err(Error::TooLarge { cells: u128::MAX, limit: cell_limit() });
        }
        let cells = self.total_cells();
        let limit = cell_limit();
        if cells > limit {
            return Err(Error::TooLarge { cells, limit });
        }
        Ok(())
    }
}

/// A cell of any of the three families.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Cell {
    Symbol(Symbol),
    Composition(UCell),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Symbol(s) => s.fmt(f),
            Cell::Composition(c) => c.fmt(f),
        }
    }
}

/// Cells of `cell(n, w)` in dimension `dim`, in generation order.
pub fn strip_cells(n: usize, w: usize, dim: usize) -> Vec<Symbol> {
    if dim >= n {
        return Vec::new();
    }
    let comps = compositions(n, n - dim, w);
    let mut out = Vec::new();
    for comp in comps {
        let mut ends = Vec::with_capacity(comp.len());
        let mut acc = 0u8;
        for &c in &comp {
            acc += c as u8;
            ends.push(acc);
        }
        let mut p: Vec<Label> = (1..=n as Label).collect();
        loop {
            out.push(Symbol::from_raw(p.clone(), ends.clone()));
            if !next_permutation(&mut p) {
                break;
            }
        }
    }
    out
}

/// Sorted-representative symbols of the cells of `P(n, W, k)` in dimension `dim`.
pub fn weighted_cells(weights: &Weights, k: u32, dim: usize) -> Vec<Symbol> {
    let n = weights.n();
    if dim >= n {
        return Vec::new();
    }
    let parts = n - dim;
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<Label>> = Vec::new();
    fn rec(remaining: u64, parts: usize, weights: &Weights, k: u32, blocks: &mut Vec<Vec<Label>>, out: &mut Vec<Symbol>) {
        if parts == 0 {
            if remaining == 0 {
                out.push(Symbol::new(blocks).unwrap());
            }
            return;
        }
        if remaining.count_ones() < parts as u32 {
            return;
        }
        let mut sub = remaining;
        while sub != 0 {
            let block: Vec<Label> = (0..64).filter(|i| sub >> i & 1 == 1).map(|i| i as Label + 1).collect();
            if weights.of_block(&block) <= k {
                blocks.push(block);
                rec(remaining & !sub, parts - 1, weights, k, blocks, out);
                blocks.pop();
            }
            sub = (sub - 1) & remaining;
        }
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    rec(all, parts, weights, k, &mut blocks, &mut out);
    out
}

/// Cells of `ucel(n, w)` in dimension `dim`.
pub fn unordered_cells(n: usize, w: usize, dim: usize) -> Vec<UCell> {
    if dim >= n {
        return Vec::new();
    }
    compositions(n, n - dim, w).into_iter().map(|c| UCell(c.into_iter().map(|x| x as u32).collect())).collect()
}

/// Every admissible cell of dimension `dim`, in the canonical order of the
/// family (the gradient order for symbols, lexicographic for compositions).
pub fn enumerate_cells(spec: &ComplexSpec, dim: usize) -> Result<Vec<Cell>> {
    spec.validate()?;
    Ok(match spec.kind {
        ComplexKind::Strip => {
            let mut v = strip_cells(spec.n, spec.w_or_k as usize, dim);
            v.sort_by(strip_cell_order);
            v.into_iter().map(Cell::Symbol).collect()
        }
        ComplexKind::WeightedPermutohedron => {
            let mut v: Vec<PCell> = weighted_cells(spec.weights.as_ref().unwrap(), spec.w_or_k, dim)
                .iter()
                .map(PCell::from_symbol)
                .collect();
            v.sort_by(weighted_cell_order);
            v.into_iter().map(|c| Cell::Symbol(c.to_symbol())).collect()
        }
        ComplexKind::UnorderedStrip => {
            let mut v = unordered_cells(spec.n, spec.w_or_k as usize, dim);
            v.sort();
            v.into_iter().map(Cell::Composition).collect()
        }
    })
}

/// Coefficient ring for boundary matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ring {
    Integers,
    Rationals,
    Prime(u32),
}

fn symbol_cells(spec: &ComplexSpec, dim: usize) -> Vec<Symbol> {
    match spec.kind {
        ComplexKind::Strip => strip_cells(spec.n, spec.w_or_k as usize, dim),
        ComplexKind::WeightedPermutohedron => weighted_cells(spec.weights.as_ref().unwrap(), spec.w_or_k, dim),
        ComplexKind::UnorderedStrip => unreachable!(),
    }
}

/// The boundary map from `dim`-cells to `(dim-1)`-cells. Rows and columns
/// follow the generation order of the cells.
pub fn boundary_matrix(spec: &ComplexSpec, dim: usize, ring: Ring) -> Result<SparseMatrix> {
    spec.validate()?;
    if dim == 0 || dim >= spec.n {
        return invalid(format!("no boundary map in dimension {dim}"));
    }
    let mut m = match spec.kind {
        ComplexKind::UnorderedStrip => {
            let w = spec.w_or_k as usize;
            let rows = unordered_cells(spec.n, w, dim - 1);
            let cols = unordered_cells(spec.n, w, dim);
            let index: HashMap<&UCell, u32> = rows.iter().enumerate().map(|(i, c)| (c, i as u32)).collect();
            let mut entries = Vec::new();
            for (j, c) in cols.iter().enumerate() {
                for (f, k) in c.boundary() {
                    if let Some(&i) = index.get(&f) {
                        let v: i64 = k.to_i64().ok_or_else(|| Error::InvalidInput("coefficient exceeds 64 bits".into()))?;
                        entries.push((i, j as u32, v));
                    }
                }
            }
            SparseMatrix { rows: rows.len(), cols: cols.len(), entries }
        }
        _ => {
            let rows = symbol_cells(spec, dim - 1);
            let cols = symbol_cells(spec, dim);
            let index: HashMap<&Symbol, u32> = rows.iter().enumerate().map(|(i, c)| (c, i as u32)).collect();
            let sorted = spec.kind == ComplexKind::WeightedPermutohedron;
            let per_col = par::map(&cols, |c| {
                c.faces()
                    .into_iter()
                    .filter(|(f, _)| !sorted || f.is_sorted_rep())
                    .filter_map(|(f, s)| index.get(&f).map(|&i| (i, s as i64)))
                    .collect::<Vec<_>>()
            });
            let mut entries = Vec::new();
            for (j, col) in per_col.into_iter().enumerate() {
                entries.extend(col.into_iter().map(|(i, v)| (i, j as u32, v)));
            }
            SparseMatrix { rows: rows.len(), cols: cols.len(), entries }
        }
    };
    if let Ring::Prime(p) = ring {
        m = m.reduce_mod(p);
    }
    Ok(m)
}

/// Alternating sum of cell counts.
pub fn euler_characteristic(spec: &ComplexSpec) -> BigInt {
    let mut chi = BigInt::default();
    for d in 0..spec.n {
        let c = BigInt::from(spec.cell_count(d));
        if d % 2 == 0 {
            chi += c;
        } else {
            chi -= c;
        }
    }
    chi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(strip_cells(3, 2, 1).len(), 12);
        assert_eq!(strip_cells(4, 4, 3).len(), 24);
        assert_eq!(euler_characteristic(&ComplexSpec::strip(3, 2)), BigInt::from(-6));
        assert_eq!(euler_characteristic(&ComplexSpec::weighted(Weights::unit(3), 2)), BigInt::from(0));
        assert_eq!(unordered_cells(3, 3, 2), vec![UCell(vec![3])]);
    }

    #[test]
    fn weighted_cells_respect_threshold() {
        let w = Weights::new(vec![1, 2, 2]).unwrap();
        for d in 0..3 {
            for s in weighted_cells(&w, 3, d) {
                assert!(s.blocks().all(|b| w.of_block(b) <= 3));
                assert!(s.is_sorted_rep());
            }
        }
    }
}
