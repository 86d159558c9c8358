//! Discrete gradients from total orders, and critical cells of the three
//! complex families.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::combinat::permutations;
use crate::complexes::{strip_cells, weighted_cells, ComplexKind, ComplexSpec};
use crate::error::{invalid, Error, Result};
use crate::order::{contract, follower_flags, strip_cell_order, weighted_cell_order, PCell, Weights};
use crate::par;
use crate::symbol::{wheels_of_word, Label, Symbol};

/// Largest `n` for which matchings are built cell by cell.
pub const MATCHING_MAX_N: usize = 7;
/// Largest `n` for which strip critical cells are listed one by one.
pub const ENUMERATION_MAX_N: usize = 8;

/// A partial pairing of cells with adjacent dimensions.
#[derive(Clone, Debug)]
pub struct MorseMatching {
    /// Cells of each dimension, ascending in the order that built the matching.
    pub cells: Vec<Vec<Symbol>>,
    up: Vec<Vec<Option<u32>>>,
    down: Vec<Vec<Option<u32>>>,
}

impl MorseMatching {
    fn empty(cells: Vec<Vec<Symbol>>) -> Self {
        let up = cells.iter().map(|c| vec![None; c.len()]).collect();
        let down = cells.iter().map(|c| vec![None; c.len()]).collect();
        MorseMatching { cells, up, down }
    }

    /// A matching with explicitly given pairs `(face, coface)`.
    pub fn from_pairs(cells: Vec<Vec<Symbol>>, pairs: &[(Symbol, Symbol)]) -> Result<Self> {
        let mut m = MorseMatching::empty(cells);
        let index = m.index();
        for (f, g) in pairs {
            let (Some(&(df, i)), Some(&(dg, j))) = (index.get(f), index.get(g)) else {
                return invalid(format!("pair ({f}, {g}) is not in the complex"));
            };
            if dg != df + 1 || f.n() != g.n() || g.incidence(f) == 0 {
                return invalid(format!("{f} is not a face of {g}"));
            }
            if m.up[df][i].is_some() || m.down[df][i].is_some() || m.up[dg][j].is_some() || m.down[dg][j].is_some() {
                return invalid(format!("a cell of ({f}, {g}) is matched twice"));
            }
            m.up[df][i] = Some(j as u32);
            m.down[dg][j] = Some(i as u32);
        }
        Ok(m)
    }

    fn index(&self) -> HashMap<Symbol, (usize, usize)> {
        let mut index = HashMap::new();
        for (d, cs) in self.cells.iter().enumerate() {
            for (i, c) in cs.iter().enumerate() {
                index.insert(c.clone(), (d, i));
            }
        }
        index
    }

    pub fn pairs(&self) -> Vec<(Symbol, Symbol)> {
        let mut out = Vec::new();
        for (d, ups) in self.up.iter().enumerate() {
            for (i, p) in ups.iter().enumerate() {
                if let Some(j) = p {
                    out.push((self.cells[d][i].clone(), self.cells[d + 1][*j as usize].clone()));
                }
            }
        }
        out
    }

    pub fn critical(&self, dim: usize) -> Vec<Symbol> {
        (0..self.cells.get(dim).map_or(0, Vec::len))
            .filter(|&i| self.up[dim][i].is_none() && self.down[dim][i].is_none())
            .map(|i| self.cells[dim][i].clone())
            .collect()
    }

    pub fn critical_counts(&self) -> Vec<usize> {
        (0..self.cells.len()).map(|d| self.critical(d).len()).collect()
    }
}

fn complex_cells(spec: &ComplexSpec, dim: usize) -> Result<Vec<Symbol>> {
    Ok(match spec.kind {
        ComplexKind::Strip => strip_cells(spec.n, spec.w_or_k as usize, dim),
        ComplexKind::WeightedPermutohedron => weighted_cells(spec.weights.as_ref().unwrap(), spec.w_or_k, dim),
        ComplexKind::UnorderedStrip => return invalid("matchings are built on strip and weighted complexes"),
    })
}

fn guard(spec: &ComplexSpec) -> Result<()> {
    spec.validate()?;
    if spec.n > MATCHING_MAX_N {
        return Err(Error::TooLarge { cells: spec.total_cells(), limit: ComplexSpec::strip(MATCHING_MAX_N, MATCHING_MAX_N as u32).total_cells() });
    }
    Ok(())
}

/// The canonical total order of the complex family.
pub fn canonical_order(spec: &ComplexSpec) -> fn(&Symbol, &Symbol) -> Ordering {
    match spec.kind {
        ComplexKind::WeightedPermutohedron => |a, b| weighted_cell_order(&PCell::from_symbol(a), &PCell::from_symbol(b)),
        _ => strip_cell_order,
    }
}

/// Pair `f < g` when `f` is the greatest face of `g` and `g` is the least
/// coface of `f`.
pub fn matching_from_order(spec: &ComplexSpec, cmp: impl Fn(&Symbol, &Symbol) -> Ordering + Sync) -> Result<MorseMatching> {
    guard(spec)?;
    let mut cells = Vec::with_capacity(spec.n);
    for d in 0..spec.n {
        let mut c = complex_cells(spec, d)?;
        c.sort_by(&cmp);
        cells.push(c);
    }
    let mut m = MorseMatching::empty(cells);
    for d in 1..spec.n {
        let index: HashMap<&Symbol, u32> = m.cells[d - 1].iter().enumerate().map(|(i, c)| (c, i as u32)).collect();
        let faces: Vec<Vec<u32>> = par::map(&m.cells[d], |g| g.faces().iter().filter_map(|(f, _)| index.get(f).copied()).collect());
        let greatest: Vec<Option<u32>> = faces.iter().map(|fs| fs.iter().copied().max()).collect();
        let mut least_coface: Vec<Option<u32>> = vec![None; m.cells[d - 1].len()];
        for (j, fs) in faces.iter().enumerate() {
            for &f in fs {
                let slot = &mut least_coface[f as usize];
                if slot.is_none() {
                    *slot = Some(j as u32);
                }
            }
        }
        for (j, g) in greatest.iter().enumerate() {
            if let Some(f) = g {
                if least_coface[*f as usize] == Some(j as u32) {
                    m.up[d - 1][*f as usize] = Some(j as u32);
                    m.down[d][j] = Some(*f);
                }
            }
        }
    }
    Ok(m)
}

/// The gradient of the canonical order.
pub fn canonical_matching(spec: &ComplexSpec) -> Result<MorseMatching> {
    matching_from_order(spec, canonical_order(spec))
}

/// True iff the matching has no closed walk: the Hasse diagram with matched
/// edges reversed is acyclic.
pub fn verify_gradient(m: &MorseMatching, spec: &ComplexSpec) -> Result<bool> {
    guard(spec)?;
    let offsets: Vec<usize> = m.cells.iter().scan(0, |acc, c| {
        let o = *acc;
        *acc += c.len();
        Some(o)
    }).collect();
    let total: usize = m.cells.iter().map(Vec::len).sum();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); total];
    let mut indeg = vec![0u32; total];
    for d in 1..m.cells.len() {
        let index: HashMap<&Symbol, usize> = m.cells[d - 1].iter().enumerate().map(|(i, c)| (c, i)).collect();
        for (j, g) in m.cells[d].iter().enumerate() {
            for (f, _) in g.faces() {
                let Some(&i) = index.get(&f) else { continue };
                let (a, b) = (offsets[d] + j, offsets[d - 1] + i);
                let (from, to) = if m.up[d - 1][i] == Some(j as u32) { (b, a) } else { (a, b) };
                adj[from].push(to as u32);
                indeg[to] += 1;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..total).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for &u in &adj[v] {
            indeg[u as usize] -= 1;
            if indeg[u as usize] == 0 {
                queue.push_back(u as usize);
            }
        }
    }
    Ok(seen == total)
}

/// Ordered set partitions of the ranked elements `0..weights.len()` in which
/// every block is a non-follower singleton or a follower. With a threshold
/// `k`, blocks weigh at most `k` and each follower and its leader weigh at
/// least `k+1`.
pub fn p_critical_structures(weights: &[u32], k: Option<u32>) -> Vec<Vec<Vec<u32>>> {
    let m = weights.len();
    assert!(m <= 64);
    let mut out = Vec::new();
    let all = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let weight = |set: u64| -> u32 { (0..m).filter(|&i| set >> i & 1 == 1).map(|i| weights[i]).sum() };
    fn rec(
        rem: u64,
        prev: Option<u32>,
        k: Option<u32>,
        weights: &[u32],
        weight: &dyn Fn(u64) -> u32,
        cur: &mut Vec<Vec<u32>>,
        out: &mut Vec<Vec<Vec<u32>>>,
    ) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        let fits = |wt: u32| k.is_none_or(|k| wt <= k);
        let dies = |lead: u32, wt: u32| k.is_none_or(|k| weights[lead as usize] + wt > k);
        let mut bits = rem;
        while bits != 0 {
            let y = bits.trailing_zeros();
            bits &= bits - 1;
            let wy = weights[y as usize];
            if !fits(wy) {
                continue;
            }
            cur.push(vec![y]);
            match prev {
                Some(x) if x < y => {
                    if dies(x, wy) {
                        rec(rem & !(1 << y), None, k, weights, weight, cur, out);
                    }
                }
                _ => rec(rem & !(1 << y), Some(y), k, weights, weight, cur, out),
            }
            cur.pop();
        }
        if let Some(x) = prev {
            let above = rem & !((2u64 << x) - 1);
            let mut sub = above;
            while sub != 0 {
                if sub.count_ones() >= 2 {
                    let wt = weight(sub);
                    if fits(wt) && dies(x, wt) {
                        cur.push((0..64).filter(|i| sub >> i & 1 == 1).collect());
                        rec(rem & !sub, None, k, weights, weight, cur, out);
                        cur.pop();
                    }
                }
                sub = (sub - 1) & above;
            }
        }
    }
    rec(all, None, k, weights, &weight, &mut Vec::new(), &mut out);
    out
}

/// Whether a cell of `P(n, W, k)` is critical, read off block by block.
pub fn is_critical_weighted(cell: &PCell, weights: &Weights, k: u32) -> bool {
    let blocks: Vec<Vec<u32>> = cell.blocks().iter().map(|b| b.iter().map(|&x| x as u32).collect()).collect();
    let flags = follower_flags(&blocks);
    for (i, b) in cell.blocks().iter().enumerate() {
        let wb = weights.of_block(b);
        if wb > k {
            return false;
        }
        if flags[i] {
            if weights.of(cell.blocks()[i - 1][0]) + wb <= k {
                return false;
            }
        } else if b.len() != 1 {
            return false;
        }
    }
    true
}

/// Critical cells of `P(n, W, k)` for nondecreasing weights.
pub fn critical_cells_weighted(weights: &Weights, k: u32) -> Result<Vec<PCell>> {
    if !weights.is_nondecreasing() {
        return invalid("weights must be nondecreasing");
    }
    if weights.n() > 64 {
        return invalid("at most 64 labels");
    }
    let mut out: Vec<PCell> = p_critical_structures(&weights.0, Some(k))
        .into_iter()
        .map(|bs| PCell::new(bs.into_iter().map(|b| b.into_iter().map(|r| r as Label + 1).collect()).collect()).unwrap())
        .collect();
    out.sort_by(weighted_cell_order);
    Ok(out)
}

/// Per-dimension counts of critical cells of `P(n, W, k)`.
pub fn critical_counts_weighted(weights: &Weights, k: u32) -> Result<Vec<usize>> {
    let mut counts = vec![0; weights.n()];
    for c in critical_cells_weighted(weights, k)? {
        counts[c.dim()] += 1;
    }
    Ok(counts)
}

/// Whether a cell of `cell(n, w)` is critical: its contraction is a critical
/// cell for the wheel sizes as weights.
pub fn is_critical_strip(s: &Symbol, w: u32) -> bool {
    if s.max_block_len() > w as usize {
        return false;
    }
    let (blocks, wheels) = contract(s);
    let sizes: Vec<u32> = wheels.iter().map(|x| x.len() as u32).collect();
    let flags = follower_flags(&blocks);
    for (i, b) in blocks.iter().enumerate() {
        if flags[i] {
            let lead = blocks[i - 1][0] as usize;
            let wb: u32 = b.iter().map(|&r| sizes[r as usize]).sum();
            if sizes[lead] + wb <= w {
                return false;
            }
        } else if b.len() != 1 {
            return false;
        }
    }
    true
}

/// Strip cells built from the wheels of the layer `sigma`.
fn layer_cells(sigma: &[Label], w: Option<u32>) -> Vec<Symbol> {
    let mut wheels = wheels_of_word(sigma);
    if let Some(w) = w {
        if wheels.iter().any(|x| x.len() > w as usize) {
            return Vec::new();
        }
    }
    wheels.sort_by_key(|x| (x.len(), x[0]));
    let sizes: Vec<u32> = wheels.iter().map(|x| x.len() as u32).collect();
    p_critical_structures(&sizes, w)
        .into_iter()
        .map(|blocks| {
            let bs: Vec<Vec<Label>> = blocks
                .into_iter()
                .map(|b| {
                    let mut ws: Vec<&Vec<Label>> = b.iter().map(|&r| &wheels[r as usize]).collect();
                    ws.sort_by_key(|x| x[0]);
                    ws.into_iter().flatten().copied().collect()
                })
                .collect();
            Symbol::new(&bs).unwrap()
        })
        .collect()
}

fn strip_structures(n: usize, w: Option<u32>) -> Result<Vec<Symbol>> {
    if n == 0 {
        return invalid("n must be positive");
    }
    if n > ENUMERATION_MAX_N {
        return invalid(format!("listing is limited to n <= {ENUMERATION_MAX_N}; use counting"));
    }
    let layers = permutations(n);
    Ok(par::map(&layers, |s| layer_cells(s, w)).into_iter().flatten().collect())
}

/// Critical cells of `cell(n, w)`, grouped by layer in lexicographic order.
pub fn critical_cells_strip(n: usize, w: u32) -> Result<Vec<Symbol>> {
    if w == 0 {
        return invalid("w must be positive");
    }
    strip_structures(n, Some(w))
}

/// Cells of `cell(n)` that are critical for at least one width, i.e. the
/// critical cells of every `cell(n, w)` together with cells whose bar is empty.
pub fn critical_cells_any_width(n: usize) -> Result<Vec<Symbol>> {
    strip_structures(n, None)
}

/// Per-dimension counts of critical cells of `cell(n, w)`, computed without
/// listing.
pub fn critical_counts_strip(n: usize, w: u32) -> Vec<BigUint> {
    let bars = crate::persistence::count_barcode(n);
    let mut counts = vec![BigUint::zero(); n];
    for (bar, mult) in bars.iter() {
        if bar.alive_at(w) {
            counts[bar.degree] += mult;
        }
    }
    counts
}

/// Per-dimension counts of critical cells of `ucel(n, w)` in characteristic `p`.
pub fn critical_counts_unordered(n: u32, w: u32, p: u32) -> Vec<u128> {
    crate::unordered::betti_unordered(n, w, p)
}
