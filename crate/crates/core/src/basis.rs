//! Explicit cycles: wheels, filters and their concatenations in `cell(n, w)`,
//! and the cycles `z(e)` of the weighted permutohedral complexes.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{invalid, Error, Result};
use crate::morse::{critical_cells_strip, critical_cells_weighted, is_critical_weighted};
use crate::order::{contract, follower_flags, strip_cell_order, weighted_cell_order, PCell, Weights};
use crate::persistence::Bar;
use crate::symbol::{Label, Symbol};

/// A wheel: a block whose first label is its largest.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Wheel(Vec<Label>);

impl Wheel {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        Symbol::new(&[&labels])?;
        if labels.iter().any(|&x| x > labels[0]) {
            return invalid(format!("wheel {labels:?} must start with its largest label"));
        }
        Ok(Wheel(labels))
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn axle(&self) -> Label {
        self.0[0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Rank key: more disks ranks higher, then larger axle.
    pub fn rank(&self) -> (usize, Label) {
        (self.0.len(), self.0[0])
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }
}

impl fmt::Display for Wheel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(" "))
    }
}

/// A filter: at least two wheels in ascending order of axle.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Filter {
    wheels: Vec<Wheel>,
}

impl Filter {
    pub fn new(wheels: Vec<Wheel>) -> Result<Self> {
        if wheels.len() < 2 {
            return invalid("a filter needs at least two wheels");
        }
        if wheels.windows(2).any(|p| p[0].axle() >= p[1].axle()) {
            return invalid("filter wheels must ascend by largest label");
        }
        Ok(Filter { wheels })
    }

    pub fn wheels(&self) -> &[Wheel] {
        &self.wheels
    }

    pub fn total(&self) -> usize {
        self.wheels.iter().map(Wheel::len).sum()
    }

    /// The wheel of least rank.
    pub fn least(&self) -> &Wheel {
        self.wheels.iter().min_by_key(|w| w.rank()).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.total() - 2
    }

    /// First width at which the filter is a cycle.
    pub fn birth(&self) -> usize {
        self.total() - self.least().len()
    }

    /// Width at which the filter becomes a boundary.
    pub fn death(&self) -> usize {
        self.total()
    }

    pub fn check_width(&self, w: u32) -> Result<()> {
        let w = w as usize;
        if self.total() <= w {
            return invalid(format!("filter {self} has {} disks, at most the width {w}", self.total()));
        }
        if self.birth() > w {
            return invalid(format!("filter {self} has a wheel with fewer than {} disks", self.total() - w));
        }
        Ok(())
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.wheels.iter().map(|w| w.to_string()).collect();
        write!(f, "{{{}}}", s.join(" "))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Factor {
    Wheel(Wheel),
    Filter(Filter),
}

impl Factor {
    fn labels(&self) -> Vec<Label> {
        match self {
            Factor::Wheel(w) => w.0.clone(),
            Factor::Filter(f) => f.wheels.iter().flat_map(|w| w.0.clone()).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Factor::Wheel(w) => w.degree(),
            Factor::Filter(f) => f.degree(),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Wheel(w) => w.fmt(f),
            Factor::Filter(x) => x.fmt(f),
        }
    }
}

/// A concatenation of wheels and filters.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BasisElement {
    factors: Vec<Factor>,
}

#[derive(Serialize, Deserialize)]
struct JsonFactor {
    kind: String,
    wheels: Vec<Vec<Label>>,
}

#[derive(Serialize, Deserialize)]
struct JsonElement {
    factors: Vec<JsonFactor>,
    degree: usize,
    birth: u32,
    death: Option<u32>,
}

impl BasisElement {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return invalid("a basis element needs at least one factor");
        }
        let labels: Vec<Label> = factors.iter().flat_map(Factor::labels).collect();
        let mut seen = HashSet::new();
        if !labels.iter().all(|x| seen.insert(*x)) {
            return invalid("factors share a label");
        }
        Ok(BasisElement { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn n(&self) -> usize {
        self.factors.iter().map(|f| f.labels().len()).sum()
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(Factor::degree).sum()
    }

    /// The first width at which every factor is a cycle of `cell(n, w)`.
    pub fn birth(&self) -> u32 {
        self.factors
            .iter()
            .map(|f| match f {
                Factor::Wheel(w) => w.len(),
                Factor::Filter(x) => x.birth(),
            })
            .max()
            .unwrap() as u32
    }

    /// The width at which the cycle becomes a boundary: the smallest filter.
    pub fn death(&self) -> Option<u32> {
        self.factors
            .iter()
            .filter_map(|f| match f {
                Factor::Filter(x) => Some(x.death() as u32),
                Factor::Wheel(_) => None,
            })
            .min()
    }

    pub fn bar(&self) -> Bar {
        Bar::new(self.degree(), self.birth(), self.death())
    }

    /// Check the basis conditions at width `w`, naming the first violated one.
    pub fn validate(&self, w: u32) -> Result<()> {
        for (i, f) in self.factors.iter().enumerate() {
            match f {
                Factor::Wheel(x) => {
                    if x.len() > w as usize {
                        return invalid(format!("wheel {x} has more than {w} disks"));
                    }
                    match self.factors.get(i + 1) {
                        Some(Factor::Wheel(y)) if x.rank() < y.rank() => {
                            return invalid(format!("free wheels {x} and {y} must descend in rank"));
                        }
                        Some(Factor::Filter(y)) if x.rank() < y.least().rank() => {
                            return invalid(format!("wheel {x} must rank above the least wheel of {y}"));
                        }
                        _ => {}
                    }
                }
                Factor::Filter(x) => x.check_width(w)?,
            }
        }
        Ok(())
    }

    /// The critical cell this element stands for: free wheels as blocks, each
    /// filter as its least wheel followed by the other wheels in one block.
    pub fn critical_cell(&self) -> Symbol {
        let mut blocks: Vec<Vec<Label>> = Vec::new();
        for f in &self.factors {
            match f {
                Factor::Wheel(w) => blocks.push(w.0.clone()),
                Factor::Filter(x) => {
                    let lead = x.least();
                    blocks.push(lead.0.clone());
                    blocks.push(x.wheels.iter().filter(|w| *w != lead).flat_map(|w| w.0.clone()).collect());
                }
            }
        }
        Symbol::new(&blocks).unwrap()
    }

    /// Read a basis element off a critical cell of `cell(n, w)`.
    pub fn from_critical_cell(s: &Symbol) -> Result<Self> {
        let (blocks, wheels) = contract(s);
        let flags = follower_flags(&blocks);
        let mut factors = Vec::new();
        let mut i = 0;
        while i < blocks.len() {
            if blocks[i].len() != 1 {
                return invalid(format!("{s} is not critical: block {} is neither a wheel nor a follower", i + 1));
            }
            let lead = Wheel(wheels[blocks[i][0] as usize].clone());
            if flags.get(i + 1) == Some(&true) {
                let mut ws: Vec<Wheel> = vec![lead];
                ws.extend(blocks[i + 1].iter().map(|&r| Wheel(wheels[r as usize].clone())));
                ws.sort_by_key(Wheel::axle);
                factors.push(Factor::Filter(Filter { wheels: ws }));
                i += 2;
            } else {
                factors.push(Factor::Wheel(lead));
                i += 1;
            }
        }
        BasisElement::new(factors)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).unwrap()
    }

    fn to_json_value(&self) -> JsonElement {
        JsonElement {
            factors: self
                .factors
                .iter()
                .map(|f| match f {
                    Factor::Wheel(w) => JsonFactor { kind: "wheel".into(), wheels: vec![w.0.clone()] },
                    Factor::Filter(x) => JsonFactor { kind: "filter".into(), wheels: x.wheels.iter().map(|w| w.0.clone()).collect() },
                })
                .collect(),
            degree: self.degree(),
            birth: self.birth(),
            death: self.death(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: JsonElement = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut factors = Vec::new();
        for f in j.factors {
            let wheels = f.wheels.into_iter().map(Wheel::new).collect::<Result<Vec<_>>>()?;
            factors.push(match f.kind.as_str() {
                "wheel" if wheels.len() == 1 => Factor::Wheel(wheels.into_iter().next().unwrap()),
                "filter" => Factor::Filter(Filter::new(wheels)?),
                k => return Err(Error::Parse(format!("unknown factor kind `{k}`"))),
            });
        }
        BasisElement::new(factors)
    }
}

/// Serialize a list of elements as a JSON array.
pub fn elements_to_json(elements: &[BasisElement]) -> String {
    let v: Vec<JsonElement> = elements.iter().map(BasisElement::to_json_value).collect();
    serde_json::to_string_pretty(&v).unwrap()
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        f.write_str(&s.join(" | "))
    }
}

// Signed words of the wheel cycle on positions 0..k, position 0 the axle.
fn spin_pattern(k: usize) -> Vec<(Vec<usize>, i64)> {
    let mut words: Vec<(Vec<usize>, i64)> = vec![(vec![0], 1)];
    for i in 1..k {
        let grow = |eps: i64| -> Vec<(Vec<usize>, i64)> {
            let mut out = Vec::with_capacity(words.len() * 2);
            for (w, c) in &words {
                let mut a = w.clone();
                a.push(i);
                out.push((a, *c));
                let mut b = vec![i];
                b.extend_from_slice(w);
                out.push((b, eps * c));
            }
            out
        };
        let is_cycle = |ws: &[(Vec<usize>, i64)]| pattern_chain(ws).boundary().is_zero();
        let plus = grow(1);
        words = if is_cycle(&plus) {
            plus
        } else {
            let minus = grow(-1);
            if is_cycle(&minus) {
                minus
            } else {
                solve_signs(&plus)
            }
        };
    }
    words
}

fn pattern_chain(ws: &[(Vec<usize>, i64)]) -> Chain {
    let k = ws[0].0.len();
    // labels k, 1, 2, ..., k-1 keep the axle largest
    let label = |p: usize| if p == 0 { k as Label } else { p as Label };
    Chain::from_terms(ws.iter().map(|(w, c)| {
        let word: Vec<Label> = w.iter().map(|&p| label(p)).collect();
        (Symbol::new(&[word]).unwrap(), BigInt::from(*c))
    }))
}

// Coefficients on a fixed support making the chain a cycle, first one +1.
fn solve_signs(support: &[(Vec<usize>, i64)]) -> Vec<(Vec<usize>, i64)> {
    let cols: Vec<Chain> = support.iter().map(|(w, _)| pattern_chain(&[(w.clone(), 1)]).boundary()).collect();
    let mut rows: Vec<Symbol> = cols.iter().flat_map(|c| c.iter().map(|(s, _)| s.clone())).collect();
    rows.sort();
    rows.dedup();
    let m = support.len();
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| BigRational::from_integer(c.coeff(r))).collect())
        .collect();
    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut row = 0;
    // the canonical word last, so that it stays free
    for col in (1..m).chain(std::iter::once(0)) {
        let Some(p) = (row..a.len()).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..m {
                    let v = &a[row][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    assert!(!pivots.contains(&0), "wheel support admits no cycle with nonzero canonical coefficient");
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    assert!(free.len() == 1, "wheel cycle is not unique up to scale");
    let mut x = vec![BigRational::zero(); m];
    x[0] = BigRational::one();
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = -&a[r][0];
    }
    support
        .iter()
        .zip(x)
        .map(|((w, _), v)| {
            assert!(v.is_integer() && v.abs().is_one(), "wheel cycle coefficients are not units");
            (w.clone(), if v.is_positive() { 1 } else { -1 })
        })
        .collect()
}

/// The wheel cycle: spin doubling from the axle, one single-block word per
/// way of commuting the nested brackets, the wheel word itself with +1.
pub fn wheel_chain(w: &Wheel) -> Chain {
    let pattern = spin_pattern(w.len());
    Chain::from_terms(pattern.into_iter().map(|(pos, c)| {
        let word: Vec<Label> = pos.iter().map(|&p| w.0[p]).collect();
        (Symbol::new(&[word]).unwrap(), BigInt::from(c))
    }))
}

/// One block carrying every wheel, segments in ascending order of axle; the
/// coefficient of a word is the product of the spin coefficients.
pub fn lift_block(wheels: &[Wheel]) -> Chain {
    let mut ws: Vec<&Wheel> = wheels.iter().collect();
    ws.sort_by_key(|w| w.axle());
    let mut acc: Vec<(Vec<Label>, BigInt)> = vec![(Vec::new(), BigInt::one())];
    for w in ws {
        let c = wheel_chain(w);
        let mut next = Vec::with_capacity(acc.len() * c.len());
        for (word, k) in &acc {
            for (s, v) in c.iter() {
                let mut x = word.clone();
                x.extend_from_slice(s.word());
                next.push((x, k * v));
            }
        }
        acc = next;
    }
    Chain::from_terms(acc.into_iter().map(|(w, k)| (Symbol::new(&[w]).unwrap(), k)))
}

/// The filter cycle at width `w`: the boundary of the lifted merged block.
pub fn filter_chain(f: &Filter, w: u32) -> Result<Chain> {
    f.check_width(w)?;
    Ok(lift_block(&f.wheels).boundary())
}

fn factor_chain(f: &Factor, w: u32) -> Result<Chain> {
    match f {
        Factor::Wheel(x) => Ok(wheel_chain(x)),
        Factor::Filter(x) => filter_chain(x, w),
    }
}

/// The cycle of a basis element at width `w`.
pub fn basic_cycle(b: &BasisElement, w: u32) -> Result<Chain> {
    b.validate(w)?;
    let mut c = factor_chain(&b.factors[0], w)?;
    for f in &b.factors[1..] {
        c = c.concat(&factor_chain(f, w)?)?;
    }
    Ok(c)
}

/// The cycle `z(e)` of a critical cell of `P(n, W, k)`: singletons stay, and
/// each leader with its follower becomes the boundary of their merged block.
pub fn z_weighted(e: &PCell, weights: &Weights, k: u32) -> Result<Chain> {
    if !weights.is_nondecreasing() {
        return invalid("weights must be nondecreasing");
    }
    if e.n() != weights.n() || !is_critical_weighted(e, weights, k) {
        return invalid(format!("{e} is not a critical cell"));
    }
    let blocks: Vec<Vec<u32>> = e.blocks().iter().map(|b| b.iter().map(|&x| x as u32).collect()).collect();
    let flags = follower_flags(&blocks);
    let bs = e.blocks();
    let mut out: Option<Chain> = None;
    let mut i = 0;
    while i < bs.len() {
        let piece = if flags.get(i + 1) == Some(&true) {
            let mut merged = bs[i].clone();
            merged.extend_from_slice(&bs[i + 1]);
            merged.sort_unstable();
            i += 2;
            Chain::from_symbol(Symbol::new(&[merged]).unwrap()).boundary()
        } else {
            i += 1;
            Chain::from_symbol(Symbol::new(&[bs[i - 1].clone()]).unwrap())
        };
        out = Some(match out {
            None => piece,
            Some(c) => c.concat(&piece)?,
        });
    }
    Ok(out.unwrap())
}

/// Outcome of a basis verification.
#[derive(Clone, Debug, Default, Serialize)]
pub struct BasisReport {
    pub elements: usize,
    pub failures: Vec<String>,
}

impl BasisReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check_triangular(
    cycles: &[(Symbol, Chain)],
    cmp: impl Fn(&Symbol, &Symbol) -> Ordering,
    in_complex: impl Fn(&Symbol) -> bool,
    report: &mut BasisReport,
) {
    let mut seen = HashSet::new();
    for (e, z) in cycles {
        if !seen.insert(e.clone()) {
            report.failures.push(format!("{e}: critical cell used twice"));
        }
        if !z.boundary().is_zero() {
            report.failures.push(format!("{e}: not a cycle"));
            continue;
        }
        if let Some((s, _)) = z.iter().find(|(s, _)| !in_complex(s)) {
            report.failures.push(format!("{e}: supported on {s} outside the complex"));
        }
        match z.max_by(&cmp) {
            Some((top, k)) if top == e && k.abs().is_one() => {}
            Some((top, k)) => report.failures.push(format!("{e}: greatest cell is {top} with coefficient {k}")),
            None => report.failures.push(format!("{e}: zero cycle")),
        }
    }
    // pairing matrix: no critical cell above the diagonal
    let crit: Vec<&Symbol> = cycles.iter().map(|(e, _)| e).collect();
    for (e, z) in cycles {
        for f in &crit {
            if cmp(f, e) == Ordering::Greater && !z.coeff(f).is_zero() {
                report.failures.push(format!("{e}: pairs with the later critical cell {f}"));
            }
        }
    }
}

/// Check that the basic cycles of `cell(n, w)` are cycles whose greatest cells
/// are their critical cells with unit coefficients.
pub fn verify_basis(n: usize, w: u32) -> Result<BasisReport> {
    if n > 6 {
        return invalid("basis verification is limited to n <= 6");
    }
    let crit = critical_cells_strip(n, w)?;
    let cycles: Vec<(Symbol, Chain)> = crate::par::map(&crit, |e| {
        let b = BasisElement::from_critical_cell(e).expect("critical cell");
        (e.clone(), basic_cycle(&b, w))
    })
    .into_iter()
    .map(|(e, z)| z.map(|z| (e, z)))
    .collect::<Result<_>>()?;
    let mut report = BasisReport { elements: cycles.len(), failures: Vec::new() };
    for (e, _) in &cycles {
        let b = BasisElement::from_critical_cell(e)?;
        if &b.critical_cell() != e {
            report.failures.push(format!("{e}: element {b} does not return its cell"));
        }
    }
    check_triangular(&cycles, strip_cell_order, |s| s.max_block_len() <= w as usize, &mut report);
    Ok(report)
}

/// The same checks for the cycles `z(e)` of `P(n, W, k)`.
pub fn verify_weighted_basis(weights: &Weights, k: u32) -> Result<BasisReport> {
    if weights.n() > 6 {
        return invalid("basis verification is limited to n <= 6");
    }
    let crit = critical_cells_weighted(weights, k)?;
    let mut cycles = Vec::with_capacity(crit.len());
    for e in &crit {
        cycles.push((e.to_symbol(), z_weighted(e, weights, k)?));
    }
    let mut report = BasisReport { elements: cycles.len(), failures: Vec::new() };
    check_triangular(
        &cycles,
        |a, b| weighted_cell_order(&PCell::from_symbol(a), &PCell::from_symbol(b)),
        |s| s.is_sorted_rep() && s.blocks().all(|b| weights.of_block(b) <= k),
        &mut report,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wheel(v: &[Label]) -> Wheel {
        Wheel::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_wheel() {
        let c = wheel_chain(&wheel(&[2, 1]));
        let s21: Symbol = "2 1".parse().unwrap();
        let s12: Symbol = "1 2".parse().unwrap();
        assert_eq!(c, Chain::from_terms([(s21, BigInt::one()), (s12, BigInt::one())]));
    }

    #[test]
    fn wheels_are_cycles() {
        for k in 1..=7u8 {
            let labels: Vec<Label> = std::iter::once(k).chain(1..k).collect();
            let c = wheel_chain(&wheel(&labels));
            assert_eq!(c.len(), 1 << (k - 1));
            assert!(c.boundary().is_zero(), "k={k}");
            assert_eq!(c.coeff(&Symbol::new(&[labels]).unwrap()), BigInt::one());
        }
    }

    #[test]
    fn commutator_filter() {
        let f = Filter::new(vec![wheel(&[1]), wheel(&[2])]).unwrap();
        let c = filter_chain(&f, 1).unwrap();
        let a: Symbol = "2 | 1".parse().unwrap();
        let b: Symbol = "1 | 2".parse().unwrap();
        assert_eq!(c, Chain::from_terms([(a, BigInt::one()), (b, -BigInt::one())]));
    }
}
