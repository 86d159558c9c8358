//! Total orders on cells of `P(n)` and `cell(n)` that induce the discrete
//! gradients.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{invalid, Result};
use crate::symbol::{layer_permutation, wheel_decompose, Label, Symbol};

/// Positive weights of the labels `1..=n`, indexed by `label - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weights(pub Vec<u32>);

impl Weights {
    pub fn new(w: Vec<u32>) -> Result<Self> {
        if w.contains(&0) {
            return invalid("weights must be positive");
        }
        Ok(Weights(w))
    }

    pub fn unit(n: usize) -> Self {
        Weights(vec![1; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn of(&self, x: Label) -> u32 {
        self.0[x as usize - 1]
    }

    pub fn of_block(&self, b: &[Label]) -> u32 {
        b.iter().map(|&x| self.of(x)).sum()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }
}

/// A cell of `P(n)`: ordered blocks whose entries are unordered (kept sorted).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PCell {
    blocks: Vec<Vec<Label>>,
}

impl PCell {
    pub fn new(mut blocks: Vec<Vec<Label>>) -> Result<Self> {
        for b in &mut blocks {
            b.sort_unstable();
        }
        Symbol::new(&blocks)?;
        Ok(PCell { blocks })
    }

    pub fn from_symbol(s: &Symbol) -> Self {
        PCell {
            blocks: s
                .blocks()
                .map(|b| {
                    let mut v = b.to_vec();
                    v.sort_unstable();
                    v
                })
                .collect(),
        }
    }

    /// The sorted representative symbol.
    pub fn to_symbol(&self) -> Symbol {
        Symbol::new(&self.blocks).expect("valid pcell")
    }

    pub fn blocks(&self) -> &[Vec<Label>] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn dim(&self) -> usize {
        self.n() - self.blocks.len()
    }
}

impl fmt::Display for PCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_symbol().fmt(f)
    }
}

impl fmt::Debug for PCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({self})")
    }
}

/// Follower flags, walking left to right: a block follows a non-follower
/// singleton smaller than all of its entries.
pub fn follower_flags<B: AsRef<[u32]>>(blocks: &[B]) -> Vec<bool> {
    let mut flags = Vec::with_capacity(blocks.len());
    let mut leader: Option<u32> = None;
    for b in blocks {
        let b = b.as_ref();
        let min = *b.iter().min().expect("nonempty block");
        let follower = leader.is_some_and(|x| x < min);
        flags.push(follower);
        leader = if !follower && b.len() == 1 { Some(b[0]) } else { None };
    }
    flags
}

fn cmp_followers(a: &[u32], b: &[u32]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        x.sort_unstable();
        y.sort_unstable();
        x.cmp(&y)
    })
}

fn cmp_non_followers(a: &[u32], b: &[u32]) -> Ordering {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    x.sort_unstable_by(|p, q| q.cmp(p));
    y.sort_unstable_by(|p, q| q.cmp(p));
    for (p, q) in x.iter().zip(&y) {
        if p != q {
            return q.cmp(p);
        }
    }
    x.len().cmp(&y.len())
}

fn same_set(a: &[u32], b: &[u32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    x.sort_unstable();
    y.sort_unstable();
    x == y
}

/// The order on ordered set partitions of ranked elements (smaller rank
/// means smaller element).
pub fn p_order_cmp<B: AsRef<[u32]>>(f: &[B], g: &[B]) -> Ordering {
    let ff = follower_flags(f);
    let fg = follower_flags(g);
    for i in 0..f.len().min(g.len()) {
        let (a, b) = (f[i].as_ref(), g[i].as_ref());
        if same_set(a, b) {
            continue;
        }
        return match (ff[i], fg[i]) {
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (true, true) => cmp_followers(a, b),
            (false, false) => cmp_non_followers(a, b),
        };
    }
    f.len().cmp(&g.len())
}

fn as_ranks(c: &PCell) -> Vec<Vec<u32>> {
    c.blocks.iter().map(|b| b.iter().map(|&x| x as u32).collect()).collect()
}

/// Order on cells of `P(n)` for labels sorted by nondecreasing weight.
pub fn weighted_cell_order(f: &PCell, g: &PCell) -> Ordering {
    p_order_cmp(&as_ranks(f), &as_ranks(g))
}

/// Contract a symbol to blocks of wheel ranks; wheels are ranked by size,
/// then by axle. Also returns the rank-ordered wheels.
pub fn contract(s: &Symbol) -> (Vec<Vec<u32>>, Vec<Vec<Label>>) {
    let d = wheel_decompose(s);
    let mut order: Vec<usize> = (0..d.wheels.len()).collect();
    order.sort_unstable_by_key(|&i| (d.wheels[i].len(), d.wheels[i][0]));
    let mut rank = vec![0u32; d.wheels.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r as u32;
    }
    let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); s.num_blocks()];
    for (i, &b) in d.block_of.iter().enumerate() {
        blocks[b].push(rank[i]);
    }
    let ranked = order.iter().map(|&i| d.wheels[i].clone()).collect();
    (blocks, ranked)
}

/// Order on cells of `cell(n)`: by layer permutation, then by the contracted
/// cell under the wheel ranking.
pub fn strip_cell_order(f: &Symbol, g: &Symbol) -> Ordering {
    if f == g {
        return Ordering::Equal;
    }
    layer_permutation(f)
        .cmp(&layer_permutation(g))
        .then_with(|| p_order_cmp(&contract(f).0, &contract(g).0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_follower_alphabet() {
        let chain: Vec<Vec<u32>> = vec![vec![3], vec![3, 2], vec![3, 2, 1], vec![3, 1], vec![2], vec![2, 1], vec![1]];
        for w in chain.windows(2) {
            assert_eq!(cmp_non_followers(&w[0], &w[1]), Ordering::Less, "{:?}", w);
        }
    }

    #[test]
    fn followers_flagged_left_to_right() {
        let f: Vec<Vec<u32>> = vec![vec![2], vec![3], vec![4], vec![1], vec![5, 6]];
        assert_eq!(follower_flags(&f), vec![false, true, false, false, true]);
    }
}
