//! Cell symbols of `cell(n)`: ordered blocks of ordered labels.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

pub type Label = u8;

/// Largest label a symbol may carry.
pub const MAX_LABEL: usize = 64;

/// A cell of `cell(n)`, stored as a flat label word plus block end offsets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    labels: Vec<Label>,
    ends: Vec<u8>,
}

impl Symbol {
    pub fn new<B: AsRef<[Label]>>(blocks: &[B]) -> Result<Self> {
        if blocks.is_empty() {
            return invalid("a symbol needs at least one block");
        }
        let mut labels = Vec::new();
        let mut ends = Vec::with_capacity(blocks.len());
        for b in blocks {
            let b = b.as_ref();
            if b.is_empty() {
                return invalid("empty block");
            }
            labels.extend_from_slice(b);
            ends.push(labels.len() as u8);
        }
        check_labels(&labels)?;
        Ok(Symbol { labels, ends })
    }

    /// Cut `word` into consecutive blocks of the given sizes.
    pub fn from_word(word: &[Label], sizes: &[usize]) -> Result<Self> {
        if sizes.iter().sum::<usize>() != word.len() || sizes.contains(&0) {
            return invalid("block sizes do not partition the word");
        }
        check_labels(word)?;
        let mut ends = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for &s in sizes {
            acc += s;
            ends.push(acc as u8);
        }
        Ok(Symbol { labels: word.to_vec(), ends })
    }

    pub(crate) fn from_raw(labels: Vec<Label>, ends: Vec<u8>) -> Self {
        debug_assert_eq!(*ends.last().unwrap() as usize, labels.len());
        Symbol { labels, ends }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.ends.len()
    }

    pub fn dim(&self) -> usize {
        self.labels.len() - self.ends.len()
    }

    pub fn word(&self) -> &[Label] {
        &self.labels
    }

    pub fn block(&self, i: usize) -> &[Label] {
        let start = if i == 0 { 0 } else { self.ends[i - 1] as usize };
        &self.labels[start..self.ends[i] as usize]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[Label]> + '_ {
        (0..self.ends.len()).map(move |i| self.block(i))
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks().map(|b| b.len()).collect()
    }

    pub fn max_block_len(&self) -> usize {
        self.blocks().map(|b| b.len()).max().unwrap_or(0)
    }

    /// Sorted list of the labels used.
    pub fn label_set(&self) -> Vec<Label> {
        let mut v = self.labels.clone();
        v.sort_unstable();
        v
    }

    /// True when every block is increasing, i.e. the symbol is the sorted
    /// representative of a cell of `P(n)`.
    pub fn is_sorted_rep(&self) -> bool {
        self.blocks().all(|b| b.windows(2).all(|w| w[0] < w[1]))
    }

    pub fn sorted_rep(&self) -> Symbol {
        let mut labels = self.labels.clone();
        let mut start = 0;
        for &e in &self.ends {
            labels[start..e as usize].sort_unstable();
            start = e as usize;
        }
        Symbol { labels, ends: self.ends.clone() }
    }

    pub fn relabel(&self, f: impl Fn(Label) -> Label) -> Symbol {
        Symbol { labels: self.labels.iter().map(|&x| f(x)).collect(), ends: self.ends.clone() }
    }

    pub fn concat(&self, other: &Symbol) -> Result<Symbol> {
        if self.labels.iter().any(|x| other.labels.contains(x)) {
            return invalid("concatenated symbols share a label");
        }
        let off = self.labels.len() as u8;
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut ends = self.ends.clone();
        ends.extend(other.ends.iter().map(|e| e + off));
        Ok(Symbol { labels, ends })
    }

    /// All codimension-one faces with their incidence signs.
    pub fn faces(&self) -> Vec<(Symbol, i32)> {
        let mut out = Vec::new();
        let mut prefix_parity = 0usize;
        for i in 0..self.num_blocks() {
            let g = self.block(i);
            let len = g.len();
            if len >= 2 {
                let start = if i == 0 { 0 } else { self.ends[i - 1] as usize };
                for mask in 1..(1u64 << len) - 1 {
                    let sign = split_sign(g, mask) * if prefix_parity % 2 == 1 { -1 } else { 1 };
                    let mut labels = Vec::with_capacity(self.labels.len());
                    labels.extend_from_slice(&self.labels[..start]);
                    let mut second = Vec::with_capacity(len);
                    for (pos, &x) in g.iter().enumerate() {
                        if mask >> pos & 1 == 1 {
                            labels.push(x);
                        } else {
                            second.push(x);
                        }
                    }
                    let cut = labels.len() as u8;
                    labels.extend_from_slice(&second);
                    labels.extend_from_slice(&self.labels[self.ends[i] as usize..]);
                    let mut ends = Vec::with_capacity(self.ends.len() + 1);
                    ends.extend_from_slice(&self.ends[..i]);
                    ends.push(cut);
                    ends.extend_from_slice(&self.ends[i..]);
                    out.push((Symbol { labels, ends }, sign));
                }
            }
            prefix_parity += len - 1;
        }
        out
    }

    /// Incidence sign of `face` in the boundary of `self`, or 0 when `face`
    /// is not a face.
    pub fn incidence(&self, face: &Symbol) -> i32 {
        if face.num_blocks() != self.num_blocks() + 1 || face.n() != self.n() {
            return 0;
        }
        let mut prefix_parity = 0usize;
        for i in 0..self.num_blocks() {
            let g = self.block(i);
            if face.block(i) != g {
                let (a, b) = (face.block(i), face.block(i + 1));
                if a.len() + b.len() != g.len() {
                    return 0;
                }
                for j in i + 1..self.num_blocks() {
                    if self.block(j) != face.block(j + 1) {
                        return 0;
                    }
                }
                let mut mask = 0u64;
                let (mut ia, mut ib) = (0, 0);
                for (pos, &x) in g.iter().enumerate() {
                    if ia < a.len() && a[ia] == x {
                        mask |= 1 << pos;
                        ia += 1;
                    } else if ib < b.len() && b[ib] == x {
                        ib += 1;
                    } else {
                        return 0;
                    }
                }
                let sign = split_sign(g, mask);
                return if prefix_parity % 2 == 1 { -sign } else { sign };
            }
            prefix_parity += g.len() - 1;
        }
        0
    }
}

fn check_labels(labels: &[Label]) -> Result<()> {
    let mut seen = [false; MAX_LABEL + 1];
    for &x in labels {
        if x == 0 || x as usize > MAX_LABEL {
            return invalid(format!("label {x} out of range 1..={MAX_LABEL}"));
        }
        if seen[x as usize] {
            return invalid(format!("label {x} repeated"));
        }
        seen[x as usize] = true;
    }
    Ok(())
}

/// Sign of splitting block `g` into the subsequence selected by `mask`
/// followed by the rest: `(-1)^|a| * sgn(g -> ab)`.
pub(crate) fn split_sign(g: &[Label], mask: u64) -> i32 {
    let mut inversions = 0u32;
    let mut outside = 0u32;
    let mut size_a = 0u32;
    for pos in 0..g.len() {
        if mask >> pos & 1 == 1 {
            inversions += outside;
            size_a += 1;
        } else {
            outside += 1;
        }
    }
    if (inversions + size_a).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut blocks = Vec::new();
        for part in s.split('|') {
            let mut b = Vec::new();
            for tok in part.split_whitespace() {
                let x: Label = tok.parse().map_err(|_| Error::Parse(format!("bad label `{tok}`")))?;
                b.push(x);
            }
            if b.is_empty() {
                return Err(Error::Parse(format!("empty block in `{s}`")));
            }
            blocks.push(b);
        }
        Symbol::new(&blocks)
    }
}

/// All riffle interleavings of `a` and `b`, ordered lexicographically by the
/// positions taken by `a`.
pub fn shuffles(a: &[Label], b: &[Label]) -> Result<Vec<Vec<Label>>> {
    if a.is_empty() || b.is_empty() {
        return invalid("shuffles need two nonempty blocks");
    }
    if a.iter().any(|x| b.contains(x)) {
        return invalid("shuffled blocks share a label");
    }
    Ok(shuffles_unchecked(a, b))
}

pub(crate) fn shuffles_unchecked(a: &[Label], b: &[Label]) -> Vec<Vec<Label>> {
    let total = a.len() + b.len();
    let mut out = Vec::new();
    let mut pos: Vec<usize> = (0..a.len()).collect();
    loop {
        let mut word = Vec::with_capacity(total);
        let (mut ia, mut ib) = (0, 0);
        for p in 0..total {
            if ia < a.len() && pos[ia] == p {
                word.push(a[ia]);
                ia += 1;
            } else {
                word.push(b[ib]);
                ib += 1;
            }
        }
        out.push(word);
        // next combination in lexicographic order
        let k = a.len();
        let mut i = k;
        while i > 0 && pos[i - 1] == total - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        pos[i - 1] += 1;
        for j in i..k {
            pos[j] = pos[j - 1] + 1;
        }
    }
    out
}

/// Wheels of a symbol: each block cut at its running maxima.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WheelDecomposition {
    pub wheels: Vec<Vec<Label>>,
    /// Index of the block each wheel came from.
    pub block_of: Vec<usize>,
}

impl WheelDecomposition {
    pub fn axles(&self) -> Vec<Label> {
        self.wheels.iter().map(|w| w[0]).collect()
    }
}

pub fn wheel_decompose(s: &Symbol) -> WheelDecomposition {
    let mut wheels = Vec::new();
    let mut block_of = Vec::new();
    for (i, b) in s.blocks().enumerate() {
        let mut max = 0;
        for &x in b {
            if x > max {
                max = x;
                wheels.push(vec![x]);
                block_of.push(i);
            } else {
                wheels.last_mut().unwrap().push(x);
            }
        }
    }
    WheelDecomposition { wheels, block_of }
}

/// Cut a single word at its running maxima.
pub fn wheels_of_word(word: &[Label]) -> Vec<Vec<Label>> {
    let mut wheels: Vec<Vec<Label>> = Vec::new();
    let mut max = 0;
    for &x in word {
        if x > max {
            max = x;
            wheels.push(vec![x]);
        } else {
            wheels.last_mut().unwrap().push(x);
        }
    }
    wheels
}

/// The layer permutation: all wheels in ascending order of axle.
pub fn layer_permutation(s: &Symbol) -> Vec<Label> {
    let mut wheels = wheel_decompose(s).wheels;
    wheels.sort_unstable_by_key(|w| w[0]);
    wheels.concat()
}

/// Lexicographically least word among all shuffles of the blocks of `s`,
/// found by exhaustive search.
pub fn least_shuffle(s: &Symbol) -> Vec<Label> {
    let mut words: Vec<Vec<Label>> = vec![s.block(0).to_vec()];
    for b in s.blocks().skip(1) {
        let mut next = Vec::new();
        for w in &words {
            next.extend(shuffles_unchecked(w, b));
        }
        next.sort_unstable();
        next.dedup();
        words = next;
    }
    words.into_iter().min().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Symbol {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        let s = sym("7 2 | 6 | 4 5 1 | 8 3");
        assert_eq!(s.to_string(), "7 2 | 6 | 4 5 1 | 8 3");
        assert_eq!(s.dim(), 4);
        assert!("1 | 1".parse::<Symbol>().is_err());
        assert!("1 | | 2".parse::<Symbol>().is_err());
    }

    #[test]
    fn shuffle_examples() {
        let all = shuffles(&[4, 6, 1], &[7, 3, 2]).unwrap();
        assert_eq!(all.len(), 20);
        assert!(all.contains(&vec![7, 4, 6, 3, 1, 2]));
        assert_eq!(shuffles(&[2], &[1]).unwrap(), vec![vec![2, 1], vec![1, 2]]);
        assert!(shuffles(&[1], &[]).is_err());
        assert!(shuffles(&[1, 2], &[2]).is_err());
    }

    #[test]
    fn incidence_matches_faces() {
        let s = sym("3 1 | 4 2 5");
        for (f, c) in s.faces() {
            assert_eq!(s.incidence(&f), c);
        }
        assert_eq!(s.incidence(&sym("3 | 1 | 4 2 | 5")), 0);
    }

    #[test]
    fn wheels_and_layer() {
        let s = sym("7 2 | 6 | 4 5 8 1 3");
        let d = wheel_decompose(&s);
        assert_eq!(d.wheels, vec![vec![7, 2], vec![6], vec![4], vec![5], vec![8, 1, 3]]);
        assert_eq!(layer_permutation(&s), vec![4, 5, 6, 7, 2, 8, 1, 3]);
        assert_eq!(least_shuffle(&s), layer_permutation(&s));
    }
}
