//! The unordered complex `ucel(n, w)`: cells are compositions of `n`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::combinat::{binomial_i, compositions};
use crate::error::{invalid, Result};

/// A cell of `ucel(n, w)`: the ordered block sizes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UCell(pub Vec<u32>);

impl UCell {
    pub fn n(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn dim(&self) -> usize {
        (self.n() as usize) - self.0.len()
    }

    pub fn boundary(&self) -> Vec<(UCell, BigInt)> {
        let mut out = Vec::new();
        let mut prefix = 0u32;
        for (i, &s) in self.0.iter().enumerate() {
            for k in 1..s {
                let c = ucel_boundary_coefficient(s, k);
                if c.is_zero() {
                    continue;
                }
                let c = if prefix % 2 == 1 { -c } else { c };
                let mut parts = self.0[..i].to_vec();
                parts.push(k);
                parts.push(s - k);
                parts.extend_from_slice(&self.0[i + 1..]);
                out.push((UCell(parts), c));
            }
            prefix += s - 1;
        }
        out
    }
}

impl fmt::Display for UCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| format!("o^{k}")).collect();
        f.write_str(&parts.join(" | "))
    }
}

impl fmt::Debug for UCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Coefficient of `o^k | o^(n-k)` in the boundary of `o^n`.
pub fn ucel_boundary_coefficient(n: u32, k: u32) -> BigInt {
    assert!(k >= 1 && k < n, "face index out of range");
    let (h, kk) = ((n / 2) as u64, (k / 2) as u64);
    match (n % 2, k % 2) {
        (0, 1) => BigInt::zero(),
        (0, 0) | (1, 0) => binomial_i(h, kk),
        _ => -binomial_i(h, kk),
    }
}

/// Whether `s` has the form `2 p^k` (for `p = 0`, only `s = 2`).
pub fn is_two_p_power(s: u32, p: u32) -> bool {
    if !s.is_multiple_of(2) || s == 0 {
        return false;
    }
    let mut h = s / 2;
    if p == 0 {
        return h == 1;
    }
    while h.is_multiple_of(p) {
        h /= p;
    }
    h == 1
}

/// Leader-follower pair shapes in characteristic `p`.
pub fn is_pair(leader: u32, follower: u32, p: u32) -> bool {
    if leader == 1 {
        return follower >= 2 && follower.is_multiple_of(2);
    }
    if !is_two_p_power(leader, p) || !follower.is_multiple_of(leader) {
        return false;
    }
    let a = follower / leader + 1;
    a >= 2 && (p == 0 || !a.is_multiple_of(p) || is_cycle_pair(leader, follower, p))
}

/// Pairs `o^(2p^k) | o^(2p^k (p-1))` for odd `p`. The merged block `o^(2p^(k+1))`
/// has every boundary coefficient divisible by `p`, so it never cancels the pair,
/// and `d(o^(2p^(k+1))) / p` is a cycle with this pair as its least face.
pub fn is_cycle_pair(leader: u32, follower: u32, p: u32) -> bool {
    p > 2 && leader != 1 && is_two_p_power(leader, p) && follower == leader * (p - 1)
}

/// Whether a pair counts as critical in `ucel(n, w)`.
pub fn pair_is_critical(leader: u32, follower: u32, w: u32, p: u32) -> bool {
    leader + follower > w || is_cycle_pair(leader, follower, p)
}

/// Greedy left-to-right pair assignment: `Some(true)` marks a leader,
/// `Some(false)` a follower, `None` an unpaired block.
pub fn pair_roles(c: &UCell, p: u32) -> Vec<Option<bool>> {
    let parts = &c.0;
    let mut roles = vec![None; parts.len()];
    let mut i = 0;
    while i < parts.len() {
        if i + 1 < parts.len() && is_pair(parts[i], parts[i + 1], p) {
            roles[i] = Some(true);
            roles[i + 1] = Some(false);
            i += 2;
        } else {
            i += 1;
        }
    }
    roles
}

pub fn is_critical_unordered(c: &UCell, w: u32, p: u32) -> bool {
    if c.0.iter().any(|&s| s > w || s == 0) {
        return false;
    }
    let roles = pair_roles(c, p);
    for (i, &s) in c.0.iter().enumerate() {
        match roles[i] {
            Some(true) => {
                if !pair_is_critical(s, c.0[i + 1], w, p) {
                    return false;
                }
            }
            Some(false) => {}
            None => {
                if s != 1 && !is_two_p_power(s, p) {
                    return false;
                }
            }
        }
    }
    true
}

/// The lexicographically least face of `o^n` whose coefficient is a unit in
/// characteristic `p`.
pub fn least_unit_face(n: u32, p: u32) -> Result<UCell> {
    if n < 2 {
        return invalid("o^1 has no faces");
    }
    if n % 2 == 1 {
        return Ok(UCell(vec![1, n - 1]));
    }
    let step = if p == 0 {
        2
    } else {
        let mut s = 2;
        while (n / s).is_multiple_of(p) {
            s *= p;
        }
        s
    };
    if step == n {
        return invalid(format!("o^{n} is a cycle in characteristic {p}"));
    }
    Ok(UCell(vec![step, n - step]))
}

/// All critical cells of `ucel(n, w)` in characteristic `p`.
pub fn critical_cells_unordered(n: u32, w: u32, p: u32) -> Vec<UCell> {
    let mut out = Vec::new();
    for parts in 1..=n as usize {
        for comp in compositions(n as usize, parts, w as usize) {
            let c = UCell(comp.into_iter().map(|x| x as u32).collect());
            if is_critical_unordered(&c, w, p) {
                out.push(c);
            }
        }
    }
    out.sort();
    out
}

/// Per-degree counts of critical cells, computed without listing them.
pub fn betti_unordered(n: u32, w: u32, p: u32) -> Vec<u128> {
    let mut memo = HashMap::new();
    let v = count_from(n, None, w, p, &mut memo);
    let mut out = vec![0u128; n.max(1) as usize];
    for (d, c) in v.into_iter().enumerate() {
        if d < out.len() {
            out[d] = c;
        }
    }
    out
}

// Counts of critical tails on `left` disks, by degree; `prev` is the size of
// the immediately preceding unpaired block, which must not pair with the
// next block.
fn count_from(left: u32, prev: Option<u32>, w: u32, p: u32, memo: &mut HashMap<(u32, Option<u32>), Vec<u128>>) -> Vec<u128> {
    if left == 0 {
        return vec![1];
    }
    if let Some(v) = memo.get(&(left, prev)) {
        return v.clone();
    }
    let mut acc: Vec<u128> = Vec::new();
    let add = |acc: &mut Vec<u128>, shift: usize, v: &[u128]| {
        if acc.len() < v.len() + shift {
            acc.resize(v.len() + shift, 0);
        }
        for (d, c) in v.iter().enumerate() {
            acc[d + shift] += c;
        }
    };
    for first in 1..=w.min(left) {
        if prev.is_some_and(|s| is_pair(s, first, p)) {
            continue;
        }
        // `first` leads a pair
        for second in 1..=w.min(left - first) {
            if is_pair(first, second, p) && pair_is_critical(first, second, w, p) {
                let v = count_from(left - first - second, None, w, p, memo);
                add(&mut acc, (first + second - 2) as usize, &v);
            }
        }
        // `first` stays unpaired
        if first == 1 || is_two_p_power(first, p) {
            let v = count_from(left - first, Some(first), w, p, memo);
            add(&mut acc, (first - 1) as usize, &v);
        }
    }
    memo.insert((left, prev), acc.clone());
    acc
}

/// Growth of a Betti sequence in `n`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub j: usize,
    pub w: u32,
    pub p: u32,
    pub q: usize,
    pub values: Vec<u128>,
    /// Smallest `n` from which the sequence is constant (within the range).
    pub constant_from: Option<u32>,
    /// Order of the first finite difference that vanishes on the final
    /// stretch of the range.
    pub vanishing_difference: Option<usize>,
}

pub fn growth_check_unordered(j: usize, w: u32, p: u32, n_max: u32) -> GrowthReport {
    let values: Vec<u128> = (1..=n_max).map(|n| betti_unordered(n, w, p).get(j).copied().unwrap_or(0)).collect();
    let q = if w >= 2 { j / (w as usize - 1) } else { 0 };
    let mut constant_from = None;
    for start in (0..values.len()).rev() {
        if values[start..].iter().all(|&v| v == values[values.len() - 1]) {
            constant_from = Some(start as u32 + 1);
        } else {
            break;
        }
    }
    let tail: Vec<i128> = values.iter().skip(values.len() / 2).map(|&v| v as i128).collect();
    let mut diff = tail;
    let mut vanishing = None;
    for order in 0..=q + 2 {
        if !diff.is_empty() && diff.iter().all(|&d| d == 0) {
            vanishing = Some(order);
            break;
        }
        diff = diff.windows(2).map(|x| x[1] - x[0]).collect();
    }
    GrowthReport { j, w, p, q, values, constant_from, vanishing_difference: vanishing }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        assert_eq!(ucel_boundary_coefficient(4, 2), BigInt::from(2));
        assert_eq!(ucel_boundary_coefficient(4, 1), BigInt::from(0));
        assert_eq!(ucel_boundary_coefficient(5, 1), BigInt::from(-1));
        assert_eq!(ucel_boundary_coefficient(3, 1), BigInt::from(-1));
        assert_eq!(ucel_boundary_coefficient(3, 2), BigInt::from(1));
    }

    #[test]
    fn least_faces() {
        assert_eq!(least_unit_face(5, 2).unwrap(), UCell(vec![1, 4]));
        assert_eq!(least_unit_face(12, 3).unwrap(), UCell(vec![6, 6]));
        assert_eq!(least_unit_face(6, 2).unwrap(), UCell(vec![2, 4]));
        assert!(least_unit_face(1, 2).is_err());
    }

    #[test]
    fn counting_matches_listing() {
        for p in [0, 2, 3, 5] {
            for w in 1..=5 {
                for n in 1..=10 {
                    let mut by_dim = vec![0u128; n as usize];
                    for c in critical_cells_unordered(n, w, p) {
                        by_dim[c.dim()] += 1;
                    }
                    assert_eq!(betti_unordered(n, w, p), by_dim, "n={n} w={w} p={p}");
                }
            }
        }
    }

    #[test]
    fn pair_shapes() {
        assert!(!is_pair(1, 3, 3));
        assert!(is_pair(1, 2, 3));
        assert!(is_pair(6, 6, 3));
        assert!(is_pair(6, 12, 3) && is_cycle_pair(6, 12, 3));
        assert!(!is_pair(6, 30, 3));
        assert!(is_pair(2, 6, 0));
    }
}
