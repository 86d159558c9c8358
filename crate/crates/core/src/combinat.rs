//! Small combinatorial helpers.

use num_bigint::{BigInt, BigUint};
use num_traits::One;

/// Advance to the next permutation in lexicographic order; false at the end.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All permutations of `1..=n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut p: Vec<u8> = (1..=n as u8).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

/// Compositions of `n` into exactly `parts` parts, each at most `max_part`.
pub fn compositions(n: usize, parts: usize, max_part: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if left < parts || left > parts * max {
            return;
        }
        for p in 1..=max.min(left) {
            cur.push(p);
            rec(left - p, parts - 1, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, parts, max_part, &mut Vec::new(), &mut out);
    out
}

/// Number of compositions of `n` into `parts` parts of size at most `max`.
pub fn composition_count(n: usize, parts: usize, max: usize) -> u128 {
    let mut dp = vec![0u128; n + 1];
    dp[0] = 1;
    for _ in 0..parts {
        let mut next = vec![0u128; n + 1];
        for (t, &v) in dp.iter().enumerate() {
            if v == 0 {
                continue;
            }
            for p in 1..=max {
                if t + p > n {
                    break;
                }
                next[t + p] += v;
            }
        }
        dp = next;
    }
    dp[n]
}

/// Integer partitions of `n` in decreasing-part form.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=max.min(left)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

pub fn binomial_i(n: u64, k: u64) -> BigInt {
    BigInt::from(binomial(n, k))
}

pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n as u128 - i) / (i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(compositions(5, 3, 2).len() as u128, composition_count(5, 3, 2));
        assert_eq!(partitions(6).len(), 11);
        assert_eq!(binomial(12, 5), BigUint::from(792u32));
        assert_eq!(binomial_u128(30, 15), 155117520);
    }
}
