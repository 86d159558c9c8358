//! Closed forms for `beta_j(cell(n, w))` as integer combinations of
//! `C(n, a) b^(n-a)`, assembled from skyline shapes by labeled convolution.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinat::{binomial_i, factorial};
use crate::error::{invalid, Error, Result};

/// `coefficient * C(n, a) * b^(n-a)`; with `b = 0` it is the indicator of `n = a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthTerm {
    pub coefficient: BigInt,
    pub a: u32,
    pub b: u32,
}

impl GrowthTerm {
    pub fn new(coefficient: impl Into<BigInt>, a: u32, b: u32) -> Self {
        GrowthTerm { coefficient: coefficient.into(), a, b }
    }

    pub fn evaluate(&self, n: u32) -> BigInt {
        if n < self.a {
            return BigInt::zero();
        }
        &self.coefficient * binomial_i(n as u64, self.a as u64) * BigInt::from(self.b).pow(n - self.a)
    }
}

/// The closed form of the labeled convolution `sum_i C(n,i) f(i) g(n-i)`.
pub fn labeled_convolution(t1: &GrowthTerm, t2: &GrowthTerm) -> GrowthTerm {
    let a = t1.a + t2.a;
    GrowthTerm {
        coefficient: &t1.coefficient * &t2.coefficient * binomial_i(a as u64, t1.a as u64),
        a,
        b: t1.b + t2.b,
    }
}

/// `sum_i C(n,i) f(i) g(n-i)` computed term by term.
pub fn convolve_values(f: impl Fn(u32) -> BigInt, g: impl Fn(u32) -> BigInt, n: u32) -> BigInt {
    (0..=n).map(|i| binomial_i(n as u64, i as u64) * f(i) * g(n - i)).sum()
}

/// A canonical integer combination of growth terms, keyed by `(a, b)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrowthFormula {
    terms: BTreeMap<(u32, u32), BigInt>,
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    coefficient: String,
    a: u32,
    b: u32,
}

impl GrowthFormula {
    pub fn one() -> Self {
        GrowthFormula::term(GrowthTerm::new(1, 0, 0))
    }

    pub fn term(t: GrowthTerm) -> Self {
        let mut f = GrowthFormula::default();
        f.add_term(t);
        f
    }

    pub fn add_term(&mut self, t: GrowthTerm) {
        if t.coefficient.is_zero() {
            return;
        }
        let e = self.terms.entry((t.a, t.b)).or_default();
        *e += t.coefficient;
        if e.is_zero() {
            self.terms.remove(&(t.a, t.b));
        }
    }

    pub fn add(&mut self, other: &GrowthFormula) {
        for t in other.terms() {
            self.add_term(t);
        }
    }

    pub fn terms(&self) -> Vec<GrowthTerm> {
        self.terms.iter().map(|(&(a, b), c)| GrowthTerm { coefficient: c.clone(), a, b }).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn convolve(&self, other: &GrowthFormula) -> GrowthFormula {
        let mut out = GrowthFormula::default();
        for x in self.terms() {
            for y in other.terms() {
                out.add_term(labeled_convolution(&x, &y));
            }
        }
        out
    }

    pub fn evaluate(&self, n: u32) -> BigInt {
        self.terms().iter().map(|t| t.evaluate(n)).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.json_terms()).unwrap()
    }

    fn json_terms(&self) -> Vec<JsonTerm> {
        self.terms().into_iter().map(|t| JsonTerm { coefficient: t.coefficient.to_string(), a: t.a, b: t.b }).collect()
    }

    fn from_json_terms(v: Vec<JsonTerm>) -> Result<Self> {
        let mut f = GrowthFormula::default();
        for t in v {
            let c: BigInt = t.coefficient.parse().map_err(|_| Error::Parse(format!("bad coefficient `{}`", t.coefficient)))?;
            f.add_term(GrowthTerm { coefficient: c, a: t.a, b: t.b });
        }
        Ok(f)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Vec<JsonTerm> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        GrowthFormula::from_json_terms(v)
    }
}

impl fmt::Display for GrowthFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        // largest growth first
        for ((a, b), c) in self.terms.iter().rev() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let c = c.abs();
            let coeff = if c.is_one() { String::new() } else { format!("{c}*") };
            let body = match (b, a) {
                (0, _) => format!("[n={a}]"),
                (1, 0) => String::new(),
                (1, _) => format!("C(n,{a})"),
                (_, 0) => format!("{b}^n"),
                _ => format!("C(n,{a})*{b}^(n-{a})"),
            };
            if body.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{coeff}{body}")?;
            }
        }
        Ok(())
    }
}

/// A multiset of wheel sizes.
pub type SizeMultiset = BTreeMap<u32, u32>;

fn total_size(m: &SizeMultiset) -> u32 {
    m.iter().map(|(s, k)| s * k).sum()
}

fn wheel_part(m: &SizeMultiset) -> BigInt {
    m.iter().map(|(&s, &k)| BigInt::from(s).pow(k)).product()
}

fn fact_part(m: &SizeMultiset) -> BigInt {
    m.iter().map(|(_, &k)| BigInt::from(factorial(k as usize))).product()
}

/// Skyline of a tadpole: a descending run of free wheels of size at least 2,
/// a leader, and one follower block; the non-leader singletons are removed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TadpoleShape {
    pub leader: u32,
    pub free: SizeMultiset,
    pub follower: SizeMultiset,
}

impl TadpoleShape {
    pub fn disks(&self) -> u32 {
        self.leader + total_size(&self.free) + total_size(&self.follower)
    }

    pub fn degree(&self) -> u32 {
        let fr: u32 = self.free.iter().map(|(s, k)| (s - 1) * k).sum();
        let fo: u32 = self.follower.iter().map(|(s, k)| s * k).sum();
        fr + (self.leader - 1) + fo - 1
    }
}

/// Skyline of a tail: free wheels of size at least 2.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TailShape {
    pub wheels: SizeMultiset,
}

impl TailShape {
    pub fn disks(&self) -> u32 {
        total_size(&self.wheels)
    }

    pub fn degree(&self) -> u32 {
        self.wheels.iter().map(|(s, k)| (s - 1) * k).sum()
    }
}

/// A skyline up to relabeling: tadpoles from left to right, then a tail.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Skyline {
    pub tadpoles: Vec<TadpoleShape>,
    pub tail: TailShape,
}

impl Skyline {
    pub fn degree(&self) -> u32 {
        self.tadpoles.iter().map(TadpoleShape::degree).sum::<u32>() + self.tail.degree()
    }
}

// Multisets of sizes in lo..=hi with total cost at most max_cost.
fn multisets(lo: u32, hi: u32, max_cost: u32, cost: impl Fn(u32) -> u32 + Copy) -> Vec<(SizeMultiset, u32)> {
    fn rec(s: u32, hi: u32, left: u32, cost: &dyn Fn(u32) -> u32, cur: &mut SizeMultiset, out: &mut Vec<(SizeMultiset, u32)>, spent: u32) {
        if s > hi {
            out.push((cur.clone(), spent));
            return;
        }
        let c = cost(s);
        let mut k = 0;
        loop {
            if k > 0 {
                cur.insert(s, k);
            }
            rec(s + 1, hi, left - k * c, cost, cur, out, spent + k * c);
            cur.remove(&s);
            k += 1;
            if c == 0 || k * c > left {
                break;
            }
        }
    }
    let mut out = Vec::new();
    rec(lo, hi, max_cost, &cost, &mut SizeMultiset::new(), &mut out, 0);
    out
}

/// Tadpole skylines of degree `e` at width `w`.
pub fn tadpole_shapes(w: u32, e: u32) -> Vec<TadpoleShape> {
    let mut out = Vec::new();
    for leader in 1..=w {
        for (free, _) in multisets(leader.max(2), w, e, |s| s - 1) {
            for (follower, _) in multisets(leader, w, e + 1, |s| s) {
                if follower.is_empty() {
                    continue;
                }
                let t = TadpoleShape { leader, free: free.clone(), follower };
                let fsz = total_size(&t.follower);
                if t.degree() == e && fsz <= w && leader + fsz > w {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Tail skylines of degree `d` at width `w`.
pub fn tail_shapes(w: u32, d: u32) -> Vec<TailShape> {
    multisets(2, w, d, |s| s - 1).into_iter().filter(|(_, c)| *c == d).map(|(wheels, _)| TailShape { wheels }).collect()
}

/// All skylines of degree `j` at width `w`.
pub fn skylines(j: u32, w: u32) -> Vec<Skyline> {
    let mut out = Vec::new();
    fn rec(left: u32, w: u32, cur: &mut Vec<TadpoleShape>, out: &mut Vec<Skyline>) {
        for tail in tail_shapes(w, left) {
            out.push(Skyline { tadpoles: cur.clone(), tail });
        }
        for e in 1..=left {
            for t in tadpole_shapes(w, e) {
                cur.push(t);
                rec(left - e, w, cur, out);
                cur.pop();
            }
        }
    }
    rec(j, w, &mut Vec::new(), &mut out);
    out
}

/// Number of critical tails with this skyline on `n` disks.
pub fn tail_count(s: &TailShape) -> GrowthFormula {
    let k = s.disks();
    let c = BigInt::from(factorial(k as usize)) / (wheel_part(&s.wheels) * fact_part(&s.wheels));
    GrowthFormula::term(GrowthTerm::new(c, k, 1))
}

/// Number of tadpoles with this skyline on `n` disks.
pub fn tadpole_count(s: &TadpoleShape) -> Result<GrowthFormula> {
    let k = s.disks();
    if k < 2 || s.follower.is_empty() {
        return invalid("a tadpole has a leader and a nonempty follower");
    }
    let d = wheel_part(&s.free) * wheel_part(&s.follower) * fact_part(&s.free) * fact_part(&s.follower);
    if s.leader >= 2 {
        // no singletons may join: the count is an indicator
        let g = 1 + s.free.get(&s.leader).copied().unwrap_or(0) + s.follower.get(&s.leader).copied().unwrap_or(0);
        let den = d * BigInt::from(s.leader) * BigInt::from(g);
        let (q, r) = BigInt::from(factorial(k as usize)).div_rem(&den);
        debug_assert!(r.is_zero());
        return Ok(GrowthFormula::term(GrowthTerm::new(q, k, 0)));
    }
    // Singletons join the run; the count is a polynomial P of degree k-1.
    let g0 = 1 + s.follower.get(&1).copied().unwrap_or(0);
    let p = |n: u32| -> BigRational {
        let mut r = BigRational::one();
        for t in 0..k {
            if t != k - g0 {
                r *= BigRational::from_integer(BigInt::from(n as i64 - t as i64));
            }
        }
        r / BigRational::from_integer(d.clone())
    };
    let mut f = GrowthFormula::default();
    for a in 0..k {
        let mut c = BigRational::zero();
        for i in 0..=a {
            let term = BigRational::from_integer(binomial_i(a as u64, i as u64)) * p(i);
            if (a - i) % 2 == 0 {
                c += term;
            } else {
                c -= term;
            }
        }
        if !c.is_integer() {
            return Err(Error::InvalidInput(format!("non-integral difference for {s:?}")));
        }
        f.add_term(GrowthTerm::new(c.to_integer(), a, 1));
    }
    // below k disks there is no tadpole
    for t in 0..k {
        let v = f.evaluate(t);
        if !v.is_zero() {
            f.add_term(GrowthTerm::new(-v, t, 0));
        }
    }
    Ok(f)
}

/// Counting function of all critical cells with the given skyline.
pub fn skyline_count(s: &Skyline) -> Result<GrowthFormula> {
    let mut f = GrowthFormula::one();
    for t in &s.tadpoles {
        f = f.convolve(&tadpole_count(t)?);
    }
    Ok(f.convolve(&tail_count(&s.tail)))
}

/// Sum of the tadpole counting functions of degree `e`.
fn tadpoles_of_degree(w: u32, e: u32) -> Result<GrowthFormula> {
    let mut f = GrowthFormula::default();
    for t in tadpole_shapes(w, e) {
        f.add(&tadpole_count(&t)?);
    }
    Ok(f)
}

fn tails_of_degree(w: u32, d: u32) -> GrowthFormula {
    let mut f = GrowthFormula::default();
    for t in tail_shapes(w, d) {
        f.add(&tail_count(&t));
    }
    f
}

/// `beta_j(cell(n, w))` as a function of `n`.
pub fn betti_growth_formula(j: u32, w: u32) -> Result<GrowthFormula> {
    if w < 2 {
        return invalid("the growth formula needs w >= 2");
    }
    // g[d]: all tadpole sequences of total degree d
    let mut g: Vec<GrowthFormula> = vec![GrowthFormula::one()];
    let tads: Vec<GrowthFormula> = (0..=j).map(|e| if e == 0 { Ok(GrowthFormula::default()) } else { tadpoles_of_degree(w, e) }).collect::<Result<_>>()?;
    for d in 1..=j {
        let mut acc = GrowthFormula::default();
        for e in 1..=d {
            if !tads[e as usize].is_zero() {
                acc.add(&tads[e as usize].convolve(&g[(d - e) as usize]));
            }
        }
        g.push(acc);
    }
    let mut out = GrowthFormula::default();
    for d in 0..=j {
        out.add(&g[d as usize].convolve(&tails_of_degree(w, j - d)));
    }
    Ok(out)
}

/// The same formula summed skyline by skyline.
pub fn formula_from_skylines(j: u32, w: u32) -> Result<GrowthFormula> {
    let mut out = GrowthFormula::default();
    for s in skylines(j, w) {
        out.add(&skyline_count(&s)?);
    }
    Ok(out)
}

/// `(a, b)` of the fastest-growing term: the largest base `b`, then the
/// largest `a` among terms with that base.
pub fn dominant_term(f: &GrowthFormula) -> Option<(u32, u32)> {
    // indicator terms do not grow
    let b = f.terms().iter().filter(|t| t.b > 0).map(|t| t.b).max()?;
    let a = f.terms().iter().filter(|t| t.b == b).map(|t| t.a).max()?;
    Some((a, b))
}

/// Predicted dominant `(a, b)` for `j = q(w-1) + r`: `(qw + 2r, q + 1)`.
pub fn predicted_growth(j: u32, w: u32) -> (u32, u32) {
    let (q, r) = j.div_rem(&(w - 1));
    (q * w + 2 * r, q + 1)
}

/// Formulas cached by `(j, w)` in a JSON file.
#[derive(Default)]
pub struct FormulaCache {
    entries: HashMap<String, GrowthFormula>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    formulas: BTreeMap<String, Vec<JsonTerm>>,
}

impl FormulaCache {
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(FormulaCache::default());
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(e.to_string()))?;
        let file: CacheFile = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut entries = HashMap::new();
        for (k, v) in file.formulas {
            entries.insert(k, GrowthFormula::from_json_terms(v)?);
        }
        Ok(FormulaCache { entries })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = CacheFile { formulas: self.entries.iter().map(|(k, v)| (k.clone(), v.json_terms())).collect() };
        std::fs::write(path, serde_json::to_string_pretty(&file).unwrap()).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn get(&mut self, j: u32, w: u32) -> Result<GrowthFormula> {
        let key = format!("{j},{w}");
        if let Some(f) = self.entries.get(&key) {
            return Ok(f.clone());
        }
        let f = betti_growth_formula(j, w)?;
        self.entries.insert(key, f.clone());
        Ok(f)
    }
}

/// Evaluate at `n` as an `i128`, when it fits.
pub fn evaluate_small(f: &GrowthFormula, n: u32) -> Option<i128> {
    f.evaluate(n).to_i128()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_examples() {
        let t = labeled_convolution(&GrowthTerm::new(1, 0, 1), &GrowthTerm::new(1, 0, 1));
        assert_eq!(t, GrowthTerm::new(1, 0, 2));
        let t = labeled_convolution(&GrowthTerm::new(1, 2, 0), &GrowthTerm::new(1, 3, 0));
        assert_eq!(t, GrowthTerm::new(10, 5, 0));
        let t = labeled_convolution(&GrowthTerm::new(1, 2, 1), &GrowthTerm::new(1, 1, 1));
        assert_eq!(t, GrowthTerm::new(3, 3, 2));
    }

    #[test]
    fn singleton_tadpole_is_shifted_binomial() {
        let s = TadpoleShape { leader: 1, free: SizeMultiset::new(), follower: [(1, 2)].into_iter().collect() };
        let f = tadpole_count(&s).unwrap();
        for n in 0..15u32 {
            let want = if n == 0 { BigInt::zero() } else { binomial_i(n as u64 - 1, 2) };
            assert_eq!(f.evaluate(n), want, "n={n}");
        }
    }

    #[test]
    fn small_values() {
        let f = betti_growth_formula(1, 2).unwrap();
        assert_eq!(f.evaluate(3), BigInt::from(7));
        assert_eq!(f.evaluate(12), BigInt::from(114687));
        assert_eq!(betti_growth_formula(0, 3).unwrap().evaluate(7), BigInt::one());
    }

    #[test]
    fn skylines_agree_with_recursion() {
        for w in 2..=4 {
            for j in 0..=4 {
                assert_eq!(formula_from_skylines(j, w).unwrap(), betti_growth_formula(j, w).unwrap(), "j={j} w={w}");
                assert!(skylines(j, w).iter().all(|s| s.degree() == j));
            }
        }
    }
}
