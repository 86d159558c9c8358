//! Barcodes of `H_*(cell(n, w))` as the width `w` grows.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::basis::BasisElement;
use crate::combinat::{binomial, factorial, partitions};
use crate::error::{invalid, Error, Result};
use crate::morse::{critical_cells_any_width, ENUMERATION_MAX_N};

/// An interval `[birth, death)` of widths in one degree; `None` is infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bar {
    pub degree: usize,
    pub birth: u32,
    pub death: Option<u32>,
}

impl Bar {
    pub fn new(degree: usize, birth: u32, death: Option<u32>) -> Self {
        Bar { degree, birth, death }
    }

    pub fn alive_at(&self, w: u32) -> bool {
        self.birth <= w && self.death.is_none_or(|d| w < d)
    }

    pub fn is_finite(&self) -> bool {
        self.death.is_some()
    }

    fn key(&self) -> (usize, u32, u64) {
        (self.degree, self.birth, self.death.map_or(u64::MAX, u64::from))
    }
}

impl PartialOrd for Bar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// The bar of a basis element.
pub fn bar_of(b: &BasisElement) -> Bar {
    b.bar()
}

/// A multiset of bars.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Barcode {
    bars: BTreeMap<Bar, BigUint>,
}

#[derive(Serialize, Deserialize)]
struct JsonBar {
    degree: usize,
    birth: u32,
    death: Option<u32>,
    multiplicity: String,
}

impl Barcode {
    pub fn add(&mut self, bar: Bar, mult: BigUint) {
        if mult.is_zero() {
            return;
        }
        *self.bars.entry(bar).or_default() += mult;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bar, &BigUint)> {
        self.bars.iter()
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn multiplicity(&self, degree: usize, birth: u32, death: Option<u32>) -> BigUint {
        self.bars.get(&Bar::new(degree, birth, death)).cloned().unwrap_or_default()
    }

    /// The bars of one degree as `(birth, death) -> multiplicity`.
    pub fn degree(&self, j: usize) -> BTreeMap<(u32, Option<u32>), BigUint> {
        self.bars.iter().filter(|(b, _)| b.degree == j).map(|(b, m)| ((b.birth, b.death), m.clone())).collect()
    }

    pub fn restrict_degrees(&self, lo: usize, hi: usize) -> Barcode {
        Barcode { bars: self.bars.iter().filter(|(b, _)| (lo..=hi).contains(&b.degree)).map(|(b, m)| (*b, m.clone())).collect() }
    }

    /// Number of bars of degree `j` alive at width `w`.
    pub fn betti_at(&self, w: u32, j: usize) -> BigUint {
        self.bars.iter().filter(|(b, _)| b.degree == j && b.alive_at(w)).map(|(_, m)| m).sum()
    }

    pub fn to_json(&self) -> String {
        let v: Vec<JsonBar> = self
            .bars
            .iter()
            .map(|(b, m)| JsonBar { degree: b.degree, birth: b.birth, death: b.death, multiplicity: m.to_string() })
            .collect();
        serde_json::to_string_pretty(&v).unwrap()
    }

    pub fn from_json(text: &str) -> Result<Barcode> {
        let v: Vec<JsonBar> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut out = Barcode::default();
        for b in v {
            let m: BigUint = b.multiplicity.parse().map_err(|_| Error::Parse(format!("bad multiplicity `{}`", b.multiplicity)))?;
            out.add(Bar::new(b.degree, b.birth, b.death), m);
        }
        Ok(out)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("degree,birth,death,multiplicity\n");
        for (b, m) in &self.bars {
            let d = b.death.map_or("inf".to_string(), |d| d.to_string());
            let _ = writeln!(s, "{},{},{},{}", b.degree, b.birth, d, m);
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut last = None;
        for (b, m) in &self.bars {
            if last != Some(b.degree) {
                let _ = writeln!(s, "H_{}", b.degree);
                last = Some(b.degree);
            }
            let d = b.death.map_or("inf".to_string(), |d| d.to_string());
            let _ = writeln!(s, "  [{}, {})  x{}", b.birth, d, m);
        }
        s
    }

    /// Bars drawn against the width axis, thickness growing with the
    /// logarithm of the multiplicity, exact counts in a right-hand column.
    pub fn to_svg(&self, n: usize) -> String {
        let unit = 40.0;
        let left = 60.0;
        let right_col = 140.0;
        let axis_max = n as f64 + 1.0;
        let width = left + unit * axis_max + right_col;
        let x = |w: f64| left + unit * (w - 1.0);
        let mut rows = Vec::new();
        let mut y = 30.0;
        let mut last = None;
        for (b, m) in &self.bars {
            if last != Some(b.degree) {
                y += 14.0;
                rows.push(format!(
                    r#"<text x="8" y="{:.1}" font-family="sans-serif" font-size="13">H{}</text>"#,
                    y + 4.0,
                    b.degree
                ));
                last = Some(b.degree);
            }
            let ln = m.to_f64().unwrap_or(f64::MAX).ln().max(0.0);
            let thick = 1.5 + ln * 0.6;
            let end = b.death.map_or(axis_max, |d| d as f64);
            rows.push(format!(
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#1f4e9c" stroke-width="{thick:.2}"/>"##,
                x(b.birth as f64),
                x(end)
            ));
            if b.death.is_none() {
                rows.push(format!(
                    r##"<polygon points="{:.1},{:.1} {:.1},{y:.1} {:.1},{:.1}" fill="#1f4e9c"/>"##,
                    x(end),
                    y - 5.0,
                    x(end) + 8.0,
                    x(end),
                    y + 5.0
                ));
            }
            rows.push(format!(
                r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="11">x{m}</text>"#,
                width - right_col + 16.0,
                y + 4.0
            ));
            y += thick.max(8.0) + 8.0;
        }
        let height = y + 40.0;
        let mut s = format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
        );
        s.push('\n');
        let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
        let axis_y = height - 28.0;
        let _ = writeln!(s, r##"<line x1="{:.1}" y1="{axis_y:.1}" x2="{:.1}" y2="{axis_y:.1}" stroke="#444"/>"##, x(1.0), x(axis_max));
        for w in 1..=n + 1 {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{w}</text>"#,
                x(w as f64),
                axis_y + 16.0
            );
        }
        for r in rows {
            s.push_str(&r);
            s.push('\n');
        }
        s.push_str("</svg>\n");
        s
    }
}

/// How a barcode is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// List every basis element.
    Enumerate,
    /// Count basis elements per shape class.
    Count,
}

// (degree, birth, death) of a contracted structure; death u32::MAX is infinity.
type Stats = (u32, u32, u32);
const INF: u32 = u32::MAX;

struct ShapeCounter {
    memo: HashMap<Vec<(u32, u32)>, Vec<(Stats, BigUint)>>,
}

fn odometer(limits: &[u32], mut f: impl FnMut(&[u32])) {
    let mut cur = vec![0u32; limits.len()];
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == limits.len() {
                return;
            }
            if cur[i] < limits[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

impl ShapeCounter {
    // Structures on ranked wheels with `counts[i]` wheels of size `sizes[i]`
    // (sizes ascending): a sequence of tadpoles, each a descending run of free
    // wheels ending in its leader followed by one follower block, then a
    // descending tail of free wheels.
    fn count(&mut self, classes: &[(u32, u32)]) -> Vec<(Stats, BigUint)> {
        let key: Vec<(u32, u32)> = classes.iter().copied().filter(|c| c.1 > 0).collect();
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out: HashMap<Stats, BigUint> = HashMap::new();
        if key.is_empty() {
            out.insert((0, 0, INF), BigUint::one());
        } else {
            let sizes: Vec<u32> = key.iter().map(|c| c.0).collect();
            let counts: Vec<u32> = key.iter().map(|c| c.1).collect();
            *out.entry((0, *sizes.last().unwrap(), INF)).or_default() += 1u32;
            let mut jobs: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
            odometer(&counts, |t| {
                if t.iter().sum::<u32>() >= 2 {
                    jobs.push((t.to_vec(), Vec::new()));
                }
            });
            for (t, _) in jobs {
                let ways_t: BigUint = counts.iter().zip(&t).map(|(&c, &x)| binomial(c as u64, x as u64)).product();
                let s0 = t.iter().position(|&x| x > 0).unwrap();
                let mut avail = t.clone();
                avail[s0] -= 1;
                let rest: Vec<(u32, u32)> = key.iter().zip(&t).map(|(&(s, c), &x)| (s, c - x)).collect();
                let sub = self.count(&rest);
                odometer(&avail, |b| {
                    let nb: u32 = b.iter().sum();
                    if nb == 0 {
                        return;
                    }
                    let ways_b: BigUint = avail.iter().zip(b).map(|(&a, &x)| binomial(a as u64, x as u64)).product();
                    let w_b: u32 = sizes.iter().zip(b).map(|(s, x)| s * x).sum();
                    let run_max = (0..t.len()).filter(|&i| t[i] > b[i]).map(|i| sizes[i]).max().unwrap();
                    let birth = run_max.max(w_b);
                    let death = sizes[s0] + w_b;
                    let deg = nb - 1;
                    let ways = &ways_t * &ways_b;
                    for ((d2, b2, e2), m) in &sub {
                        *out.entry((deg + d2, birth.max(*b2), death.min(*e2))).or_default() += &ways * m;
                    }
                });
            }
        }
        let mut v: Vec<(Stats, BigUint)> = out.into_iter().collect();
        v.sort();
        self.memo.insert(key, v.clone());
        v
    }
}

/// Full barcode of `cell(n, *)` by counting shape classes: for each cycle
/// type of wheel sizes, the number of labelings times the number of
/// structures on the ranked wheels with each (degree, birth, death).
pub fn count_barcode(n: usize) -> Barcode {
    let mut counter = ShapeCounter { memo: HashMap::new() };
    let mut out = Barcode::default();
    let nf = factorial(n);
    for lam in partitions(n) {
        let mut classes: BTreeMap<u32, u32> = BTreeMap::new();
        for &s in &lam {
            *classes.entry(s as u32).or_default() += 1;
        }
        let z: BigUint = classes.iter().map(|(&s, &m)| BigUint::from(s).pow(m) * factorial(m as usize)).product();
        let labelings = &nf / z;
        let cls: Vec<(u32, u32)> = classes.into_iter().collect();
        let m = lam.len();
        for ((d, b, e), mult) in counter.count(&cls) {
            if b < e {
                let death = (e != INF).then_some(e);
                out.add(Bar::new(n - m + d as usize, b, death), &labelings * mult);
            }
        }
    }
    out
}

/// Barcode by listing every basis element.
pub fn enumerate_barcode(n: usize) -> Result<Barcode> {
    if n > ENUMERATION_MAX_N {
        return invalid(format!("enumeration is limited to n <= {ENUMERATION_MAX_N}; use counting"));
    }
    let cells = critical_cells_any_width(n)?;
    let bars = crate::par::map(&cells, |s| BasisElement::from_critical_cell(s).map(|b| b.bar()));
    let mut out = Barcode::default();
    for b in bars {
        let b = b?;
        if b.death.is_none_or(|d| b.birth < d) {
            out.add(b, BigUint::one());
        }
    }
    Ok(out)
}

/// Barcode of `cell(n, *)` restricted to the given degrees.
pub fn barcode(n: usize, degrees: RangeInclusive<usize>, mode: Mode) -> Result<Barcode> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let full = match mode {
        Mode::Count => count_barcode(n),
        Mode::Enumerate => enumerate_barcode(n)?,
    };
    Ok(full.restrict_degrees(*degrees.start(), *degrees.end()))
}

/// `beta_j(cell(n, w))` read off the barcode.
pub fn betti_at(w: u32, j: usize, barcode: &Barcode) -> BigUint {
    barcode.betti_at(w, j)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BarlengthReport {
    /// Finite bars dying after twice their birth.
    pub long_bars: Vec<Bar>,
    /// Finite bars born at `w` in a degree `j < w - 1`.
    pub unstable_bars: Vec<Bar>,
}

impl BarlengthReport {
    pub fn passed(&self) -> bool {
        self.long_bars.is_empty() && self.unstable_bars.is_empty()
    }
}

/// Every finite bar dies by twice its birth, and no finite bar is born in the
/// stable range.
pub fn check_barlength(barcode: &Barcode) -> BarlengthReport {
    let mut r = BarlengthReport::default();
    for (b, _) in barcode.iter() {
        if let Some(d) = b.death {
            if d > 2 * b.birth {
                r.long_bars.push(*b);
            }
            if (b.degree as u32) + 1 < b.birth {
                r.unstable_bars.push(*b);
            }
        }
    }
    r
}

/// Fraction of the degree `j` bars alive at `w` that are still alive at
/// `w + 1`; 1 when none are alive.
pub fn persisting_fraction(n: usize, w: u32, j: usize) -> BigRational {
    fraction_from(&count_barcode(n), w, j)
}

pub fn fraction_from(barcode: &Barcode, w: u32, j: usize) -> BigRational {
    let alive = barcode.betti_at(w, j);
    if alive.is_zero() {
        return BigRational::one();
    }
    let stay: BigUint = barcode.iter().filter(|(b, _)| b.degree == j && b.alive_at(w) && b.alive_at(w + 1)).map(|(_, m)| m).sum();
    BigRational::new(BigInt::from(stay), BigInt::from(alive))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bar_order_puts_infinity_last() {
        let a = Bar::new(1, 2, Some(3));
        let b = Bar::new(1, 2, None);
        assert!(a < b);
        assert!(Bar::new(0, 9, None) < Bar::new(1, 1, Some(2)));
    }

    #[test]
    fn small_barcodes() {
        let b = count_barcode(2);
        assert_eq!(b.multiplicity(0, 1, Some(2)), BigUint::one());
        assert_eq!(b.multiplicity(0, 1, None), BigUint::one());
        assert_eq!(b.multiplicity(1, 2, None), BigUint::one());
        assert_eq!(b.len(), 3);
        let b = count_barcode(3);
        assert_eq!(b.multiplicity(1, 2, Some(3)), BigUint::from(4u32));
        assert_eq!(b.multiplicity(1, 2, None), BigUint::from(3u32));
    }

    #[test]
    fn json_round_trip() {
        let b = count_barcode(4);
        assert_eq!(Barcode::from_json(&b.to_json()).unwrap(), b);
    }

    #[test]
    fn long_bar_is_flagged() {
        let mut b = Barcode::default();
        assert!(check_barlength(&b).passed());
        b.add(Bar::new(3, 2, Some(5)), BigUint::one());
        assert_eq!(check_barlength(&b).long_bars, vec![Bar::new(3, 2, Some(5))]);
    }
}
