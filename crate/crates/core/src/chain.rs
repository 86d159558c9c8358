//! Integral chains on `cell(n)` and the concatenation product.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::symbol::{Label, Symbol};

#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Chain {
    terms: BTreeMap<Symbol, BigInt>,
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    symbol: String,
    coeff: String,
}

impl Chain {
    pub fn zero() -> Self {
        Chain::default()
    }

    pub fn from_symbol(s: Symbol) -> Self {
        let mut c = Chain::zero();
        c.terms.insert(s, BigInt::one());
        c
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Symbol, BigInt)>) -> Self {
        let mut c = Chain::zero();
        for (s, k) in terms {
            c.add_term(s, k);
        }
        c
    }

    pub fn add_term(&mut self, s: Symbol, k: BigInt) {
        if k.is_zero() {
            return;
        }
        match self.terms.entry(s) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(k);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += k;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &Symbol) -> BigInt {
        self.terms.get(s).cloned().unwrap_or_default()
    }

    /// Common dimension of the support; `None` for the zero chain or a
    /// chain mixing dimensions.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys();
        let d = it.next()?.dim();
        it.all(|s| s.dim() == d).then_some(d)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.terms.keys().next().map(|s| s.label_set()).unwrap_or_default()
    }

    pub fn scale(&self, k: &BigInt) -> Chain {
        if k.is_zero() {
            return Chain::zero();
        }
        Chain { terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect() }
    }

    pub fn boundary(&self) -> Chain {
        let mut out = Chain::zero();
        for (s, c) in &self.terms {
            for (f, sign) in s.faces() {
                out.add_term(f, if sign > 0 { c.clone() } else { -c });
            }
        }
        out
    }

    /// Concatenation product; the right factor is appended blockwise.
    pub fn concat(&self, other: &Chain) -> Result<Chain> {
        let (la, lb) = (self.labels(), other.labels());
        if la.iter().any(|x| lb.binary_search(x).is_ok()) {
            return invalid("concatenated chains share a label");
        }
        let mut out = Chain::zero();
        for (s, c) in &self.terms {
            for (t, d) in &other.terms {
                out.add_term(s.concat(t)?, c * d);
            }
        }
        Ok(out)
    }

    pub fn relabel(&self, f: impl Fn(Label) -> Label + Copy) -> Chain {
        Chain { terms: self.terms.iter().map(|(s, c)| (s.relabel(f), c.clone())).collect() }
    }

    /// Greatest supported cell under `cmp`, with its coefficient.
    pub fn max_by(&self, mut cmp: impl FnMut(&Symbol, &Symbol) -> Ordering) -> Option<(&Symbol, &BigInt)> {
        let mut best: Option<(&Symbol, &BigInt)> = None;
        for (s, c) in &self.terms {
            match best {
                Some((b, _)) if cmp(s, b) != Ordering::Greater => {}
                _ => best = Some((s, c)),
            }
        }
        best
    }

    pub fn is_unimodular_at(&self, s: &Symbol) -> bool {
        self.terms.get(s).is_some_and(|c| c.abs().is_one())
    }

    pub fn to_json(&self) -> String {
        let v: Vec<JsonTerm> = self
            .terms
            .iter()
            .map(|(s, c)| JsonTerm { symbol: s.to_string(), coeff: c.to_string() })
            .collect();
        serde_json::to_string(&v).expect("chain serialization")
    }

    pub fn from_json(text: &str) -> Result<Chain> {
        let v: Vec<JsonTerm> =
            serde_json::from_str(text).map_err(|e| crate::Error::Parse(e.to_string()))?;
        let mut out = Chain::zero();
        for t in v {
            let k: BigInt = t.coeff.parse().map_err(|_| crate::Error::Parse(format!("bad coefficient `{}`", t.coeff)))?;
            out.add_term(t.symbol.parse()?, k);
        }
        Ok(out)
    }
}

impl Add for &Chain {
    type Output = Chain;
    fn add(self, rhs: &Chain) -> Chain {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Chain {
    type Output = Chain;
    fn sub(self, rhs: &Chain) -> Chain {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.add_term(s.clone(), -c);
        }
        out
    }
}

impl Neg for &Chain {
    type Output = Chain;
    fn neg(self) -> Chain {
        Chain { terms: self.terms.iter().map(|(s, c)| (s.clone(), -c)).collect() }
    }
}

/// Boundary of a single symbol.
pub fn boundary(s: &Symbol) -> Chain {
    Chain::from_symbol(s.clone()).boundary()
}

pub fn concat(x: &Chain, y: &Chain) -> Result<Chain> {
    x.concat(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Symbol {
        s.parse().unwrap()
    }

    #[test]
    fn boundary_of_two_block() {
        let d = boundary(&sym("1 2"));
        let want = Chain::from_terms([(sym("1 | 2"), BigInt::from(-1)), (sym("2 | 1"), BigInt::from(1))]);
        assert_eq!(d, want);
        assert!(boundary(&sym("1 | 2")).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let d = boundary(&sym("3 1 2"));
        let back = Chain::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
    }
}
