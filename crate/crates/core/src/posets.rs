//! The poset `P_n` of subsets of `[n] = {1, ..., n}`.
//!
//! `X <= Y` when `|X| = |Y|` and the sorted elements satisfy `x_i <= y_i`.
//! The refinement `X ⪯ Y` also holds whenever `|X| < |Y|`.
//!
//! The derived [`Ord`] on [`Subset`] is the linear extension used for every
//! basis in this crate: cardinality, then element sum, then the sorted member
//! sequence lexicographically (see [`Subset::linext_key`]). At equal
//! cardinality a strict componentwise domination strictly raises the sum, so
//! `X ⪯ Y`, `X != Y` implies `X < Y` in this order.

use std::cmp::Ordering;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest `n` for which `P_n` is supported.
pub const MAX_N: usize = 62;

/// A subset of `[n]`, stored as a bitmask (bit `i - 1` for element `i`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    ambient: u8,
    bits: u64,
}

/// Sort key realizing the linear extension of `⪯`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinextKey {
    pub cardinality: u32,
    pub sum: u32,
    pub members: Vec<u32>,
}

impl Subset {
    pub fn empty(n: usize) -> Result<Self> {
        Self::from_members(n, &[])
    }

    /// All of `[n]`.
    pub fn full(n: usize) -> Result<Self> {
        check_ambient(n)?;
        Ok(Subset {
            ambient: n as u8,
            bits: low_bits(n),
        })
    }

    /// Builds `{m_1 < ... < m_k}` inside `[n]`. Members must be strictly
    /// increasing and lie in `[1, n]`.
    pub fn from_members(n: usize, members: &[u32]) -> Result<Self> {
        check_ambient(n)?;
        let mut bits = 0u64;
        let mut prev = 0u32;
        for &m in members {
            if m == 0 || m as usize > n {
                return Err(Error::domain(format!("element {m} is outside [1, {n}]")));
            }
            if m <= prev {
                return Err(Error::domain(format!(
                    "members must be strictly increasing, got {members:?}"
                )));
            }
            bits |= 1 << (m - 1);
            prev = m;
        }
        Ok(Subset { ambient: n as u8, bits })
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        check_ambient(n)?;
        if bits & !low_bits(n) != 0 {
            return Err(Error::domain(format!("bitmask {bits:#b} is not a subset of [{n}]")));
        }
        Ok(Subset { ambient: n as u8, bits })
    }

    /// Unchecked constructor that also allows the ambient `[n+1]` used for
    /// images under maps of degree `n+1 <= MAX_N + 1`.
    pub(crate) fn raw(n: usize, bits: u64) -> Self {
        debug_assert!(n <= MAX_N + 1 && bits & !low_bits(n) == 0);
        Subset { ambient: n as u8, bits }
    }

    pub fn ambient(&self) -> usize {
        self.ambient as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: u32) -> bool {
        (1..=64).contains(&i) && self.bits & (1 << (i - 1)) != 0
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.bits & !other.bits == 0
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            (rest != 0).then(|| {
                let i = rest.trailing_zeros();
                rest &= rest - 1;
                i + 1
            })
        })
    }

    pub fn members(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn sum(&self) -> u32 {
        self.iter().sum()
    }

    /// The same members viewed inside `[n]`.
    pub fn with_ambient(&self, n: usize) -> Result<Self> {
        Self::from_bits(n, self.bits)
    }

    /// `X <= Y` in `P_n`.
    pub fn leq(&self, other: &Subset) -> Result<bool> {
        self.same_ambient(other)?;
        Ok(self.dominated_by(other))
    }

    /// `X ⪯ Y`: `|X| < |Y|`, or `|X| = |Y|` and `X <= Y`.
    pub fn preceq(&self, other: &Subset) -> Result<bool> {
        self.same_ambient(other)?;
        Ok(self.refines(other))
    }

    pub fn linext_key(&self) -> LinextKey {
        LinextKey {
            cardinality: self.len() as u32,
            sum: self.sum(),
            members: self.members(),
        }
    }

    pub(crate) fn dominated_by(&self, other: &Subset) -> bool {
        self.len() == other.len() && self.iter().zip(other.iter()).all(|(x, y)| x <= y)
    }

    pub(crate) fn refines(&self, other: &Subset) -> bool {
        self.len() < other.len() || self.dominated_by(other)
    }

    fn same_ambient(&self, other: &Subset) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "subsets of [{}] and [{}] are not comparable",
                self.ambient, other.ambient
            )))
        }
    }

    /// Parses `{1,3}` (or `{}`) inside `[n]`.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::parse(format!("expected a set like {{1,3}}, got {s:?}")))?;
        let members = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(format!("bad set {s:?}: {e}")))?
        };
        Self::from_members(n, &members)
    }
}

fn check_ambient(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::Resource {
            what: "n",
            requested: n,
            bound: MAX_N,
        });
    }
    Ok(())
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then(self.len().cmp(&other.len()))
            .then_with(|| self.sum().cmp(&other.sum()))
            .then_with(|| {
                // Equal cardinality: the sorted sequences first differ at the
                // lowest bit where the masks differ, and the set holding it is
                // lexicographically smaller.
                let diff = self.bits ^ other.bits;
                if diff == 0 {
                    Ordering::Equal
                } else if self.bits & diff & diff.wrapping_neg() != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            })
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, m) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}⊆[{}]", self.ambient)
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for m in self.iter() {
            seq.serialize_element(&m)?;
        }
        seq.end()
    }
}

/// A basis element `(X, Y)` of the incidence algebra, with `X <= Y`.
///
/// Ordered by `X` then `Y` in the linear extension, which is the basis order
/// of the incidence algebra.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PosetPair {
    #[serde(rename = "X")]
    x: Subset,
    #[serde(rename = "Y")]
    y: Subset,
}

impl PosetPair {
    pub fn new(x: Subset, y: Subset) -> Result<Self> {
        if !x.leq(&y)? {
            return Err(Error::domain(format!("{x} <= {y} fails in P_{}", x.ambient)));
        }
        Ok(PosetPair { x, y })
    }

    pub(crate) fn new_unchecked(x: Subset, y: Subset) -> Self {
        debug_assert!(x.ambient == y.ambient && x.dominated_by(&y));
        PosetPair { x, y }
    }

    /// The diagonal pair `(X, X)`.
    pub fn diagonal(x: Subset) -> Self {
        PosetPair { x, y: x }
    }

    pub fn x(&self) -> Subset {
        self.x
    }

    pub fn y(&self) -> Subset {
        self.y
    }

    pub fn n(&self) -> usize {
        self.x.ambient()
    }

    /// Parses the label form `X<Y`, e.g. `{1}<{2}`.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let (x, y) = s
            .split_once('<')
            .ok_or_else(|| Error::parse(format!("expected a pair like {{1}}<{{2}}, got {s:?}")))?;
        Self::new(Subset::parse(x, n)?, Subset::parse(y, n)?)
    }
}

impl fmt::Display for PosetPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<{}", self.x, self.y)
    }
}

impl fmt::Debug for PosetPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// JSON form `{"X":[...],"Y":[...]}` before the ambient `n` is known.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairJson {
    #[serde(rename = "X")]
    pub x: Vec<u32>,
    #[serde(rename = "Y")]
    pub y: Vec<u32>,
}

impl PairJson {
    pub fn into_pair(self, n: usize) -> Result<PosetPair> {
        PosetPair::new(Subset::from_members(n, &self.x)?, Subset::from_members(n, &self.y)?)
    }
}

/// All subsets of `[n]` in linear-extension order.
pub fn enumerate_subsets(n: usize) -> Result<Vec<Subset>> {
    check_ambient(n)?;
    if n >= usize::BITS as usize - 1 {
        return Err(Error::Resource {
            what: "n",
            requested: n,
            bound: usize::BITS as usize - 2,
        });
    }
    let mut all: Vec<Subset> = (0..1u64 << n).map(|bits| Subset::raw(n, bits)).collect();
    all.sort_unstable();
    Ok(all)
}

/// Every pair `X <= Y` of `P_n`, sorted by `X` then `Y` in linear-extension
/// order. There are `Catalan(n+1)` of them.
///
/// `max_degree` bounds `n + 1`.
pub fn enumerate_pairs(n: usize, max_degree: usize) -> Result<Vec<PosetPair>> {
    if n + 1 > max_degree {
        return Err(Error::Resource {
            what: "n+1",
            requested: n + 1,
            bound: max_degree,
        });
    }
    let subsets = enumerate_subsets(n)?;
    let mut by_card: Vec<Vec<Subset>> = vec![Vec::new(); n + 1];
    for s in &subsets {
        by_card[s.len()].push(*s);
    }
    let mut pairs = Vec::new();
    for x in &subsets {
        for y in &by_card[x.len()] {
            if x.dominated_by(y) {
                pairs.push(PosetPair::new_unchecked(*x, *y));
            }
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, m: &[u32]) -> Subset {
        Subset::from_members(n, m).unwrap()
    }

    #[test]
    fn leq_examples() {
        assert!(s(2, &[]).leq(&s(2, &[])).unwrap());
        assert!(s(2, &[1]).leq(&s(2, &[2])).unwrap());
        assert!(!s(2, &[1]).leq(&s(2, &[1, 2])).unwrap());
        assert!(s(3, &[1, 3]).leq(&s(3, &[2, 3])).unwrap());
        assert!(!s(3, &[2, 3]).leq(&s(3, &[1, 3])).unwrap());
    }

    #[test]
    fn preceq_examples() {
        assert!(s(2, &[1]).preceq(&s(2, &[1, 2])).unwrap());
        assert!(!s(2, &[2]).preceq(&s(2, &[1])).unwrap());
        let x = s(4, &[2, 4]);
        assert!(x.preceq(&x).unwrap());
    }

    #[test]
    fn ambient_mismatch_is_usage_error() {
        assert!(matches!(s(2, &[1]).leq(&s(3, &[1])), Err(Error::Usage(_))));
        assert!(matches!(s(2, &[1]).preceq(&s(3, &[1])), Err(Error::Usage(_))));
    }

    #[test]
    fn construction_errors() {
        assert!(Subset::from_members(2, &[3]).is_err());
        assert!(Subset::from_members(2, &[0]).is_err());
        assert!(Subset::from_members(3, &[2, 1]).is_err());
        assert!(Subset::from_members(3, &[2, 2]).is_err());
        assert!(matches!(Subset::empty(63), Err(Error::Resource { .. })));
        assert!(Subset::full(62).is_ok());
        assert!(PosetPair::new(s(2, &[2]), s(2, &[1])).is_err());
    }

    #[test]
    fn linext_key_examples() {
        let k = |m: &[u32]| s(2, m).linext_key();
        assert_eq!(
            k(&[]),
            LinextKey {
                cardinality: 0,
                sum: 0,
                members: vec![]
            }
        );
        assert_eq!(
            k(&[1]),
            LinextKey {
                cardinality: 1,
                sum: 1,
                members: vec![1]
            }
        );
        assert_eq!(
            k(&[2]),
            LinextKey {
                cardinality: 1,
                sum: 2,
                members: vec![2]
            }
        );
        assert_eq!(
            k(&[1, 2]),
            LinextKey {
                cardinality: 2,
                sum: 3,
                members: vec![1, 2]
            }
        );
        assert!(k(&[1]) < k(&[2]) && k(&[2]) < k(&[1, 2]));
    }

    #[test]
    fn ord_agrees_with_linext_key() {
        // Sum ties at equal cardinality exercise the lexicographic tiebreak.
        let all = enumerate_subsets(7).unwrap();
        for a in &all {
            for b in &all {
                assert_eq!(a.cmp(b), a.linext_key().cmp(&b.linext_key()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn enumerate_pairs_examples() {
        let p0 = enumerate_pairs(0, 14).unwrap();
        assert_eq!(p0.len(), 1);
        assert_eq!(p0[0].to_string(), "{}<{}");

        let labels: Vec<String> = enumerate_pairs(2, 14).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(labels, ["{}<{}", "{1}<{1}", "{1}<{2}", "{2}<{2}", "{1,2}<{1,2}"]);

        assert_eq!(enumerate_pairs(3, 14).unwrap().len(), 14);
        assert!(matches!(enumerate_pairs(13, 12), Err(Error::Resource { .. })));
    }

    #[test]
    fn enumerate_pairs_matches_brute_force() {
        for n in 0..=4 {
            let mut brute = Vec::new();
            for a in 0..1u64 << n {
                for b in 0..1u64 << n {
                    let (x, y) = (Subset::from_bits(n, a).unwrap(), Subset::from_bits(n, b).unwrap());
                    let (xm, ym) = (x.members(), y.members());
                    if xm.len() == ym.len() && xm.iter().zip(&ym).all(|(p, q)| p <= q) {
                        brute.push((x, y));
                    }
                }
            }
            let got: Vec<_> = enumerate_pairs(n, 14).unwrap().iter().map(|p| (p.x(), p.y())).collect();
            assert_eq!(got.len(), brute.len());
            for b in &brute {
                assert!(got.contains(b));
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let p = PosetPair::parse("{1,3}<{2,3}", 3).unwrap();
        assert_eq!(p.to_string(), "{1,3}<{2,3}");
        assert_eq!(PosetPair::parse(" {} < {} ", 0).unwrap().to_string(), "{}<{}");
        assert!(PosetPair::parse("{2}<{1}", 2).is_err());
        assert!(PosetPair::parse("{1}{2}", 2).is_err());
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"X":[1,3],"Y":[2,3]}"#);
        let back: PairJson = serde_json::from_str(r#"{"X":[1,3],"Y":[2,3]}"#).unwrap();
        assert_eq!(back.into_pair(3).unwrap(), p);
    }

    #[test]
    fn orders_are_partial_orders() {
        for n in 0..=4 {
            let all = enumerate_subsets(n).unwrap();
            for a in &all {
                assert!(a.dominated_by(a) && a.refines(a));
                for b in &all {
                    if a.dominated_by(b) {
                        assert!(a.refines(b));
                    }
                    if a != b {
                        assert!(!(a.dominated_by(b) && b.dominated_by(a)));
                        assert!(!(a.refines(b) && b.refines(a)));
                    }
                    for c in &all {
                        if a.dominated_by(b) && b.dominated_by(c) {
                            assert!(a.dominated_by(c));
                        }
                        if a.refines(b) && b.refines(c) {
                            assert!(a.refines(c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn linear_extension_is_sound() {
        for n in 0..=6 {
            let all = enumerate_subsets(n).unwrap();
            for a in &all {
                for b in &all {
                    if a != b && a.refines(b) {
                        assert!(a.linext_key() < b.linext_key(), "{a} ⪯ {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn pair_order_is_sound() {
        for n in 0..=5 {
            let pairs = enumerate_pairs(n, 14).unwrap();
            for (i, p) in pairs.iter().enumerate() {
                for (j, q) in pairs.iter().enumerate() {
                    if p != q && p.x().refines(&q.x()) && p.y().refines(&q.y()) {
                        assert!(i < j, "{p} should precede {q}");
                    }
                }
            }
        }
    }
}
