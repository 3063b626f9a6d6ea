//! Finitely supported linear combinations over a ring, on two kinds of
//! basis: the monoid algebra `k C_{n+1}` (basis: [`CMap`]) and the incidence
//! algebra `I(P_n, k)` (basis: [`PosetPair`]).
//!
//! Elements are kept in normal form: no stored zero coefficients, terms
//! sorted by basis key.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};

use crate::catalan::CMap;
use crate::error::{Error, Result};
use crate::posets::{enumerate_subsets, PairJson, PosetPair, Subset};
use crate::rings::{Ring, RingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Monoid,
    Pairs,
}

/// A basis element of one of the two algebras.
pub trait BasisKey: Clone + Ord + Hash + fmt::Debug + fmt::Display + Serialize + Send + Sync {
    const KIND: BasisKind;

    /// Degree `n+1` for monoid elements, `n` for poset pairs.
    fn size(&self) -> usize;

    fn from_json(value: serde_json::Value, size: usize) -> Result<Self>;
}

impl BasisKey for CMap {
    const KIND: BasisKind = BasisKind::Monoid;

    fn size(&self) -> usize {
        self.degree()
    }

    fn from_json(value: serde_json::Value, size: usize) -> Result<Self> {
        let f: CMap = serde_json::from_value(value).map_err(|e| Error::parse(e.to_string()))?;
        if f.degree() != size {
            return Err(Error::usage(format!("{f} does not have degree {size}")));
        }
        Ok(f)
    }
}

impl BasisKey for PosetPair {
    const KIND: BasisKind = BasisKind::Pairs;

    fn size(&self) -> usize {
        self.n()
    }

    fn from_json(value: serde_json::Value, size: usize) -> Result<Self> {
        let p: PairJson = serde_json::from_value(value).map_err(|e| Error::parse(e.to_string()))?;
        p.into_pair(size)
    }
}

/// A linear combination `Σ c_key · key` over the ring `R`.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement<R: Ring, K: BasisKey> {
    ring: R,
    size: usize,
    terms: BTreeMap<K, R::Elem>,
}

/// Element of the monoid algebra `k C_{n+1}`.
pub type MonoidElement<R> = AlgebraElement<R, CMap>;
/// Element of the incidence algebra `I(P_n, k)`.
pub type IncidenceElement<R> = AlgebraElement<R, PosetPair>;

impl<R: Ring, K: BasisKey> AlgebraElement<R, K> {
    pub fn zero(ring: R, size: usize) -> Self {
        AlgebraElement {
            ring,
            size,
            terms: BTreeMap::new(),
        }
    }

    /// `1 · key`.
    pub fn basis(ring: R, key: K) -> Self {
        let one = ring.one();
        let mut e = Self::zero(ring, key.size());
        e.accumulate(key, &one);
        e
    }

    /// Sums the given terms, merging repeated keys and dropping zeros.
    pub fn from_terms(ring: R, size: usize, terms: impl IntoIterator<Item = (K, R::Elem)>) -> Result<Self> {
        let mut e = Self::zero(ring, size);
        for (key, c) in terms {
            if key.size() != size {
                return Err(Error::usage(format!(
                    "basis element {key} does not belong to size {size}"
                )));
            }
            if !e.ring.contains(&c) {
                return Err(Error::usage(format!("coefficient {c:?} is not in {}", e.ring.spec())));
            }
            e.accumulate(key, &c);
        }
        Ok(e)
    }

    pub(crate) fn accumulate(&mut self, key: K, c: &R::Elem) {
        if self.ring.is_zero(c) {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                let sum = self.ring.add(o.get(), c);
                if self.ring.is_zero(&sum) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, &R::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &K) -> R::Elem {
        self.terms.get(key).cloned().unwrap_or_else(|| self.ring.zero())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::usage(format!(
                "elements over {} and {} cannot be combined",
                self.ring.spec(),
                other.ring.spec()
            )));
        }
        if self.size != other.size {
            return Err(Error::usage(format!(
                "elements of sizes {} and {} cannot be combined",
                self.size, other.size
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(k.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        AlgebraElement {
            ring: self.ring.clone(),
            size: self.size,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), self.ring.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &R::Elem) -> Result<Self> {
        if !self.ring.contains(c) {
            return Err(Error::usage(format!("scalar {c:?} is not in {}", self.ring.spec())));
        }
        let mut out = Self::zero(self.ring.clone(), self.size);
        for (k, a) in &self.terms {
            let prod = self.ring.mul(c, a);
            if !self.ring.is_zero(&prod) {
                out.terms.insert(k.clone(), prod);
            }
        }
        Ok(out)
    }
}

impl<R: Ring> MonoidElement<R> {
    /// Bilinear extension of composition `(f, g) ↦ fg`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.ring.clone(), self.size);
        for (f, a) in &self.terms {
            for (g, b) in &other.terms {
                let c = self.ring.mul(a, b);
                out.accumulate(f.compose_unchecked(g), &c);
            }
        }
        Ok(out)
    }

    /// `1 · id`, the unit of the monoid algebra.
    pub fn one(ring: R, degree: usize) -> Self {
        Self::basis(ring, CMap::identity(degree))
    }
}

/// Which pairs of arrows the incidence product composes.
///
/// [`CompositionRule::Standard`] is the incidence algebra. `Reversed` exists
/// only so the verification harness can prove it detects a wrong product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompositionRule {
    /// `(U,V)(X,Y) = (X,V)` if `Y = U`, else 0.
    #[default]
    Standard,
    /// `(U,V)(X,Y) = (U,Y)` if `X = V`, else 0: the opposite algebra.
    Reversed,
}

impl<R: Ring> IncidenceElement<R> {
    /// Bilinear extension of `(U,V)(X,Y) = (X,V)` if `Y = U`, else 0.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_with_rule(other, CompositionRule::Standard)
    }

    pub fn mul_with_rule(&self, other: &Self, rule: CompositionRule) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.ring.clone(), self.size);
        // Index the right factor by the endpoint that must match.
        let mut by_end: HashMap<Subset, Vec<(&PosetPair, &R::Elem)>> = HashMap::new();
        for (p, b) in &other.terms {
            let end = match rule {
                CompositionRule::Standard => p.y(),
                CompositionRule::Reversed => p.x(),
            };
            by_end.entry(end).or_default().push((p, b));
        }
        for (left, a) in &self.terms {
            let start = match rule {
                CompositionRule::Standard => left.x(),
                CompositionRule::Reversed => left.y(),
            };
            let Some(matches) = by_end.get(&start) else {
                continue;
            };
            for (right, b) in matches {
                let key = match rule {
                    CompositionRule::Standard => PosetPair::new_unchecked(right.x(), left.y()),
                    CompositionRule::Reversed => PosetPair::new_unchecked(left.x(), right.y()),
                };
                let c = self.ring.mul(a, b);
                out.accumulate(key, &c);
            }
        }
        Ok(out)
    }
}

pub fn add_elements<R: Ring, K: BasisKey>(
    a: &AlgebraElement<R, K>,
    b: &AlgebraElement<R, K>,
) -> Result<AlgebraElement<R, K>> {
    a.add(b)
}

pub fn scale<R: Ring, K: BasisKey>(c: &R::Elem, a: &AlgebraElement<R, K>) -> Result<AlgebraElement<R, K>> {
    a.scale(c)
}

pub fn monoid_product<R: Ring>(a: &MonoidElement<R>, b: &MonoidElement<R>) -> Result<MonoidElement<R>> {
    a.mul(b)
}

pub fn incidence_product<R: Ring>(a: &IncidenceElement<R>, b: &IncidenceElement<R>) -> Result<IncidenceElement<R>> {
    a.mul(b)
}

/// `Σ_{X ⊆ [n]} (X, X)`, the unit of the incidence algebra.
pub fn incidence_identity<R: Ring>(n: usize, ring: R) -> Result<IncidenceElement<R>> {
    let one = ring.one();
    let mut e = IncidenceElement::zero(ring, n);
    for x in enumerate_subsets(n)? {
        e.accumulate(PosetPair::diagonal(x), &one);
    }
    Ok(e)
}

impl<R: Ring, K: BasisKey> fmt::Debug for AlgebraElement<R, K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<R: Ring, K: BasisKey> fmt::Display for AlgebraElement<R, K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}·{}", self.ring.format_elem(c), k)?;
        }
        Ok(())
    }
}

struct TermsSer<'a, R: Ring, K: BasisKey>(&'a AlgebraElement<R, K>);

impl<R: Ring, K: BasisKey> Serialize for TermsSer<'_, R, K> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a, K> {
            key: &'a K,
            coeff: String,
        }
        let e = self.0;
        let mut seq = serializer.serialize_seq(Some(e.len()))?;
        for (key, c) in &e.terms {
            seq.serialize_element(&Term {
                key,
                coeff: e.ring.format_elem(c),
            })?;
        }
        seq.end()
    }
}

/// JSON form `{"ring":"Z","basis":"monoid","terms":[{"key":..,"coeff":".."}]}`.
impl<R: Ring, K: BasisKey> Serialize for AlgebraElement<R, K> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("ring", &self.ring.spec())?;
        map.serialize_entry("basis", &K::KIND)?;
        map.serialize_entry("terms", &TermsSer(self))?;
        map.end()
    }
}

/// The JSON form before the degree or ambient size is known.
#[derive(Debug, Clone, Deserialize)]
pub struct ElementJson {
    pub ring: RingSpec,
    pub basis: BasisKind,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TermJson {
    pub key: serde_json::Value,
    pub coeff: String,
}

/// An element of either algebra over a runtime-selected ring.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyElement {
    Monoid(MonoidElement<RingSpec>),
    Pairs(IncidenceElement<RingSpec>),
}

impl ElementJson {
    /// `size` is the degree `n+1` for a monoid element and `n` for pairs.
    pub fn into_element(self, size: usize) -> Result<AnyElement> {
        let ring = self.ring;
        match self.basis {
            BasisKind::Monoid => Ok(AnyElement::Monoid(Self::collect(ring, size, self.terms)?)),
            BasisKind::Pairs => Ok(AnyElement::Pairs(Self::collect(ring, size, self.terms)?)),
        }
    }

    fn collect<K: BasisKey>(ring: RingSpec, size: usize, terms: Vec<TermJson>) -> Result<AlgebraElement<RingSpec, K>> {
        let parsed = terms
            .into_iter()
            .map(|t| Ok((K::from_json(t.key, size)?, ring.parse_elem(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        AlgebraElement::from_terms(ring, size, parsed)
    }
}

pub fn parse_element_json(s: &str, size: usize) -> Result<AnyElement> {
    let raw: ElementJson = serde_json::from_str(s).map_err(|e| Error::parse(e.to_string()))?;
    raw.into_element(size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{Integers, RingValue, ZMod};
    use num_bigint::BigInt;

    fn m(images: &[i64]) -> CMap {
        CMap::new(images).unwrap()
    }

    fn pair(s: &str, n: usize) -> PosetPair {
        PosetPair::parse(s, n).unwrap()
    }

    #[test]
    fn add_examples() {
        let r = Integers::new();
        let f = m(&[2, 2, 3]);
        let a = MonoidElement::basis(r, f.clone());
        assert_eq!(a.add(&MonoidElement::zero(r, 3)).unwrap(), a);
        let minus = MonoidElement::from_terms(r, 3, [(f.clone(), BigInt::from(-1))]).unwrap();
        let sum = a.add(&minus).unwrap();
        assert!(sum.is_zero() && sum.len() == 0);

        let z4 = ZMod::new(4).unwrap();
        let two_f = MonoidElement::from_terms(z4, 3, [(f, 2u64)]).unwrap();
        assert!(two_f.add(&two_f).unwrap().is_zero());
    }

    #[test]
    fn scale_examples() {
        let z4 = ZMod::new(4).unwrap();
        let f = m(&[2, 2, 3]);
        let a = MonoidElement::from_terms(z4, 3, [(f.clone(), 3u64), (CMap::identity(3), 1)]).unwrap();
        assert_eq!(a.scale(&1).unwrap(), a);
        assert!(a.scale(&0).unwrap().is_zero());
        let two_f = MonoidElement::from_terms(z4, 3, [(f, 2u64)]).unwrap();
        assert!(two_f.scale(&2).unwrap().is_zero());
        assert!(matches!(a.scale(&4), Err(Error::Usage(_))));
    }

    #[test]
    fn mismatch_errors() {
        let a = MonoidElement::basis(RingSpec::Integers, CMap::identity(3));
        let b = MonoidElement::basis(RingSpec::IntegersMod(4), CMap::identity(3));
        let c = MonoidElement::basis(RingSpec::Integers, CMap::identity(4));
        assert!(matches!(a.add(&b), Err(Error::Usage(_))));
        assert!(matches!(a.mul(&b), Err(Error::Usage(_))));
        assert!(matches!(a.mul(&c), Err(Error::Usage(_))));
        let bad = MonoidElement::from_terms(RingSpec::Integers, 3, [(CMap::identity(3), RingValue::Residue(1))]);
        assert!(matches!(bad, Err(Error::Usage(_))));
        let wrong_size = MonoidElement::from_terms(Integers::new(), 4, [(CMap::identity(3), BigInt::from(1))]);
        assert!(matches!(wrong_size, Err(Error::Usage(_))));
    }

    #[test]
    fn monoid_product_examples() {
        let r = Integers::new();
        let e = |f: &[i64]| MonoidElement::basis(r, m(f));
        assert_eq!(e(&[2, 2, 3]).mul(&e(&[2, 3, 3])).unwrap(), e(&[2, 3, 3]));

        let id = MonoidElement::one(r, 3);
        let x = e(&[2, 2, 3])
            .add(&e(&[3, 3, 3]).scale(&BigInt::from(5)).unwrap())
            .unwrap();
        assert_eq!(id.mul(&x).unwrap(), x);
        assert_eq!(x.mul(&id).unwrap(), x);

        // [2,3,3]∘[2,3,3] = [3,3,3] and [3,3,3]∘[2,3,3] = [3,3,3] merge.
        let lhs = e(&[2, 3, 3]).add(&e(&[3, 3, 3])).unwrap().mul(&e(&[2, 3, 3])).unwrap();
        let expected = MonoidElement::from_terms(r, 3, [(m(&[3, 3, 3]), BigInt::from(2))]).unwrap();
        assert_eq!(lhs, expected);

        let lhs = e(&[1, 2, 3]).add(&e(&[2, 2, 3])).unwrap().mul(&e(&[1, 3, 3])).unwrap();
        assert_eq!(lhs, e(&[1, 3, 3]).add(&e(&[2, 3, 3])).unwrap());
    }

    #[test]
    fn incidence_product_examples() {
        let r = Integers::new();
        let e = |s: &str, n: usize| IncidenceElement::basis(r, pair(s, n));
        assert_eq!(e("{}<{}", 2).mul(&e("{}<{}", 2)).unwrap(), e("{}<{}", 2));
        assert_eq!(e("{1}<{2}", 2).mul(&e("{1}<{1}", 2)).unwrap(), e("{1}<{2}", 2));
        assert!(e("{1}<{2}", 2).mul(&e("{1}<{2}", 2)).unwrap().is_zero());
        // Here Y = {2} but U = {1}.
        assert!(e("{1}<{1}", 2).mul(&e("{1}<{2}", 2)).unwrap().is_zero());
        assert_eq!(e("{2}<{2}", 2).mul(&e("{1}<{2}", 2)).unwrap(), e("{1}<{2}", 2));
    }

    #[test]
    fn reversed_rule_is_the_opposite_product() {
        let r = Integers::new();
        let e = |s: &str| IncidenceElement::basis(r, pair(s, 2));
        let a = e("{1}<{1}");
        let b = e("{1}<{2}");
        assert_eq!(
            a.mul_with_rule(&b, CompositionRule::Reversed).unwrap(),
            b.mul(&a).unwrap()
        );
    }

    #[test]
    fn incidence_identity_examples() {
        let r = Integers::new();
        let id0 = incidence_identity(0, r).unwrap();
        assert_eq!(id0, IncidenceElement::basis(r, pair("{}<{}", 0)));
        let id2 = incidence_identity(2, r).unwrap();
        let keys: Vec<String> = id2.terms().map(|(k, _)| k.to_string()).collect();
        assert_eq!(keys, ["{}<{}", "{1}<{1}", "{2}<{2}", "{1,2}<{1,2}"]);
        for n in 0..=4 {
            let id = incidence_identity(n, r).unwrap();
            for p in crate::posets::enumerate_pairs(n, 14).unwrap() {
                let x = IncidenceElement::basis(r, p).scale(&BigInt::from(3)).unwrap();
                assert_eq!(id.mul(&x).unwrap(), x);
                assert_eq!(x.mul(&id).unwrap(), x);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let r = RingSpec::Rationals;
        let half = r.parse_elem("1/2").unwrap();
        let a = IncidenceElement::from_terms(r, 2, [(pair("{1}<{2}", 2), half.clone()), (pair("{}<{}", 2), r.one())])
            .unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"ring":"Q","basis":"pairs","terms":[{"key":{"X":[],"Y":[]},"coeff":"1"},{"key":{"X":[1],"Y":[2]},"coeff":"1/2"}]}"#
        );
        assert_eq!(parse_element_json(&s, 2).unwrap(), AnyElement::Pairs(a));

        let b = MonoidElement::basis(RingSpec::IntegersMod(4), m(&[2, 3, 3]));
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(
            s,
            r#"{"ring":"Z/4","basis":"monoid","terms":[{"key":[2,3,3],"coeff":"1"}]}"#
        );
        assert_eq!(parse_element_json(&s, 3).unwrap(), AnyElement::Monoid(b));
        assert!(parse_element_json(&s, 4).is_err());
    }

    #[test]
    fn display() {
        let r = Integers::new();
        let a = MonoidElement::from_terms(
            r,
            3,
            [(m(&[3, 3, 3]), BigInt::from(-1)), (m(&[2, 3, 3]), BigInt::from(1))],
        )
        .unwrap();
        assert_eq!(a.to_string(), "1·[2,3,3] + -1·[3,3,3]");
        assert_eq!(MonoidElement::zero(r, 3).to_string(), "0");
    }
}
