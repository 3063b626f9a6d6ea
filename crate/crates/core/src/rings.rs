//! Exact coefficient rings.
//!
//! Every algebra in this crate is generic over a [`Ring`]: a runtime ring
//! *context* that knows how to combine its [`Ring::Elem`] values. The context
//! carries any runtime parameter (the modulus of `Z/m`), so `Z/4` and `Z/6`
//! are the same Rust type with different contexts.
//!
//! Concrete rings:
//!
//! * [`Integers`] and [`Rationals`]: [`NumRing`] over the arbitrary-precision
//!   `num` scalars `BigInt` and `BigRational`.
//! * [`ZMod`]: integers modulo any `m >= 2`, prime or not.
//! * [`RingSpec`]: a runtime choice among the three, with [`RingValue`]
//!   elements. This is what the CLI and the JSON formats speak.

use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A commutative ring with identity, given as a context object.
///
/// Elements must be in canonical form, so `==` on [`Ring::Elem`] is ring
/// equality.
pub trait Ring: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + fmt::Debug + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    /// Image of an integer under the unique unital map `Z -> R`.
    #[allow(clippy::wrong_self_convention)]
    fn from_integer(&self, n: &BigInt) -> Self::Elem;

    /// Whether `a` is a canonical-form element of this ring.
    fn contains(&self, a: &Self::Elem) -> bool;

    fn spec(&self) -> RingSpec;

    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;

    fn format_elem(&self, a: &Self::Elem) -> String;
}

/// An exact `num` scalar usable as the element type of a [`NumRing`].
///
/// Only arbitrary-precision types implement this: fixed-width integers would
/// wrap silently, and floats are not exact.
pub trait ExactScalar:
    num_traits::Num + std::ops::Neg<Output = Self> + Clone + fmt::Debug + fmt::Display + Eq + Hash + Send + Sync + 'static
{
    const SPEC: RingSpec;

    fn from_bigint(n: &BigInt) -> Self;

    fn parse_exact(s: &str) -> Result<Self>;
}

impl ExactScalar for BigInt {
    const SPEC: RingSpec = RingSpec::Integers;

    fn from_bigint(n: &BigInt) -> Self {
        n.clone()
    }

    fn parse_exact(s: &str) -> Result<Self> {
        parse_bigint(s)
    }
}

impl ExactScalar for BigRational {
    const SPEC: RingSpec = RingSpec::Rationals;

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn parse_exact(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

/// The ring of an [`ExactScalar`] with its own arithmetic.
pub struct NumRing<T>(PhantomData<fn() -> T>);

pub type Integers = NumRing<BigInt>;
pub type Rationals = NumRing<BigRational>;

impl<T> NumRing<T> {
    pub const fn new() -> Self {
        NumRing(PhantomData)
    }
}

impl<T> Default for NumRing<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> Clone for NumRing<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for NumRing<T> {}

impl<T> PartialEq for NumRing<T> {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl<T: ExactScalar> fmt::Debug for NumRing<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumRing({})", T::SPEC)
    }
}

impl<T: ExactScalar> Ring for NumRing<T> {
    type Elem = T;

    fn zero(&self) -> T {
        T::zero()
    }

    fn one(&self) -> T {
        T::one()
    }

    fn add(&self, a: &T, b: &T) -> T {
        a.clone() + b.clone()
    }

    fn mul(&self, a: &T, b: &T) -> T {
        a.clone() * b.clone()
    }

    fn neg(&self, a: &T) -> T {
        -a.clone()
    }

    fn sub(&self, a: &T, b: &T) -> T {
        a.clone() - b.clone()
    }

    fn is_zero(&self, a: &T) -> bool {
        a.is_zero()
    }

    fn from_integer(&self, n: &BigInt) -> T {
        T::from_bigint(n)
    }

    fn contains(&self, _: &T) -> bool {
        // BigInt is always canonical and BigRational keeps itself reduced.
        true
    }

    fn spec(&self) -> RingSpec {
        T::SPEC
    }

    fn parse_elem(&self, s: &str) -> Result<T> {
        T::parse_exact(s)
    }

    fn format_elem(&self, a: &T) -> String {
        a.to_string()
    }
}

/// Integers modulo `m`, for any `m >= 2`. Elements are residues in `[0, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZMod {
    modulus: u64,
}

impl ZMod {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::usage(format!("modulus must be at least 2, got {modulus}")));
        }
        Ok(ZMod { modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl Ring for ZMod {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.modulus as u128) as u64
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    fn from_integer(&self, n: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        let mut r = n % &m;
        if r.is_negative() {
            r += m;
        }
        r.to_u64().expect("residue below a u64 modulus")
    }

    fn contains(&self, a: &u64) -> bool {
        *a < self.modulus
    }

    fn spec(&self) -> RingSpec {
        RingSpec::IntegersMod(self.modulus)
    }

    fn parse_elem(&self, s: &str) -> Result<u64> {
        Ok(self.from_integer(&parse_bigint(s)?))
    }

    fn format_elem(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// Runtime choice of coefficient ring. String syntax: `Z`, `Z/m`, `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingSpec {
    Integers,
    IntegersMod(u64),
    Rationals,
}

/// An element of the ring named by some [`RingSpec`], in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingValue {
    Integer(BigInt),
    Residue(u64),
    Rational(BigRational),
}

impl RingSpec {
    /// Checks the invariant `m >= 2` for `Z/m`.
    pub fn validate(self) -> Result<Self> {
        if let RingSpec::IntegersMod(m) = self {
            ZMod::new(m)?;
        }
        Ok(self)
    }

    fn check(&self, a: &RingValue) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::usage(format!("value {a:?} is not an element of {self}")))
        }
    }

    fn zmod(&self) -> ZMod {
        match *self {
            RingSpec::IntegersMod(m) => ZMod { modulus: m },
            _ => unreachable!("not a modular ring"),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => write!(f, "Z"),
            RingSpec::IntegersMod(m) => write!(f, "Z/{m}"),
            RingSpec::Rationals => write!(f, "Q"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" => Ok(RingSpec::Integers),
            "Q" => Ok(RingSpec::Rationals),
            other => {
                let m = other
                    .strip_prefix("Z/")
                    .and_then(|m| m.parse::<u64>().ok())
                    .ok_or_else(|| Error::parse(format!("unknown ring {other:?}; expected Z, Z/m or Q")))?;
                RingSpec::IntegersMod(m).validate()
            }
        }
    }
}

impl Serialize for RingSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RingSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Dispatching ring. Its arithmetic panics when handed values of another
/// ring; the checked entry points are [`ring_add`], [`ring_mul`] and
/// [`ring_neg`].
impl Ring for RingSpec {
    type Elem = RingValue;

    fn zero(&self) -> RingValue {
        self.from_integer(&BigInt::zero())
    }

    fn one(&self) -> RingValue {
        self.from_integer(&BigInt::one())
    }

    fn add(&self, a: &RingValue, b: &RingValue) -> RingValue {
        use RingValue::*;
        match (a, b) {
            (Integer(x), Integer(y)) => Integer(x + y),
            (Rational(x), Rational(y)) => Rational(x + y),
            (Residue(x), Residue(y)) => Residue(self.zmod().add(x, y)),
            _ => panic!("mixed ring values {a:?} and {b:?}"),
        }
    }

    fn mul(&self, a: &RingValue, b: &RingValue) -> RingValue {
        use RingValue::*;
        match (a, b) {
            (Integer(x), Integer(y)) => Integer(x * y),
            (Rational(x), Rational(y)) => Rational(x * y),
            (Residue(x), Residue(y)) => Residue(self.zmod().mul(x, y)),
            _ => panic!("mixed ring values {a:?} and {b:?}"),
        }
    }

    fn neg(&self, a: &RingValue) -> RingValue {
        match a {
            RingValue::Integer(x) => RingValue::Integer(-x),
            RingValue::Rational(x) => RingValue::Rational(-x),
            RingValue::Residue(x) => RingValue::Residue(self.zmod().neg(x)),
        }
    }

    fn is_zero(&self, a: &RingValue) -> bool {
        match a {
            RingValue::Integer(x) => x.is_zero(),
            RingValue::Rational(x) => x.is_zero(),
            RingValue::Residue(x) => *x == 0,
        }
    }

    fn from_integer(&self, n: &BigInt) -> RingValue {
        match self {
            RingSpec::Integers => RingValue::Integer(n.clone()),
            RingSpec::IntegersMod(_) => RingValue::Residue(self.zmod().from_integer(n)),
            RingSpec::Rationals => RingValue::Rational(BigRational::from_integer(n.clone())),
        }
    }

    fn contains(&self, a: &RingValue) -> bool {
        match (self, a) {
            (RingSpec::Integers, RingValue::Integer(_)) => true,
            (RingSpec::Rationals, RingValue::Rational(q)) => q.denom().sign() == Sign::Plus,
            (RingSpec::IntegersMod(m), RingValue::Residue(r)) => r < m,
            _ => false,
        }
    }

    fn spec(&self) -> RingSpec {
        *self
    }

    fn parse_elem(&self, s: &str) -> Result<RingValue> {
        match self {
            RingSpec::Integers => parse_bigint(s).map(RingValue::Integer),
            RingSpec::IntegersMod(_) => self.zmod().parse_elem(s).map(RingValue::Residue),
            RingSpec::Rationals => parse_rational(s).map(RingValue::Rational),
        }
    }

    fn format_elem(&self, a: &RingValue) -> String {
        a.to_string()
    }
}

impl fmt::Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingValue::Integer(x) => write!(f, "{x}"),
            RingValue::Residue(x) => write!(f, "{x}"),
            RingValue::Rational(x) => write!(f, "{x}"),
        }
    }
}

pub fn ring_add(r: &RingSpec, a: &RingValue, b: &RingValue) -> Result<RingValue> {
    r.check(a)?;
    r.check(b)?;
    Ok(r.add(a, b))
}

pub fn ring_mul(r: &RingSpec, a: &RingValue, b: &RingValue) -> Result<RingValue> {
    r.check(a)?;
    r.check(b)?;
    Ok(r.mul(a, b))
}

pub fn ring_neg(r: &RingSpec, a: &RingValue) -> Result<RingValue> {
    r.check(a)?;
    Ok(r.neg(a))
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    let t = s.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(format!("not an integer: {s:?}")));
    }
    t.parse().map_err(|_| Error::parse(format!("not an integer: {s:?}")))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_bigint(s)?)),
        Some((p, q)) => {
            let q = parse_bigint(q)?;
            if q.is_zero() {
                return Err(Error::parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_bigint(p)?, q))
        }
    }
}
