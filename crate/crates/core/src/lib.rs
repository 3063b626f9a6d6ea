//! Exact computations in the Catalan monoid algebra `k C_{n+1}` and the
//! incidence algebra `I(P_n, k)`, together with the explicit isomorphism
//! `φ(f) = Σ_{S ∈ PCS(f)} (S, f(S))` between them.
//!
//! Everything is generic over the coefficient [`Ring`]; the aliases below
//! fix the common choices.

pub mod algebra;
pub mod catalan;
pub mod error;
pub mod iso;
pub mod posets;
pub mod rings;
pub mod verify;

pub use algebra::{
    add_elements, incidence_identity, incidence_product, monoid_product, scale, AlgebraElement, AnyElement, BasisKey,
    BasisKind, CompositionRule, IncidenceElement, MonoidElement,
};
pub use catalan::{catalan_number, enumerate_monoid, CMap, MonoidSampler, MAX_DEGREE};
pub use error::{Error, MapError, Result};
pub use iso::{invert_unipotent, phi, phi_basis, phi_inverse, phi_matrix, RingMatrix, MATRIX_MAX_DEGREE};
pub use posets::{enumerate_pairs, enumerate_subsets, LinextKey, PosetPair, Subset, MAX_N};
pub use rings::{ring_add, ring_mul, ring_neg, Integers, NumRing, Rationals, Ring, RingSpec, RingValue, ZMod};

/// Default bound on the degree `n+1` for enumeration.
pub const DEFAULT_MAX_DEGREE: usize = 14;

pub type IntMonoidElement = MonoidElement<Integers>;
pub type IntIncidenceElement = IncidenceElement<Integers>;
pub type IntMatrix = RingMatrix<Integers>;

pub type ModMonoidElement = MonoidElement<ZMod>;
pub type ModIncidenceElement = IncidenceElement<ZMod>;
pub type ModMatrix = RingMatrix<ZMod>;

pub type RatMonoidElement = MonoidElement<Rationals>;
pub type RatIncidenceElement = IncidenceElement<Rationals>;
pub type RatMatrix = RingMatrix<Rationals>;

/// Elements and matrices over a ring chosen at runtime.
pub type DynMonoidElement = MonoidElement<RingSpec>;
pub type DynIncidenceElement = IncidenceElement<RingSpec>;
pub type DynMatrix = RingMatrix<RingSpec>;
