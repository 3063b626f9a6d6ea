//! The algebra isomorphism `φ: k C_{n+1} -> I(P_n, k)`,
//! `φ(f) = Σ_{S ∈ PCS(f)} (S, f(S))`, and its inverse.
//!
//! Both bases are ordered by [`enumerate_pairs`]; a monoid element `f`
//! sits at the position of `to_pair(f)`. In these bases the matrix of `φ`
//! is 0/1 and unipotent upper triangular, so it is inverted by
//! back-substitution without any division, over every ring.

use std::collections::HashMap;
use std::io;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;

use crate::algebra::{IncidenceElement, MonoidElement};
use crate::catalan::CMap;
use crate::error::{Error, Result};
use crate::posets::{enumerate_pairs, PosetPair, Subset};
use crate::rings::{Integers, Ring};

/// Largest degree `n+1` for which dense matrices of `φ` are built
/// (`Catalan(8) = 1430` rows).
pub const MATRIX_MAX_DEGREE: usize = 8;

/// `φ(f)` for a single monoid element.
pub fn phi_basis<R: Ring>(f: &CMap, ring: R) -> IncidenceElement<R> {
    let n = f.n();
    let one = ring.one();
    let mut out = IncidenceElement::zero(ring, n);
    for s in f.pcs() {
        out.accumulate(pcs_pair(f, s), &one);
    }
    out
}

/// `(S, f(S))` for a partial cross-section `S`; `S <= f(S)` always holds.
fn pcs_pair(f: &CMap, s: Subset) -> PosetPair {
    let image = f.image_of_set(&s).expect("S lies in [n]");
    PosetPair::new_unchecked(s, Subset::raw(f.n(), image.bits()))
}

/// The linear extension of [`phi_basis`].
pub fn phi<R: Ring>(a: &MonoidElement<R>) -> IncidenceElement<R> {
    let ring = a.ring().clone();
    let mut out = IncidenceElement::zero(ring.clone(), a.size() - 1);
    for (f, c) in a.terms() {
        for s in f.pcs() {
            out.accumulate(pcs_pair(f, s), c);
        }
    }
    out
}

/// A dense square matrix over `R` whose rows and columns are both labelled
/// by the ordered pair basis of `P_n`.
#[derive(Clone, PartialEq)]
pub struct RingMatrix<R: Ring> {
    ring: R,
    labels: Arc<[PosetPair]>,
    entries: Vec<R::Elem>,
}

impl<R: Ring> std::fmt::Debug for RingMatrix<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = self.row(i).iter().map(|c| self.ring.format_elem(c)).collect();
            writeln!(f, "{}: {}", self.labels[i], row.join(" "))?;
        }
        Ok(())
    }
}

impl<R: Ring> RingMatrix<R> {
    pub fn zeros(ring: R, labels: Arc<[PosetPair]>) -> Self {
        let d = labels.len();
        let entries = vec![ring.zero(); d * d];
        RingMatrix { ring, labels, entries }
    }

    pub fn identity(ring: R, labels: Arc<[PosetPair]>) -> Self {
        let mut m = Self::zeros(ring, labels);
        for i in 0..m.dim() {
            m.set(i, i, m.ring.one());
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(ring: R, labels: Arc<[PosetPair]>, entries: Vec<R::Elem>) -> Result<Self> {
        if entries.len() != labels.len() * labels.len() {
            return Err(Error::usage(format!(
                "{} entries do not fill a {}x{} matrix",
                entries.len(),
                labels.len(),
                labels.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|c| !ring.contains(c)) {
            return Err(Error::usage(format!("entry {bad:?} is not in {}", ring.spec())));
        }
        Ok(RingMatrix { ring, labels, entries })
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[PosetPair] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> &R::Elem {
        &self.entries[i * self.dim() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, c: R::Elem) {
        let d = self.dim();
        self.entries[i * d + j] = c;
    }

    pub fn row(&self, i: usize) -> &[R::Elem] {
        let d = self.dim();
        &self.entries[i * d..(i + 1) * d]
    }

    /// Nonzero `(column, entry)` pairs of row `i`.
    fn sparse_row(&self, i: usize) -> Vec<(usize, &R::Elem)> {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.ring.is_zero(c))
            .collect()
    }

    pub fn nonzeros(&self) -> usize {
        self.entries.iter().filter(|c| !self.ring.is_zero(c)).count()
    }

    /// Matrix product, skipping zero entries on both sides.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring || self.labels != other.labels {
            return Err(Error::usage("matrices over different rings or bases"));
        }
        let d = self.dim();
        let right_rows: Vec<_> = (0..d).map(|k| other.sparse_row(k)).collect();
        let mut out = Self::zeros(self.ring.clone(), self.labels.clone());
        for i in 0..d {
            let out_row = &mut out.entries[i * d..(i + 1) * d];
            for (k, a) in self.sparse_row(i) {
                for &(j, b) in &right_rows[k] {
                    out_row[j] = self.ring.add(&out_row[j], &self.ring.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        let one = self.ring.one();
        (0..self.dim()).all(|i| {
            self.row(i)
                .iter()
                .enumerate()
                .all(|(j, c)| if i == j { *c == one } else { self.ring.is_zero(c) })
        })
    }

    /// First position violating "upper triangular with unit diagonal".
    pub fn unipotent_violation(&self) -> Option<(usize, usize)> {
        let one = self.ring.one();
        for i in 0..self.dim() {
            for (j, c) in self.row(i).iter().enumerate() {
                let ok = match i.cmp(&j) {
                    std::cmp::Ordering::Equal => *c == one,
                    std::cmp::Ordering::Greater => self.ring.is_zero(c),
                    std::cmp::Ordering::Less => true,
                };
                if !ok {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Applies a ring map entrywise.
    pub fn map<S: Ring>(&self, target: S, lift: impl Fn(&R::Elem) -> S::Elem) -> RingMatrix<S> {
        RingMatrix {
            entries: self.entries.iter().map(&lift).collect(),
            ring: target,
            labels: self.labels.clone(),
        }
    }

    /// CSV with a header row of pair labels and the row label in the first
    /// column.
    pub fn write_csv<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().map(|p| p.to_string()));
        w.write_record(&header)?;
        for i in 0..self.dim() {
            let mut record = vec![self.labels[i].to_string()];
            record.extend(self.row(i).iter().map(|c| self.ring.format_elem(c)));
            w.write_record(&record)?;
        }
        w.flush()
    }
}

/// The matrix of `φ`: column `j` holds the coordinates of `φ(f_{X,Y})` for
/// the `j`-th pair `(X, Y)`, rows are the same pairs.
pub fn phi_matrix<R: Ring>(n: usize, ring: R) -> Result<RingMatrix<R>> {
    let labels: Arc<[PosetPair]> = enumerate_pairs(n, MATRIX_MAX_DEGREE)?.into();
    let index = label_index(&labels);
    let one = ring.one();
    let mut m = RingMatrix::zeros(ring, labels.clone());
    for (j, p) in labels.iter().enumerate() {
        let f = CMap::from_poset_pair(p);
        for s in f.pcs() {
            m.set(index[&pcs_pair(&f, s)], j, one.clone());
        }
    }
    Ok(m)
}

fn label_index(labels: &[PosetPair]) -> HashMap<PosetPair, usize> {
    labels.iter().enumerate().map(|(i, p)| (*p, i)).collect()
}

/// Inverse of an upper triangular matrix with unit diagonal, by
/// back-substitution using only addition and multiplication.
pub fn invert_unipotent<R: Ring>(m: &RingMatrix<R>) -> Result<RingMatrix<R>> {
    if let Some((i, j)) = m.unipotent_violation() {
        return Err(Error::domain(format!(
            "matrix is not unipotent upper triangular at ({}, {})",
            m.labels[i], m.labels[j]
        )));
    }
    let ring = &m.ring;
    let d = m.dim();
    let mut inv = RingMatrix::identity(ring.clone(), m.labels.clone());
    // Row i of M^{-1} is e_i - Σ_{k>i} M[i][k] · (row k of M^{-1}); rows
    // below i are final by the time row i is computed.
    for i in (0..d).rev() {
        let (done_above, done_below) = inv.entries.split_at_mut((i + 1) * d);
        let row_i = &mut done_above[i * d..];
        for (k, a) in m.sparse_row(i) {
            if k <= i {
                continue;
            }
            let row_k = &done_below[(k - i - 1) * d..(k - i) * d];
            for j in k..d {
                if !ring.is_zero(&row_k[j]) {
                    row_i[j] = ring.sub(&row_i[j], &ring.mul(a, &row_k[j]));
                }
            }
        }
    }
    Ok(inv)
}

type InverseCache = Mutex<HashMap<usize, Arc<RingMatrix<Integers>>>>;

/// `φ`'s inverse matrix over `Z`, computed once per `n`.
///
/// Concurrent first use may compute it twice; the first stored copy wins.
pub fn integer_inverse(n: usize) -> Result<Arc<RingMatrix<Integers>>> {
    static CACHE: OnceLock<InverseCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(m) = cache.lock().expect("cache poisoned").get(&n) {
        return Ok(m.clone());
    }
    let inv = Arc::new(invert_unipotent(&phi_matrix(n, Integers::new())?)?);
    Ok(cache.lock().expect("cache poisoned").entry(n).or_insert(inv).clone())
}

/// The inverse of `φ` over `ring`: the image of the integer inverse under
/// `Z -> ring`.
pub fn inverse_matrix<R: Ring>(n: usize, ring: R) -> Result<RingMatrix<R>> {
    let inv = integer_inverse(n)?;
    let target = ring.clone();
    Ok(inv.map(ring, |c: &BigInt| target.from_integer(c)))
}

/// The unique `a` with `φ(a) = b`.
pub fn phi_inverse<R: Ring>(b: &IncidenceElement<R>) -> Result<MonoidElement<R>> {
    let n = b.size();
    let inv = integer_inverse(n)?;
    let index = label_index(inv.labels());
    let ring = b.ring().clone();
    let mut out = MonoidElement::zero(ring.clone(), n + 1);
    let mut coords: Vec<Option<R::Elem>> = vec![None; inv.dim()];
    for (p, c) in b.terms() {
        let j = index[p];
        for (i, slot) in coords.iter_mut().enumerate().take(j + 1) {
            let entry = inv.get(i, j);
            if entry.sign() == num_bigint::Sign::NoSign {
                continue;
            }
            let term = ring.mul(&ring.from_integer(entry), c);
            *slot = Some(match slot.take() {
                Some(acc) => ring.add(&acc, &term),
                None => term,
            });
        }
    }
    for (i, c) in coords.into_iter().enumerate() {
        if let Some(c) = c {
            out.accumulate(CMap::from_poset_pair(&inv.labels()[i]), &c);
        }
    }
    Ok(out)
}
