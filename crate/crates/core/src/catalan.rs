//! The Catalan monoid `C_{n+1}`: order-preserving, weakly increasing
//! self-maps of `[n+1]` under composition.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, MapError, Result};
use crate::posets::{enumerate_subsets, PosetPair, Subset, MAX_N};

/// Largest supported degree `n+1`, so that `n` stays within [`MAX_N`].
pub const MAX_DEGREE: usize = MAX_N + 1;

/// An element of `C_{n+1}`, stored as its 1-based image sequence
/// `[f(1), ..., f(n+1)]`.
///
/// The derived order is lexicographic on the image sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<u32>")]
pub struct CMap {
    images: Vec<u32>,
}

impl CMap {
    /// Validates an image sequence. The degree is its length.
    pub fn new(images: &[i64]) -> Result<Self, MapError> {
        let degree = images.len();
        if degree == 0 {
            return Err(MapError::Empty);
        }
        if degree > MAX_DEGREE {
            return Err(MapError::DegreeTooLarge {
                degree,
                max: MAX_DEGREE,
            });
        }
        let mut out = Vec::with_capacity(degree);
        for (k, &v) in images.iter().enumerate() {
            let index = k + 1;
            if v < 1 || v as usize > degree {
                return Err(MapError::OutOfRange {
                    index,
                    value: v,
                    degree,
                });
            }
            let v = v as u32;
            if let Some(&prev_value) = out.last() {
                if prev_value > v {
                    return Err(MapError::NotOrderPreserving {
                        index,
                        prev_value,
                        value: v,
                    });
                }
            }
            if (v as usize) < index {
                return Err(MapError::NotIncreasing { index, value: v });
            }
            out.push(v);
        }
        Ok(CMap { images: out })
    }

    /// Parses the comma-separated CLI form, e.g. `2,3,3`.
    pub fn parse(s: &str) -> Result<Self> {
        let images = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(format!("bad image list {s:?}: {e}")))?;
        Ok(Self::new(&images)?)
    }

    pub fn identity(degree: usize) -> Self {
        assert!((1..=MAX_DEGREE).contains(&degree), "degree {degree} out of range");
        CMap {
            images: (1..=degree as u32).collect(),
        }
    }

    /// `n + 1`.
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// `n`, the ambient size of the matching poset `P_n`.
    pub fn n(&self) -> usize {
        self.images.len() - 1
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `f(i)` for `i` in `[1, n+1]`.
    pub fn apply(&self, i: u32) -> u32 {
        self.images[i as usize - 1]
    }

    /// `fg = f ∘ g`, i.e. `i ↦ f(g(i))`.
    pub fn compose(&self, g: &CMap) -> Result<CMap> {
        if self.degree() != g.degree() {
            return Err(Error::usage(format!(
                "cannot compose maps of degree {} and {}",
                self.degree(),
                g.degree()
            )));
        }
        Ok(self.compose_unchecked(g))
    }

    pub(crate) fn compose_unchecked(&self, g: &CMap) -> CMap {
        CMap {
            images: g.images.iter().map(|&j| self.apply(j)).collect(),
        }
    }

    /// `f(S)` for `S ⊆ [n+1]`, as a subset of `[n+1]`.
    ///
    /// `S` may be given inside `[n]` or `[n+1]`.
    pub fn image_of_set(&self, s: &Subset) -> Result<Subset> {
        if s.ambient() != self.n() && s.ambient() != self.degree() {
            return Err(Error::usage(format!(
                "subset of [{}] is not a subset of the domain [{}]",
                s.ambient(),
                self.degree()
            )));
        }
        Ok(Subset::raw(self.degree(), self.image_bits(s.bits())))
    }

    fn image_bits(&self, bits: u64) -> u64 {
        let mut rest = bits;
        let mut image = 0u64;
        while rest != 0 {
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            image |= 1 << (self.images[i as usize] - 1);
        }
        image
    }

    /// Whether `S` is a partial cross-section: `n+1 ∉ f(S)` and `f|_S` is
    /// injective.
    pub fn is_pcs(&self, s: &Subset) -> bool {
        if s.bits() >> self.degree() != 0 {
            return false;
        }
        let image = self.image_bits(s.bits());
        image >> self.n() == 0 && image.count_ones() == s.bits().count_ones()
    }

    /// All partial cross-sections, as subsets of `[n]` in linear-extension
    /// order.
    ///
    /// A partial cross-section picks at most one point from each fiber
    /// `f^{-1}(y)` with `y <= n`; that is how they are generated.
    pub fn pcs(&self) -> Vec<Subset> {
        let n = self.n();
        let mut fibers: Vec<u64> = Vec::new();
        for (k, &v) in self.images[..n].iter().enumerate() {
            if v as usize == n + 1 {
                break;
            }
            match fibers.last_mut() {
                Some(last) if self.images[63 - last.leading_zeros() as usize] == v => {
                    *last |= 1 << k;
                }
                _ => fibers.push(1 << k),
            }
        }
        let mut out = vec![0u64];
        for fiber in fibers {
            let len = out.len();
            let mut rest = fiber;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest &= rest - 1;
                for t in 0..len {
                    out.push(out[t] | bit);
                }
            }
        }
        let mut sets: Vec<Subset> = out.into_iter().map(|b| Subset::raw(n, b)).collect();
        sets.sort_unstable();
        sets
    }

    /// The pair `(X, Y)` with `f = f_{X,Y}`: `Y = f([n+1]) \ {n+1}` and `X`
    /// holds the largest point of each fiber over `Y`.
    pub fn to_pair(&self) -> PosetPair {
        let n = self.n();
        let (mut x, mut y) = (0u64, 0u64);
        for i in 0..n {
            let v = self.images[i];
            if v as usize != n + 1 && self.images[i + 1] != v {
                x |= 1 << i;
                y |= 1 << (v - 1);
            }
        }
        PosetPair::new_unchecked(Subset::raw(n, x), Subset::raw(n, y))
    }

    /// `f_{X,Y}` of degree `n+1`, where `n` is the ambient size of `X`, `Y`.
    ///
    /// `f(i) = y_j` for `x_{j-1} < i <= x_j` (with `x_0 = 0`) and `f(i) = n+1`
    /// for `i > x_k`.
    pub fn from_pair(x: &Subset, y: &Subset) -> Result<CMap> {
        if !x.leq(y)? {
            return Err(Error::domain(format!("{x} <= {y} fails in P_{}", x.ambient())));
        }
        Ok(Self::from_poset_pair(&PosetPair::new_unchecked(*x, *y)))
    }

    pub fn from_poset_pair(p: &PosetPair) -> CMap {
        let n = p.n();
        let mut images = Vec::with_capacity(n + 1);
        for (xj, yj) in p.x().iter().zip(p.y().iter()) {
            images.resize(xj as usize, yj);
        }
        images.resize(n + 1, n as u32 + 1);
        CMap { images }
    }
}

impl fmt::Display for CMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for CMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl TryFrom<Vec<i64>> for CMap {
    type Error = MapError;

    fn try_from(images: Vec<i64>) -> Result<Self, MapError> {
        CMap::new(&images)
    }
}

impl From<CMap> for Vec<u32> {
    fn from(f: CMap) -> Self {
        f.images
    }
}

fn check_degree(degree: usize, max_degree: usize) -> Result<()> {
    if degree == 0 {
        return Err(Error::usage("degree must be at least 1"));
    }
    let bound = max_degree.min(MAX_DEGREE);
    if degree > bound {
        return Err(Error::Resource {
            what: "n+1",
            requested: degree,
            bound,
        });
    }
    Ok(())
}

/// Every element of `C_degree`, in lexicographic order of image sequences.
///
/// Built by backtracking over valid prefixes; `max_degree` bounds `degree`.
pub fn enumerate_monoid(degree: usize, max_degree: usize) -> Result<Vec<CMap>> {
    check_degree(degree, max_degree)?;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(degree);
    extend(&mut prefix, degree as u32, &mut out);
    Ok(out)
}

fn extend(prefix: &mut Vec<u32>, degree: u32, out: &mut Vec<CMap>) {
    let i = prefix.len() as u32 + 1;
    if i > degree {
        out.push(CMap { images: prefix.clone() });
        return;
    }
    let lo = prefix.last().copied().unwrap_or(1).max(i);
    for v in lo..=degree {
        prefix.push(v);
        extend(prefix, degree, out);
        prefix.pop();
    }
}

/// `Catalan(k)`, by the recurrence `C(k) = Σ C(i) C(k-1-i)`. Exact for
/// `k <= 66`.
pub fn catalan_number(k: usize) -> u128 {
    let mut c = vec![1u128; k + 1];
    for m in 1..=k {
        c[m] = (0..m).map(|i| c[i] * c[m - 1 - i]).sum();
    }
    c[k]
}

/// Draws elements of `C_degree` uniformly at random.
///
/// Images are chosen left to right, each value weighted by the number of
/// valid completions of the prefix, so every element has probability
/// `1 / Catalan(degree)`. Works for every degree up to [`MAX_DEGREE`]
/// without enumerating the monoid.
#[derive(Debug, Clone)]
pub struct MonoidSampler {
    degree: usize,
    // completions[i][v]: completions of a prefix ending with f(i+1) = v+1.
    completions: Vec<Vec<u128>>,
}

impl MonoidSampler {
    pub fn new(degree: usize) -> Result<Self> {
        check_degree(degree, MAX_DEGREE)?;
        let d = degree;
        let mut completions = vec![vec![0u128; d]; d];
        completions[d - 1][d - 1] = 1;
        for i in (0..d - 1).rev() {
            // Position i+1 takes a value w with w >= v and w >= i+1 (0-based).
            let mut suffix = 0u128;
            for v in (0..d).rev() {
                if v > i {
                    suffix += completions[i + 1][v];
                }
                if v >= i {
                    completions[i][v] = suffix;
                }
            }
        }
        Ok(MonoidSampler { degree, completions })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `|C_degree|`.
    pub fn total(&self) -> u128 {
        self.completions[0].iter().sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CMap {
        let d = self.degree;
        let mut images = Vec::with_capacity(d);
        let mut lo = 0usize;
        for i in 0..d {
            lo = lo.max(i);
            let weights = &self.completions[i][lo..];
            let total: u128 = weights.iter().sum();
            let mut r = rng.gen_range(0..total);
            let mut pick = lo;
            for (off, &w) in weights.iter().enumerate() {
                if r < w {
                    pick = lo + off;
                    break;
                }
                r -= w;
            }
            images.push(pick as u32 + 1);
            lo = pick;
        }
        CMap { images }
    }
}

/// All subsets of `[n]` (not only partial cross-sections).
pub(crate) fn all_subsets_of_domain(f: &CMap) -> Vec<Subset> {
    enumerate_subsets(f.n()).expect("degree already bounded")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(images: &[i64]) -> CMap {
        CMap::new(images).unwrap()
    }

    fn s(n: usize, members: &[u32]) -> Subset {
        Subset::from_members(n, members).unwrap()
    }

    #[test]
    fn make_cmap_examples() {
        assert_eq!(m(&[1, 2, 3]), CMap::identity(3));
        assert_eq!(m(&[2, 2, 3]).images(), &[2, 2, 3]);
        assert_eq!(
            CMap::new(&[2, 1, 3]),
            Err(MapError::NotOrderPreserving {
                index: 2,
                prev_value: 2,
                value: 1
            })
        );
    }

    #[test]
    fn make_cmap_errors_name_the_index() {
        assert_eq!(
            CMap::new(&[2, 4, 3]),
            Err(MapError::OutOfRange {
                index: 2,
                value: 4,
                degree: 3
            })
        );
        assert_eq!(
            CMap::new(&[0, 2, 3]),
            Err(MapError::OutOfRange {
                index: 1,
                value: 0,
                degree: 3
            })
        );
        assert_eq!(
            CMap::new(&[1, 1, 3]),
            Err(MapError::NotIncreasing { index: 2, value: 1 })
        );
        assert_eq!(CMap::new(&[]), Err(MapError::Empty));
        let msg = CMap::new(&[2, 1, 3]).unwrap_err().to_string();
        assert!(msg.contains("f(1) = 2 > f(2) = 1"), "{msg}");
    }

    #[test]
    fn last_image_is_forced() {
        assert!(matches!(
            CMap::new(&[1, 1]),
            Err(MapError::NotIncreasing { index: 2, .. })
        ));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(m(&[2, 2, 3]).compose(&m(&[2, 3, 3])).unwrap(), m(&[2, 3, 3]));
        assert_eq!(m(&[2, 3, 3]).compose(&m(&[2, 3, 3])).unwrap(), m(&[3, 3, 3]));
        let f = m(&[2, 2, 4, 4]);
        assert_eq!(CMap::identity(4).compose(&f).unwrap(), f);
        assert!(matches!(f.compose(&CMap::identity(3)), Err(Error::Usage(_))));
    }

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate_monoid(1, 14).unwrap(), vec![m(&[1])]);
        assert_eq!(enumerate_monoid(2, 14).unwrap(), vec![m(&[1, 2]), m(&[2, 2])]);
        assert_eq!(enumerate_monoid(5, 14).unwrap().len(), 42);
        assert!(matches!(enumerate_monoid(13, 12), Err(Error::Resource { .. })));
        assert!(enumerate_monoid(0, 12).is_err());
    }

    #[test]
    fn enumerate_matches_filtered_brute_force() {
        for d in 1..=5usize {
            let mut brute = Vec::new();
            let total = d.pow(d as u32);
            for code in 0..total {
                let mut c = code;
                let images: Vec<i64> = (0..d)
                    .map(|_| {
                        let v = c % d;
                        c /= d;
                        v as i64 + 1
                    })
                    .collect();
                let op = images.windows(2).all(|w| w[0] <= w[1]);
                let inc = images.iter().enumerate().all(|(i, &v)| v > i as i64);
                if op && inc {
                    brute.push(m(&images));
                }
            }
            brute.sort();
            assert_eq!(enumerate_monoid(d, 14).unwrap(), brute, "degree {d}");
        }
    }

    #[test]
    fn from_pair_examples() {
        assert_eq!(CMap::from_pair(&s(2, &[]), &s(2, &[])).unwrap(), m(&[3, 3, 3]));
        assert_eq!(CMap::from_pair(&s(2, &[1, 2]), &s(2, &[1, 2])).unwrap(), m(&[1, 2, 3]));
        assert_eq!(CMap::from_pair(&s(2, &[1]), &s(2, &[2])).unwrap(), m(&[2, 3, 3]));
        assert!(matches!(
            CMap::from_pair(&s(2, &[2]), &s(2, &[1])),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            CMap::from_pair(&s(2, &[1]), &s(2, &[1, 2])),
            Err(Error::Domain(_))
        ));
        assert_eq!(CMap::from_pair(&s(0, &[]), &s(0, &[])).unwrap(), CMap::identity(1));
    }

    #[test]
    fn to_pair_examples() {
        let pair = |f: &[i64]| {
            let p = m(f).to_pair();
            (p.x().members(), p.y().members())
        };
        assert_eq!(pair(&[3, 3, 3]), (vec![], vec![]));
        assert_eq!(pair(&[2, 3, 3]), (vec![1], vec![2]));
        assert_eq!(pair(&[2, 2, 3]), (vec![2], vec![2]));
        assert_eq!(pair(&[1]), (vec![], vec![]));
    }

    #[test]
    fn image_of_set_examples() {
        assert_eq!(m(&[2, 3, 3]).image_of_set(&s(2, &[1])).unwrap().members(), vec![2]);
        assert!(m(&[2, 3, 3]).image_of_set(&s(2, &[])).unwrap().is_empty());
        assert_eq!(m(&[2, 2, 3]).image_of_set(&s(2, &[1, 2])).unwrap().members(), vec![2]);
        assert_eq!(
            m(&[2, 2, 3]).image_of_set(&s(3, &[1, 3])).unwrap().members(),
            vec![2, 3]
        );
        assert!(m(&[2, 2, 3]).image_of_set(&s(5, &[1])).is_err());
    }

    #[test]
    fn pcs_examples() {
        let members = |f: &[i64]| m(f).pcs().iter().map(Subset::members).collect::<Vec<_>>();
        assert_eq!(members(&[2, 2, 3]), vec![vec![], vec![1], vec![2]]);
        assert_eq!(members(&[1, 2, 3]), vec![vec![], vec![1], vec![2], vec![1, 2]]);
        assert_eq!(members(&[3, 3, 3]), vec![Vec::<u32>::new()]);
        assert_eq!(members(&[1]), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn pcs_matches_definition() {
        for d in 1..=7 {
            for f in enumerate_monoid(d, 14).unwrap() {
                let brute: Vec<Subset> = all_subsets_of_domain(&f)
                    .into_iter()
                    .filter(|s| {
                        let img = f.image_of_set(s).unwrap();
                        !img.contains(d as u32) && img.len() == s.len()
                    })
                    .collect();
                assert_eq!(f.pcs(), brute, "{f}");
                assert!(brute.iter().all(|s| f.is_pcs(s)));
            }
        }
    }

    #[test]
    fn subsets_containing_top_are_never_pcs() {
        let f = CMap::identity(3);
        assert!(!f.is_pcs(&s(3, &[3])));
        assert!(!f.is_pcs(&s(3, &[1, 3])));
        assert!(f.is_pcs(&s(3, &[1, 2])));
    }

    #[test]
    fn catalan_numbers() {
        let expected = [1u128, 1, 2, 5, 14, 42, 132, 429, 1430, 4862];
        for (k, &c) in expected.iter().enumerate() {
            assert_eq!(catalan_number(k), c);
        }
    }

    #[test]
    fn sampler_counts_and_validity() {
        for d in 1..=10 {
            assert_eq!(MonoidSampler::new(d).unwrap().total(), catalan_number(d));
        }
        assert_eq!(MonoidSampler::new(63).unwrap().total(), catalan_number(63));
        let sampler = MonoidSampler::new(40).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let f = sampler.sample(&mut rng);
            let images: Vec<i64> = f.images().iter().map(|&v| v as i64).collect();
            assert_eq!(CMap::new(&images).unwrap(), f);
        }
    }

    #[test]
    fn sampler_is_roughly_uniform() {
        let sampler = MonoidSampler::new(4).unwrap();
        let all = enumerate_monoid(4, 14).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws = 14_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            *counts.entry(sampler.sample(&mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), all.len());
        for f in &all {
            let c = counts[f];
            assert!((800..1200).contains(&c), "{f}: {c}");
        }
    }

    #[test]
    fn json_form() {
        let f = m(&[2, 3, 3]);
        assert_eq!(serde_json::to_string(&f).unwrap(), "[2,3,3]");
        assert_eq!(serde_json::from_str::<CMap>("[2,3,3]").unwrap(), f);
        assert!(serde_json::from_str::<CMap>("[2,1,3]").is_err());
        assert_eq!(CMap::parse("2, 3,3").unwrap(), f);
        assert!(CMap::parse("2,x,3").is_err());
    }
}
