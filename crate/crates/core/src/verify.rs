//! Batch verification of the monoid, poset, algebra, and isomorphism
//! invariants at one size, with machine-readable reports.
//!
//! Every failing check records its first counterexample as JSON. A
//! counterexample is replayed with [`replay`], which reruns exactly that case.
//! Case checks fan out over rayon; tallies are merged in input order, so a
//! report depends only on its inputs (wall times aside).

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{incidence_identity, CompositionRule, IncidenceElement, MonoidElement};
use crate::catalan::{all_subsets_of_domain, catalan_number, enumerate_monoid, CMap, MonoidSampler};
use crate::error::{Error, Result};
use crate::iso::{invert_unipotent, phi, phi_basis, phi_inverse, phi_matrix, MATRIX_MAX_DEGREE};
use crate::posets::{enumerate_pairs, enumerate_subsets, PairJson, PosetPair, Subset};
use crate::rings::{Integers, Rationals, Ring, RingSpec, ZMod};
use crate::DEFAULT_MAX_DEGREE;

/// Default largest degree verified exhaustively (`Catalan(7) = 429` maps).
pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 7;

/// Triple checks run exhaustively up to this many triples, else on
/// [`TRIPLE_SAMPLES`] seeded draws.
const TRIPLE_LIMIT: u64 = 2_500_000;
const TRIPLE_SAMPLES: usize = 100_000;
/// Per-map subset loops run over all of `2^[n]` up to this size.
const SUBSET_LIMIT: u64 = 4096;
const SUBSET_SAMPLES: usize = 256;
/// Seed for the sampled parts of an exhaustive run.
const EXHAUSTIVE_SEED: u64 = 0;
/// `φ(id)` has `2^n` terms, so randomized runs stop here.
pub const MAX_RANDOMIZED_DEGREE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Randomized { seed: u64, samples: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub mode: Mode,
    /// Incidence product used by the homomorphism check. Anything but
    /// [`CompositionRule::Standard`] is a deliberate mutant.
    pub rule: CompositionRule,
    /// Largest degree accepted in exhaustive mode.
    pub exhaustive_bound: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: Mode::Exhaustive,
            rule: CompositionRule::Standard,
            exhaustive_bound: DEFAULT_EXHAUSTIVE_BOUND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: String,
    pub inputs: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coverage {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    pub counterexample: Option<Counterexample>,
    pub coverage: Coverage,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    /// Degree `n+1` of the monoid.
    pub n: usize,
    pub ring: RingSpec,
    pub mode: Mode,
    /// How random inputs were drawn, when any were.
    pub sampling: Option<String>,
    pub checks: Vec<CheckReport>,
    /// Checks not run at this size, with the reason.
    pub skipped: Vec<String>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.failures > 0)
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Zeroes the wall times, leaving only the deterministic part.
    pub fn strip_timings(&mut self) {
        for c in &mut self.checks {
            c.wall_ms = 0.0;
        }
    }
}

/// Runs every check at degree `n_plus_1` over `ring`.
pub fn verify_all(n_plus_1: usize, ring: RingSpec, options: VerifyOptions) -> Result<VerifyReport> {
    match ring.validate()? {
        RingSpec::Integers => run(n_plus_1, Integers::new(), options),
        RingSpec::IntegersMod(m) => run(n_plus_1, ZMod::new(m)?, options),
        RingSpec::Rationals => run(n_plus_1, Rationals::new(), options),
    }
}

/// Reruns the single case recorded in `cx`. Returns whether it holds.
pub fn replay(n_plus_1: usize, ring: RingSpec, rule: CompositionRule, cx: &Counterexample) -> Result<bool> {
    match ring.validate()? {
        RingSpec::Integers => Checker::new(n_plus_1, Integers::new(), rule)?.replay(cx),
        RingSpec::IntegersMod(m) => Checker::new(n_plus_1, ZMod::new(m)?, rule)?.replay(cx),
        RingSpec::Rationals => Checker::new(n_plus_1, Rationals::new(), rule)?.replay(cx),
    }
}

#[derive(Default)]
struct Tally {
    cases: u64,
    failures: u64,
    first: Option<Value>,
}

impl Tally {
    fn record(&mut self, ok: bool, inputs: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(inputs());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.failures += other.failures;
        if self.first.is_none() {
            self.first = other.first;
        }
        self
    }
}

fn tally_par<T: Sync>(items: &[T], per_item: impl Fn(&T, &mut Tally) + Sync + Send) -> Tally {
    items
        .par_iter()
        .map(|item| {
            let mut t = Tally::default();
            per_item(item, &mut t);
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::default(), Tally::merge)
}

fn map_json(f: &CMap) -> Value {
    json!(f.images())
}

fn pair_json(p: &PosetPair) -> Value {
    json!({"X": p.x().members(), "Y": p.y().members()})
}

/// Single-case checks. Each returns whether the case holds; bulk runs and
/// replays go through the same functions.
struct Checker<R: Ring> {
    ring: R,
    rule: CompositionRule,
    degree: usize,
}

impl<R: Ring> Checker<R> {
    fn new(degree: usize, ring: R, rule: CompositionRule) -> Result<Self> {
        MonoidSampler::new(degree)?;
        Ok(Checker { ring, rule, degree })
    }

    fn n(&self) -> usize {
        self.degree - 1
    }

    fn e(&self, f: &CMap) -> MonoidElement<R> {
        MonoidElement::basis(self.ring.clone(), f.clone())
    }

    fn closure(&self, f: &CMap, g: &CMap) -> bool {
        let h = f.compose_unchecked(g);
        let images: Vec<i64> = h.images().iter().map(|&v| v as i64).collect();
        CMap::new(&images).is_ok_and(|checked| checked == h)
    }

    fn associativity(&self, f: &CMap, g: &CMap, h: &CMap) -> bool {
        f.compose_unchecked(g).compose_unchecked(h) == f.compose_unchecked(&g.compose_unchecked(h))
    }

    fn map_roundtrip(&self, f: &CMap) -> bool {
        let p = f.to_pair();
        p.x().dominated_by(&p.y()) && CMap::from_poset_pair(&p) == *f
    }

    fn pair_roundtrip(&self, p: &PosetPair) -> bool {
        CMap::from_poset_pair(p).to_pair() == *p
    }

    fn partial_orders(&self, x: &Subset, y: &Subset, z: &Subset) -> bool {
        let reflexive = x.dominated_by(x) && x.refines(x);
        let antisymmetric = x == y || !(x.dominated_by(y) && y.dominated_by(x)) && !(x.refines(y) && y.refines(x));
        let transitive = !(x.dominated_by(y) && y.dominated_by(z)) || x.dominated_by(z);
        let transitive_refined = !(x.refines(y) && y.refines(z)) || x.refines(z);
        let coarser = !x.dominated_by(y) || x.refines(y);
        reflexive && antisymmetric && transitive && transitive_refined && coarser
    }

    fn linear_extension(&self, x: &Subset, y: &Subset) -> bool {
        x == y || !x.refines(y) || x.linext_key() < y.linext_key()
    }

    fn pair_order(&self, p: &PosetPair, q: &PosetPair) -> bool {
        p == q || !(p.x().refines(&q.x()) && p.y().refines(&q.y())) || p < q
    }

    /// For `S ∈ PCS(f)`, `f = f_{X,Y}`: `S ⪯ X`, `S <= f(S)`, `f(S) ⊆ Y`, and
    /// `X ∈ PCS(f)`.
    fn pcs_basic_facts(&self, f: &CMap, s: &Subset) -> bool {
        if !f.is_pcs(s) {
            return false;
        }
        let p = f.to_pair();
        let image = Subset::raw(self.n(), f.image_of_set(s).expect("S inside [n]").bits());
        s.refines(&p.x()) && s.dominated_by(&image) && image.is_subset_of(&p.y()) && f.is_pcs(&p.x())
    }

    /// `S ∈ PCS(fg)` iff `S ∈ PCS(g)` and `g(S) ∈ PCS(f)`.
    fn pcs_product_rule(&self, f: &CMap, g: &CMap, s: &Subset) -> bool {
        let fg = f.compose_unchecked(g);
        let gs = g.image_of_set(s).expect("S inside [n]");
        fg.is_pcs(s) == (g.is_pcs(s) && f.is_pcs(&gs))
    }

    fn monoid_laws(&self, f: &CMap, g: &CMap, h: &CMap) -> bool {
        let (ef, eg, eh) = (self.e(f), self.e(g), self.e(h));
        let fg = ef.mul(&eg).expect("same size");
        let single = fg.len() == 1 && fg.coeff(&f.compose_unchecked(g)) == self.ring.one();
        let assoc = fg.mul(&eh).ok() == eg.mul(&eh).and_then(|gh| ef.mul(&gh)).ok();
        let sum = ef.add(&eg).expect("same size");
        let right = sum.mul(&eh).ok() == ef.mul(&eh).and_then(|a| a.add(&eg.mul(&eh)?)).ok();
        let left = eh.mul(&sum).ok() == eh.mul(&ef).and_then(|a| a.add(&eh.mul(&eg)?)).ok();
        single && assoc && right && left
    }

    fn incidence_laws(&self, p: &PosetPair, q: &PosetPair, r: &PosetPair) -> bool {
        let b = |x: &PosetPair| IncidenceElement::basis(self.ring.clone(), *x);
        let (ep, eq, er) = (b(p), b(q), b(r));
        let pq = ep.mul(&eq).expect("same size");
        let at_most_one = pq.len() <= 1;
        let assoc = pq.mul(&er).ok() == eq.mul(&er).and_then(|qr| ep.mul(&qr)).ok();
        let sum = ep.add(&eq).expect("same size");
        let right = sum.mul(&er).ok() == ep.mul(&er).and_then(|a| a.add(&eq.mul(&er)?)).ok();
        at_most_one && assoc && right
    }

    fn units(&self, f: &CMap) -> bool {
        let one = MonoidElement::one(self.ring.clone(), self.degree);
        let ef = self.e(f);
        let id = incidence_identity(self.n(), self.ring.clone()).expect("n bounded");
        let pf = phi_basis(f, self.ring.clone());
        one.mul(&ef).ok().as_ref() == Some(&ef)
            && ef.mul(&one).ok().as_ref() == Some(&ef)
            && id.mul(&pf).ok().as_ref() == Some(&pf)
            && pf.mul(&id).ok().as_ref() == Some(&pf)
    }

    fn homomorphism_of(
        &self,
        phi_fg: &IncidenceElement<R>,
        phi_f: &IncidenceElement<R>,
        phi_g: &IncidenceElement<R>,
    ) -> bool {
        phi_f.mul_with_rule(phi_g, self.rule).ok().as_ref() == Some(phi_fg)
    }

    fn homomorphism(&self, f: &CMap, g: &CMap) -> bool {
        let r = || self.ring.clone();
        self.homomorphism_of(
            &phi_basis(&f.compose_unchecked(g), r()),
            &phi_basis(f, r()),
            &phi_basis(g, r()),
        )
    }

    /// `φ(f_{X,Y}) = (X,Y) + Σ (U,V)` with `U ≺ X` strictly and `V ⪯ Y`, all
    /// coefficients 1.
    fn triangularity(&self, f: &CMap) -> bool {
        let lead = f.to_pair();
        let image = phi_basis(f, self.ring.clone());
        let one = self.ring.one();
        image.coeff(&lead) == one
            && image.terms().all(|(p, c)| {
                *c == one && (*p == lead || (p.x() != lead.x() && p.x().refines(&lead.x()) && p.y().refines(&lead.y())))
            })
    }

    fn roundtrip(&self, f: &CMap) -> bool {
        let ef = self.e(f);
        let back = phi_inverse(&phi(&ef));
        let lead = IncidenceElement::basis(self.ring.clone(), f.to_pair());
        let forth = phi_inverse(&lead).map(|a| phi(&a));
        back.ok().as_ref() == Some(&ef) && forth.ok().as_ref() == Some(&lead)
    }

    fn cardinality(&self) -> bool {
        match enumerate_monoid(self.degree, DEFAULT_MAX_DEGREE) {
            Ok(all) => all.len() as u128 == catalan_number(self.degree),
            Err(_) => MonoidSampler::new(self.degree).is_ok_and(|s| s.total() == catalan_number(self.degree)),
        }
    }

    fn pair_enumeration(&self) -> bool {
        let Ok(pairs) = enumerate_pairs(self.n(), DEFAULT_MAX_DEGREE) else {
            return false;
        };
        pairs.len() as u128 == catalan_number(self.degree)
            && pairs.windows(2).all(|w| w[0] < w[1])
            && pairs.iter().all(|p| p.x().dominated_by(&p.y()))
    }

    fn matrix(&self) -> bool {
        let Ok(m) = phi_matrix(self.n(), self.ring.clone()) else {
            return false;
        };
        let zero_one = (0..m.dim()).all(|i| m.row(i).iter().all(|c| self.ring.is_zero(c) || *c == self.ring.one()));
        // The inverse is computed over Z, where M·M^{-1} = I is the strongest
        // statement, and separately over the ring itself.
        let int_ok = phi_matrix(self.n(), Integers::new())
            .and_then(|mz| {
                Ok(invert_unipotent(&mz)?.mul(&mz)?.is_identity() && mz.mul(&invert_unipotent(&mz)?)?.is_identity())
            })
            .unwrap_or(false);
        let ring_ok = invert_unipotent(&m)
            .and_then(|inv| Ok(m.mul(&inv)?.is_identity() && inv.mul(&m)?.is_identity()))
            .unwrap_or(false);
        zero_one && m.unipotent_violation().is_none() && int_ok && ring_ok
    }

    fn unit_preservation(&self) -> bool {
        let one = MonoidElement::one(self.ring.clone(), self.degree);
        incidence_identity(self.n(), self.ring.clone()).is_ok_and(|id| phi(&one) == id)
    }

    fn replay(&self, cx: &Counterexample) -> Result<bool> {
        let v = &cx.inputs;
        let map = |key: &str| -> Result<CMap> {
            let f: CMap = serde_json::from_value(v.get(key).cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::parse(format!("input {key:?}: {e}")))?;
            if f.degree() != self.degree {
                return Err(Error::usage(format!(
                    "input {key:?} has degree {}, expected {}",
                    f.degree(),
                    self.degree
                )));
            }
            Ok(f)
        };
        let subset = |key: &str| -> Result<Subset> {
            let members: Vec<u32> = serde_json::from_value(v.get(key).cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::parse(format!("input {key:?}: {e}")))?;
            Subset::from_members(self.n(), &members)
        };
        let pair = |key: &str| -> Result<PosetPair> {
            let p: PairJson = serde_json::from_value(v.get(key).cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::parse(format!("input {key:?}: {e}")))?;
            p.into_pair(self.n())
        };
        Ok(match cx.check.as_str() {
            "monoid.cardinality" => self.cardinality(),
            "monoid.closure" => self.closure(&map("f")?, &map("g")?),
            "monoid.associativity" => self.associativity(&map("f")?, &map("g")?, &map("h")?),
            "bijection.roundtrip" => match v.get("pair") {
                Some(_) => self.pair_roundtrip(&pair("pair")?),
                None => self.map_roundtrip(&map("f")?),
            },
            "posets.pair_enumeration" => self.pair_enumeration(),
            "posets.partial_orders" => self.partial_orders(&subset("X")?, &subset("Y")?, &subset("Z")?),
            "posets.linear_extension" => self.linear_extension(&subset("X")?, &subset("Y")?),
            "posets.pair_order" => self.pair_order(&pair("P")?, &pair("Q")?),
            "pcs.basic_facts" => self.pcs_basic_facts(&map("f")?, &subset("S")?),
            "pcs.product_rule" => self.pcs_product_rule(&map("f")?, &map("g")?, &subset("S")?),
            "algebra.monoid_laws" => self.monoid_laws(&map("f")?, &map("g")?, &map("h")?),
            "algebra.incidence_laws" => self.incidence_laws(&pair("P")?, &pair("Q")?, &pair("R")?),
            "algebra.units" => self.units(&map("f")?),
            "phi.homomorphism" => self.homomorphism(&map("f")?, &map("g")?),
            "phi.triangularity" => self.triangularity(&map("f")?),
            "phi.matrix" => self.matrix(),
            "phi.unit" => self.unit_preservation(),
            "phi.roundtrip" => self.roundtrip(&map("f")?),
            other => return Err(Error::usage(format!("unknown check {other:?}"))),
        })
    }
}

struct Inputs {
    coverage: Coverage,
    /// Maps for per-map checks.
    maps: Vec<CMap>,
    /// `(f, g)` for per-pair checks.
    pairs: Vec<(CMap, CMap)>,
    triple_coverage: Coverage,
    triples: Vec<[CMap; 3]>,
    pair_triples: Vec<[PosetPair; 3]>,
    subset_coverage: Coverage,
    subset_triples: Vec<[Subset; 3]>,
    poset_pairs: Vec<PosetPair>,
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Subset {
    let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    Subset::raw(n, rng.gen::<u64>() & mask)
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    items[rng.gen_range(0..items.len())].clone()
}

fn build_inputs(degree: usize, mode: Mode) -> Result<Inputs> {
    let n = degree - 1;
    let sampler = MonoidSampler::new(degree)?;
    let subset_triples_total = 1u64.checked_shl(3 * n as u32).unwrap_or(u64::MAX);
    match mode {
        Mode::Exhaustive => {
            let maps = enumerate_monoid(degree, DEFAULT_MAX_DEGREE)?;
            let poset_pairs = enumerate_pairs(n, DEFAULT_MAX_DEGREE)?;
            let mut rng = ChaCha8Rng::seed_from_u64(EXHAUSTIVE_SEED);
            let count = maps.len() as u64;
            let (triple_coverage, triples, pair_triples) = if count.pow(3) <= TRIPLE_LIMIT {
                let mut t = Vec::new();
                let mut pt = Vec::new();
                for f in &maps {
                    for g in &maps {
                        for h in &maps {
                            t.push([f.clone(), g.clone(), h.clone()]);
                        }
                    }
                }
                for p in &poset_pairs {
                    for q in &poset_pairs {
                        for r in &poset_pairs {
                            pt.push([*p, *q, *r]);
                        }
                    }
                }
                (Coverage::Exhaustive, t, pt)
            } else {
                let t = (0..TRIPLE_SAMPLES)
                    .map(|_| [pick(&mut rng, &maps), pick(&mut rng, &maps), pick(&mut rng, &maps)])
                    .collect();
                let pt = (0..TRIPLE_SAMPLES)
                    .map(|_| {
                        [
                            pick(&mut rng, &poset_pairs),
                            pick(&mut rng, &poset_pairs),
                            pick(&mut rng, &poset_pairs),
                        ]
                    })
                    .collect();
                (Coverage::Sampled, t, pt)
            };
            let (subset_coverage, subset_triples) = if subset_triples_total <= TRIPLE_LIMIT {
                let all = enumerate_subsets(n)?;
                let mut st = Vec::with_capacity(subset_triples_total as usize);
                for x in &all {
                    for y in &all {
                        for z in &all {
                            st.push([*x, *y, *z]);
                        }
                    }
                }
                (Coverage::Exhaustive, st)
            } else {
                let st = (0..TRIPLE_SAMPLES)
                    .map(|_| {
                        [
                            random_subset(&mut rng, n),
                            random_subset(&mut rng, n),
                            random_subset(&mut rng, n),
                        ]
                    })
                    .collect();
                (Coverage::Sampled, st)
            };
            Ok(Inputs {
                coverage: Coverage::Exhaustive,
                pairs: Vec::new(),
                maps,
                triple_coverage,
                triples,
                pair_triples,
                subset_coverage,
                subset_triples,
                poset_pairs,
            })
        }
        Mode::Randomized { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draw = |rng: &mut ChaCha8Rng| sampler.sample(rng);
            let pairs: Vec<(CMap, CMap)> = (0..samples).map(|_| (draw(&mut rng), draw(&mut rng))).collect();
            let maps = pairs.iter().map(|(f, _)| f.clone()).collect();
            let triples: Vec<[CMap; 3]> = (0..samples)
                .map(|_| [draw(&mut rng), draw(&mut rng), draw(&mut rng)])
                .collect();
            let pair_triples = triples
                .iter()
                .map(|[f, g, h]| [f.to_pair(), g.to_pair(), h.to_pair()])
                .collect();
            let subset_triples = (0..samples)
                .map(|_| {
                    [
                        random_subset(&mut rng, n),
                        random_subset(&mut rng, n),
                        random_subset(&mut rng, n),
                    ]
                })
                .collect();
            let poset_pairs = (0..samples).map(|_| draw(&mut rng).to_pair()).collect();
            Ok(Inputs {
                coverage: Coverage::Sampled,
                maps,
                pairs,
                triple_coverage: Coverage::Sampled,
                triples,
                pair_triples,
                subset_coverage: Coverage::Sampled,
                subset_triples,
                poset_pairs,
            })
        }
    }
}

/// Subsets of `[n]` to test for one map: all of them when few, else a
/// deterministic sample derived from the map.
fn domain_subsets(f: &CMap) -> Vec<Subset> {
    let n = f.n();
    if 1u64 << n <= SUBSET_LIMIT {
        return all_subsets_of_domain(f);
    }
    let seed = f
        .images()
        .iter()
        .fold(0u64, |h, &v| h.wrapping_mul(31).wrapping_add(v as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..SUBSET_SAMPLES).map(|_| random_subset(&mut rng, n)).collect()
}

struct Runner {
    checks: Vec<CheckReport>,
}

impl Runner {
    fn run(&mut self, name: &str, coverage: Coverage, body: impl FnOnce() -> Tally) {
        let start = Instant::now();
        let t = body();
        self.checks.push(CheckReport {
            name: name.to_string(),
            cases: t.cases,
            failures: t.failures,
            counterexample: t.first.map(|inputs| Counterexample {
                check: name.to_string(),
                inputs,
            }),
            coverage,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }

    fn whole(&mut self, name: &str, ok: impl FnOnce() -> bool) {
        self.run(name, Coverage::Exhaustive, || {
            let mut t = Tally::default();
            t.record(ok(), || json!({}));
            t
        });
    }
}

fn run<R: Ring>(degree: usize, ring: R, options: VerifyOptions) -> Result<VerifyReport> {
    let (what, bound) = match options.mode {
        Mode::Exhaustive => ("n+1 (exhaustive verification)", options.exhaustive_bound),
        Mode::Randomized { .. } => ("n+1 (randomized verification)", MAX_RANDOMIZED_DEGREE),
    };
    if degree > bound {
        return Err(Error::Resource {
            what,
            requested: degree,
            bound,
        });
    }
    let checker = Checker::new(degree, ring.clone(), options.rule)?;
    let n = degree - 1;
    let inputs = build_inputs(degree, options.mode)?;
    let exhaustive = matches!(options.mode, Mode::Exhaustive);
    let pair_cov = inputs.coverage;
    let mut r = Runner { checks: Vec::new() };
    let mut skipped = Vec::new();

    // Per-pair checks iterate f over `maps` and g over all maps (exhaustive)
    // or over the sampled pairs.
    let for_each_pair = |body: &(dyn Fn(&CMap, &CMap, &mut Tally) + Sync)| -> Tally {
        if exhaustive {
            tally_par(&inputs.maps, |f, t| {
                for g in &inputs.maps {
                    body(f, g, t);
                }
            })
        } else {
            tally_par(&inputs.pairs, |(f, g), t| body(f, g, t))
        }
    };

    r.whole("monoid.cardinality", || checker.cardinality());
    r.run("monoid.closure", pair_cov, || {
        for_each_pair(&|f, g, t| t.record(checker.closure(f, g), || json!({"f": map_json(f), "g": map_json(g)})))
    });
    r.run("monoid.associativity", inputs.triple_coverage, || {
        tally_par(&inputs.triples, |[f, g, h], t| {
            t.record(
                checker.associativity(f, g, h),
                || json!({"f": map_json(f), "g": map_json(g), "h": map_json(h)}),
            )
        })
    });
    r.run("bijection.roundtrip", pair_cov, || {
        let maps = tally_par(&inputs.maps, |f, t| {
            t.record(checker.map_roundtrip(f), || json!({"f": map_json(f)}))
        });
        let pairs = tally_par(&inputs.poset_pairs, |p, t| {
            t.record(checker.pair_roundtrip(p), || json!({"pair": pair_json(p)}))
        });
        maps.merge(pairs)
    });
    if degree <= 12 {
        r.whole("posets.pair_enumeration", || checker.pair_enumeration());
    } else {
        skipped.push("posets.pair_enumeration: n+1 > 12".to_string());
    }
    r.run("posets.partial_orders", inputs.subset_coverage, || {
        tally_par(&inputs.subset_triples, |[x, y, z], t| {
            t.record(
                checker.partial_orders(x, y, z),
                || json!({"X": x.members(), "Y": y.members(), "Z": z.members()}),
            )
        })
    });
    r.run("posets.linear_extension", inputs.subset_coverage, || {
        tally_par(&inputs.subset_triples, |[x, y, _], t| {
            t.record(
                checker.linear_extension(x, y),
                || json!({"X": x.members(), "Y": y.members()}),
            )
        })
    });
    r.run("posets.pair_order", pair_cov, || {
        if exhaustive {
            tally_par(&inputs.poset_pairs, |p, t| {
                for q in &inputs.poset_pairs {
                    t.record(
                        checker.pair_order(p, q),
                        || json!({"P": pair_json(p), "Q": pair_json(q)}),
                    );
                }
            })
        } else {
            tally_par(&inputs.pair_triples, |[p, q, _], t| {
                t.record(
                    checker.pair_order(p, q),
                    || json!({"P": pair_json(p), "Q": pair_json(q)}),
                )
            })
        }
    });

    r.run("pcs.basic_facts", pair_cov, || {
        tally_par(&inputs.maps, |f, t| {
            for s in f.pcs() {
                t.record(
                    checker.pcs_basic_facts(f, &s),
                    || json!({"f": map_json(f), "S": s.members()}),
                );
            }
        })
    });
    let all_subsets = 1u64 << n <= SUBSET_LIMIT;
    let product_rule_cov = if exhaustive && all_subsets {
        Coverage::Exhaustive
    } else {
        Coverage::Sampled
    };
    r.run("pcs.product_rule", product_rule_cov, || {
        for_each_pair(&|f, g, t| {
            for s in &domain_subsets(g) {
                t.record(
                    checker.pcs_product_rule(f, g, s),
                    || json!({"f": map_json(f), "g": map_json(g), "S": s.members()}),
                );
            }
        })
    });

    r.run("algebra.monoid_laws", inputs.triple_coverage, || {
        tally_par(&inputs.triples, |[f, g, h], t| {
            t.record(
                checker.monoid_laws(f, g, h),
                || json!({"f": map_json(f), "g": map_json(g), "h": map_json(h)}),
            )
        })
    });
    r.run("algebra.incidence_laws", inputs.triple_coverage, || {
        tally_par(&inputs.pair_triples, |[p, q, s], t| {
            t.record(
                checker.incidence_laws(p, q, s),
                || json!({"P": pair_json(p), "Q": pair_json(q), "R": pair_json(s)}),
            )
        })
    });
    r.run("algebra.units", pair_cov, || {
        tally_par(&inputs.maps, |f, t| {
            t.record(checker.units(f), || json!({"f": map_json(f)}))
        })
    });

    r.run("phi.homomorphism", pair_cov, || {
        if exhaustive {
            let phis: Vec<IncidenceElement<R>> = inputs.maps.par_iter().map(|f| phi_basis(f, ring.clone())).collect();
            let index: HashMap<&CMap, usize> = inputs.maps.iter().enumerate().map(|(i, f)| (f, i)).collect();
            let idx: Vec<usize> = (0..inputs.maps.len()).collect();
            tally_par(&idx, |&i, t| {
                let f = &inputs.maps[i];
                for (j, g) in inputs.maps.iter().enumerate() {
                    let k = index[&f.compose_unchecked(g)];
                    t.record(
                        checker.homomorphism_of(&phis[k], &phis[i], &phis[j]),
                        || json!({"f": map_json(f), "g": map_json(g)}),
                    );
                }
            })
        } else {
            tally_par(&inputs.pairs, |(f, g), t| {
                t.record(
                    checker.homomorphism(f, g),
                    || json!({"f": map_json(f), "g": map_json(g)}),
                )
            })
        }
    });
    r.run("phi.triangularity", pair_cov, || {
        tally_par(&inputs.maps, |f, t| {
            t.record(checker.triangularity(f), || json!({"f": map_json(f)}))
        })
    });
    r.whole("phi.unit", || checker.unit_preservation());
    if degree <= MATRIX_MAX_DEGREE {
        r.whole("phi.matrix", || checker.matrix());
        r.run("phi.roundtrip", pair_cov, || {
            tally_par(&inputs.maps, |f, t| {
                t.record(checker.roundtrip(f), || json!({"f": map_json(f)}))
            })
        });
    } else {
        skipped.push(format!("phi.matrix, phi.roundtrip: n+1 > {MATRIX_MAX_DEGREE}"));
    }

    let sampling = match options.mode {
        Mode::Randomized { seed, samples } => Some(format!(
            "{samples} draws per check; maps uniform over C_{degree} by prefix-completion counting; \
             subsets uniform over 2^[{n}] (at most {SUBSET_SAMPLES} per map beyond {SUBSET_LIMIT}); ChaCha8 seed {seed}"
        )),
        Mode::Exhaustive if inputs.triple_coverage == Coverage::Sampled => Some(format!(
            "triple checks beyond {TRIPLE_LIMIT} triples use {TRIPLE_SAMPLES} uniform draws; ChaCha8 seed {EXHAUSTIVE_SEED}"
        )),
        Mode::Exhaustive => None,
    };
    let pass = r.checks.iter().all(|c| c.failures == 0);
    Ok(VerifyReport {
        n: degree,
        ring: ring.spec(),
        mode: options.mode,
        sampling,
        checks: r.checks,
        skipped,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_sizes_pass() {
        for d in 1..=4 {
            for ring in [RingSpec::Integers, RingSpec::IntegersMod(4), RingSpec::Rationals] {
                let report = verify_all(d, ring, VerifyOptions::default()).unwrap();
                assert!(report.pass, "{d} {ring}: {:?}", report.first_failure());
            }
        }
    }

    #[test]
    fn single_element_monoid() {
        let report = verify_all(1, RingSpec::IntegersMod(4), VerifyOptions::default()).unwrap();
        assert!(report.pass);
        assert_eq!(report.check("phi.homomorphism").unwrap().cases, 1);
    }

    #[test]
    fn exhaustive_bound_is_enforced() {
        let err = verify_all(8, RingSpec::Integers, VerifyOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let opts = VerifyOptions {
            mode: Mode::Randomized { seed: 1, samples: 50 },
            ..Default::default()
        };
        assert!(verify_all(8, RingSpec::Integers, opts).unwrap().pass);
    }

    #[test]
    fn large_randomized_runs_skip_matrices() {
        let opts = VerifyOptions {
            mode: Mode::Randomized { seed: 3, samples: 20 },
            ..Default::default()
        };
        let report = verify_all(16, RingSpec::Integers, opts).unwrap();
        assert!(report.pass, "{:?}", report.first_failure());
        assert!(report.check("phi.matrix").is_none());
        assert_eq!(report.skipped.len(), 2);
        assert!(report.sampling.as_deref().unwrap().contains("seed 3"));
    }

    #[test]
    fn mutant_is_caught_and_replays() {
        let opts = VerifyOptions {
            rule: CompositionRule::Reversed,
            ..Default::default()
        };
        let report = verify_all(3, RingSpec::Integers, opts).unwrap();
        assert!(!report.pass);
        let hom = report.check("phi.homomorphism").unwrap();
        assert!(hom.failures > 0);
        let cx = hom.counterexample.as_ref().unwrap();
        assert!(!replay(3, RingSpec::Integers, CompositionRule::Reversed, cx).unwrap());
        assert!(replay(3, RingSpec::Integers, CompositionRule::Standard, cx).unwrap());
    }

    #[test]
    fn replay_rejects_bad_inputs() {
        let cx = Counterexample {
            check: "phi.homomorphism".into(),
            inputs: json!({"f": [2, 1, 3], "g": [3, 3, 3]}),
        };
        assert!(replay(3, RingSpec::Integers, CompositionRule::Standard, &cx).is_err());
        let cx = Counterexample {
            check: "no.such.check".into(),
            inputs: json!({}),
        };
        assert!(matches!(
            replay(3, RingSpec::Integers, CompositionRule::Standard, &cx),
            Err(Error::Usage(_))
        ));
    }
}
