//! Randomized construction and hill-climbing optimization of stabilizer
//! codes against an error-rate objective.
//!
//! The search runs many independent instances. Each instance draws a
//! random stabilizer (optionally restricted to a structural family),
//! then repeatedly mutates it, accepting a mutant whenever its
//! geometric-mean single-error-only estimate across the objective
//! channels does not exceed the incumbent's. The cheap SEO estimator
//! drives acceptance; the expensive maximum-a-posteriori estimate is
//! computed once per instance at the end, and the best final code across
//! instances (by MAP value, ties broken on the canonical generator key)
//! is returned.
//!
//! Determinism is a hard guarantee: every instance owns a counter-split
//! stream of one master seed, instances never share mutable state beyond
//! the error-set cache (whose contents are a pure function of what is
//! requested), and the cross-instance reduction is order-independent. The
//! same configuration yields bit-identical results at any worker count.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::channel::ChannelSpec;
use crate::fer::{geometric_mean_fer, ErrorSetCache, EstimatorKind, GeoMeanFer};
use crate::pauli::{gf2_nullspace, twist, BitRref, PauliVector, Stabilizer, LETTER_PERMS};
use crate::{Error, Result};

/// Attempts at drawing one suitable generator before the current build is
/// abandoned.
const DRAW_LIMIT: u32 = 1_000;
/// Whole-stabilizer (or whole-readdition) attempts before a constraint is
/// declared infeasible.
const REBUILD_LIMIT: u32 = 10_000;
/// Times the climb loop re-rolls a failed mutation before giving up.
const MUTATE_RETRY_LIMIT: u32 = 100;

/// Structural family a search is restricted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    /// Any stabilizer involving every qubit.
    None,
    /// Every generator has Pauli weight exactly four.
    Weight4,
    /// Every generator is X-only or Z-only.
    Css,
    /// Every generator is X-only or Y-only.
    Cssy,
    /// The group is closed under the scalar relabeling
    /// `(X, Y, Z) -> (Z, X, Y)`; generators come in scalar pairs.
    Linear,
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Constraint> {
        match s {
            "none" => Ok(Constraint::None),
            "weight4" => Ok(Constraint::Weight4),
            "css" => Ok(Constraint::Css),
            "cssy" => Ok(Constraint::Cssy),
            "linear" => Ok(Constraint::Linear),
            _ => Err(Error::InvalidArgument(format!(
                "unknown constraint {s:?}; expected none, weight4, css, cssy, or linear"
            ))),
        }
    }
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Constraint::None => "none",
            Constraint::Weight4 => "weight4",
            Constraint::Css => "css",
            Constraint::Cssy => "cssy",
            Constraint::Linear => "linear",
        })
    }
}

/// How a climb step perturbs the incumbent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationKind {
    /// Relabel the non-identity letters at each qubit with probability 1/n.
    Permutation,
    /// Drop each generator with probability 1/(n-k), then re-add.
    Generator,
    /// A generator mutation followed by a permutation mutation.
    Combined,
    /// A fresh random stabilizer (control baseline).
    Random,
}

impl FromStr for MutationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<MutationKind> {
        match s {
            "permutation" => Ok(MutationKind::Permutation),
            "generator" => Ok(MutationKind::Generator),
            "combined" => Ok(MutationKind::Combined),
            "random" => Ok(MutationKind::Random),
            _ => Err(Error::InvalidArgument(format!(
                "unknown mutation {s:?}; expected permutation, generator, combined, or random"
            ))),
        }
    }
}

impl std::fmt::Display for MutationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MutationKind::Permutation => "permutation",
            MutationKind::Generator => "generator",
            MutationKind::Combined => "combined",
            MutationKind::Random => "random",
        })
    }
}

/// Full parameterization of one search run.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SearchConfig {
    pub n: u8,
    pub k: u8,
    /// Independent instances (random restarts).
    pub restarts: usize,
    /// Mutation steps per instance; 0 degenerates to a random search.
    pub iterations: usize,
    pub objective_channels: Vec<ChannelSpec>,
    pub constraint: Constraint,
    pub mutation: MutationKind,
    pub seed: u64,
    /// Relative-error bound each adaptive estimate must reach.
    pub target_bound: f64,
    /// Let the per-qubit relabeling draw the identity too (sensitivity
    /// knob; off by default so every selected qubit actually changes).
    pub include_identity_perm: bool,
    /// Record this percentile of the instance objectives at every
    /// iteration (e.g. 95.0 tracks the 5th-lowest of 100 instances).
    pub trace_percentile: Option<f64>,
}

impl SearchConfig {
    pub fn new(n: u8, k: u8, objective_channels: Vec<ChannelSpec>) -> SearchConfig {
        SearchConfig {
            n,
            k,
            restarts: 1,
            iterations: 0,
            objective_channels,
            constraint: Constraint::None,
            mutation: MutationKind::Combined,
            seed: 0,
            target_bound: 0.01,
            include_identity_perm: false,
            trace_percentile: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_parameters(self.n, self.k, self.constraint)?;
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if self.objective_channels.is_empty() {
            return Err(Error::InvalidArgument("need at least one objective channel".into()));
        }
        if !(self.target_bound > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "target bound must be positive, got {}",
                self.target_bound
            )));
        }
        if self.mutation == MutationKind::Permutation
            && matches!(self.constraint, Constraint::Css | Constraint::Cssy)
        {
            return Err(Error::InvalidArgument(
                "letter permutations cannot preserve CSS-type constraints; \
                 use the generator mutation"
                    .into(),
            ));
        }
        if let Some(p) = self.trace_percentile {
            if !(0.0..=100.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "trace percentile must be in [0, 100], got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a whole search.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best_stabilizer: Stabilizer,
    /// Geometric-mean SEO objective of the best instance's final code.
    pub objective_seo: GeoMeanFer,
    /// Geometric-mean MAP estimate of the same code (the argmin key).
    pub final_fer_map: GeoMeanFer,
    /// Percentile of instance objectives per iteration (index 0 is the
    /// initial random codes), when configured.
    pub trace: Option<Vec<f64>>,
}

/// Outcome of a single instance.
#[derive(Clone, Debug)]
pub struct InstanceOutcome {
    pub stabilizer: Stabilizer,
    pub objective_seo: GeoMeanFer,
    pub fer_map: GeoMeanFer,
    /// Accepted objective after each iteration; never increases.
    pub objective_series: Vec<f64>,
}

fn validate_parameters(n: u8, k: u8, constraint: Constraint) -> Result<()> {
    if !(1..=16).contains(&n) || k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k < n <= 16, got n = {n}, k = {k}"
        )));
    }
    match constraint {
        Constraint::Linear if (n - k) % 2 == 1 => Err(Error::InfeasibleConstraint(format!(
            "scalar-closed codes need an even generator count, got n - k = {}",
            n - k
        ))),
        Constraint::Weight4 if n < 4 => Err(Error::InfeasibleConstraint(
            "weight-4 generators need at least four qubits".into(),
        )),
        _ => Ok(()),
    }
}

/// Uniform element of the GF(2) span of `basis`.
fn sample_span<R: Rng>(basis: &[u32], rng: &mut R) -> u32 {
    debug_assert!(basis.len() < 64);
    let mut bits = rng.gen::<u64>() & ((1u64 << basis.len()) - 1);
    let mut w = 0u32;
    while bits != 0 {
        w ^= basis[bits.trailing_zeros() as usize];
        bits &= bits - 1;
    }
    w
}

/// Uniform Pauli word of weight exactly four.
fn random_weight4<R: Rng>(n: u8, rng: &mut R) -> u32 {
    debug_assert!(n >= 4);
    let mut pos = [0usize; 4];
    let mut count = 0;
    while count < 4 {
        let c = rng.gen_range(0..n as usize);
        if !pos[..count].contains(&c) {
            pos[count] = c;
            count += 1;
        }
    }
    let (mut x, mut z) = (0u32, 0u32);
    for &i in &pos {
        match rng.gen_range(0..3u8) {
            0 => x |= 1 << i,
            1 => {
                x |= 1 << i;
                z |= 1 << i;
            }
            _ => z |= 1 << i,
        }
    }
    x | (z << n)
}

fn full_support(n: u8, gens: &[u32]) -> bool {
    let xmask = (1u32 << n) - 1;
    let mut acc = 0u32;
    for &g in gens {
        acc |= (g & xmask) | (g >> n);
    }
    acc == xmask
}

#[derive(Clone, Copy)]
enum Letter {
    X,
    Y,
    Z,
}

/// Incremental commuting-generator builder over packed words.
struct Builder {
    n: u8,
    gens: Vec<u32>,
    twisted: Vec<u32>,
    rref: BitRref,
}

impl Builder {
    fn new(n: u8) -> Builder {
        Builder { n, gens: Vec::new(), twisted: Vec::new(), rref: BitRref::new() }
    }

    fn push(&mut self, w: u32) {
        self.gens.push(w);
        self.twisted.push(twist(w, self.n));
        let fresh = self.rref.insert(w);
        debug_assert!(fresh, "pushed a dependent generator");
    }

    fn commutes_with_all(&self, w: u32) -> bool {
        self.twisted.iter().all(|&t| (w & t).count_ones() % 2 == 0)
    }

    /// Uniform draw from the symplectic complement of the current span,
    /// minus the span itself.
    fn add_unconstrained<R: Rng>(&mut self, rng: &mut R) -> bool {
        let basis = gf2_nullspace(2 * self.n as u32, &self.twisted);
        for _ in 0..DRAW_LIMIT {
            let w = sample_span(&basis, rng);
            if !self.rref.contains(w) {
                self.push(w);
                return true;
            }
        }
        false
    }

    fn add_weight4<R: Rng>(&mut self, rng: &mut R) -> bool {
        for _ in 0..DRAW_LIMIT {
            let w = random_weight4(self.n, rng);
            if self.commutes_with_all(w) && !self.rref.contains(w) {
                self.push(w);
                return true;
            }
        }
        false
    }

    /// Adds a generator using only one letter. Commutation with the
    /// current generators is linear in the candidate's support, so the
    /// draw is uniform over exactly the admissible subspace.
    fn add_single_letter<R: Rng>(&mut self, letter: Letter, rng: &mut R) -> bool {
        let n = self.n as u32;
        let xmask = (1u32 << n) - 1;
        let rows: Vec<u32> = self
            .gens
            .iter()
            .map(|&g| match letter {
                Letter::X => g >> n,
                Letter::Z => g & xmask,
                Letter::Y => (g & xmask) ^ (g >> n),
            })
            .collect();
        let basis = gf2_nullspace(n, &rows);
        for _ in 0..DRAW_LIMIT {
            let v = sample_span(&basis, rng);
            let w = match letter {
                Letter::X => v,
                Letter::Z => v << n,
                Letter::Y => v | (v << n),
            };
            if !self.rref.contains(w) {
                self.push(w);
                return true;
            }
        }
        false
    }

    /// Adds a scalar pair `(M, wM)`. A draw must commute with the current
    /// (scalar-closed) span, commute with its own scalar multiple, and
    /// extend the rank by two.
    fn add_scalar_pair<R: Rng>(&mut self, rng: &mut R) -> bool {
        let n = self.n as u32;
        let xmask = (1u32 << n) - 1;
        let basis = gf2_nullspace(2 * n, &self.twisted);
        for _ in 0..DRAW_LIMIT {
            let w = sample_span(&basis, rng);
            if self.rref.contains(w) {
                continue;
            }
            let (u, v) = (w & xmask, w >> n);
            if (u.count_ones() ^ (u & v).count_ones() ^ v.count_ones()) & 1 != 0 {
                continue;
            }
            let wm = v | ((u ^ v) << n);
            let mut probe = self.rref.clone();
            probe.insert(w);
            if probe.contains(wm) {
                continue;
            }
            self.push(w);
            self.push(wm);
            return true;
        }
        false
    }
}

/// Adds generators until the builder holds `m`, honoring `constraint`,
/// then checks that every qubit is involved. `None` means this attempt
/// should be rebuilt from scratch.
fn complete_build<R: Rng>(
    b: &mut Builder,
    m: usize,
    constraint: Constraint,
    rng: &mut R,
) -> Option<Vec<u32>> {
    while b.gens.len() < m {
        let added = match constraint {
            Constraint::None => b.add_unconstrained(rng),
            Constraint::Weight4 => b.add_weight4(rng),
            Constraint::Css | Constraint::Cssy => {
                let other = if constraint == Constraint::Css { Letter::Z } else { Letter::Y };
                let (first, second) =
                    if rng.gen::<bool>() { (Letter::X, other) } else { (other, Letter::X) };
                b.add_single_letter(first, rng) || b.add_single_letter(second, rng)
            }
            Constraint::Linear => b.add_scalar_pair(rng),
        };
        if !added {
            return None;
        }
    }
    if full_support(b.n, &b.gens) {
        Some(b.gens.clone())
    } else {
        None
    }
}

fn stabilizer_from_packed(n: u8, gens: &[u32]) -> Result<Stabilizer> {
    Stabilizer::new(gens.iter().map(|&w| PauliVector::from_packed(n, w)).collect())
}

/// Draws a uniform random stabilizer: generators are added one at a time,
/// each uniform over the commuting complement of the partial span minus
/// the span, restricted to the constraint's pool; the whole stabilizer is
/// rebuilt until it involves every qubit.
pub fn random_stabilizer<R: Rng>(
    n: u8,
    k: u8,
    constraint: Constraint,
    rng: &mut R,
) -> Result<Stabilizer> {
    validate_parameters(n, k, constraint)?;
    let m = (n - k) as usize;
    for _ in 0..REBUILD_LIMIT {
        let mut b = Builder::new(n);
        if let Some(gens) = complete_build(&mut b, m, constraint, rng) {
            return stabilizer_from_packed(n, &gens);
        }
    }
    Err(Error::InfeasibleConstraint(format!(
        "no {constraint} stabilizer with n = {n}, k = {k} found after {REBUILD_LIMIT} attempts"
    )))
}

fn permutation_mutation<R: Rng>(
    s: &Stabilizer,
    constraint: Constraint,
    include_identity: bool,
    rng: &mut R,
) -> Result<Stabilizer> {
    if matches!(constraint, Constraint::Css | Constraint::Cssy) {
        return Err(Error::InvalidArgument(
            "letter permutations cannot preserve CSS-type constraints".into(),
        ));
    }
    let n = s.n() as usize;
    let mut gens = s.generators().to_vec();
    for qubit in 0..n {
        if rng.gen_range(0..n) != 0 {
            continue;
        }
        let index = match constraint {
            // Only the two 3-cycles are scalar multiplications, hence the
            // only letter permutations preserving scalar closure.
            Constraint::Linear => 3 + rng.gen_range(0..2usize),
            _ if include_identity => rng.gen_range(0..6usize),
            _ => 1 + rng.gen_range(0..5usize),
        };
        for g in &mut gens {
            *g = g.apply_letter_perm(qubit, &LETTER_PERMS[index]);
        }
    }
    Stabilizer::new(gens)
}

fn generator_mutation<R: Rng>(
    s: &Stabilizer,
    constraint: Constraint,
    rng: &mut R,
) -> Result<Stabilizer> {
    let n = s.n();
    let m = s.num_generators();
    let packed: Vec<u32> = s.generators().iter().map(|g| g.packed()).collect();
    let kept: Vec<u32> = if constraint == Constraint::Linear {
        let pairs = m / 2;
        packed
            .chunks(2)
            .filter(|_| rng.gen_range(0..pairs) != 0)
            .flatten()
            .copied()
            .collect()
    } else {
        packed.iter().filter(|_| rng.gen_range(0..m) != 0).copied().collect()
    };
    // The removal choice stays fixed; only the re-addition is retried.
    for _ in 0..REBUILD_LIMIT {
        let mut b = Builder::new(n);
        for &w in &kept {
            b.push(w);
        }
        if let Some(gens) = complete_build(&mut b, m, constraint, rng) {
            return stabilizer_from_packed(n, &gens);
        }
    }
    Err(Error::InfeasibleConstraint(format!(
        "generator mutation failed to recomplete a {constraint} stabilizer \
         after {REBUILD_LIMIT} attempts"
    )))
}

/// Produces a mutated stabilizer of the same parameters satisfying the
/// same constraint.
pub fn mutate<R: Rng>(
    s: &Stabilizer,
    kind: MutationKind,
    constraint: Constraint,
    include_identity_perm: bool,
    rng: &mut R,
) -> Result<Stabilizer> {
    match kind {
        MutationKind::Permutation => {
            permutation_mutation(s, constraint, include_identity_perm, rng)
        }
        MutationKind::Generator => generator_mutation(s, constraint, rng),
        MutationKind::Combined => {
            let g = generator_mutation(s, constraint, rng)?;
            match constraint {
                // A letter permutation cannot follow under CSS-type
                // constraints, so the combined move reduces to the
                // generator move.
                Constraint::Css | Constraint::Cssy => Ok(g),
                _ => permutation_mutation(&g, constraint, include_identity_perm, rng),
            }
        }
        MutationKind::Random => random_stabilizer(s.n(), s.k(), constraint, rng),
    }
}

/// Whether `s` satisfies `constraint`'s structural predicate.
pub fn satisfies_constraint(s: &Stabilizer, constraint: Constraint) -> bool {
    match constraint {
        Constraint::None => true,
        Constraint::Weight4 => s.generators().iter().all(|g| g.weight() == 4),
        Constraint::Css => s.classify_structure().is_css,
        Constraint::Cssy => s.classify_structure().is_cssy,
        Constraint::Linear => s.classify_structure().is_linear,
    }
}

fn run_instance(
    config: &SearchConfig,
    stream: u64,
    cache: &ErrorSetCache,
) -> Result<InstanceOutcome> {
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);
    let mut current = random_stabilizer(config.n, config.k, config.constraint, &mut rng)?;
    let gm_seo = |s: &Stabilizer| {
        geometric_mean_fer(
            s,
            &config.objective_channels,
            EstimatorKind::Seo,
            config.target_bound,
            cache,
        )
    };
    let mut objective = gm_seo(&current)?.value;
    let mut series = Vec::with_capacity(config.iterations + 1);
    series.push(objective);
    for _ in 0..config.iterations {
        let mutant = {
            let mut last = None;
            let mut found = None;
            for _ in 0..MUTATE_RETRY_LIMIT {
                match mutate(
                    &current,
                    config.mutation,
                    config.constraint,
                    config.include_identity_perm,
                    &mut rng,
                ) {
                    Ok(m) => {
                        found = Some(m);
                        break;
                    }
                    Err(e @ Error::InfeasibleConstraint(_)) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            match found {
                Some(m) => m,
                None => return Err(last.expect("retry loop ran at least once")),
            }
        };
        let mutant_objective = gm_seo(&mutant)?.value;
        if mutant_objective <= objective {
            debug_assert!(satisfies_constraint(&mutant, config.constraint));
            current = mutant;
            objective = mutant_objective;
        }
        series.push(objective);
    }
    let objective_seo = gm_seo(&current)?;
    debug_assert_eq!(objective_seo.value.to_bits(), objective.to_bits());
    let fer_map = geometric_mean_fer(
        &current,
        &config.objective_channels,
        EstimatorKind::Map,
        config.target_bound,
        cache,
    )?;
    Ok(InstanceOutcome { stabilizer: current, objective_seo, fer_map, objective_series: series })
}

/// Runs every instance and returns their outcomes in instance order.
/// Instances are independent and deterministic, so the result is
/// bit-identical at any worker count.
pub fn hill_climb_instances(
    config: &SearchConfig,
    cache: &ErrorSetCache,
) -> Result<Vec<InstanceOutcome>> {
    config.validate()?;
    (0..config.restarts)
        .into_par_iter()
        .map(|i| run_instance(config, i as u64, cache))
        .collect()
}

/// The `values` entry that `pct` percent of entries weakly exceed: the
/// k-th lowest with `k = round(N (1 - pct/100))` clamped to `[1, N]`, so
/// the 95th percentile of 100 instances is the 5th-lowest objective.
fn percentile_low(values: &mut [f64], pct: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let k = ((n as f64) * (1.0 - pct / 100.0)).round() as usize;
    values[k.clamp(1, n) - 1]
}

/// Hill climb with random restarts; see the module docs for the protocol.
pub fn hill_climb(config: &SearchConfig, cache: &ErrorSetCache) -> Result<SearchResult> {
    let outcomes = hill_climb_instances(config, cache)?;
    let best = outcomes
        .iter()
        .min_by(|a, b| {
            a.fer_map
                .value
                .total_cmp(&b.fer_map.value)
                .then_with(|| a.stabilizer.canonical_key().cmp(&b.stabilizer.canonical_key()))
        })
        .expect("restarts >= 1");
    let trace = config.trace_percentile.map(|pct| {
        (0..=config.iterations)
            .map(|t| {
                let mut column: Vec<f64> =
                    outcomes.iter().map(|o| o.objective_series[t]).collect();
                percentile_low(&mut column, pct)
            })
            .collect()
    });
    Ok(SearchResult {
        best_stabilizer: best.stabilizer.clone(),
        objective_seo: best.objective_seo.clone(),
        final_fer_map: best.fer_map.clone(),
        trace,
    })
}

/// One row of a plain random search.
#[derive(Clone, Debug)]
pub struct RandomSearchRow {
    pub stabilizer: Stabilizer,
    pub fer_map: GeoMeanFer,
}

/// Draws `config.restarts` random stabilizers (same per-instance streams
/// as [`hill_climb`], so row `i` matches instance `i` at zero iterations)
/// and scores each with the geometric-mean MAP estimate. `iterations` and
/// `mutation` are ignored.
pub fn random_search(config: &SearchConfig, cache: &ErrorSetCache) -> Result<Vec<RandomSearchRow>> {
    config.validate()?;
    (0..config.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let stabilizer = random_stabilizer(config.n, config.k, config.constraint, &mut rng)?;
            let fer_map = geometric_mean_fer(
                &stabilizer,
                &config.objective_channels,
                EstimatorKind::Map,
                config.target_bound,
                cache,
            )?;
            Ok(RandomSearchRow { stabilizer, fer_map })
        })
        .collect()
}
