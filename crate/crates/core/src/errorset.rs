//! Probability-ordered truncated error sets.
//!
//! On a memoryless single-qubit channel every n-qubit error in the same
//! composition class (same counts of I, X, Y, Z components) is equally
//! likely, so a most-likely-first enumeration works class by class: sort
//! classes by per-error probability, include whole classes greedily until
//! the left-out mass drops below a target, and only then materialize the
//! individual errors. Classes whose probabilities are bit-equal form a tie
//! group that is included or excluded atomically; estimators downstream
//! exploit this to stay invariant under reorderings within a group.

use crate::channel::PauliChannel;
use crate::numeric::KahanSum;
use crate::{Error, Result};

/// Error pattern counts `[n_I, n_X, n_Y, n_Z]`; the qubit count is their
/// sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CompositionClass {
    pub counts: [u8; 4],
}

impl CompositionClass {
    pub fn n(&self) -> u8 {
        self.counts.iter().sum()
    }

    /// Number of distinct errors in the class (a multinomial coefficient).
    pub fn size(&self) -> u64 {
        let n = self.n() as u64;
        let mut remaining = n;
        let mut size = 1u64;
        for &c in &self.counts {
            size *= binomial(remaining, c as u64);
            remaining -= c as u64;
        }
        size
    }

    /// Per-error probability. The factors are multiplied in an order
    /// determined only by the (probability, count) multiset, never by
    /// letter identity: on channels with tied letter probabilities,
    /// letter-swapped classes then evaluate bit-identically, which f64
    /// tie detection and channel-symmetry comparisons rely on.
    pub fn probability(&self, ch: &PauliChannel) -> f64 {
        let p = ch.probs();
        let mut factors: [(f64, i32); 4] = [
            (p[0], self.counts[0] as i32),
            (p[1], self.counts[1] as i32),
            (p[2], self.counts[2] as i32),
            (p[3], self.counts[3] as i32),
        ];
        factors.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
        let mut acc = 1.0f64;
        for (pl, c) in factors {
            acc *= pl.powi(c);
        }
        acc
    }

    /// All errors of the class as packed Pauli words, in lexicographic
    /// order of the component string under `I < X < Y < Z`.
    pub fn errors(&self) -> Vec<u32> {
        let n = self.n();
        let mut letters = Vec::with_capacity(n as usize);
        for (letter, &c) in self.counts.iter().enumerate() {
            letters.extend(std::iter::repeat(letter as u8).take(c as usize));
        }
        let mut out = Vec::with_capacity(self.size() as usize);
        loop {
            out.push(pack_letters(n, &letters));
            if !next_permutation(&mut letters) {
                break;
            }
        }
        out
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Packs a letter string (0=I, 1=X, 2=Y, 3=Z; index = qubit) into the
/// `x | z << n` word layout.
fn pack_letters(n: u8, letters: &[u8]) -> u32 {
    let mut w = 0u32;
    for (i, &l) in letters.iter().enumerate() {
        let (x, z) = match l {
            0 => (0, 0),
            1 => (1, 0),
            2 => (1, 1),
            _ => (0, 1),
        };
        w |= x << i;
        w |= z << (n as usize + i);
    }
    w
}

/// In-place lexicographic successor; false once the sequence is the last
/// (descending) arrangement.
fn next_permutation(seq: &mut [u8]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let Some(i) = (0..seq.len() - 1).rev().find(|&i| seq[i] < seq[i + 1]) else {
        return false;
    };
    let j = (i + 1..seq.len()).rev().find(|&j| seq[j] > seq[i]).unwrap();
    seq.swap(i, j);
    seq[i + 1..].reverse();
    true
}

/// All `(n+1)(n+2)(n+3)/6` composition classes on `n` qubits, in
/// lexicographic order of `[n_I, n_X, n_Y, n_Z]`.
pub fn enumerate_compositions(n: u8) -> Vec<CompositionClass> {
    let mut out = Vec::new();
    for ni in 0..=n {
        for nx in 0..=(n - ni) {
            for ny in 0..=(n - ni - nx) {
                let nz = n - ni - nx - ny;
                out.push(CompositionClass { counts: [ni, nx, ny, nz] });
            }
        }
    }
    out
}

/// One class with its resolved probability and size, as stored in an
/// [`ErrorSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct ClassEntry {
    pub class: CompositionClass,
    pub probability: f64,
    pub size: u64,
}

/// A truncated, probability-ordered error set for one channel on `n`
/// qubits.
///
/// `classes` holds every composition class sorted by descending
/// probability (ties broken by descending count tuple, so the order is a
/// pure function of the channel); the first `included` of them have their
/// errors materialized. Extension continues the same greedy scan with the
/// same accumulator state, so growing a set and building a larger one from
/// scratch agree exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorSet {
    n: u8,
    channel: PauliChannel,
    classes: Vec<ClassEntry>,
    included: usize,
    class_ends: Vec<usize>,
    errors: Vec<u32>,
    mass: KahanSum,
    residual: f64,
    complete: bool,
}

impl ErrorSet {
    /// Builds a set whose left-out probability mass is at most
    /// `target_residual`, including tie groups of classes atomically.
    pub fn build(n: u8, ch: &PauliChannel, target_residual: f64) -> Result<ErrorSet> {
        if !(1..=16).contains(&n) {
            return Err(Error::InvalidArgument(format!("n must be 1..=16, got {n}")));
        }
        if !(0.0..1.0).contains(&target_residual) {
            return Err(Error::InvalidArgument(format!(
                "target residual must lie in [0, 1), got {target_residual}"
            )));
        }
        let mut classes: Vec<ClassEntry> = enumerate_compositions(n)
            .into_iter()
            .map(|class| ClassEntry { class, probability: class.probability(ch), size: class.size() })
            .collect();
        classes.sort_by(|a, b| {
            b.probability
                .partial_cmp(&a.probability)
                .expect("channel probabilities are finite")
                .then(b.class.counts.cmp(&a.class.counts))
        });
        let mut set = ErrorSet {
            n,
            channel: *ch,
            classes,
            included: 0,
            class_ends: Vec::new(),
            errors: Vec::new(),
            mass: KahanSum::new(),
            residual: 1.0,
            complete: false,
        };
        set.extend(target_residual)?;
        Ok(set)
    }

    /// Continues the greedy scan until the residual is at most
    /// `target_residual`. A set already below the target is unchanged.
    pub fn extend(&mut self, target_residual: f64) -> Result<()> {
        if !(0.0..1.0).contains(&target_residual) {
            return Err(Error::InvalidArgument(format!(
                "target residual must lie in [0, 1), got {target_residual}"
            )));
        }
        while self.residual > target_residual && !self.complete {
            // Take the whole tie group starting at `included`.
            let group_bits = self.classes[self.included].probability.to_bits();
            while self.included < self.classes.len()
                && self.classes[self.included].probability.to_bits() == group_bits
            {
                let entry = &self.classes[self.included];
                self.mass.add(entry.probability * entry.size as f64);
                self.errors.extend(entry.class.errors());
                self.class_ends.push(self.errors.len());
                self.included += 1;
            }
            self.complete = self.included == self.classes.len();
            // Floor keeps an incomplete set's residual strictly positive even
            // when the retained mass rounds to 1.0, so a zero target always
            // drives the scan to structural completion.
            self.residual =
                if self.complete { 0.0 } else { (1.0 - self.mass.sum).max(f64::MIN_POSITIVE) };
        }
        Ok(())
    }

    /// Number of errors an extension to `target_residual` would add,
    /// without materializing them. Mirrors [`ErrorSet::extend`] exactly,
    /// including the accumulator arithmetic.
    pub fn extension_len(&self, target_residual: f64) -> usize {
        let mut mass = self.mass;
        let mut residual = self.residual;
        let mut at = self.included;
        let mut added = 0usize;
        while residual > target_residual && at < self.classes.len() {
            let group_bits = self.classes[at].probability.to_bits();
            while at < self.classes.len()
                && self.classes[at].probability.to_bits() == group_bits
            {
                let entry = &self.classes[at];
                mass.add(entry.probability * entry.size as f64);
                added += entry.size as usize;
                at += 1;
            }
            residual = if at == self.classes.len() {
                0.0
            } else {
                (1.0 - mass.sum).max(f64::MIN_POSITIVE)
            };
        }
        added
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// The channel the probabilities were resolved from.
    pub fn channel(&self) -> &PauliChannel {
        &self.channel
    }

    /// All composition classes in scan order (included prefix first).
    pub fn classes(&self) -> &[ClassEntry] {
        &self.classes
    }

    /// Number of classes whose errors are materialized.
    pub fn included(&self) -> usize {
        self.included
    }

    /// Packed errors of included class `j`.
    pub fn class_errors(&self, j: usize) -> &[u32] {
        let start = if j == 0 { 0 } else { self.class_ends[j - 1] };
        &self.errors[start..self.class_ends[j]]
    }

    /// All materialized errors, class-major in scan order.
    pub fn errors(&self) -> &[u32] {
        &self.errors
    }

    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    /// Probability mass left out; zero exactly when the set is complete.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    /// Included probability mass (compensated sum).
    pub fn retained_mass(&self) -> f64 {
        self.mass.sum
    }

    /// Per-error probability of the least likely included class.
    pub fn min_included_probability(&self) -> f64 {
        self.classes[self.included - 1].probability
    }
}

/// Builds a probability-ordered error set; see [`ErrorSet::build`].
pub fn build_error_set(n: u8, ch: &PauliChannel, target_residual: f64) -> Result<ErrorSet> {
    ErrorSet::build(n, ch, target_residual)
}

/// Returns a grown copy of `e` meeting `new_target_residual`; structurally
/// identical to building at the new target directly.
pub fn extend_error_set(e: &ErrorSet, new_target_residual: f64) -> Result<ErrorSet> {
    let mut out = e.clone();
    out.extend(new_target_residual)?;
    Ok(out)
}
