//! Phase-free Pauli vectors and stabilizer groups in the binary-symplectic
//! picture.
//!
//! An n-qubit Pauli operator, with phases discarded, is a pair of bit
//! vectors `(x | z)`: component `X` at qubit `i` sets bit `i` of `x`, `Z`
//! sets bit `i` of `z`, and `Y` sets both. Products are XORs, and two
//! operators commute exactly when their symplectic product vanishes. A
//! stabilizer is an independent, pairwise-commuting list of such vectors;
//! everything downstream (syndromes, cosets, distance, structure tests,
//! qubit-permutation equivalence) reduces to GF(2) linear algebra on words.

use crate::{Error, Result};

/// Single-qubit Pauli component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// The six bijections of `{X, Y, Z}`, listed as `[image of X, image of Y,
/// image of Z]` in lexicographic order of the image tuple. Indices 3 and 4
/// are the two 3-cycles.
pub const LETTER_PERMS: [[Pauli; 3]; 6] = [
    [Pauli::X, Pauli::Y, Pauli::Z],
    [Pauli::X, Pauli::Z, Pauli::Y],
    [Pauli::Y, Pauli::X, Pauli::Z],
    [Pauli::Y, Pauli::Z, Pauli::X],
    [Pauli::Z, Pauli::X, Pauli::Y],
    [Pauli::Z, Pauli::Y, Pauli::X],
];

/// A phase-free n-qubit Pauli operator. Qubit `i` (1-based qubit `i+1` in
/// string form, leftmost character) occupies bit `i` of each part.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliVector {
    n: u8,
    x: u16,
    z: u16,
}

impl PauliVector {
    /// Identity on `n` qubits. Supported sizes are 1..=16.
    pub fn identity(n: u8) -> PauliVector {
        assert!((1..=16).contains(&n));
        PauliVector { n, x: 0, z: 0 }
    }

    pub fn from_parts(n: u8, x: u16, z: u16) -> PauliVector {
        assert!((1..=16).contains(&n));
        let mask = mask_n(n);
        debug_assert!((x & !mask) == 0 && (z & !mask) == 0);
        PauliVector { n, x: x & mask, z: z & mask }
    }

    /// Parses an uppercase `IXYZ` string; the leftmost character is qubit 1.
    pub fn parse(s: &str) -> Result<PauliVector> {
        let n = s.len();
        if !(1..=16).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "Pauli string must have 1..=16 characters, got {n}"
            )));
        }
        let (mut x, mut z) = (0u16, 0u16);
        for (i, c) in s.chars().enumerate() {
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "Pauli string may contain only I, X, Y, Z; got {c:?}"
                    )))
                }
            };
            let (bx, bz) = p.bits();
            x |= (bx as u16) << i;
            z |= (bz as u16) << i;
        }
        Ok(PauliVector { n: n as u8, x, z })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn x_part(&self) -> u16 {
        self.x
    }

    pub fn z_part(&self) -> u16 {
        self.z
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        debug_assert!(qubit < self.n as usize);
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        debug_assert!(qubit < self.n as usize);
        let (bx, bz) = p.bits();
        self.x = self.x & !(1 << qubit) | ((bx as u16) << qubit);
        self.z = self.z & !(1 << qubit) | ((bz as u16) << qubit);
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubits acted on non-trivially, as a bit mask.
    pub fn support(&self) -> u16 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    /// Phase-free product: component-wise XOR of both parts.
    pub fn mul(&self, other: &PauliVector) -> PauliVector {
        debug_assert_eq!(self.n, other.n);
        PauliVector { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z }
    }

    /// Packs into a `2n`-bit word: `x` in the low half, `z` in the high half.
    pub fn packed(&self) -> u32 {
        (self.x as u32) | ((self.z as u32) << self.n)
    }

    pub fn from_packed(n: u8, w: u32) -> PauliVector {
        let mask = mask_n(n) as u32;
        PauliVector { n, x: (w & mask) as u16, z: ((w >> n) & mask) as u16 }
    }

    /// Cyclic shift by one position: qubit `i` moves to qubit `i+1 mod n`.
    pub fn cyclic_shift(&self) -> PauliVector {
        let n = self.n;
        let rot = |v: u16| ((v << 1) | (v >> (n - 1))) & mask_n(n);
        PauliVector { n, x: rot(self.x), z: rot(self.z) }
    }

    /// Applies a qubit permutation: qubit `i` moves to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> PauliVector {
        debug_assert_eq!(perm.len(), self.n as usize);
        let (mut x, mut z) = (0u16, 0u16);
        for (i, &pi) in perm.iter().enumerate() {
            x |= ((self.x >> i) & 1) << pi;
            z |= ((self.z >> i) & 1) << pi;
        }
        PauliVector { n: self.n, x, z }
    }

    /// Scalar multiplication by the cube root of unity in the GF(4) picture,
    /// which relabels components `(X, Y, Z) -> (Z, X, Y)`.
    pub fn omega_mul(&self) -> PauliVector {
        PauliVector { n: self.n, x: self.z, z: self.x ^ self.z }
    }

    /// Applies one of [`LETTER_PERMS`] to the component at `qubit`.
    pub fn apply_letter_perm(&self, qubit: usize, perm: &[Pauli; 3]) -> PauliVector {
        let mut out = *self;
        match self.get(qubit) {
            Pauli::I => {}
            Pauli::X => out.set(qubit, perm[0]),
            Pauli::Y => out.set(qubit, perm[1]),
            Pauli::Z => out.set(qubit, perm[2]),
        }
        out
    }
}

impl std::fmt::Display for PauliVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n as usize {
            write!(f, "{}", self.get(i).to_char())?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for PauliVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

fn mask_n(n: u8) -> u16 {
    if n == 16 {
        u16::MAX
    } else {
        (1 << n) - 1
    }
}

fn parity(w: u32) -> u8 {
    (w.count_ones() & 1) as u8
}

/// Swaps the `x` and `z` halves of a packed word, so that a symplectic
/// product becomes a plain parity: `sym(a, b) = parity(packed(a) &
/// twist(packed(b)))`.
pub(crate) fn twist(w: u32, n: u8) -> u32 {
    let mask = mask_n(n) as u32;
    ((w >> n) & mask) | ((w & mask) << n)
}

/// Symplectic product `u_a . z_b + x_b . z_a` over GF(2); zero exactly when
/// the operators commute.
pub fn symplectic_product(a: &PauliVector, b: &PauliVector) -> u8 {
    debug_assert_eq!(a.n, b.n);
    parity((a.x & b.z) as u32) ^ parity((a.z & b.x) as u32)
}

/// Trace inner product in the GF(4) picture: positions are symbols
/// `x + w*z` with `w` a cube root of unity, the product is conjugate-linear
/// in the second argument, and the field trace maps `0, 1 -> 0` and the two
/// roots `-> 1`. Agrees with [`symplectic_product`] on every pair.
pub fn trace_inner_product(a: &PauliVector, b: &PauliVector) -> u8 {
    debug_assert_eq!(a.n, b.n);
    let mut acc = 0u8;
    for i in 0..a.n as usize {
        let (ua, va) = ((a.x >> i) & 1, (a.z >> i) & 1);
        let (ub, vb) = ((b.x >> i) & 1, (b.z >> i) & 1);
        // conj(u + w v) = (u + v) + w v
        let (cu, cv) = (ub ^ vb, vb);
        // (a + w b)(c + w d) = (ac + bd) + w (ad + bc + bd)
        let tv = (ua & cv) ^ (va & cu) ^ (va & cv);
        acc ^= tv as u8;
    }
    acc
}

/// Fully reduced row-echelon basis over GF(2), rows keyed by their leading
/// (highest) set bit. The row set is a canonical invariant of the span.
#[derive(Clone, Default)]
pub(crate) struct BitRref {
    rows: Vec<u32>,
}

impl BitRref {
    pub fn new() -> Self {
        BitRref { rows: Vec::new() }
    }

    pub fn from_rows(rows: impl IntoIterator<Item = u32>) -> Self {
        let mut r = BitRref::new();
        for w in rows {
            r.insert(w);
        }
        r
    }

    /// Reduces `w` against the basis.
    pub fn reduce(&self, mut w: u32) -> u32 {
        for &row in &self.rows {
            let lead = 31 - row.leading_zeros();
            if (w >> lead) & 1 == 1 {
                w ^= row;
            }
        }
        w
    }

    /// Inserts `w`; returns whether the rank grew.
    pub fn insert(&mut self, w: u32) -> bool {
        let w = self.reduce(w);
        if w == 0 {
            return false;
        }
        let lead = 31 - w.leading_zeros();
        for row in &mut self.rows {
            if (*row >> lead) & 1 == 1 {
                *row ^= w;
            }
        }
        let pos = self
            .rows
            .iter()
            .position(|r| 31 - r.leading_zeros() < lead)
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, w);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, w: u32) -> bool {
        self.reduce(w) == 0
    }

    /// Canonical rows, sorted by descending leading bit.
    pub fn rows(&self) -> &[u32] {
        &self.rows
    }
}

/// Basis of the nullspace of the GF(2) matrix whose rows are `rows`, over
/// `ncols` columns. Basis vectors are emitted in ascending free-column
/// order, so the result is deterministic.
pub(crate) fn gf2_nullspace(ncols: u32, rows: &[u32]) -> Vec<u32> {
    let rref = BitRref::from_rows(rows.iter().copied());
    let mut pivot_mask = 0u32;
    for &row in rref.rows() {
        pivot_mask |= 1 << (31 - row.leading_zeros());
    }
    let mut basis = Vec::with_capacity(ncols as usize - rref.rank());
    for f in 0..ncols {
        if (pivot_mask >> f) & 1 == 1 {
            continue;
        }
        let mut v = 1u32 << f;
        for &row in rref.rows() {
            if (row >> f) & 1 == 1 {
                v |= 1 << (31 - row.leading_zeros());
            }
        }
        basis.push(v);
    }
    basis
}

/// Iterates a GF(2) span in Gray-code order, starting from zero.
pub(crate) struct GraySpan<'a> {
    basis: &'a [u32],
    idx: u64,
    end: u64,
    acc: u32,
}

impl<'a> GraySpan<'a> {
    pub fn new(basis: &'a [u32]) -> Self {
        GraySpan { basis, idx: 0, end: 1u64 << basis.len(), acc: 0 }
    }
}

impl Iterator for GraySpan<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.idx == self.end {
            return None;
        }
        if self.idx != 0 {
            self.acc ^= self.basis[self.idx.trailing_zeros() as usize];
        }
        self.idx += 1;
        Some(self.acc)
    }
}

/// Which structural families a stabilizer group belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeStructure {
    /// Generated by X-only and Z-only elements.
    pub is_css: bool,
    /// Generated by X-only and Y-only elements.
    pub is_cssy: bool,
    /// CSS with equal X-part and Z-part row spaces.
    pub is_dual_containing_css: bool,
    /// Closed under the GF(4) scalar relabeling `(X, Y, Z) -> (Z, X, Y)`.
    pub is_linear: bool,
    /// The weight-four elements span the whole group.
    pub has_weight4_rep: bool,
    /// Every qubit is acted on by some generator.
    pub full_support: bool,
}

/// An `[[n, k]]` stabilizer group: `n - k` independent, pairwise-commuting
/// phase-free Pauli vectors.
#[derive(Clone)]
pub struct Stabilizer {
    n: u8,
    gens: Vec<PauliVector>,
    twisted: Vec<u32>,
    rref: BitRref,
    kernel: Vec<u32>,
}

impl std::fmt::Debug for Stabilizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

impl Stabilizer {
    /// Validates independence, pairwise commutation, and a consistent qubit
    /// count, then precomputes the reduction basis and the symplectic
    /// kernel. Generator order is preserved: syndrome bit `i` belongs to
    /// `gens[i]`.
    pub fn new(gens: Vec<PauliVector>) -> Result<Stabilizer> {
        if gens.is_empty() {
            return Err(Error::InvalidArgument("stabilizer needs at least one generator".into()));
        }
        let n = gens[0].n();
        if gens.iter().any(|g| g.n() != n) {
            return Err(Error::InvalidArgument("generators act on differing qubit counts".into()));
        }
        if gens.len() > n as usize {
            return Err(Error::InvalidArgument(format!(
                "{} generators cannot be independent on {n} qubits",
                gens.len()
            )));
        }
        for i in 0..gens.len() {
            for j in (i + 1)..gens.len() {
                if symplectic_product(&gens[i], &gens[j]) != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "generators {i} and {j} anticommute"
                    )));
                }
            }
        }
        let mut rref = BitRref::new();
        for (i, g) in gens.iter().enumerate() {
            if !rref.insert(g.packed()) {
                return Err(Error::InvalidArgument(format!(
                    "generator {i} is dependent on earlier generators"
                )));
            }
        }
        let twisted: Vec<u32> = gens.iter().map(|g| twist(g.packed(), n)).collect();
        let kernel = gf2_nullspace(2 * n as u32, &twisted);
        Ok(Stabilizer { n, gens, twisted, rref, kernel })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Number of generators, `n - k`.
    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    /// Number of logical qubits.
    pub fn k(&self) -> u8 {
        self.n - self.gens.len() as u8
    }

    pub fn generators(&self) -> &[PauliVector] {
        &self.gens
    }

    /// Syndrome of `e`: bit `i` is the symplectic product of generator `i`
    /// with `e`.
    pub fn syndrome_of(&self, e: &PauliVector) -> u16 {
        debug_assert_eq!(e.n(), self.n);
        self.syndrome_packed(e.packed())
    }

    #[inline]
    pub(crate) fn syndrome_packed(&self, w: u32) -> u16 {
        let mut s = 0u16;
        for (i, &t) in self.twisted.iter().enumerate() {
            s |= ((parity(t & w)) as u16) << i;
        }
        s
    }

    /// Canonical representative of the coset `e * span(S)`: two errors
    /// reduce to the same vector exactly when they differ by a stabilizer
    /// element.
    pub fn coset_canonical(&self, e: &PauliVector) -> PauliVector {
        PauliVector::from_packed(self.n, self.rref.reduce(e.packed()))
    }

    #[inline]
    pub(crate) fn coset_canonical_packed(&self, w: u32) -> u32 {
        self.rref.reduce(w)
    }

    pub fn in_span(&self, e: &PauliVector) -> bool {
        self.rref.contains(e.packed())
    }

    /// Canonical representation of the group: the reduced row-echelon rows
    /// of the generator matrix, sorted by descending leading bit. Equal
    /// exactly for equal groups.
    pub fn canonical_key(&self) -> Vec<u32> {
        self.rref.rows().to_vec()
    }

    /// All `2^(n-k)` group elements in Gray-code order (starting at the
    /// identity).
    pub fn span_elements(&self) -> impl Iterator<Item = PauliVector> + '_ {
        let packed: Vec<u32> = self.gens.iter().map(|g| g.packed()).collect();
        SpanIter { n: self.n, basis: packed, idx: 0 }
    }

    /// All `2^(n+k)` elements commuting with the whole group, identity
    /// included.
    pub fn normalizer_elements(&self) -> impl Iterator<Item = PauliVector> + '_ {
        SpanIter { n: self.n, basis: self.kernel.clone(), idx: 0 }
    }

    /// Minimum weight over normalizer elements outside the group; defined
    /// for `k >= 1`.
    pub fn distance(&self) -> Result<u32> {
        if self.k() == 0 {
            return Err(Error::InvalidArgument(
                "distance is defined only for codes with k >= 1".into(),
            ));
        }
        let mut best = u32::MAX;
        let mut acc = 0u32;
        for idx in 1u64..(1u64 << self.kernel.len()) {
            acc ^= self.kernel[idx.trailing_zeros() as usize];
            let v = PauliVector::from_packed(self.n, acc);
            let w = v.weight();
            if w < best && !self.rref.contains(acc) {
                best = w;
            }
        }
        Ok(best)
    }

    /// Applies a qubit permutation to every generator (order preserved).
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Stabilizer> {
        if perm.len() != self.n as usize {
            return Err(Error::InvalidArgument("permutation length must equal n".into()));
        }
        let mut seen = 0u32;
        for &p in perm {
            if p >= self.n as usize || (seen >> p) & 1 == 1 {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen |= 1 << p;
        }
        Stabilizer::new(self.gens.iter().map(|g| g.permute(perm)).collect())
    }

    /// Weight histogram of the `2^(n-k)` group elements; invariant under
    /// qubit permutation.
    pub fn weight_enumerator(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.n as usize + 1];
        for e in self.span_elements() {
            counts[e.weight() as usize] += 1;
        }
        counts
    }

    /// Structure classification; every test is a rank computation over the
    /// full element list or the generators.
    pub fn classify_structure(&self) -> CodeStructure {
        let m = self.gens.len();
        let packed: Vec<u32> = self.gens.iter().map(|g| g.packed()).collect();
        let (is_css, _, _) = css_split(self.n, &packed);
        // Z <-> Y relabeling: (x, z) -> (x ^ z, z).
        let zy: Vec<u32> = self
            .gens
            .iter()
            .map(|g| {
                let (x, z) = (g.x_part(), g.z_part());
                PauliVector::from_parts(self.n, x ^ z, z).packed()
            })
            .collect();
        let (is_cssy, _, _) = css_split(self.n, &zy);
        let is_dual_containing_css = if is_css {
            let (_, rx, rz) = css_split(self.n, &packed);
            rx.rows() == rz.rows()
        } else {
            false
        };
        let is_linear = self.gens.iter().all(|g| self.in_span(&g.omega_mul()));
        let mut w4 = BitRref::new();
        for e in self.span_elements() {
            if e.weight() == 4 {
                w4.insert(e.packed());
            }
        }
        let has_weight4_rep = w4.rank() == m;
        let full_support =
            self.gens.iter().fold(0u16, |acc, g| acc | g.support()) == mask_n(self.n);
        CodeStructure {
            is_css,
            is_cssy,
            is_dual_containing_css,
            is_linear,
            has_weight4_rep,
            full_support,
        }
    }
}

struct SpanIter {
    n: u8,
    basis: Vec<u32>,
    idx: u64,
}

impl Iterator for SpanIter {
    type Item = PauliVector;

    fn next(&mut self) -> Option<PauliVector> {
        if self.idx == 1u64 << self.basis.len() {
            return None;
        }
        // Rebuild from the Gray code of idx to keep the iterator stateless
        // across clones; cost is one XOR pass over the basis.
        let gray = self.idx ^ (self.idx >> 1);
        let mut acc = 0u32;
        for (i, &b) in self.basis.iter().enumerate() {
            if (gray >> i) & 1 == 1 {
                acc ^= b;
            }
        }
        self.idx += 1;
        Some(PauliVector::from_packed(self.n, acc))
    }
}

/// Dimensions of the X-only and Z-only subgroups over the whole element
/// list; the group is CSS exactly when they sum to the generator count.
fn css_split(n: u8, gens_packed: &[u32]) -> (bool, BitRref, BitRref) {
    let mask = mask_n(n) as u32;
    let mut rx = BitRref::new();
    let mut rz = BitRref::new();
    for w in GraySpan::new(gens_packed) {
        let (x, z) = (w & mask, w >> n);
        if z == 0 && x != 0 {
            rx.insert(x);
        }
        if x == 0 && z != 0 {
            rz.insert(z);
        }
    }
    (rx.rank() + rz.rank() == gens_packed.len(), rx, rz)
}

/// Column signature used to prune the permutation search: for each qubit,
/// the joint histogram of (element weight, component letter) over the whole
/// group. Qubit permutations preserve letters, so matching columns must
/// have identical signatures.
fn column_signatures(s: &Stabilizer) -> Vec<Vec<u32>> {
    let n = s.n() as usize;
    let mut sigs = vec![vec![0u32; 3 * (n + 1)]; n];
    for e in s.span_elements() {
        let w = e.weight() as usize;
        for (j, sig) in sigs.iter_mut().enumerate() {
            let letter = match e.get(j) {
                Pauli::I => continue,
                Pauli::X => 0,
                Pauli::Y => 1,
                Pauli::Z => 2,
            };
            sig[letter * (n + 1) + w] += 1;
        }
    }
    sigs
}

fn map_packed(w: u32, n: u8, perm: &[usize]) -> u32 {
    let mask = mask_n(n) as u32;
    let (x, z) = (w & mask, (w >> n) & mask);
    let (mut ox, mut oz) = (0u32, 0u32);
    let mut support = x | z;
    while support != 0 {
        let i = support.trailing_zeros() as usize;
        support &= support - 1;
        ox |= ((x >> i) & 1) << perm[i];
        oz |= ((z >> i) & 1) << perm[i];
    }
    ox | (oz << n)
}

/// Whether `a` and `b` generate the same group up to a relabeling of
/// qubits. Invariant prefilters (weight enumerator, per-column signatures)
/// cut the search; the remainder is a backtracking assignment of columns
/// with partial span-membership pruning.
pub fn permutation_equivalent(a: &Stabilizer, b: &Stabilizer) -> bool {
    if a.n() != b.n() || a.num_generators() != b.num_generators() {
        return false;
    }
    if a.canonical_key() == b.canonical_key() {
        return true;
    }
    if a.weight_enumerator() != b.weight_enumerator() {
        return false;
    }
    let n = a.n() as usize;
    let sig_a = column_signatures(a);
    let sig_b = column_signatures(b);
    {
        let mut sa = sig_a.clone();
        let mut sb = sig_b.clone();
        sa.sort();
        sb.sort();
        if sa != sb {
            return false;
        }
    }
    let candidates: Vec<Vec<usize>> = sig_a
        .iter()
        .map(|sa| (0..n).filter(|&j| &sig_b[j] == sa).collect())
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return false;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (candidates[i].len(), i));

    // Non-identity elements of a's group with their supports.
    let elements: Vec<(u16, u32)> = a
        .span_elements()
        .filter(|e| !e.is_identity())
        .map(|e| (e.support(), e.packed()))
        .collect();

    struct Dfs<'a> {
        n: u8,
        order: &'a [usize],
        candidates: &'a [Vec<usize>],
        elements: &'a [(u16, u32)],
        b: &'a Stabilizer,
        perm: Vec<usize>,
        used: u32,
        assigned: u16,
    }

    impl Dfs<'_> {
        fn run(&mut self, depth: usize) -> bool {
            if depth == self.order.len() {
                return true;
            }
            let q = self.order[depth];
            for ci in 0..self.candidates[q].len() {
                let c = self.candidates[q][ci];
                if (self.used >> c) & 1 == 1 {
                    continue;
                }
                self.perm[q] = c;
                self.used |= 1 << c;
                self.assigned |= 1 << q;
                let ok = self.elements.iter().all(|&(supp, w)| {
                    if supp & !self.assigned != 0 || (supp >> q) & 1 == 0 {
                        return true;
                    }
                    self.b.rref.contains(map_packed(w, self.n, &self.perm))
                });
                if ok && self.run(depth + 1) {
                    return true;
                }
                self.used &= !(1 << c);
                self.assigned &= !(1 << q);
            }
            false
        }
    }

    let mut dfs = Dfs {
        n: a.n(),
        order: &order,
        candidates: &candidates,
        elements: &elements,
        b,
        perm: vec![0; n],
        used: 0,
        assigned: 0,
    };
    dfs.run(0)
}

/// Groups codes into qubit-permutation equivalence classes; returns the
/// class index of each code, numbered in order of first appearance.
pub fn equivalence_classes(codes: &[Stabilizer]) -> Vec<usize> {
    use std::collections::HashMap;

    let mut class_of = vec![usize::MAX; codes.len()];
    // Invariant key -> list of (representative index, class id).
    let mut buckets: HashMap<(Vec<u32>, Vec<Vec<u32>>), Vec<(usize, usize)>> = HashMap::new();
    let mut next_class = 0usize;
    for (i, code) in codes.iter().enumerate() {
        let mut sigs = column_signatures(code);
        sigs.sort();
        let key = (code.weight_enumerator(), sigs);
        let entry = buckets.entry(key).or_default();
        let mut found = None;
        for &(rep, class) in entry.iter() {
            if permutation_equivalent(code, &codes[rep]) {
                found = Some(class);
                break;
            }
        }
        let class = found.unwrap_or_else(|| {
            let c = next_class;
            next_class += 1;
            entry.push((i, c));
            c
        });
        class_of[i] = class;
    }
    class_of
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(s: &str) -> PauliVector {
        PauliVector::parse(s).unwrap()
    }

    fn cyclic_code(gen: &str) -> Stabilizer {
        let g0 = pv(gen);
        let n = g0.n();
        let mut rref = BitRref::new();
        let mut gens = Vec::new();
        let mut g = g0;
        for _ in 0..n {
            if rref.insert(g.packed()) {
                gens.push(g);
            }
            g = g.cyclic_shift();
        }
        Stabilizer::new(gens).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["XZIZXII", "YZIZY", "IIIII", "XYZ"] {
            assert_eq!(pv(s).to_string(), s);
        }
        assert!(PauliVector::parse("xz").is_err());
        assert!(PauliVector::parse("").is_err());
    }

    #[test]
    fn products_and_weight() {
        let a = pv("XXI");
        let b = pv("ZXI");
        assert_eq!(a.mul(&b).to_string(), "YII");
        assert_eq!(a.weight(), 2);
        assert_eq!(pv("IYI").weight(), 1);
    }

    #[test]
    fn symplectic_examples() {
        assert_eq!(symplectic_product(&pv("X"), &pv("Z")), 1);
        assert_eq!(symplectic_product(&pv("X"), &pv("X")), 0);
        assert_eq!(symplectic_product(&pv("Y"), &pv("Z")), 1);
        assert_eq!(symplectic_product(&pv("XX"), &pv("ZZ")), 0);
        assert_eq!(symplectic_product(&pv("XZ"), &pv("ZX")), 0);
        assert_eq!(symplectic_product(&pv("XI"), &pv("ZI")), 1);
    }

    #[test]
    fn omega_mul_relabels_letters() {
        assert_eq!(pv("XYZ").omega_mul().to_string(), "ZXY");
        // Three applications come back around.
        let e = pv("XYZI");
        assert_eq!(e.omega_mul().omega_mul().omega_mul(), e);
    }

    fn steane() -> Stabilizer {
        let rows = ["XIXIXIX", "IXXIIXX", "IIIXXXX"];
        let mut gens: Vec<PauliVector> = rows.iter().map(|r| pv(r)).collect();
        for r in rows {
            let x = pv(r);
            gens.push(PauliVector::from_parts(7, 0, x.x_part()));
        }
        Stabilizer::new(gens).unwrap()
    }

    #[test]
    fn steane_syndrome_of_x1() {
        let s = steane();
        let e = pv("XIIIIII");
        // X-type generators commute with an X error; the Z-type generator
        // containing qubit 1 flags it.
        assert_eq!(s.syndrome_of(&e), 0b001000);
        assert_eq!(s.syndrome_of(&PauliVector::identity(7)), 0);
    }

    #[test]
    fn steane_structure() {
        let fl = steane().classify_structure();
        assert!(fl.is_css);
        assert!(fl.is_cssy);
        assert!(fl.is_dual_containing_css);
        assert!(fl.is_linear);
        assert!(fl.has_weight4_rep);
        assert!(fl.full_support);
    }

    #[test]
    fn five_qubit_code_basics() {
        let s = cyclic_code("YZIZY");
        assert_eq!(s.num_generators(), 4);
        assert_eq!(s.k(), 1);
        assert_eq!(s.distance().unwrap(), 3);
        let count = s.normalizer_elements().count();
        assert_eq!(count, 64);
        for e in s.normalizer_elements() {
            assert_eq!(s.syndrome_of(&e), 0);
        }
        let fl = s.classify_structure();
        assert!(fl.full_support);
        assert!(!fl.is_css);
    }

    #[test]
    fn seven_qubit_cyclic_weight_four() {
        let s = cyclic_code("XZIZXII");
        assert_eq!(s.k(), 1);
        assert_eq!(s.distance().unwrap(), 3);
        assert!(s.classify_structure().has_weight4_rep);
    }

    #[test]
    fn coset_canonical_collapses_cosets() {
        let s = cyclic_code("YZIZY");
        let e = pv("XIIII");
        for g in s.span_elements() {
            assert_eq!(s.coset_canonical(&e.mul(&g)), s.coset_canonical(&e));
        }
        assert!(s.in_span(&PauliVector::identity(5)));
    }

    #[test]
    fn permutation_equivalence_basics() {
        let a = cyclic_code("YZIZY");
        assert!(permutation_equivalent(&a, &a));
        let reversed = a.permute_qubits(&[4, 3, 2, 1, 0]).unwrap();
        assert!(permutation_equivalent(&a, &reversed));
        let rotated = a.permute_qubits(&[1, 2, 3, 4, 0]).unwrap();
        assert!(permutation_equivalent(&a, &rotated));
        // Relabeling qubits as (0, 2, 4, 1, 3) maps this span onto the
        // X-Z counterpart, even though no letter map is involved.
        let b = cyclic_code("XZIZX");
        assert!(permutation_equivalent(&a, &b));
        assert!(permutation_equivalent(
            &a.permute_qubits(&[0, 2, 4, 1, 3]).unwrap(),
            &b
        ));
        // Different weight enumerators rule equivalence out immediately.
        let c = Stabilizer::new(vec![pv("XXIII"), pv("IXXII"), pv("IIXXI"), pv("IIIXX")])
            .unwrap();
        assert!(!permutation_equivalent(&a, &c));
    }

    #[test]
    fn equivalence_classes_group_relabelings() {
        let a = cyclic_code("YZIZY");
        let rot = a.permute_qubits(&[2, 0, 1, 4, 3]).unwrap();
        let b = Stabilizer::new(vec![pv("XXIII"), pv("IXXII"), pv("IIXXI"), pv("IIIXX")])
            .unwrap();
        let classes = equivalence_classes(&[a, b, rot]);
        assert_eq!(classes[0], classes[2]);
        assert_ne!(classes[0], classes[1]);
    }

    #[test]
    fn rejects_bad_generators() {
        // Anticommuting pair.
        assert!(Stabilizer::new(vec![pv("XI"), pv("ZI")]).is_err());
        // Dependent pair.
        assert!(Stabilizer::new(vec![pv("XX"), pv("XX")]).is_err());
        // Mixed sizes.
        assert!(Stabilizer::new(vec![pv("XX"), pv("ZZZ")]).is_err());
    }

    #[test]
    fn distance_requires_logical_qubits() {
        let s = Stabilizer::new(vec![pv("XX"), pv("ZZ")]).unwrap();
        assert_eq!(s.k(), 0);
        assert!(s.distance().is_err());
    }

    proptest! {
        #[test]
        fn trace_inner_product_matches_symplectic(
            n in 1u8..=12,
            xa in 0u16..4096, za in 0u16..4096,
            xb in 0u16..4096, zb in 0u16..4096,
        ) {
            let m = if n == 16 { u16::MAX } else { (1 << n) - 1 };
            let a = PauliVector::from_parts(n, xa & m, za & m);
            let b = PauliVector::from_parts(n, xb & m, zb & m);
            prop_assert_eq!(trace_inner_product(&a, &b), symplectic_product(&a, &b));
        }

        #[test]
        fn syndrome_is_linear(xa in 0u16..32, za in 0u16..32, xb in 0u16..32, zb in 0u16..32) {
            let s = cyclic_code("YZIZY");
            let a = PauliVector::from_parts(5, xa, za);
            let b = PauliVector::from_parts(5, xb, zb);
            prop_assert_eq!(
                s.syndrome_of(&a.mul(&b)),
                s.syndrome_of(&a) ^ s.syndrome_of(&b)
            );
        }
    }
}
