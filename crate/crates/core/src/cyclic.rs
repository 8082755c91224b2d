//! Additive cyclic codes over the four-element field in two-generator
//! polynomial form.
//!
//! A cyclic stabilizer code on `n` qubits is an additive code over
//! GF(4) = {0, 1, w, w^2} that is closed under cyclic coordinate shifts.
//! Identifying length-`n` words with polynomials modulo `x^n + 1`, every
//! such code is the cyclic span of at most two generators,
//!
//! ```text
//!     C = < w*p(x) + q(x),  r(x) >_cyc
//! ```
//!
//! with `p`, `q`, `r` binary polynomials. Reading a codeword
//! `u(x) + w*v(x)` as the Pauli operator with X-part `u` and Z-part `v`,
//! the span is a stabilizer group exactly when
//!
//! * `p` and `r` divide `x^n + 1`,
//! * all shifts of the mixed generator commute with each other:
//!   `p*rec(q) + rec(p)*q = 0 (mod x^n + 1)`, where `rec` substitutes
//!   `x -> x^(n-1)` (the cross-correlation of the X- and Z-parts),
//! * shifts of the mixed generator commute with shifts of `r`:
//!   `rec(p)*r = 0 (mod x^n + 1)`,
//! * the span is genuinely shift-closed: wrapping the highest shift of
//!   the mixed generator must land back in the span, which holds iff
//!   `r` divides `q*(x^n + 1)/p`, i.e. `q*(x^n + 1) = 0 (mod p*r)`.
//!
//! The code then has `2^(2n - deg p - deg r)` elements; as a stabilizer
//! code it encodes `k = deg p + deg r - n` logical qubits from a
//! generator matrix of `n - deg p` shifts of `w*p + q` stacked on
//! `n - deg r` shifts of `r`.
//!
//! [`enumerate_cyclic`] walks this parametrization exhaustively for fixed
//! `(n, k)` and deduplicates by additive row space, so each code appears
//! exactly once no matter how many `(p, q, r)` triples present it.

use std::collections::HashSet;

use crate::gf2poly::{factors_of_xn_minus_1, poly_reciprocal, BinaryPoly};
use crate::pauli::{BitRref, PauliVector, Stabilizer};
use crate::{Error, Result};

/// A validated `(p, q, r)` presentation of an additive cyclic code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CyclicCodeSpec {
    n: u8,
    p_poly: BinaryPoly,
    q_poly: BinaryPoly,
    r_poly: BinaryPoly,
}

impl CyclicCodeSpec {
    /// Validates the full set of presentation invariants listed in the
    /// module docs. `k = 0` is allowed (a code with no logical qubits);
    /// `k = n` is not, since the stabilizer would be empty.
    pub fn new(n: u8, p_poly: BinaryPoly, q_poly: BinaryPoly, r_poly: BinaryPoly) -> Result<Self> {
        if !(1..=16).contains(&n) {
            return Err(Error::InvalidArgument(format!("length must be 1..=16, got {n}")));
        }
        let n32 = n as u32;
        let xn1 = BinaryPoly::xn_plus_1(n32);
        for (name, f) in [("p", p_poly), ("r", r_poly)] {
            if f.is_zero() || !f.divides(xn1) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {f:?} must be a nonzero divisor of x^{n} + 1"
                )));
            }
        }
        let dp = p_poly.degree().expect("nonzero");
        let dr = r_poly.degree().expect("nonzero");
        if q_poly.degree().is_some_and(|dq| dq > dr) {
            return Err(Error::InvalidArgument(format!(
                "deg q = {:?} exceeds deg r = {dr}",
                q_poly.degree().unwrap()
            )));
        }
        let k = (dp + dr) as i64 - n as i64;
        if !(0..n as i64).contains(&k) {
            return Err(Error::InvalidArgument(format!(
                "deg p + deg r = {} encodes k = {k} on {n} qubits; need 0 <= k < n",
                dp + dr
            )));
        }
        if !p_poly.mul(r_poly).divides(q_poly.mul(xn1)) {
            return Err(Error::InvalidArgument(
                "span is not shift-closed: q*(x^n + 1) is not divisible by p*r".into(),
            ));
        }
        let (p, q, r) = (p_poly.rem(xn1), q_poly.rem(xn1), r_poly.rem(xn1));
        let self_orth =
            p.mul(poly_reciprocal(q, n32)).add(poly_reciprocal(p, n32).mul(q)).rem(xn1);
        if !self_orth.is_zero() {
            return Err(Error::InvalidArgument(
                "shifts of the mixed generator do not commute with each other".into(),
            ));
        }
        if !poly_reciprocal(p, n32).mul(r).rem(xn1).is_zero() {
            return Err(Error::InvalidArgument(
                "shifts of the mixed generator do not commute with shifts of r".into(),
            ));
        }
        Ok(CyclicCodeSpec { n, p_poly, q_poly, r_poly })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn p_poly(&self) -> BinaryPoly {
        self.p_poly
    }

    pub fn q_poly(&self) -> BinaryPoly {
        self.q_poly
    }

    pub fn r_poly(&self) -> BinaryPoly {
        self.r_poly
    }

    /// Logical qubits of the corresponding stabilizer code.
    pub fn k(&self) -> u8 {
        let dp = self.p_poly.degree().expect("nonzero");
        let dr = self.r_poly.degree().expect("nonzero");
        (dp + dr) as u8 - self.n
    }

    /// Builds the stabilizer from the shift-row generator matrix: rows
    /// `x^j * (w*p + q)` for `j < n - deg p`, then `x^j * r` for
    /// `j < n - deg r`, reduced to an independent set in row order.
    pub fn to_stabilizer(&self) -> Result<Stabilizer> {
        let n32 = self.n as u32;
        let xn1 = BinaryPoly::xn_plus_1(n32);
        let dp = self.p_poly.degree().expect("nonzero");
        let dr = self.r_poly.degree().expect("nonzero");
        let mut rows = Vec::new();
        for j in 0..n32 - dp {
            let z = BinaryPoly(self.p_poly.0 << j).rem(xn1);
            let x = BinaryPoly(self.q_poly.0 << j).rem(xn1);
            rows.push(PauliVector::from_parts(self.n, x.0 as u16, z.0 as u16));
        }
        for j in 0..n32 - dr {
            let x = BinaryPoly(self.r_poly.0 << j).rem(xn1);
            rows.push(PauliVector::from_parts(self.n, x.0 as u16, 0));
        }
        let mut rref = BitRref::new();
        let gens: Vec<PauliVector> =
            rows.into_iter().filter(|g| rref.insert(g.packed())).collect();
        let m = (self.n - self.k()) as usize;
        if gens.len() != m {
            return Err(Error::InternalConsistency(format!(
                "shift rows of {self:?} have rank {}, expected {m}",
                gens.len()
            )));
        }
        Stabilizer::new(gens)
    }

    /// Whether some single codeword's `n` cyclic shifts span the whole
    /// code, and a witness codeword when one exists.
    pub fn has_single_generator(&self) -> Result<(bool, Option<PauliVector>)> {
        let s = self.to_stabilizer()?;
        let m = s.num_generators();
        for e in s.span_elements() {
            if e.is_identity() {
                continue;
            }
            let mut rref = BitRref::new();
            let mut g = e;
            for _ in 0..s.n() {
                rref.insert(g.packed());
                g = g.cyclic_shift();
            }
            if rref.rank() == m {
                return Ok((true, Some(e)));
            }
        }
        Ok((false, None))
    }
}

/// The stabilizer spanned by all cyclic shifts of one Pauli operator
/// (greedily reduced to an independent generating set). Errors if the
/// shifts fail to commute.
pub fn cyclic_span_stabilizer(g: &PauliVector) -> Result<Stabilizer> {
    let mut rref = BitRref::new();
    let mut gens = Vec::new();
    let mut e = *g;
    for _ in 0..g.n() {
        if rref.insert(e.packed()) {
            gens.push(e);
        }
        e = e.cyclic_shift();
    }
    Stabilizer::new(gens)
}

/// Every distinct self-orthogonal additive cyclic code with stabilizer
/// parameters `[[n, k]]`, deduplicated as additive row spaces and listed
/// in a fixed deterministic order. Distinct codes may still be related by
/// a qubit relabeling; see [`crate::pauli::equivalence_classes`].
pub fn enumerate_cyclic(n: u8, k: u8) -> Result<Vec<CyclicCodeSpec>> {
    if !(1..=16).contains(&n) || k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "enumeration needs 1 <= k < n <= 16, got n = {n}, k = {k}"
        )));
    }
    let n32 = n as u32;
    let xn1 = BinaryPoly::xn_plus_1(n32);
    let divisors = factors_of_xn_minus_1(n32);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut out = Vec::new();
    for &r in &divisors {
        let dr = r.degree().expect("nonzero");
        let Some(dp) = (n32 + k as u32).checked_sub(dr).filter(|&d| d <= n32) else {
            continue;
        };
        for &p in &divisors {
            if p.degree() != Some(dp) {
                continue;
            }
            // The p-r commutation condition is q-independent; skip the
            // whole q range when it fails.
            if !poly_reciprocal(p.rem(xn1), n32).mul(r.rem(xn1)).rem(xn1).is_zero() {
                continue;
            }
            for q_bits in 0..1u64 << (dr + 1) {
                let Ok(spec) = CyclicCodeSpec::new(n, p, BinaryPoly(q_bits), r) else {
                    continue;
                };
                let stab = spec.to_stabilizer()?;
                if seen.insert(stab.canonical_key()) {
                    out.push(spec);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{trace_inner_product, LETTER_PERMS};

    fn poly(bits: u64) -> BinaryPoly {
        BinaryPoly(bits)
    }

    fn pv(s: &str) -> PauliVector {
        PauliVector::parse(s).unwrap()
    }

    #[test]
    fn size_32_example_reproduces_generator_matrix() {
        // n = 5, p = 1 + x, q = x^3, r = 1 + x + x^2 + x^3 + x^4: a code
        // with 2^5 elements (k = 0) whose shift rows are, as Paulis,
        // exactly the four shifts of w*p + q followed by the all-X row.
        let spec = CyclicCodeSpec::new(5, poly(0b11), poly(0b1000), poly(0b11111)).unwrap();
        assert_eq!(spec.k(), 0);
        let s = spec.to_stabilizer().unwrap();
        let expected: Vec<PauliVector> =
            ["ZZIXI", "IZZIX", "XIZZI", "IXIZZ", "XXXXX"].iter().map(|g| pv(g)).collect();
        assert_eq!(s.generators(), &expected[..]);

        let (single, witness) = spec.has_single_generator().unwrap();
        assert!(single);
        let witness = witness.unwrap();
        // Any witness's shifts must span the whole code; the first shift
        // row is one valid witness.
        for w in [witness, pv("ZZIXI")] {
            let spanned = cyclic_span_stabilizer(&w).unwrap();
            assert_eq!(spanned.canonical_key(), s.canonical_key());
        }
    }

    #[test]
    fn mixed_generator_maps_to_pauli_span() {
        let g = pv("XZIZXII");
        assert_eq!(g.x_part(), 0b0010001);
        assert_eq!(g.z_part(), 0b0001010);
        let a = cyclic_span_stabilizer(&g).unwrap();
        assert_eq!(a.k(), 1);
        assert!(a.in_span(&g.cyclic_shift()));

        // A generator with Y letters packs into overlapping halves.
        let h = pv("YZIZYII");
        assert_eq!(h.x_part(), 0b0010001);
        assert_eq!(h.z_part(), 0b0011011);
        let b = cyclic_span_stabilizer(&h).unwrap();
        assert_eq!(b.k(), 1);
        assert!(b.in_span(&h.cyclic_shift()));

        // The second code is the first relabeled by X <-> Y everywhere.
        let swapped: Vec<PauliVector> = a
            .generators()
            .iter()
            .map(|g| {
                let mut g = *g;
                for q in 0..7 {
                    g = g.apply_letter_perm(q, &LETTER_PERMS[2]);
                }
                g
            })
            .collect();
        assert_eq!(Stabilizer::new(swapped).unwrap().canonical_key(), b.canonical_key());
    }

    #[test]
    fn enumeration_counts_for_small_parameters() {
        assert_eq!(enumerate_cyclic(5, 1).unwrap().len(), 5);
        assert_eq!(enumerate_cyclic(5, 2).unwrap().len(), 0);
        assert_eq!(enumerate_cyclic(6, 3).unwrap().len(), 15);
        assert_eq!(enumerate_cyclic(7, 1).unwrap().len(), 11);
    }

    #[test]
    fn enumeration_contains_the_known_seven_qubit_code() {
        let target = cyclic_span_stabilizer(&pv("XZIZXII")).unwrap().canonical_key();
        let specs = enumerate_cyclic(7, 1).unwrap();
        let found = specs
            .iter()
            .filter(|spec| spec.to_stabilizer().unwrap().canonical_key() == target)
            .count();
        assert_eq!(found, 1, "exactly one presentation of the code survives dedup");
    }

    #[test]
    fn enumerated_codes_are_self_orthogonal_and_shift_closed() {
        for spec in enumerate_cyclic(6, 2).unwrap() {
            let s = spec.to_stabilizer().unwrap();
            assert_eq!(s.k(), 2);
            for a in s.generators() {
                for b in s.generators() {
                    assert_eq!(trace_inner_product(a, b), 0);
                }
                assert!(s.in_span(&a.cyclic_shift()), "{spec:?} not shift-closed");
            }
        }
    }

    #[test]
    fn whole_ring_r_gives_single_generator() {
        // r = x^n + 1 contributes no rows of its own, so the code is the
        // cyclic span of w*p + q alone.
        let spec = CyclicCodeSpec::new(5, poly(0b11), BinaryPoly::ZERO, poly(0b100001)).unwrap();
        assert_eq!(spec.k(), 1);
        let (single, witness) = spec.has_single_generator().unwrap();
        assert!(single);
        let s = spec.to_stabilizer().unwrap();
        let w = cyclic_span_stabilizer(&witness.unwrap()).unwrap();
        assert_eq!(w.canonical_key(), s.canonical_key());
    }

    #[test]
    fn rejects_invalid_presentations() {
        // p must divide x^5 + 1.
        assert!(CyclicCodeSpec::new(5, poly(0b101), poly(0), poly(0b11111)).is_err());
        // Non-commuting shifts: p = 1 + x, q = 1 fails the
        // cross-correlation identity.
        assert!(CyclicCodeSpec::new(5, poly(0b11), poly(0b1), poly(0b11111)).is_err());
        // deg q > deg r.
        assert!(CyclicCodeSpec::new(5, poly(0b100001), poly(0b100), poly(0b11)).is_err());
        // deg p + deg r < n means k < 0.
        assert!(CyclicCodeSpec::new(5, poly(0b11), poly(0), poly(0b11)).is_err());
    }

    #[test]
    fn equivalent_presentations_deduplicate() {
        // Adding a multiple of r to q re-presents the same code: q = x^3
        // and q = x^3 + r span identical row spaces.
        let a = CyclicCodeSpec::new(5, poly(0b11), poly(0b1000), poly(0b11111)).unwrap();
        let b = CyclicCodeSpec::new(5, poly(0b11), poly(0b10111), poly(0b11111)).unwrap();
        assert_eq!(
            a.to_stabilizer().unwrap().canonical_key(),
            b.to_stabilizer().unwrap().canonical_key()
        );
        assert!(enumerate_cyclic(5, 1).unwrap().iter().all(|c| c.k() == 1));
    }
}
