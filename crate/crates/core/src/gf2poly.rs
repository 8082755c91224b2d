//! Polynomials over GF(2), packed into machine words.
//!
//! Everything here serves cyclic-code construction at modest block lengths:
//! coefficients live in a `u64` (bit `i` is the coefficient of `x^i`), and
//! products stay within the word because operands never exceed degree 31 in
//! practice. The divisor lattice of `x^n + 1` is built from its irreducible
//! factorization, which for odd `n` is guided by the 2-cyclotomic cosets
//! modulo `n`; even lengths square the odd-part factorization.

use crate::{Error, Result};

/// A polynomial over GF(2). Bit `i` of the word is the coefficient of `x^i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryPoly(pub u64);

impl BinaryPoly {
    pub const ZERO: BinaryPoly = BinaryPoly(0);
    pub const ONE: BinaryPoly = BinaryPoly(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros())
        }
    }

    /// `x^n + 1`.
    pub fn xn_plus_1(n: u32) -> BinaryPoly {
        debug_assert!(n < 63);
        BinaryPoly((1 << n) | 1)
    }

    pub fn add(self, other: BinaryPoly) -> BinaryPoly {
        BinaryPoly(self.0 ^ other.0)
    }

    /// Carry-less product. The degrees must sum below 64.
    pub fn mul(self, other: BinaryPoly) -> BinaryPoly {
        let (mut acc, mut a, b) = (0u64, self.0, other.0);
        let mut shift = 0;
        while a != 0 {
            let t = a.trailing_zeros();
            a >>= t;
            shift += t;
            debug_assert!(b.leading_zeros() >= shift || b == 0);
            acc ^= b << shift;
            a >>= 1;
            shift += 1;
        }
        BinaryPoly(acc)
    }

    /// Quotient and remainder of division by `d`, which must be nonzero.
    pub fn div_rem(self, d: BinaryPoly) -> (BinaryPoly, BinaryPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let mut rem = self.0;
        let mut quot = 0u64;
        while let Some(rd) = BinaryPoly(rem).degree() {
            if rd < dd {
                break;
            }
            let sh = rd - dd;
            rem ^= d.0 << sh;
            quot |= 1 << sh;
        }
        (BinaryPoly(quot), BinaryPoly(rem))
    }

    pub fn rem(self, d: BinaryPoly) -> BinaryPoly {
        self.div_rem(d).1
    }

    pub fn divides(self, other: BinaryPoly) -> bool {
        other.rem(self).is_zero()
    }

    /// Coefficient of `x^i`.
    pub fn coeff(self, i: u32) -> bool {
        (self.0 >> i) & 1 == 1
    }

    /// Little-endian coefficient string padded to `len` characters.
    pub fn to_bitstring(self, len: usize) -> String {
        (0..len)
            .map(|i| if i < 64 && self.coeff(i as u32) { '1' } else { '0' })
            .collect()
    }

    /// Parses a little-endian coefficient string of `0`/`1` characters.
    pub fn from_bitstring(s: &str) -> Result<BinaryPoly> {
        if s.is_empty() || s.len() > 63 {
            return Err(Error::InvalidArgument(format!(
                "polynomial bitstring must have 1..=63 characters, got {}",
                s.len()
            )));
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "polynomial bitstring may contain only 0 and 1, got {c:?}"
                    )))
                }
            }
        }
        Ok(BinaryPoly(bits))
    }
}

impl std::fmt::Debug for BinaryPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in 0..64 {
            if self.coeff(i) {
                if !first {
                    write!(f, "+")?;
                }
                match i {
                    0 => write!(f, "1")?,
                    1 => write!(f, "x")?,
                    _ => write!(f, "x^{i}")?,
                }
                first = false;
            }
        }
        Ok(())
    }
}

/// Product of `a` and `b` reduced modulo `m`; `m` must be nonzero.
pub fn poly_mul_mod(a: BinaryPoly, b: BinaryPoly, m: BinaryPoly) -> Result<BinaryPoly> {
    if m.is_zero() {
        return Err(Error::InvalidArgument("zero modulus".into()));
    }
    Ok(a.rem(m).mul(b.rem(m)).rem(m))
}

/// The substitution `x -> x^(n-1)` reduced modulo `x^n + 1`: coefficient of
/// `x^i` moves to `x^((n-i) mod n)`. Requires `deg(a) < n`.
pub fn poly_reciprocal(a: BinaryPoly, n: u32) -> BinaryPoly {
    debug_assert!(a.degree().map_or(true, |d| d < n));
    let mut out = 0u64;
    for i in 0..n {
        if a.coeff(i) {
            out |= 1 << ((n - i) % n);
        }
    }
    BinaryPoly(out)
}

/// 2-cyclotomic cosets modulo odd `n`: the partition of `0..n` under
/// multiplication by 2. Coset sizes are the degrees of the irreducible
/// factors of `x^n + 1`.
pub fn cyclotomic_cosets(n: u32) -> Vec<Vec<u32>> {
    assert!(n % 2 == 1 && n >= 1);
    let mut seen = vec![false; n as usize];
    let mut cosets = Vec::new();
    for s in 0..n {
        if seen[s as usize] {
            continue;
        }
        let mut coset = Vec::new();
        let mut v = s;
        loop {
            seen[v as usize] = true;
            coset.push(v);
            v = (v * 2) % n;
            if v == s {
                break;
            }
        }
        cosets.push(coset);
    }
    cosets
}

/// Irreducible factorization of `x^n + 1` as `(factor, multiplicity)` pairs.
///
/// With `n = m * 2^a` and `m` odd, `x^n + 1 = (x^m + 1)^(2^a)` and `x^m + 1`
/// is squarefree. The cosets fix how many factors of each degree exist; the
/// factors themselves are found by scanning monic candidates in ascending
/// degree, where any candidate divisor not divisible by a previously found
/// factor is itself irreducible (its irreducible factors would be smaller
/// divisors of `x^m + 1`, all already found).
pub fn irreducible_factors(n: u32) -> Vec<(BinaryPoly, u32)> {
    assert!((1..=31).contains(&n));
    let a = n.trailing_zeros();
    let m = n >> a;
    let multiplicity = 1u32 << a;
    let xm1 = BinaryPoly::xn_plus_1(m);

    let mut degree_counts = vec![0u32; m as usize + 1];
    for coset in cyclotomic_cosets(m) {
        degree_counts[coset.len()] += 1;
    }

    let mut factors: Vec<BinaryPoly> = Vec::new();
    for d in 1..=m {
        let mut found = 0;
        if degree_counts[d as usize] == 0 {
            continue;
        }
        for low in 0..(1u64 << d) {
            let cand = BinaryPoly(low | (1 << d));
            if !cand.divides(xm1) {
                continue;
            }
            if factors.iter().any(|f| f.divides(cand) && *f != cand) {
                continue;
            }
            factors.push(cand);
            found += 1;
        }
        assert_eq!(
            found, degree_counts[d as usize],
            "factor search disagrees with cyclotomic cosets at degree {d}"
        );
    }
    factors.into_iter().map(|f| (f, multiplicity)).collect()
}

/// All monic divisors of `x^n + 1`, in ascending `(degree, word)` order.
/// The zero polynomial is not a divisor and is not included.
pub fn factors_of_xn_minus_1(n: u32) -> Vec<BinaryPoly> {
    assert!((1..=31).contains(&n), "supported block lengths are 1..=31");
    let factors = irreducible_factors(n);
    let mut exps = vec![0u32; factors.len()];
    let mut out = Vec::new();
    loop {
        let mut prod = BinaryPoly::ONE;
        for (i, &(f, _)) in factors.iter().enumerate() {
            for _ in 0..exps[i] {
                prod = prod.mul(f);
            }
        }
        out.push(prod);
        // Odometer over multiplicity vectors.
        let mut i = 0;
        loop {
            if i == factors.len() {
                out.sort_by_key(|p| (p.degree().map_or(0, |d| d + 1), p.0));
                return out;
            }
            exps[i] += 1;
            if exps[i] <= factors[i].1 {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}
