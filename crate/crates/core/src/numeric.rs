//! Exact and compensated floating-point accumulation.
//!
//! Estimator values are sums of up to millions of small probabilities, and
//! several consumers compare such sums at full bit precision (subset vs.
//! superset monotonicity, symmetry between relabeled codes). [`ExactSum`]
//! accumulates nonnegative doubles in a fixed-point register wide enough to
//! hold any finite `f64` exactly, so the final rounded value is independent
//! of accumulation order and monotone under adding nonnegative terms.
//! [`KahanSum`] is ordinary compensated summation for running totals where
//! order is already fixed and exactness is not required.

/// Number of 64-bit limbs in the fixed-point register.
///
/// Bit 0 weighs 2^-1074 (the least subnormal). The largest finite double
/// tops out at bit 2097, leaving 78 bits of carry headroom, far more than
/// the ~2^25 additions any evaluation performs.
const LIMBS: usize = 34;

const MASK52: u64 = (1 << 52) - 1;

/// Fixed-point accumulator for nonnegative finite `f64` values.
///
/// Every addition is exact; `value()` rounds the exact total to nearest,
/// ties to even. Consequences relied on elsewhere:
///
/// * order independence: any permutation of the same additions yields
///   bit-identical results;
/// * monotonicity: adding further nonnegative terms never decreases the
///   rounded value.
#[derive(Clone)]
pub struct ExactSum {
    limbs: [u64; LIMBS],
}

impl Default for ExactSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSum {
    pub fn new() -> Self {
        ExactSum { limbs: [0; LIMBS] }
    }

    pub fn clear(&mut self) {
        self.limbs = [0; LIMBS];
    }

    /// Adds `x` exactly. `x` must be nonnegative and finite.
    pub fn add(&mut self, x: f64) {
        debug_assert!(x >= 0.0 && x.is_finite());
        if x == 0.0 {
            return;
        }
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let (mant, exp) = if raw_exp == 0 {
            (bits & MASK52, -1074)
        } else {
            ((bits & MASK52) | (1 << 52), raw_exp - 1075)
        };
        let off = (exp + 1074) as usize;
        let (limb, sh) = (off / 64, off % 64);
        let wide = (mant as u128) << sh;
        let mut carry;
        let (lo, c0) = self.limbs[limb].overflowing_add(wide as u64);
        self.limbs[limb] = lo;
        carry = c0 as u64 + (wide >> 64) as u64;
        let mut i = limb + 1;
        while carry != 0 {
            let (v, c) = self.limbs[i].overflowing_add(carry);
            self.limbs[i] = v;
            carry = c as u64;
            i += 1;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Rounds the exact total to the nearest `f64`, ties to even.
    pub fn value(&self) -> f64 {
        let top = match (0..LIMBS).rev().find(|&i| self.limbs[i] != 0) {
            Some(i) => i,
            None => return 0.0,
        };
        let h = top * 64 + 63 - self.limbs[top].leading_zeros() as usize;
        if h < 52 {
            // Entire total fits in the subnormal range: exact.
            return f64::from_bits(self.limbs[0] & MASK52);
        }
        let mant = self.get_bits(h - 52, 53);
        let guard = h >= 53 && self.get_bits(h - 53, 1) == 1;
        let sticky = h >= 54 && self.any_below(h - 53);
        let mut m = mant;
        let mut e_top = h as i64 - 1074;
        if guard && (sticky || (m & 1) == 1) {
            m += 1;
            if m == 1 << 53 {
                m >>= 1;
                e_top += 1;
            }
        }
        if e_top > 1023 {
            return f64::INFINITY;
        }
        f64::from_bits((((e_top + 1023) as u64) << 52) | (m & MASK52))
    }

    /// Bits `[lo, lo + count)` of the register as an integer; `count <= 53`.
    fn get_bits(&self, lo: usize, count: usize) -> u64 {
        let (limb, sh) = (lo / 64, lo % 64);
        let mut v = self.limbs[limb] >> sh;
        if sh != 0 && limb + 1 < LIMBS {
            v |= self.limbs[limb + 1] << (64 - sh);
        }
        if count == 64 {
            v
        } else {
            v & ((1 << count) - 1)
        }
    }

    /// True if any bit strictly below `bit` is set.
    fn any_below(&self, bit: usize) -> bool {
        let (limb, sh) = (bit / 64, bit % 64);
        if sh != 0 && self.limbs[limb] & ((1 << sh) - 1) != 0 {
            return true;
        }
        self.limbs[..limb].iter().any(|&l| l != 0)
    }
}

/// Kahan compensated summation with exposed state so a paused accumulation
/// can resume bit-identically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KahanSum {
    pub sum: f64,
    pub compensation: f64,
}

impl Default for KahanSum {
    fn default() -> Self {
        Self::new()
    }
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum { sum: 0.0, compensation: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }
}
