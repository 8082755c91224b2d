//! Single-qubit Pauli channels parameterized by total error rate and bias.
//!
//! Every family resolves to component probabilities `(p_I, p_X, p_Y, p_Z)`
//! with `p_X + p_Y + p_Z = p` and, where a bias is meaningful,
//! `p_Z / p_X = eta`. Resolution is deterministic: equal parameters give
//! bit-identical probabilities, which downstream estimators rely on.

use crate::{Error, Result};

/// Supported channel families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ChannelFamily {
    /// Independent X and Z flips with marginal rates chosen so the total
    /// error rate is `p` and `p_Z / p_X = eta`; a Y component arises when
    /// both flips fire.
    BiasedXZ,
    /// Pauli twirl of amplitude damping combined with dephasing, the
    /// dephasing rate chosen to realize the requested bias. Has
    /// `p_X = p_Y = p / (2 + eta)` and `p_Z = eta p / (2 + eta)`; not every
    /// `(p, eta)` pair is physical.
    TwirledAmplitudeDamping,
    /// Uniform: `p_X = p_Y = p_Z = p / 3`. The bias parameter is ignored.
    Depolarizing,
}

impl ChannelFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            ChannelFamily::BiasedXZ => "xz",
            ChannelFamily::TwirledAmplitudeDamping => "ad",
            ChannelFamily::Depolarizing => "depol",
        }
    }

    fn from_tag(s: &str) -> Result<ChannelFamily> {
        match s {
            "xz" => Ok(ChannelFamily::BiasedXZ),
            "ad" => Ok(ChannelFamily::TwirledAmplitudeDamping),
            "depol" => Ok(ChannelFamily::Depolarizing),
            _ => Err(Error::InvalidArgument(format!(
                "unknown channel family {s:?}; expected xz, ad, or depol"
            ))),
        }
    }
}

/// A channel family instantiated at a total error rate `p` and bias `eta`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChannelSpec {
    pub family: ChannelFamily,
    pub p: f64,
    pub eta: f64,
}

impl ChannelSpec {
    pub fn new(family: ChannelFamily, p: f64, eta: f64) -> Result<ChannelSpec> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "error rate p must lie in (0, 1), got {p}"
            )));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bias eta must be positive and finite, got {eta}"
            )));
        }
        let eta = if family == ChannelFamily::Depolarizing { 1.0 } else { eta };
        Ok(ChannelSpec { family, p, eta })
    }

    /// Stable hashable identity: family tag plus the exact bit patterns of
    /// both parameters.
    pub fn key(&self) -> (u8, u64, u64) {
        let f = match self.family {
            ChannelFamily::BiasedXZ => 0,
            ChannelFamily::TwirledAmplitudeDamping => 1,
            ChannelFamily::Depolarizing => 2,
        };
        (f, self.p.to_bits(), self.eta.to_bits())
    }

    pub fn resolve(&self) -> Result<PauliChannel> {
        match self.family {
            ChannelFamily::Depolarizing => {
                let q = self.p / 3.0;
                Ok(PauliChannel { p_i: 1.0 - self.p, p_x: q, p_y: q, p_z: q })
            }
            ChannelFamily::BiasedXZ => {
                let (qx, qz) = biased_xz_marginals(self.p, self.eta);
                Ok(PauliChannel {
                    p_i: (1.0 - qx) * (1.0 - qz),
                    p_x: qx * (1.0 - qz),
                    p_y: qx * qz,
                    p_z: qz * (1.0 - qx),
                })
            }
            ChannelFamily::TwirledAmplitudeDamping => {
                let px = self.p / (2.0 + self.eta);
                let pz = self.eta * self.p / (2.0 + self.eta);
                // Physicality: the damping rate gamma = 4 p_X must admit a
                // dephasing rate in [0, 1] that reproduces p_Z.
                let gamma = 4.0 * px;
                let t = 2.0 - gamma - 4.0 * pz;
                let lam = 1.0 - gamma - (t / 2.0) * (t / 2.0);
                if t < 0.0 || lam < 0.0 {
                    return Err(Error::UnsatisfiableChannel(format!(
                        "no damping/dephasing pair realizes p={}, eta={}",
                        self.p, self.eta
                    )));
                }
                Ok(PauliChannel { p_i: 1.0 - self.p, p_x: px, p_y: px, p_z: pz })
            }
        }
    }
}

impl std::fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.family {
            ChannelFamily::Depolarizing => write!(f, "depol:p={}", self.p),
            _ => write!(f, "{}:p={},eta={}", self.family.tag(), self.p, self.eta),
        }
    }
}

/// Component probabilities of a resolved channel.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PauliChannel {
    pub p_i: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl PauliChannel {
    /// Probabilities in fixed `[I, X, Y, Z]` order.
    pub fn probs(&self) -> [f64; 4] {
        [self.p_i, self.p_x, self.p_y, self.p_z]
    }
}

/// Marginal flip rates `(q_x, q_z)` of the independent-flip channel with
/// total error rate `p` and bias `eta`, found by bisection on the monotone
/// map `q_x -> q_x + q_z(q_x)(1 - q_x)`. The interval collapses to one
/// floating-point ulp, so the result is a deterministic function of the
/// inputs.
pub(crate) fn biased_xz_marginals(p: f64, eta: f64) -> (f64, f64) {
    debug_assert!(p > 0.0 && p < 1.0 && eta > 0.0);
    let qz_of = |qx: f64| eta * qx / (1.0 + (eta - 1.0) * qx);
    let total = |qx: f64| qx + qz_of(qx) * (1.0 - qx);
    let (mut lo, mut hi) = (0.0f64, p);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let qx = hi;
    (qx, qz_of(qx))
}

/// The evaluation grid: every pairing of `p` in `{0.1, 0.01, 0.001, 0.0001}`
/// with `eta` in `{1, 10, 100, 1000}`, in that (p-major) order.
pub fn grid(family: ChannelFamily) -> Vec<ChannelSpec> {
    let mut out = Vec::with_capacity(16);
    for &p in &[0.1, 0.01, 0.001, 0.0001] {
        for &eta in &[1.0, 10.0, 100.0, 1000.0] {
            out.push(ChannelSpec { family, p, eta });
        }
    }
    out
}

/// Parses a channel argument: either a single spec (`xz:p=0.01,eta=10`,
/// `ad:p=0.001,eta=100`, `depol:p=0.01`) or a 16-point grid (`grid:xz`,
/// `grid:ad`, `grid:depol`).
pub fn parse_channel_arg(s: &str) -> Result<Vec<ChannelSpec>> {
    let (head, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("malformed channel {s:?}")))?;
    if head == "grid" {
        return Ok(grid(ChannelFamily::from_tag(rest)?));
    }
    let family = ChannelFamily::from_tag(head)?;
    let mut p = None;
    let mut eta = None;
    for kv in rest.split(',') {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("malformed parameter {kv:?} in {s:?}")))?;
        let val: f64 = v
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("not a number: {v:?} in {s:?}")))?;
        match k {
            "p" => p = Some(val),
            "eta" => eta = Some(val),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown channel parameter {k:?} in {s:?}"
                )))
            }
        }
    }
    let p = p.ok_or_else(|| Error::InvalidArgument(format!("channel {s:?} is missing p")))?;
    let eta = match (family, eta) {
        (ChannelFamily::Depolarizing, None) => 1.0,
        (ChannelFamily::Depolarizing, Some(_)) => {
            return Err(Error::InvalidArgument(
                "depol does not take an eta parameter".into(),
            ))
        }
        (_, Some(e)) => e,
        (_, None) => {
            return Err(Error::InvalidArgument(format!("channel {s:?} is missing eta")))
        }
    };
    Ok(vec![ChannelSpec::new(family, p, eta)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: ChannelFamily, p: f64, eta: f64) -> ChannelSpec {
        ChannelSpec::new(family, p, eta).unwrap()
    }

    /// Closed form for the X marginal: the stable root of
    /// `q^2 - Bq + p = 0` with `B = 1 + eta + p - p eta`.
    fn qx_closed_form(p: f64, eta: f64) -> f64 {
        let b = 1.0 + eta + p - p * eta;
        2.0 * p / (b + (b * b - 4.0 * p).sqrt())
    }

    #[test]
    fn biased_xz_matches_closed_form() {
        for &p in &[0.1, 0.01, 0.001, 0.0001, 0.3] {
            for &eta in &[0.01, 0.5, 1.0, 10.0, 100.0, 1000.0] {
                let (qx, _) = biased_xz_marginals(p, eta);
                let reference = qx_closed_form(p, eta);
                assert!(
                    (qx - reference).abs() <= 1e-12 * reference,
                    "p={p} eta={eta}: bisection {qx} vs closed form {reference}"
                );
            }
        }
    }

    #[test]
    fn biased_xz_round_trips_rate_and_bias() {
        for s in grid(ChannelFamily::BiasedXZ) {
            let ch = s.resolve().unwrap();
            let total = ch.p_x + ch.p_y + ch.p_z;
            assert!((total - s.p).abs() <= 1e-10 * s.p, "{s}: total {total}");
            let bias = ch.p_z / ch.p_x;
            assert!((bias - s.eta).abs() <= 1e-9 * s.eta, "{s}: bias {bias}");
            // Independence of the two flips: p_I p_Y = p_X p_Z.
            assert!((ch.p_i * ch.p_y - ch.p_x * ch.p_z).abs() <= 1e-15);
            assert!((ch.p_i + total - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn biased_xz_symmetric_at_unit_bias() {
        let ch = spec(ChannelFamily::BiasedXZ, 0.01, 1.0).resolve().unwrap();
        assert_eq!(ch.p_x.to_bits(), ch.p_z.to_bits());
    }

    #[test]
    fn damping_family_matches_depolarizing_at_unit_bias() {
        for &p in &[0.1, 0.01, 0.001, 0.0001] {
            let ad = spec(ChannelFamily::TwirledAmplitudeDamping, p, 1.0).resolve().unwrap();
            let dp = spec(ChannelFamily::Depolarizing, p, 1.0).resolve().unwrap();
            assert_eq!(ad.p_x.to_bits(), dp.p_x.to_bits());
            assert_eq!(ad.p_y.to_bits(), dp.p_y.to_bits());
            assert_eq!(ad.p_z.to_bits(), dp.p_z.to_bits());
        }
    }

    #[test]
    fn damping_family_x_and_y_identical() {
        for s in grid(ChannelFamily::TwirledAmplitudeDamping) {
            let ch = s.resolve().unwrap();
            assert_eq!(ch.p_x.to_bits(), ch.p_y.to_bits(), "{s}");
            let bias = ch.p_z / ch.p_x;
            assert!((bias - s.eta).abs() <= 1e-9 * s.eta, "{s}");
        }
    }

    #[test]
    fn damping_family_rejects_unphysical_parameters() {
        let err = spec(ChannelFamily::TwirledAmplitudeDamping, 0.1, 0.001).resolve();
        assert!(matches!(err, Err(Error::UnsatisfiableChannel(_))));
    }

    #[test]
    fn grid_is_p_major_sixteen_points() {
        let g = grid(ChannelFamily::BiasedXZ);
        assert_eq!(g.len(), 16);
        assert_eq!((g[0].p, g[0].eta), (0.1, 1.0));
        assert_eq!((g[1].p, g[1].eta), (0.1, 10.0));
        assert_eq!((g[4].p, g[4].eta), (0.01, 1.0));
        assert_eq!((g[15].p, g[15].eta), (0.0001, 1000.0));
    }

    #[test]
    fn parse_and_display() {
        let one = parse_channel_arg("xz:p=0.01,eta=10").unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].family, ChannelFamily::BiasedXZ);
        assert_eq!(one[0].p, 0.01);
        assert_eq!(one[0].eta, 10.0);
        assert_eq!(one[0].to_string(), "xz:p=0.01,eta=10");

        let d = parse_channel_arg("depol:p=0.001").unwrap();
        assert_eq!(d[0].eta, 1.0);
        assert_eq!(d[0].to_string(), "depol:p=0.001");

        let g = parse_channel_arg("grid:ad").unwrap();
        assert_eq!(g.len(), 16);
        assert!(g.iter().all(|s| s.family == ChannelFamily::TwirledAmplitudeDamping));

        for bad in ["xz", "xz:p=0.01", "xz:p=,eta=1", "foo:p=0.1", "xz:p=0.1,eta=1,q=2",
                    "depol:p=0.1,eta=3", "grid:bogus"] {
            assert!(parse_channel_arg(bad).is_err(), "{bad} should fail");
        }
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(ChannelSpec::new(ChannelFamily::BiasedXZ, 0.0, 1.0).is_err());
        assert!(ChannelSpec::new(ChannelFamily::BiasedXZ, 1.0, 1.0).is_err());
        assert!(ChannelSpec::new(ChannelFamily::BiasedXZ, 0.1, 0.0).is_err());
        assert!(ChannelSpec::new(ChannelFamily::BiasedXZ, 0.1, f64::INFINITY).is_err());
        assert!(ChannelSpec::new(ChannelFamily::BiasedXZ, f64::NAN, 1.0).is_err());
    }
}
