//! Mark (jump size) distributions and the self-excitation map.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{config, Error, Result};
use crate::quadrature::gl64;
use crate::rng::open01;

/// Law of a nonnegative jump size.
///
/// The bounded families have finite exponential moments of every order, so
/// any exponential functional of the claim process is integrable. The
/// unbounded [`MarkDistribution::Exponential`] family is accepted only when the
/// model is built with the unsafe-moments flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkDistribution {
    /// Uniform on `[a, b]`, `0 <= a < b`.
    Uniform { a: f64, b: f64 },
    /// Exponential with `rate` conditioned on `[0, cap]`.
    TruncatedExponential { rate: f64, cap: f64 },
    /// Degenerate at `z0 >= 0`.
    PointMass { z0: f64 },
    /// Exponential with `rate` on `[0, ∞)`. Unbounded.
    Exponential { rate: f64 },
}

/// Probability mass and first two moments of a distribution restricted to an interval.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PartialMoments {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

/// Survival-probability tail cut used to integrate unbounded families.
const UNBOUNDED_TAIL: f64 = 1e-17;

impl MarkDistribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Uniform { a, b } => a.is_finite() && b.is_finite() && a >= 0.0 && b > a,
            Self::TruncatedExponential { rate, cap } => rate.is_finite() && rate > 0.0 && cap.is_finite() && cap > 0.0,
            Self::PointMass { z0 } => z0.is_finite() && z0 >= 0.0,
            Self::Exponential { rate } => rate.is_finite() && rate > 0.0,
        };
        if ok {
            Ok(())
        } else {
            config(format!("invalid mark distribution {self}"))
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Self::Exponential { .. })
    }

    /// Closed support `[lo, hi]`; `hi` is infinite for unbounded families.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Uniform { a, b } => (a, b),
            Self::TruncatedExponential { cap, .. } => (0.0, cap),
            Self::PointMass { z0 } => (z0, z0),
            Self::Exponential { .. } => (0.0, f64::INFINITY),
        }
    }

    /// Upper end of the interval used for numerical integration.
    pub fn integration_max(&self) -> f64 {
        match *self {
            Self::Exponential { rate } => -UNBOUNDED_TAIL.ln() / rate,
            _ => self.support().1,
        }
    }

    pub fn mean(&self) -> f64 {
        self.partial_moments(0.0, f64::INFINITY).p1
    }

    pub fn second_moment(&self) -> f64 {
        self.partial_moments(0.0, f64::INFINITY).p2
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z < 0.0 {
            return 0.0;
        }
        self.partial_moments(0.0, z).p0
    }

    /// `E[e^{sZ}]`, or `None` when it is infinite.
    pub fn mgf(&self, s: f64) -> Option<f64> {
        let v = match *self {
            Self::Uniform { a, b } => {
                let x = s * (b - a);
                if x.abs() < 1e-8 {
                    (s * a).exp() * (1.0 + 0.5 * x + x * x / 6.0)
                } else {
                    (s * a).exp() * x.exp_m1() / x
                }
            }
            Self::TruncatedExponential { rate, cap } => {
                let k = -(-rate * cap).exp_m1();
                let d = s - rate;
                if (d * cap).abs() < 1e-8 {
                    rate * cap * (1.0 + 0.5 * d * cap) / k
                } else {
                    rate * (d * cap).exp_m1() / (d * k)
                }
            }
            Self::PointMass { z0 } => (s * z0).exp(),
            Self::Exponential { rate } => {
                if s >= rate {
                    return None;
                }
                rate / (rate - s)
            }
        };
        Some(v)
    }

    /// `∫_{[lo,hi]} z^k F(dz)` for k = 0, 1, 2.
    ///
    /// Intervals are closed, so a point mass on an endpoint counts. Callers
    /// that need half-open intervals on atoms handle that themselves.
    pub fn partial_moments(&self, lo: f64, hi: f64) -> PartialMoments {
        let (s_lo, s_hi) = self.support();
        let lo = lo.max(s_lo);
        let hi = hi.min(s_hi);
        if let Self::PointMass { z0 } = *self {
            return if lo <= z0 && z0 <= hi {
                PartialMoments {
                    p0: 1.0,
                    p1: z0,
                    p2: z0 * z0,
                }
            } else {
                PartialMoments::default()
            };
        }
        if !(hi > lo) {
            return PartialMoments::default();
        }
        match *self {
            Self::Uniform { a, b } => {
                let w = b - a;
                PartialMoments {
                    p0: (hi - lo) / w,
                    p1: (hi * hi - lo * lo) / (2.0 * w),
                    p2: (hi * hi * hi - lo * lo * lo) / (3.0 * w),
                }
            }
            Self::TruncatedExponential { rate, cap } => {
                let k = -(-rate * cap).exp_m1();
                let m = exp_partial(rate, lo, hi);
                PartialMoments {
                    p0: m.p0 / k,
                    p1: m.p1 / k,
                    p2: m.p2 / k,
                }
            }
            Self::Exponential { rate } => exp_partial(rate, lo, hi),
            Self::PointMass { .. } => unreachable!(),
        }
    }

    /// Probability density on the support (zero for the point mass).
    pub fn density(&self, z: f64) -> f64 {
        let (lo, hi) = self.support();
        if z < lo || z > hi {
            return 0.0;
        }
        match *self {
            Self::Uniform { a, b } => 1.0 / (b - a),
            Self::TruncatedExponential { rate, cap } => rate * (-rate * z).exp() / -(-rate * cap).exp_m1(),
            Self::Exponential { rate } => rate * (-rate * z).exp(),
            Self::PointMass { .. } => 0.0,
        }
    }

    /// `∫ f(z) F(dz)` over `[lo, hi] ∩ support`, by 64-point Gauss–Legendre
    /// on each piece between the given breakpoints. Exact for the point mass.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, breaks: &[f64], mut f: F) -> f64 {
        if let Self::PointMass { z0 } = *self {
            return if lo <= z0 && z0 <= hi { f(z0) } else { 0.0 };
        }
        let (s_lo, _) = self.support();
        let lo = lo.max(s_lo);
        let hi = hi.min(self.integration_max());
        if !(hi > lo) {
            return 0.0;
        }
        gl64().integrate_split(lo, hi, breaks, |z| f(z) * self.density(z))
    }

    /// `∫ f(z) F(dz)` over the whole support.
    pub fn expect<F: FnMut(f64) -> f64>(&self, breaks: &[f64], f: F) -> f64 {
        self.integrate(0.0, f64::INFINITY, breaks, f)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            Self::TruncatedExponential { rate, cap } => {
                let k = -(-rate * cap).exp_m1();
                let u = open01(rng);
                (-(-u * k).ln_1p() / rate).min(cap)
            }
            Self::PointMass { z0 } => z0,
            Self::Exponential { rate } => -open01(rng).ln() / rate,
        }
    }
}

/// Partial moments of the untruncated exponential law on `[lo, hi]`.
fn exp_partial(rate: f64, lo: f64, hi: f64) -> PartialMoments {
    // ∫ z^k μ e^{-μz} dz antiderivatives: -e^{-μz} · poly_k(z)
    let term = |z: f64| -> (f64, f64, f64) {
        if z.is_infinite() {
            return (0.0, 0.0, 0.0);
        }
        let e = (-rate * z).exp();
        (
            e,
            e * (z + 1.0 / rate),
            e * (z * z + 2.0 * z / rate + 2.0 / (rate * rate)),
        )
    };
    let (a0, a1, a2) = term(lo);
    let (b0, b1, b2) = term(hi);
    PartialMoments {
        p0: a0 - b0,
        p1: a1 - b1,
        p2: a2 - b2,
    }
}

impl fmt::Display for MarkDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Uniform { a, b } => write!(f, "uniform({a},{b})"),
            Self::TruncatedExponential { rate, cap } => write!(f, "truncexp({rate},{cap})"),
            Self::PointMass { z0 } => write!(f, "point({z0})"),
            Self::Exponential { rate } => write!(f, "exponential({rate})"),
        }
    }
}

/// Parses `name(arg, ...)` into the name and numeric arguments.
pub(crate) fn parse_call(s: &str) -> Result<(String, Vec<f64>)> {
    let s = s.trim();
    let (name, rest) = match s.find('(') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let name = name.trim().to_ascii_lowercase();
    if rest.is_empty() {
        return Ok((name, Vec::new()));
    }
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Config(format!("malformed expression '{s}'")))?;
    let args = inner
        .split(',')
        .filter(|a| !a.trim().is_empty())
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{}' in '{s}'", a.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name, args))
}

impl FromStr for MarkDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = parse_call(s)?;
        let d = match (name.as_str(), args.as_slice()) {
            ("uniform", [a, b]) => Self::Uniform { a: *a, b: *b },
            ("truncexp" | "truncated_exponential", [rate, cap]) => {
                Self::TruncatedExponential { rate: *rate, cap: *cap }
            }
            ("point" | "point_mass", [z0]) => Self::PointMass { z0: *z0 },
            ("exponential" | "exp", [rate]) => Self::Exponential { rate: *rate },
            _ => return config(format!("unknown mark distribution '{s}'")),
        };
        d.validate()?;
        Ok(d)
    }
}

/// Intensity increment ℓ(z) caused by a claim of size z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelfExcitation {
    /// ℓ ≡ 0: no feedback from claims (Cox process with shot-noise intensity).
    Zero,
    /// ℓ(z) = a.
    Constant(f64),
    /// ℓ(z) = a z.
    Linear(f64),
}

impl SelfExcitation {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Zero => Ok(()),
            Self::Constant(a) | Self::Linear(a) if a.is_finite() && a >= 0.0 => Ok(()),
            _ => config(format!(
                "self-excitation coefficient must be finite and >= 0, got {self}"
            )),
        }
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Constant(a) => a,
            Self::Linear(a) => a * z,
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Self::Zero => true,
            Self::Constant(a) | Self::Linear(a) => a == 0.0,
        }
    }

    /// E[ℓ(Z)] under `dist`.
    pub fn mean(&self, dist: &MarkDistribution) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Constant(a) => a,
            Self::Linear(a) => a * dist.mean(),
        }
    }

    /// E[ℓ(Z)²] under `dist`.
    pub fn second_moment(&self, dist: &MarkDistribution) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Constant(a) => a * a,
            Self::Linear(a) => a * a * dist.second_moment(),
        }
    }
}

impl fmt::Display for SelfExcitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Zero => write!(f, "zero"),
            Self::Constant(a) => write!(f, "constant({a})"),
            Self::Linear(a) => write!(f, "linear({a})"),
        }
    }
}

impl FromStr for SelfExcitation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = parse_call(s)?;
        let e = match (name.as_str(), args.as_slice()) {
            ("zero" | "none", []) => Self::Zero,
            ("constant", [a]) => Self::Constant(*a),
            ("linear", [a]) => Self::Linear(*a),
            _ => return config(format!("unknown self-excitation '{s}'")),
        };
        e.validate()?;
        Ok(e)
    }
}
