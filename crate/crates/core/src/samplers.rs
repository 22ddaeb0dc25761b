//! Input generators for the six distribution models.
//!
//! Each sampler follows the classical construction for its distribution:
//! Bernoulli counting for the binomial, Knuth's product-of-uniforms method
//! for the Poisson, scaled floors and products of unit draws for the two
//! uniforms, the log transform for the exponential and Box–Muller pairs for
//! the normal. Discrete models produce integer keys, continuous models real
//! keys.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::{fnv1a64, Rng};

/// Upper bound on uniform draws multiplied together for one Poisson key.
pub const POISSON_DRAW_CAP: usize = 1_000_000;

/// One of the six input models with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Binomial {
        m: u64,
        p: f64,
    },
    Poisson {
        lambda: f64,
    },
    DiscreteUniform {
        k: u64,
    },
    ContinuousUniform {
        theta: f64,
    },
    /// `theta` is a rate: mean `1/theta`.
    Exponential {
        theta: f64,
    },
    StdNormal {
        mean: f64,
        sd: f64,
    },
}

/// Whether a model yields integer or real keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyDomain {
    Integer,
    Real,
}

impl DistributionSpec {
    pub fn binomial(m: u64, p: f64) -> Result<Self> {
        Self::Binomial { m, p }.validated()
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::Poisson { lambda }.validated()
    }

    pub fn discrete_uniform(k: u64) -> Result<Self> {
        Self::DiscreteUniform { k }.validated()
    }

    pub fn continuous_uniform(theta: f64) -> Result<Self> {
        Self::ContinuousUniform { theta }.validated()
    }

    pub fn exponential(theta: f64) -> Result<Self> {
        Self::Exponential { theta }.validated()
    }

    pub fn std_normal(mean: f64, sd: f64) -> Result<Self> {
        Self::StdNormal { mean, sd }.validated()
    }

    /// The six input models of the reference experiment, in table order.
    pub fn table_columns() -> [Self; 6] {
        [
            Self::Binomial { m: 100, p: 0.5 },
            Self::Poisson { lambda: 1.0 },
            Self::DiscreteUniform { k: 50 },
            Self::ContinuousUniform { theta: 1.0 },
            Self::Exponential { theta: 1.0 },
            Self::StdNormal { mean: 0.0, sd: 1.0 },
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            Self::Binomial { p, .. } if !(0.0..=1.0).contains(&p) => {
                bad(format!("binomial p must lie in [0, 1], got {p}"))
            }
            Self::Poisson { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                bad(format!("poisson lambda must be positive, got {lambda}"))
            }
            Self::DiscreteUniform { k } if k < 1 => {
                bad(format!("discrete uniform k must be at least 1, got {k}"))
            }
            Self::ContinuousUniform { theta } if !(theta > 0.0 && theta.is_finite()) => bad(
                format!("continuous uniform theta must be positive, got {theta}"),
            ),
            Self::Exponential { theta } if !(theta > 0.0 && theta.is_finite()) => bad(format!(
                "exponential rate theta must be positive, got {theta}"
            )),
            Self::StdNormal { mean, sd } if !(sd >= 0.0 && sd.is_finite() && mean.is_finite()) => {
                bad(format!(
                    "normal needs finite mean and sd >= 0, got mean={mean}, sd={sd}"
                ))
            }
            _ => Ok(()),
        }
    }

    fn validated(self) -> Result<Self> {
        self.validate().map(|()| self)
    }

    pub fn key_domain(&self) -> KeyDomain {
        match self {
            Self::Binomial { .. } | Self::Poisson { .. } | Self::DiscreteUniform { .. } => {
                KeyDomain::Integer
            }
            _ => KeyDomain::Real,
        }
    }

    /// Theoretical mean and variance of one key.
    pub fn moments(&self) -> (f64, f64) {
        match *self {
            Self::Binomial { m, p } => (m as f64 * p, m as f64 * p * (1.0 - p)),
            Self::Poisson { lambda } => (lambda, lambda),
            Self::DiscreteUniform { k } => {
                let k = k as f64;
                ((k + 1.0) / 2.0, (k * k - 1.0) / 12.0)
            }
            Self::ContinuousUniform { theta } => (theta / 2.0, theta * theta / 12.0),
            Self::Exponential { theta } => (1.0 / theta, 1.0 / (theta * theta)),
            Self::StdNormal { mean, sd } => (mean, sd * sd),
        }
    }

    /// Whether `key` lies in the model's support.
    pub fn contains(&self, key: f64) -> bool {
        match *self {
            Self::Binomial { m, .. } => key.fract() == 0.0 && (0.0..=m as f64).contains(&key),
            Self::Poisson { .. } => key.fract() == 0.0 && key >= 0.0,
            Self::DiscreteUniform { k } => key.fract() == 0.0 && (1.0..=k as f64).contains(&key),
            Self::ContinuousUniform { theta } => (0.0..theta).contains(&key),
            Self::Exponential { .. } => key > 0.0 && key.is_finite(),
            Self::StdNormal { .. } => key.is_finite(),
        }
    }

    /// Stable 64-bit identity of the spec, used for seed derivation.
    pub fn stable_hash(&self) -> u64 {
        fnv1a64(self.to_string().as_bytes())
    }

    /// Short family name: `binomial`, `poisson`, ...
    pub fn family(&self) -> &'static str {
        match self {
            Self::Binomial { .. } => "binomial",
            Self::Poisson { .. } => "poisson",
            Self::DiscreteUniform { .. } => "duniform",
            Self::ContinuousUniform { .. } => "cuniform",
            Self::Exponential { .. } => "exponential",
            Self::StdNormal { .. } => "normal",
        }
    }

    /// Filesystem-safe rendering, e.g. `binomial_m-100_p-0.5`.
    pub fn slug(&self) -> String {
        self.to_string()
            .chars()
            .map(|c| match c {
                ':' | ',' => '_',
                '=' => '-',
                c => c,
            })
            .collect()
    }

    pub fn sample(&self, n: usize, rng: &mut Rng) -> Result<Sample> {
        match *self {
            Self::Binomial { m, p } => sample_binomial(m, p, n, rng),
            Self::Poisson { lambda } => sample_poisson(lambda, n, rng),
            Self::DiscreteUniform { k } => sample_discrete_uniform(k, n, rng),
            Self::ContinuousUniform { theta } => sample_continuous_uniform(theta, n, rng),
            Self::Exponential { theta } => sample_exponential(theta, n, rng),
            Self::StdNormal { mean, sd } => sample_std_normal(mean, sd, n, rng),
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Binomial { m, p } => write!(f, "binomial:m={m},p={p}"),
            Self::Poisson { lambda } => write!(f, "poisson:lambda={lambda}"),
            Self::DiscreteUniform { k } => write!(f, "duniform:k={k}"),
            Self::ContinuousUniform { theta } => write!(f, "cuniform:theta={theta}"),
            Self::Exponential { theta } => write!(f, "exponential:theta={theta}"),
            Self::StdNormal { mean, sd } => write!(f, "normal:mean={mean},sd={sd}"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let fail = |reason: String| Error::SpecParse {
            text: text.to_string(),
            reason,
        };
        let lowered = text.trim().to_ascii_lowercase();
        let (family, params) = lowered
            .split_once(':')
            .ok_or_else(|| fail("expected `<family>:<key>=<value>,...`".into()))?;

        let allowed: &[&str] = match family.trim() {
            "binomial" => &["m", "p"],
            "poisson" => &["lambda"],
            "duniform" => &["k"],
            "cuniform" => &["theta"],
            "exponential" => &["theta"],
            "normal" => &["mean", "sd"],
            other => return Err(fail(format!("unknown family `{other}`"))),
        };

        let mut values: Vec<Option<&str>> = vec![None; allowed.len()];
        for pair in params.split(',') {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| fail(format!("expected key=value, got `{}`", pair.trim())))?;
            let key = key.trim();
            let slot = allowed
                .iter()
                .position(|&k| k == key)
                .ok_or_else(|| fail(format!("unknown key `{key}`")))?;
            if values[slot].replace(value.trim()).is_some() {
                return Err(fail(format!("duplicate key `{key}`")));
            }
        }

        let real = |i: usize| -> Result<f64> {
            let raw = values[i].ok_or_else(|| fail(format!("missing key `{}`", allowed[i])))?;
            raw.parse::<f64>()
                .map_err(|_| fail(format!("`{raw}` is not a number for `{}`", allowed[i])))
        };
        let int = |i: usize| -> Result<u64> {
            let raw = values[i].ok_or_else(|| fail(format!("missing key `{}`", allowed[i])))?;
            raw.parse::<u64>().map_err(|_| {
                fail(format!(
                    "`{raw}` is not a nonnegative integer for `{}`",
                    allowed[i]
                ))
            })
        };

        let spec = match family.trim() {
            "binomial" => Self::Binomial {
                m: int(0)?,
                p: real(1)?,
            },
            "poisson" => Self::Poisson { lambda: real(0)? },
            "duniform" => Self::DiscreteUniform { k: int(0)? },
            "cuniform" => Self::ContinuousUniform { theta: real(0)? },
            "exponential" => Self::Exponential { theta: real(0)? },
            _ => Self::StdNormal {
                mean: real(0)?,
                sd: real(1)?,
            },
        };
        spec.validated()
    }
}

/// Generated keys, integer or real depending on the model.
#[derive(Debug, Clone, PartialEq)]
pub enum Keys {
    Integer(Vec<i64>),
    Real(Vec<f64>),
}

impl Keys {
    pub fn len(&self) -> usize {
        match self {
            Self::Integer(v) => v.len(),
            Self::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn domain(&self) -> KeyDomain {
        match self {
            Self::Integer(_) => KeyDomain::Integer,
            Self::Real(_) => KeyDomain::Real,
        }
    }

    /// Keys widened to `f64`, for moment and support checks.
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Self::Integer(v) => v.iter().map(|&k| k as f64).collect(),
            Self::Real(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub spec: DistributionSpec,
    pub keys: Keys,
}

impl Sample {
    pub fn n(&self) -> usize {
        self.keys.len()
    }
}

fn buffer<T>(spec: &DistributionSpec, n: usize) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(n).map_err(|_| Error::Allocation {
        spec: spec.to_string(),
        n,
    })?;
    Ok(v)
}

/// Each key counts how many of `m` unit draws fall below `p`.
pub fn sample_binomial(m: u64, p: f64, n: usize, rng: &mut Rng) -> Result<Sample> {
    let spec = DistributionSpec::binomial(m, p)?;
    let mut keys = buffer(&spec, n)?;
    for _ in 0..n {
        let hits = (0..m).filter(|_| rng.next_unit() < p).count();
        keys.push(hits as i64);
    }
    Ok(Sample {
        spec,
        keys: Keys::Integer(keys),
    })
}

/// Multiplies unit draws until the product drops below `e^-lambda`; the key
/// is the number of draws minus one.
pub fn sample_poisson(lambda: f64, n: usize, rng: &mut Rng) -> Result<Sample> {
    let spec = DistributionSpec::poisson(lambda)?;
    let threshold = (-lambda).exp();
    let mut keys = buffer(&spec, n)?;
    for _ in 0..n {
        let mut product = 1.0;
        let mut key = None;
        for draws in 1..=POISSON_DRAW_CAP {
            product *= rng.next_unit();
            if product < threshold {
                key = Some(draws as i64 - 1);
                break;
            }
        }
        let key = key.ok_or(Error::PoissonOverflow {
            lambda,
            cap: POISSON_DRAW_CAP,
        })?;
        keys.push(key);
    }
    Ok(Sample {
        spec,
        keys: Keys::Integer(keys),
    })
}

/// `floor(k * u) + 1`, over `{1, ..., k}`.
pub fn sample_discrete_uniform(k: u64, n: usize, rng: &mut Rng) -> Result<Sample> {
    let spec = DistributionSpec::discrete_uniform(k)?;
    let mut keys = buffer(&spec, n)?;
    let scale = k as f64;
    for _ in 0..n {
        // k as f64 is inexact above 2^53
        let key = ((scale * rng.next_unit()) as u64).min(k - 1) + 1;
        keys.push(key as i64);
    }
    Ok(Sample {
        spec,
        keys: Keys::Integer(keys),
    })
}

/// `u * theta`, over `[0, theta)`.
pub fn sample_continuous_uniform(theta: f64, n: usize, rng: &mut Rng) -> Result<Sample> {
    let spec = DistributionSpec::continuous_uniform(theta)?;
    let mut keys = buffer(&spec, n)?;
    for _ in 0..n {
        keys.push(rng.next_unit() * theta);
    }
    Ok(Sample {
        spec,
        keys: Keys::Real(keys),
    })
}

/// `-ln(u) / theta` with `u` in `(0, 1)`; `theta` is the rate.
pub fn sample_exponential(theta: f64, n: usize, rng: &mut Rng) -> Result<Sample> {
    let spec = DistributionSpec::exponential(theta)?;
    let mut keys = buffer(&spec, n)?;
    for _ in 0..n {
        keys.push(-rng.next_unit_nonzero().ln() / theta);
    }
    Ok(Sample {
        spec,
        keys: Keys::Real(keys),
    })
}

/// Box–Muller pairs scaled to `mean + sd * z`.
///
/// Pair `i` writes its cosine variate at position `i` and its sine variate at
/// position `h + i`, where `h = ceil(n / 2)`. For odd `n` the sine variate of
/// the last pair is dropped.
pub fn sample_std_normal(mean: f64, sd: f64, n: usize, rng: &mut Rng) -> Result<Sample> {
    let spec = DistributionSpec::std_normal(mean, sd)?;
    let mut keys: Vec<f64> = buffer(&spec, n)?;
    keys.resize(n, 0.0);
    let half = n.div_ceil(2);
    for i in 0..half {
        let (u1, u2) = loop {
            let u1 = rng.next_unit();
            let u2 = rng.next_unit();
            if u1 > 0.0 {
                break (u1, u2);
            }
        };
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = TAU * u2;
        keys[i] = mean + sd * radius * angle.cos();
        if half + i < n {
            keys[half + i] = mean + sd * radius * angle.sin();
        }
    }
    Ok(Sample {
        spec,
        keys: Keys::Real(keys),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn canonical_text_round_trips() {
        for spec in DistributionSpec::table_columns() {
            let text = spec.to_string();
            assert_eq!(text.parse::<DistributionSpec>().unwrap(), spec, "{text}");
        }
        assert_eq!(
            DistributionSpec::table_columns()
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>(),
            [
                "binomial:m=100,p=0.5",
                "poisson:lambda=1",
                "duniform:k=50",
                "cuniform:theta=1",
                "exponential:theta=1",
                "normal:mean=0,sd=1",
            ]
        );
    }

    #[test]
    fn parser_is_case_insensitive_and_order_free() {
        let spec: DistributionSpec = "Binomial: P=0.25, M=10".parse().unwrap();
        assert_eq!(spec, DistributionSpec::Binomial { m: 10, p: 0.25 });
    }

    #[test]
    fn parser_rejects_bad_input() {
        for text in [
            "poisson:lambda=1,mu=2",
            "poisson:mu=2",
            "poisson",
            "gamma:k=2",
            "binomial:m=100",
            "binomial:m=-3,p=0.5",
            "binomial:m=10,p=1.5",
            "poisson:lambda=0",
            "duniform:k=0",
            "cuniform:theta=-1",
            "exponential:theta=0",
            "normal:mean=0,sd=-1",
            "normal:mean=0,mean=1,sd=1",
            "duniform:k=abc",
        ] {
            assert!(text.parse::<DistributionSpec>().is_err(), "{text}");
        }
    }

    #[test]
    fn binomial_degenerate_probabilities() {
        let mut rng = Rng::new(1);
        let zero = sample_binomial(20, 0.0, 100, &mut rng).unwrap();
        assert_eq!(zero.keys, Keys::Integer(vec![0; 100]));
        let one = sample_binomial(20, 1.0, 100, &mut rng).unwrap();
        assert_eq!(one.keys, Keys::Integer(vec![20; 100]));
    }

    #[test]
    fn binomial_support_and_moments() {
        let mut rng = Rng::new(11);
        let s = sample_binomial(100, 0.5, 100_000, &mut rng).unwrap();
        let xs = s.keys.to_f64();
        assert!(xs.iter().all(|&x| (0.0..=100.0).contains(&x)));
        let (mean, var) = mean_var(&xs);
        assert!((mean - 50.0).abs() < 0.08, "{mean}");
        assert!((var - 25.0).abs() < 1.0, "{var}");
    }

    #[test]
    fn poisson_moments_and_determinism() {
        let a = sample_poisson(1.0, 100_000, &mut Rng::new(5)).unwrap();
        let b = sample_poisson(1.0, 100_000, &mut Rng::new(5)).unwrap();
        assert_eq!(a, b);
        let xs = a.keys.to_f64();
        assert!(xs.iter().all(|&x| x >= 0.0));
        let (mean, var) = mean_var(&xs);
        assert!((mean - 1.0).abs() < 0.016, "{mean}");
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn poisson_rejects_nonpositive_rate() {
        assert!(sample_poisson(0.0, 10, &mut Rng::new(0)).is_err());
        assert!(sample_poisson(-2.0, 10, &mut Rng::new(0)).is_err());
    }

    #[test]
    fn poisson_overflow_is_reported() {
        // e^-800 underflows to 0, so the product can never drop below it
        let err = sample_poisson(800.0, 1, &mut Rng::new(0)).unwrap_err();
        assert!(matches!(err, Error::PoissonOverflow { .. }));
    }

    #[test]
    fn discrete_uniform_single_point() {
        let s = sample_discrete_uniform(1, 500, &mut Rng::new(2)).unwrap();
        assert_eq!(s.keys, Keys::Integer(vec![1; 500]));
    }

    #[test]
    fn discrete_uniform_frequencies() {
        let n = 100_000usize;
        let k = 50u64;
        let s = sample_discrete_uniform(k, n, &mut Rng::new(8)).unwrap();
        let Keys::Integer(keys) = s.keys else {
            unreachable!()
        };
        let mut counts = vec![0usize; k as usize + 2];
        for key in keys {
            counts[key as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        assert_eq!(counts[k as usize + 1], 0);
        let q = 1.0 / k as f64;
        let expected = n as f64 * q;
        let bound = 5.0 * (n as f64 * q * (1.0 - q)).sqrt();
        for (value, &c) in counts.iter().enumerate().skip(1).take(k as usize) {
            assert!((c as f64 - expected).abs() < bound, "value {value}: {c}");
        }
    }

    #[test]
    fn top_unit_draw_stays_below_scale() {
        let u = 1.0 - f64::EPSILON / 2.0;
        for scale in [1.0, 3.0, 50.0, 0.1, 1e300, 7.0e-300] {
            assert!(u * scale < scale, "{scale}");
        }
    }

    #[test]
    fn continuous_uniform_moments_and_support() {
        let s = sample_continuous_uniform(1.0, 100_000, &mut Rng::new(4)).unwrap();
        let xs = s.keys.to_f64();
        assert!(xs.iter().all(|&x| (0.0..1.0).contains(&x)));
        let (mean, _) = mean_var(&xs);
        assert!((mean - 0.5).abs() < 0.005, "{mean}");
        assert!(sample_continuous_uniform(1.0, 0, &mut Rng::new(4))
            .unwrap()
            .keys
            .is_empty());
        assert!(sample_continuous_uniform(0.0, 5, &mut Rng::new(4)).is_err());
    }

    #[test]
    fn exponential_moments_and_positivity() {
        let s = sample_exponential(1.0, 100_000, &mut Rng::new(6)).unwrap();
        let xs = s.keys.to_f64();
        assert!(xs.iter().all(|&x| x > 0.0));
        let (mean, var) = mean_var(&xs);
        assert!((mean - 1.0).abs() < 0.016, "{mean}");
        assert!((var - 1.0).abs() < 0.1, "{var}");
        let again = sample_exponential(1.0, 100_000, &mut Rng::new(6)).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn normal_moments() {
        let s = sample_std_normal(0.0, 1.0, 100_000, &mut Rng::new(10)).unwrap();
        let (mean, var) = mean_var(&s.keys.to_f64());
        assert!(mean.abs() < 0.016, "{mean}");
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn normal_zero_sd_is_constant() {
        let s = sample_std_normal(3.5, 0.0, 11, &mut Rng::new(1)).unwrap();
        assert_eq!(s.keys, Keys::Real(vec![3.5; 11]));
        assert!(sample_std_normal(0.0, -1.0, 4, &mut Rng::new(1)).is_err());
    }

    #[test]
    fn normal_odd_length_drops_last_sine_variate() {
        let even = sample_std_normal(0.0, 1.0, 6, &mut Rng::new(21)).unwrap();
        let odd = sample_std_normal(0.0, 1.0, 5, &mut Rng::new(21)).unwrap();
        let (Keys::Real(e), Keys::Real(o)) = (even.keys, odd.keys) else {
            unreachable!()
        };
        assert_eq!(o.len(), 5);
        // both draw three pairs; cosines fill the first half
        assert_eq!(&o[..3], &e[..3]);
        assert_eq!(&o[3..], &e[3..5]);
    }

    #[test]
    fn key_domains() {
        let mut rng = Rng::new(0);
        for spec in DistributionSpec::table_columns() {
            let s = spec.sample(4, &mut rng).unwrap();
            assert_eq!(s.keys.domain(), spec.key_domain());
            assert_eq!(s.n(), 4);
        }
    }

    #[test]
    fn slugs_are_filesystem_safe() {
        assert_eq!(
            DistributionSpec::Binomial { m: 100, p: 0.5 }.slug(),
            "binomial_m-100_p-0.5"
        );
        assert_eq!(
            DistributionSpec::StdNormal { mean: 0.0, sd: 1.0 }.slug(),
            "normal_mean-0_sd-1"
        );
    }
}
