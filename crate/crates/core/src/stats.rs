//! Point estimates, decay-rate fits and verdicts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::weight::{format_rational, rational_to_f64, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    /// Exact rational, when computed exactly.
    pub exact: Option<String>,
}

/// Serialized with a `mode` tag: `exact` with the rational, or `mc` with its standard error.
impl Serialize for Estimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Estimate", 4)?;
        match &self.exact {
            Some(r) => {
                st.serialize_field("mode", "exact")?;
                st.serialize_field("value", &self.value)?;
                st.serialize_field("exact", r)?;
            }
            None => {
                st.serialize_field("mode", "mc")?;
                st.serialize_field("value", &self.value)?;
                st.serialize_field("stderr", &self.stderr)?;
            }
        }
        st.end()
    }
}

impl Estimate {
    pub fn exact(r: &Rational) -> Self {
        Estimate { value: rational_to_f64(r), stderr: 0.0, exact: Some(format_rational(r)) }
    }

    pub fn mc(value: f64, stderr: f64) -> Self {
        Estimate { value, stderr, exact: None }
    }

    /// Sample mean and standard error from running sums.
    pub fn from_sums(sum: f64, sum_sq: f64, n: u64) -> Self {
        let n = n as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        Estimate::mc(mean, (var / n).sqrt())
    }

    pub fn proportion(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Estimate::mc(p, (p * (1.0 - p) / n as f64).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Exponential,
    Subexponential,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayPoint {
    pub n: u64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRateEstimate {
    pub points: Vec<DecayPoint>,
    /// Least-squares slope of `ln value` against `n`.
    pub slope: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Slope a decay no faster than `n^-2` would produce on the same grid.
    pub polynomial_envelope: f64,
    /// `value^(1/n)` per point.
    pub roots: Vec<f64>,
    pub roots_nondecreasing: bool,
    pub verdict: Verdict,
}

pub const BOOTSTRAP_RESAMPLES: usize = 1000;
pub const BOOTSTRAP_SEED: u64 = 0x5eed_dec4;
/// Polynomial degree below which decay counts as subexponential.
pub const ENVELOPE_DEGREE: f64 = 2.0;
const SIGMAS: f64 = 3.0;

fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fits `ln value ≈ a + b n` and classifies the decay.
///
/// Exponential: the upper 3σ bootstrap bound of `b` lies below the `n^-2` envelope slope.
/// Subexponential: not exponential and `value^(1/n)` is nondecreasing within 3σ.
pub fn decay_classify(points: &[DecayPoint]) -> Result<DecayRateEstimate> {
    if points.len() < 4 {
        return Err(Error::Domain(format!("decay fit needs at least 4 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.value > 0.0) || !p.value.is_finite()) {
        return Err(Error::Domain(format!("nonpositive value {} at n = {}", p.value, p.n)));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("decay fit needs strictly increasing n".into()));
    }
    let ys: Vec<f64> = points.iter().map(|p| p.value.ln()).collect();
    let slope = ols_slope(&xs, &ys);

    let mut rng = ChaCha8Rng::seed_from_u64(BOOTSTRAP_SEED);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let mut boots = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let ys_b: Vec<f64> = points
            .iter()
            .map(|p| {
                let v = p.value + p.stderr * std.sample(&mut rng);
                v.max(p.value * 1e-3).ln()
            })
            .collect();
        boots.push(ols_slope(&xs, &ys_b));
    }
    boots.sort_by(f64::total_cmp);
    let tail = ((BOOTSTRAP_RESAMPLES as f64) * 0.00135).floor() as usize;
    let ci_low = boots[tail].min(slope);
    let ci_high = boots[BOOTSTRAP_RESAMPLES - 1 - tail].max(slope);

    let lnn: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let polynomial_envelope = -ENVELOPE_DEGREE * ols_slope(&xs, &lnn);

    let roots: Vec<f64> = points.iter().map(|p| p.value.powf(1.0 / p.n as f64)).collect();
    let root_err: Vec<f64> = points
        .iter()
        .zip(&roots)
        .map(|(p, r)| SIGMAS * r * (p.stderr / p.value) / p.n as f64)
        .collect();
    let roots_nondecreasing = (1..roots.len())
        .all(|i| roots[i] + root_err[i] + root_err[i - 1] >= roots[i - 1] * (1.0 - 1e-12));

    let verdict = if ci_high < polynomial_envelope {
        Verdict::Exponential
    } else if roots_nondecreasing {
        Verdict::Subexponential
    } else {
        Verdict::Inconclusive
    };
    Ok(DecayRateEstimate {
        points: points.to_vec(),
        slope,
        ci_low,
        ci_high,
        polynomial_envelope,
        roots,
        roots_nondecreasing,
        verdict,
    })
}
