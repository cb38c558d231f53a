//! Reproducible iid demand and lead-time streams with exact closed-form moments.
//!
//! Each replication draws from its own RNG stream: identical `(spec, seed, stream_id)`
//! triples produce bit-identical sequences, and distinct stream ids under one seed are
//! independent, so replications can run in parallel without sharing serial RNG state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a distribution is used for. Lead-time streams must produce integers >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Demand,
    LeadTime,
}

/// Parametric distribution with closed-form mean and variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionSpec {
    Constant {
        value: f64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
    Gamma {
        shape: f64,
        scale: f64,
    },
    #[serde(rename = "uniform-continuous")]
    Uniform {
        low: f64,
        high: f64,
    },
    #[serde(rename = "discrete-uniform-integer")]
    DiscreteUniform {
        low: i64,
        high: i64,
    },
    #[serde(rename = "empirical-integer")]
    Empirical {
        values: Vec<i64>,
        probs: Vec<f64>,
    },
}

impl DistributionSpec {
    /// The demand law used throughout the numerical section: normal(2, 1),
    /// i.e. coefficient of variation 0.5.
    pub fn default_demand() -> Self {
        DistributionSpec::Normal { mean: 2.0, sd: 1.0 }
    }

    /// An integer lead-time law with mean 3 and variance 4 on support within {1..7}.
    pub fn default_lead_time() -> Self {
        DistributionSpec::Empirical {
            values: vec![1, 5],
            probs: vec![0.5, 0.5],
        }
    }

    pub fn validate(&self, role: Role) -> Result<()> {
        match self {
            DistributionSpec::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::invalid("value", "must be finite"));
                }
            }
            DistributionSpec::Normal { mean, sd } => {
                if !mean.is_finite() {
                    return Err(Error::invalid("mean", "must be finite"));
                }
                if !sd.is_finite() || *sd < 0.0 {
                    return Err(Error::invalid("sd", format!("must be >= 0, got {sd}")));
                }
            }
            DistributionSpec::Gamma { shape, scale } => {
                if !(shape.is_finite() && *shape > 0.0) {
                    return Err(Error::invalid("shape", format!("must be > 0, got {shape}")));
                }
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::invalid("scale", format!("must be > 0, got {scale}")));
                }
            }
            DistributionSpec::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low <= high) {
                    return Err(Error::invalid("low", format!("need low <= high, got [{low}, {high}]")));
                }
            }
            DistributionSpec::DiscreteUniform { low, high } => {
                if low > high {
                    return Err(Error::invalid("low", format!("need low <= high, got [{low}, {high}]")));
                }
            }
            DistributionSpec::Empirical { values, probs } => {
                if values.is_empty() {
                    return Err(Error::invalid("values", "support must not be empty"));
                }
                if values.len() != probs.len() {
                    return Err(Error::invalid(
                        "probs",
                        format!("{} probabilities for {} values", probs.len(), values.len()),
                    ));
                }
                if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(Error::invalid("probs", "probabilities must be >= 0"));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid("probs", format!("must sum to 1, got {total}")));
                }
            }
        }
        if role == Role::LeadTime {
            self.validate_lead_time()?;
        }
        Ok(())
    }

    // Lead times are integer period counts >= 1: L = 0 would make the lead time
    // demand an empty sum.
    fn validate_lead_time(&self) -> Result<()> {
        match self {
            DistributionSpec::Constant { value } => {
                if value.fract() != 0.0 || *value < 1.0 {
                    return Err(Error::invalid("value", format!("lead time must be an integer >= 1, got {value}")));
                }
            }
            DistributionSpec::DiscreteUniform { low, .. } => {
                if *low < 1 {
                    return Err(Error::invalid("low", format!("lead times must be >= 1, got {low}")));
                }
            }
            DistributionSpec::Empirical { values, .. } => {
                if values.iter().any(|v| *v < 1) {
                    return Err(Error::invalid("values", "lead-time support must be >= 1"));
                }
            }
            _ => {
                return Err(Error::invalid(
                    "kind",
                    "lead-time distributions must be integer-valued (constant, discrete-uniform-integer or empirical-integer)",
                ));
            }
        }
        Ok(())
    }

    /// Exact mean and variance.
    pub fn moments(&self) -> Result<(f64, f64)> {
        self.validate(Role::Demand)?;
        Ok(match self {
            DistributionSpec::Constant { value } => (*value, 0.0),
            DistributionSpec::Normal { mean, sd } => (*mean, sd * sd),
            DistributionSpec::Gamma { shape, scale } => (shape * scale, shape * scale * scale),
            DistributionSpec::Uniform { low, high } => {
                let w = high - low;
                ((low + high) / 2.0, w * w / 12.0)
            }
            DistributionSpec::DiscreteUniform { low, high } => {
                let k = (high - low + 1) as f64;
                ((*low as f64 + *high as f64) / 2.0, (k * k - 1.0) / 12.0)
            }
            DistributionSpec::Empirical { values, probs } => {
                let mean: f64 = values.iter().zip(probs).map(|(v, p)| *v as f64 * p).sum();
                let var: f64 = values
                    .iter()
                    .zip(probs)
                    .map(|(v, p)| {
                        let d = *v as f64 - mean;
                        d * d * p
                    })
                    .sum();
                (mean, var)
            }
        })
    }

    /// Largest value the distribution can produce, when it has one.
    /// For lead-time laws this is the bound M used by the lagged forecast mode.
    pub fn upper_bound(&self) -> Option<f64> {
        match self {
            DistributionSpec::Constant { value } => Some(*value),
            DistributionSpec::Uniform { high, .. } => Some(*high),
            DistributionSpec::DiscreteUniform { high, .. } => Some(*high as f64),
            DistributionSpec::Empirical { values, .. } => {
                values.iter().max().map(|v| *v as f64)
            }
            _ => None,
        }
    }
}

/// Addressable slice of randomness: one distribution, one seed, one stream id.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamHandle {
    pub spec: DistributionSpec,
    pub seed: u64,
    pub stream_id: u64,
}

impl StreamHandle {
    pub fn new(spec: DistributionSpec, seed: u64, stream_id: u64) -> Self {
        StreamHandle { spec, seed, stream_id }
    }

    pub fn sampler(&self, role: Role) -> Result<Sampler> {
        self.spec.validate(role)?;
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        let kind = match &self.spec {
            DistributionSpec::Constant { value } => SamplerKind::Constant(*value),
            DistributionSpec::Normal { mean, sd } => SamplerKind::Normal(
                rand_distr::Normal::new(*mean, *sd)
                    .map_err(|e| Error::invalid("sd", e.to_string()))?,
            ),
            DistributionSpec::Gamma { shape, scale } => SamplerKind::Gamma(
                rand_distr::Gamma::new(*shape, *scale)
                    .map_err(|e| Error::invalid("shape", e.to_string()))?,
            ),
            DistributionSpec::Uniform { low, high } => SamplerKind::Uniform(*low, *high),
            DistributionSpec::DiscreteUniform { low, high } => SamplerKind::DiscreteUniform(*low, *high),
            DistributionSpec::Empirical { values, probs } => {
                let mut cum = Vec::with_capacity(values.len());
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    cum.push((acc, *v as f64));
                }
                SamplerKind::Empirical(cum)
            }
        };
        Ok(Sampler { kind, rng })
    }

    /// Materialize `length` iid draws. Deterministic in the handle.
    pub fn sample_sequence(&self, role: Role, length: usize) -> Result<Vec<f64>> {
        if length == 0 {
            return Err(Error::invalid("length", "must be >= 1"));
        }
        let mut sampler = self.sampler(role)?;
        Ok((0..length).map(|_| sampler.draw()).collect())
    }
}

enum SamplerKind {
    Constant(f64),
    Normal(rand_distr::Normal<f64>),
    Gamma(rand_distr::Gamma<f64>),
    Uniform(f64, f64),
    DiscreteUniform(i64, i64),
    Empirical(Vec<(f64, f64)>),
}

/// Single-owner cursor over one stream.
pub struct Sampler {
    kind: SamplerKind,
    rng: ChaCha12Rng,
}

impl Sampler {
    pub fn draw(&mut self) -> f64 {
        match &self.kind {
            SamplerKind::Constant(v) => *v,
            SamplerKind::Normal(d) => d.sample(&mut self.rng),
            SamplerKind::Gamma(d) => d.sample(&mut self.rng),
            SamplerKind::Uniform(low, high) => {
                if low == high {
                    *low
                } else {
                    self.rng.gen_range(*low..*high)
                }
            }
            SamplerKind::DiscreteUniform(low, high) => self.rng.gen_range(*low..=*high) as f64,
            SamplerKind::Empirical(cum) => {
                let u: f64 = self.rng.gen();
                for (c, v) in cum {
                    if u <= *c {
                        return *v;
                    }
                }
                // u can exceed the last cumulative bucket by float round-off
                cum.last().map(|(_, v)| *v).unwrap_or(f64::NAN)
            }
        }
    }

    /// Draw a lead time as an integer period count.
    pub fn draw_lead_time(&mut self) -> u32 {
        self.draw() as u32
    }
}
