//! Closed-form variance of the lead-time-demand forecast error, the order-quantity
//! variance, and the bullwhip measure with its decomposition, special cases and limits.
//!
//! Everything here is a pure function of the model moments `(mu_D, sigma_D^2, mu_L,
//! sigma_L^2)` and the two window lengths, generic over the floating scalar. The
//! crate root exports f64/f32 aliases.

use num_traits::Float;

use crate::error::{Error, Result};

/// The moment tuple feeding every closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<F> {
    /// Mean demand per period.
    pub mean_demand: F,
    /// Demand variance; must be positive since the bullwhip measure divides by it.
    pub var_demand: F,
    /// Mean lead time in periods, >= 1. Real-valued: the closed forms need only
    /// moments even though simulated lead times are integers.
    pub mean_lead_time: F,
    /// Lead-time variance, >= 0. Zero means a deterministic lead time.
    pub var_lead_time: F,
    /// Demand moving-average window length n.
    pub demand_window: u32,
    /// Lead-time moving-average window length m.
    pub lead_time_window: u32,
}

impl<F: Float> ModelParams<F> {
    pub fn validate(&self) -> Result<()> {
        let finite = self.mean_demand.is_finite()
            && self.var_demand.is_finite()
            && self.mean_lead_time.is_finite()
            && self.var_lead_time.is_finite();
        if !finite {
            return Err(Error::invalid("params", "all moments must be finite"));
        }
        if self.var_demand <= F::zero() {
            return Err(Error::invalid(
                "var_demand",
                "must be > 0: the bullwhip measure divides by the demand variance",
            ));
        }
        if self.mean_lead_time < F::one() {
            return Err(Error::invalid("mean_lead_time", "must be >= 1"));
        }
        if self.var_lead_time < F::zero() {
            return Err(Error::invalid("var_lead_time", "must be >= 0"));
        }
        if self.demand_window == 0 {
            return Err(Error::invalid("demand_window", "must be >= 1"));
        }
        if self.lead_time_window == 0 {
            return Err(Error::invalid("lead_time_window", "must be >= 1"));
        }
        Ok(())
    }
}

/// The bullwhip measure split into its amplification terms.
///
/// `bm1` couples lead-time and demand forecasting, `bm2` is the pure lead-time
/// forecasting term, `bm3` the classical demand-forecasting term, and
/// `bm = bm1 + bm2 + bm3 + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BullwhipDecomposition<F> {
    pub bm1: F,
    pub bm2: F,
    pub bm3: F,
    pub bm: F,
}

fn f<F: Float>(x: u32) -> F {
    F::from(x).unwrap()
}

fn two<F: Float>() -> F {
    F::from(2).unwrap()
}

/// Variance of the lead-time-demand forecast error. Time-independent, hence no
/// time argument in the signature.
pub fn forecast_error_variance<F: Float>(p: &ModelParams<F>) -> Result<F> {
    p.validate()?;
    let n = f::<F>(p.demand_window);
    let m = f::<F>(p.lead_time_window);
    Ok(p.mean_lead_time * p.var_demand
        + p.var_lead_time * p.mean_demand * p.mean_demand * (m + F::one()) / m
        + p.mean_lead_time * p.mean_lead_time * p.var_demand / n
        + p.var_lead_time * p.var_demand / (m * n))
}

/// Variance of the order quantity placed each period.
pub fn order_variance<F: Float>(p: &ModelParams<F>) -> Result<F> {
    p.validate()?;
    let n = f::<F>(p.demand_window);
    let m = f::<F>(p.lead_time_window);
    Ok(
        two::<F>() * p.var_lead_time * p.var_demand * (m + n - F::one()) / (m * m * n * n)
            + two::<F>() * p.var_lead_time * p.mean_demand * p.mean_demand / (m * m)
            + two::<F>() * p.mean_lead_time * p.mean_lead_time * p.var_demand / (n * n)
            + two::<F>() * p.mean_lead_time * p.var_demand / n
            + p.var_demand,
    )
}

// Shared by bullwhip_measure and bm_deterministic so the deterministic special case
// agrees bit-for-bit.
fn demand_forecast_terms<F: Float>(mean_lead_time: F, n: F) -> F {
    two::<F>() * mean_lead_time * mean_lead_time / (n * n) + two::<F>() * mean_lead_time / n
}

/// The bullwhip measure `Var q / Var D` with its decomposition.
pub fn bullwhip_measure<F: Float>(p: &ModelParams<F>) -> Result<BullwhipDecomposition<F>> {
    p.validate()?;
    let n = f::<F>(p.demand_window);
    let m = f::<F>(p.lead_time_window);
    let bm1 = two::<F>() * p.var_lead_time * (m + n - F::one()) / (m * m * n * n);
    let bm2 = two::<F>() * p.var_lead_time * p.mean_demand * p.mean_demand
        / (m * m * p.var_demand);
    let bm3 = demand_forecast_terms(p.mean_lead_time, n);
    Ok(BullwhipDecomposition {
        bm1,
        bm2,
        bm3,
        bm: bm1 + bm2 + bm3 + F::one(),
    })
}

/// Bullwhip measure when the lead-time forecast uses only the last observation.
pub fn bm_special_m1<F: Float>(p: &ModelParams<F>) -> Result<F> {
    if p.lead_time_window != 1 {
        return Err(Error::invalid("lead_time_window", "this form requires m = 1"));
    }
    p.validate()?;
    let n = f::<F>(p.demand_window);
    Ok(
        two::<F>() * p.var_lead_time * p.mean_demand * p.mean_demand / p.var_demand
            + two::<F>() * p.mean_lead_time * p.mean_lead_time / (n * n)
            + two::<F>() * (p.mean_lead_time + p.var_lead_time) / n
            + F::one(),
    )
}

/// Bullwhip measure under a deterministic lead time, the classical
/// demand-forecasting-only result.
pub fn bm_deterministic<F: Float>(lead_time: u32, demand_window: u32) -> Result<F> {
    if lead_time == 0 {
        return Err(Error::invalid("lead_time", "must be >= 1"));
    }
    if demand_window == 0 {
        return Err(Error::invalid("demand_window", "must be >= 1"));
    }
    Ok(demand_forecast_terms(f::<F>(lead_time), f::<F>(demand_window)) + F::one())
}

/// Limit of the bullwhip measure as the lead-time window grows without bound: the
/// impact of lead-time forecasting disappears.
pub fn bm_limit_m_inf<F: Float>(p: &ModelParams<F>) -> Result<F> {
    p.validate()?;
    Ok(demand_forecast_terms(p.mean_lead_time, f::<F>(p.demand_window)) + F::one())
}

/// Limit as the demand window grows without bound: only the pure lead-time
/// forecasting term survives.
pub fn bm_limit_n_inf<F: Float>(p: &ModelParams<F>) -> Result<F> {
    p.validate()?;
    let m = f::<F>(p.lead_time_window);
    Ok(two::<F>() * p.var_lead_time * p.mean_demand * p.mean_demand / (m * m * p.var_demand)
        + F::one())
}
