//! Moving-average forecasts of demand and lead time, the product-form lead-time-demand
//! forecast, and the comparison strategies used only in simulation.
//!
//! Window convention: index 0 is the most recent observation, so a window
//! `[d1, d2, ...]` reads "last period's value first". The lead-time forecast is kept
//! real-valued and never rounded; the lead-time-demand forecast is defined as the
//! product of the two window means.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which lead-time-demand forecast drives the order-up-to level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LtdStrategy {
    /// Product of the demand MA and the lead-time MA. The only strategy with a
    /// closed-form bullwhip measure.
    ProductMa,
    /// MA of the last `delay` *completed* lead-time demands.
    KimMa { delay: u32 },
    /// Multiplies the demand MA by the true lead time of the current order,
    /// which no retailer actually knows. Simulation-only reference.
    Hindsight,
    /// Fixed integer lead time times the demand MA.
    Deterministic { lead_time: u32 },
}

impl LtdStrategy {
    pub fn parse(name: &str, delay: Option<u32>, fixed_lead: Option<u32>) -> Result<Self> {
        match name {
            "product-ma" | "product" => Ok(LtdStrategy::ProductMa),
            "kim-ma" | "kim" => {
                let delay = delay.ok_or_else(|| Error::invalid("p", "kim-ma requires a delay parameter p >= 1"))?;
                if delay == 0 {
                    return Err(Error::invalid("p", "must be >= 1"));
                }
                Ok(LtdStrategy::KimMa { delay })
            }
            "hindsight" => Ok(LtdStrategy::Hindsight),
            "deterministic" => {
                let lead_time = fixed_lead
                    .ok_or_else(|| Error::invalid("L", "deterministic strategy requires an integer lead time L >= 1"))?;
                if lead_time == 0 {
                    return Err(Error::invalid("L", "must be >= 1"));
                }
                Ok(LtdStrategy::Deterministic { lead_time })
            }
            other => Err(Error::invalid(
                "strategy",
                format!("unknown strategy {other:?}; expected product-ma, kim-ma, hindsight or deterministic"),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LtdStrategy::ProductMa => "product-ma",
            LtdStrategy::KimMa { .. } => "kim-ma",
            LtdStrategy::Hindsight => "hindsight",
            LtdStrategy::Deterministic { .. } => "deterministic",
        }
    }
}

/// Moving average of a full window of `k` observations.
pub fn ma_forecast(window: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k", "window length must be >= 1"));
    }
    if window.len() != k {
        return Err(Error::invalid(
            "window",
            format!("expected exactly {k} values, got {}", window.len()),
        ));
    }
    Ok(window.iter().sum::<f64>() / k as f64)
}

/// Realized lead-time demand: the demand sum over `lead_time` periods starting at `t`.
pub fn realized_ltd(demands: &[f64], t: usize, lead_time: u32) -> Result<f64> {
    if lead_time == 0 {
        return Err(Error::invalid("lead_time", "must be >= 1"));
    }
    let end = t + lead_time as usize;
    if end > demands.len() {
        return Err(Error::OutOfRange(format!(
            "need demands up to period {}, only {} available",
            end - 1,
            demands.len()
        )));
    }
    Ok(demands[t..end].iter().sum())
}

/// MA over the last `delay` completed lead-time demands.
pub fn ltd_forecast_kim(past_ltd: &[f64], delay: usize) -> Result<f64> {
    ma_forecast(past_ltd, delay)
}

/// Demand MA scaled by the true lead time of the current order.
pub fn ltd_forecast_hindsight(demand_forecast: f64, lead_time: u32) -> Result<f64> {
    if lead_time == 0 {
        return Err(Error::invalid("lead_time", "must be >= 1"));
    }
    Ok(lead_time as f64 * demand_forecast)
}

/// Rolling windows of the last `n` demands and last `m` lead times.
///
/// In lagged mode the lead-time forecast reads the window displaced `bound` periods
/// into the past, so only lead times that are certainly known enter the mean. The
/// deque then retains `bound + m` observations.
#[derive(Debug, Clone)]
pub struct ForecastState {
    demands: VecDeque<f64>,
    lead_times: VecDeque<f64>,
    demand_window: usize,
    lead_window: usize,
    lag: usize,
    demand_sum: f64,
    lead_sum: f64,
}

impl ForecastState {
    pub fn new(demand_window: u32, lead_window: u32) -> Result<Self> {
        Self::with_lag(demand_window, lead_window, 0)
    }

    /// Lagged mode: the forecast reads lead times at lags `bound+1 ..= bound+m`.
    pub fn bounded(demand_window: u32, lead_window: u32, bound: u32) -> Result<Self> {
        if bound == 0 {
            return Err(Error::invalid("bound", "lagged mode requires a lead-time bound M >= 1"));
        }
        Self::with_lag(demand_window, lead_window, bound as usize)
    }

    fn with_lag(demand_window: u32, lead_window: u32, lag: usize) -> Result<Self> {
        if demand_window == 0 {
            return Err(Error::invalid("n", "demand window length must be >= 1"));
        }
        if lead_window == 0 {
            return Err(Error::invalid("m", "lead-time window length must be >= 1"));
        }
        Ok(ForecastState {
            demands: VecDeque::with_capacity(demand_window as usize + 1),
            lead_times: VecDeque::with_capacity(lag + lead_window as usize + 1),
            demand_window: demand_window as usize,
            lead_window: lead_window as usize,
            lag,
            demand_sum: 0.0,
            lead_sum: 0.0,
        })
    }

    pub fn demand_window_len(&self) -> usize {
        self.demand_window
    }

    pub fn lead_window_len(&self) -> usize {
        self.lead_window
    }

    pub fn observe_demand(&mut self, demand: f64) {
        self.demands.push_front(demand);
        self.demand_sum += demand;
        if self.demands.len() > self.demand_window {
            self.demand_sum -= self.demands.pop_back().unwrap();
        }
    }

    pub fn observe_lead_time(&mut self, lead_time: f64) {
        self.lead_times.push_front(lead_time);
        // An observation enters the (possibly lagged) forecast window only once it
        // reaches position `lag` in the deque.
        if self.lead_times.len() > self.lag {
            self.lead_sum += self.lead_times[self.lag];
        }
        if self.lead_times.len() > self.lag + self.lead_window {
            self.lead_sum -= self.lead_times.pop_back().unwrap();
        }
    }

    pub fn demand_ready(&self) -> bool {
        self.demands.len() == self.demand_window
    }

    pub fn lead_ready(&self) -> bool {
        self.lead_times.len() == self.lag + self.lead_window
    }

    pub fn is_warm(&self) -> bool {
        self.demand_ready() && self.lead_ready()
    }

    /// Most recent demands, newest first.
    pub fn recent_demands(&self) -> impl Iterator<Item = f64> + '_ {
        self.demands.iter().copied()
    }

    /// Most recent lead times, newest first (includes the lag prefix in lagged mode).
    pub fn recent_lead_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.lead_times.iter().copied()
    }

    /// MA demand forecast; the same value serves every future horizon.
    pub fn demand_forecast(&self) -> Result<f64> {
        if !self.demand_ready() {
            return Err(Error::NotWarmedUp(format!(
                "demand window holds {} of {} observations",
                self.demands.len(),
                self.demand_window
            )));
        }
        Ok(self.demand_sum / self.demand_window as f64)
    }

    /// MA lead-time forecast over the applicable (possibly lagged) window. Real-valued.
    pub fn lead_time_forecast(&self) -> Result<f64> {
        if !self.lead_ready() {
            return Err(Error::NotWarmedUp(format!(
                "lead-time history holds {} of {} observations",
                self.lead_times.len(),
                self.lag + self.lead_window
            )));
        }
        Ok(self.lead_sum / self.lead_window as f64)
    }

    /// Product-form lead-time-demand forecast.
    pub fn ltd_forecast_product(&self) -> Result<f64> {
        Ok(self.lead_time_forecast()? * self.demand_forecast()?)
    }
}
