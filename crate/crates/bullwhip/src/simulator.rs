//! Discrete-period Monte Carlo engine for the retailer's order-up-to policy.
//!
//! Period event order: receive arrivals, observe last period's demand, update the
//! forecasts, set the order-up-to level and place the order, then the current
//! period's demand accrues. Replications run in parallel on per-replication RNG
//! streams and are aggregated with Student-t confidence intervals.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{self, BullwhipDecomposition, ModelParams};
use crate::error::{Error, Result};
use crate::forecasting::{ForecastState, LtdStrategy};
use crate::stats::{replication_stats, ReplicationStats, Welford};
use crate::stochastic::{DistributionSpec, Role, StreamHandle};

/// Full experiment description. Deserializes from the TOML config format; every
/// field has a desk-scale default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub demand: DistributionSpec,
    pub lead_time: DistributionSpec,
    /// One of "product-ma", "kim-ma", "hindsight", "deterministic".
    pub strategy: String,
    /// Delay parameter for the kim-ma strategy.
    pub p: Option<u32>,
    /// Fixed lead time for the deterministic strategy.
    pub fixed_lead_time: Option<u32>,
    /// Demand moving-average window length.
    pub n: u32,
    /// Lead-time moving-average window length.
    pub m: u32,
    /// Safety-factor z-score. Cancels out of the order sequence; only the
    /// inventory tracker sees it.
    pub z: f64,
    /// Periods per replication, including warmup.
    pub horizon: u64,
    /// Periods discarded before measurement; defaults to
    /// `max(n, m + lag) + 10 * ceil(mu_L)` plus the kim backlog when applicable.
    pub warmup: Option<u64>,
    pub replications: u32,
    pub seed: u64,
    /// Read lead times lagged by the bound M so only certainly-known values enter
    /// the forecast.
    pub bounded: bool,
    /// Override for the lead-time bound M; defaults to the distribution's support
    /// maximum.
    pub lead_time_bound: Option<u32>,
    pub track_inventory: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            demand: DistributionSpec::default_demand(),
            lead_time: DistributionSpec::default_lead_time(),
            strategy: "product-ma".to_string(),
            p: None,
            fixed_lead_time: None,
            n: 5,
            m: 5,
            z: 0.0,
            horizon: 110_000,
            warmup: None,
            replications: 8,
            seed: 1,
            bounded: false,
            lead_time_bound: None,
            track_inventory: false,
        }
    }
}

impl SimulationConfig {
    pub fn ltd_strategy(&self) -> Result<LtdStrategy> {
        LtdStrategy::parse(&self.strategy, self.p, self.fixed_lead_time)
    }

    /// The lead-time bound M: explicit override or the support maximum.
    pub fn lead_bound(&self) -> Result<u32> {
        if let Some(m) = self.lead_time_bound {
            return Ok(m);
        }
        self.lead_time
            .upper_bound()
            .map(|b| b.ceil() as u32)
            .ok_or_else(|| Error::invalid("lead_time_bound", "unbounded lead-time distribution needs an explicit bound M"))
    }

    /// Closed-form model parameters matching this configuration's moments.
    pub fn model_params(&self) -> Result<ModelParams<f64>> {
        let (mu_d, var_d) = self.demand.moments()?;
        let (mu_l, var_l) = self.lead_time.moments()?;
        Ok(ModelParams {
            mean_demand: mu_d,
            var_demand: var_d,
            mean_lead_time: mu_l,
            var_lead_time: var_l,
            demand_window: self.n,
            lead_time_window: self.m,
        })
    }

    fn validate(&self) -> Result<RunPlan> {
        let mut violations = Vec::new();
        if let Err(e) = self.demand.validate(Role::Demand) {
            violations.push(format!("demand: {e}"));
        }
        if let Err(e) = self.lead_time.validate(Role::LeadTime) {
            violations.push(format!("lead_time: {e}"));
        }
        let strategy = match self.ltd_strategy() {
            Ok(s) => Some(s),
            Err(e) => {
                violations.push(e.to_string());
                None
            }
        };
        if self.n == 0 {
            violations.push("n: must be >= 1".to_string());
        }
        if self.m == 0 {
            violations.push("m: must be >= 1".to_string());
        }
        if self.replications == 0 {
            violations.push("replications: must be >= 1".to_string());
        }
        let bound = match self.lead_bound() {
            Ok(b) => b,
            Err(e) => {
                violations.push(e.to_string());
                0
            }
        };
        if self.bounded && !matches!(strategy, Some(LtdStrategy::ProductMa) | None) {
            violations.push("bounded: lagged forecasting applies only to the product-ma strategy".to_string());
        }
        let (mu_l, _) = self.lead_time.moments().unwrap_or((1.0, 0.0));
        let lag = if self.bounded { bound as u64 } else { 0 };
        let mut min_warmup = (self.n as u64).max(self.m as u64 + lag) + 10 * mu_l.ceil() as u64;
        if let Some(LtdStrategy::KimMa { delay }) = strategy {
            // The first kim forecast needs `delay` completed orders.
            min_warmup += delay as u64 + bound as u64;
        }
        let warmup = self.warmup.unwrap_or(min_warmup);
        if warmup < min_warmup {
            violations.push(format!("warmup: must be >= {min_warmup}, got {warmup}"));
        }
        if self.horizon <= warmup {
            violations.push(format!("horizon: must exceed warmup ({warmup}), got {}", self.horizon));
        }
        if !violations.is_empty() {
            return Err(Error::Config(violations.join("; ")));
        }
        Ok(RunPlan {
            strategy: strategy.unwrap(),
            warmup,
            bound,
            safety_stock: self.safety_stock(),
        })
    }

    /// `z * sigma_hat` with the analytic forecast-error deviation. Zero when the
    /// closed form is undefined (degenerate demand).
    pub fn safety_stock(&self) -> f64 {
        let sigma2 = self
            .model_params()
            .and_then(|p| analytics::forecast_error_variance(&p));
        match sigma2 {
            Ok(v) => self.z * v.sqrt(),
            Err(_) => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct RunPlan {
    strategy: LtdStrategy,
    warmup: u64,
    bound: u32,
    safety_stock: f64,
}

/// An order in transit. `accrued` collects the demand realized over its lead time;
/// `forecast` is the lead-time-demand forecast made at placement, if one existed.
#[derive(Debug, Clone, Copy)]
struct Order {
    placed: u64,
    arrival: u64,
    qty: f64,
    accrued: f64,
    forecast: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepOutput {
    pub period: u64,
    /// None while the policy is still warming in.
    pub order_qty: Option<f64>,
    pub order_up_to: Option<f64>,
    pub ltd_forecast: Option<f64>,
    pub arrivals: f64,
    /// Whether the *previous* period's demand could not be met from on-hand stock.
    /// None when inventory tracking is off or not yet initialized.
    pub prev_period_stockout: Option<bool>,
    pub net_inventory: Option<f64>,
}

/// Single-replication retailer: forecast windows, previous order-up-to level,
/// in-transit pipeline and optional on-hand/backlog tracking.
pub struct RetailerState {
    period: u64,
    strategy: LtdStrategy,
    forecast: ForecastState,
    safety_stock: f64,
    prev_forecast: Option<f64>,
    prev_lead: Option<u32>,
    in_flight: VecDeque<Order>,
    completed_ltd: VecDeque<f64>,
    track_inventory: bool,
    net_inventory: Option<f64>,
    // (placement period, forecast error) of orders completed in the latest step.
    completions: Vec<(u64, f64)>,
}

impl RetailerState {
    pub fn new(
        strategy: LtdStrategy,
        forecast: ForecastState,
        safety_stock: f64,
        track_inventory: bool,
    ) -> Self {
        RetailerState {
            period: 0,
            strategy,
            forecast,
            safety_stock,
            prev_forecast: None,
            prev_lead: None,
            in_flight: VecDeque::new(),
            completed_ltd: VecDeque::new(),
            track_inventory,
            net_inventory: None,
            completions: Vec::new(),
        }
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// Forecast errors of orders that completed during the latest step, keyed by
    /// placement period.
    pub fn last_completions(&self) -> &[(u64, f64)] {
        &self.completions
    }

    /// Advance one period placing an order. Errors until the forecast windows and
    /// the previous order-up-to level exist; drive the warm-in with [`observe`].
    ///
    /// [`observe`]: RetailerState::observe
    pub fn step(&mut self, prev_demand: f64, new_order_lead: u32) -> Result<StepOutput> {
        let out = self.advance(prev_demand, new_order_lead)?;
        if out.order_qty.is_none() {
            return Err(Error::NotWarmedUp(format!(
                "no order-up-to level available at period {}",
                out.period
            )));
        }
        Ok(out)
    }

    /// Advance one period without requiring an order to come out.
    pub fn observe(&mut self, prev_demand: f64, new_order_lead: u32) -> Result<StepOutput> {
        self.advance(prev_demand, new_order_lead)
    }

    fn advance(&mut self, prev_demand: f64, new_order_lead: u32) -> Result<StepOutput> {
        if new_order_lead == 0 {
            return Err(Error::invalid("lead_time", "must be >= 1"));
        }
        self.period += 1;
        let t = self.period;
        let mut out = StepOutput { period: t, ..StepOutput::default() };

        // Last period's demand accrues against the net inventory first. The
        // stockout flag is evaluated after this period's arrivals: a delivery at
        // the period boundary still serves the demand that just closed.
        let had_inventory = self.net_inventory.is_some();
        if let Some(net) = self.net_inventory.as_mut() {
            *net -= prev_demand;
        }

        // The lead time of the order placed last period becomes observable.
        if matches!(self.strategy, LtdStrategy::ProductMa) {
            if let Some(lead) = self.prev_lead {
                self.forecast.observe_lead_time(lead as f64);
            }
        }
        self.forecast.observe_demand(prev_demand);

        // Demand accrues over every order still in transit.
        for order in self.in_flight.iter_mut() {
            order.accrued += prev_demand;
        }

        // Arrivals. Crossover is possible, so scan the whole pipeline; placement
        // order is preserved, which fixes the completion tie-break.
        self.completions.clear();
        let mut i = 0;
        while i < self.in_flight.len() {
            if self.in_flight[i].arrival == t {
                let order = self.in_flight.remove(i).unwrap();
                out.arrivals += order.qty;
                if let Some(net) = self.net_inventory.as_mut() {
                    *net += order.qty;
                }
                if let Some(forecast) = order.forecast {
                    self.completions.push((order.placed, order.accrued - forecast));
                }
                if matches!(self.strategy, LtdStrategy::KimMa { .. }) {
                    self.completed_ltd.push_back(order.accrued);
                    let keep = match self.strategy {
                        LtdStrategy::KimMa { delay } => delay as usize,
                        _ => 0,
                    };
                    while self.completed_ltd.len() > keep {
                        self.completed_ltd.pop_front();
                    }
                }
            } else {
                i += 1;
            }
        }

        if had_inventory {
            out.prev_period_stockout = self.net_inventory.map(|net| net < 0.0);
        }

        let forecast_value = self.ltd_forecast(new_order_lead);
        if let Some(value) = forecast_value {
            out.ltd_forecast = Some(value);
            let level = value + self.safety_stock;
            out.order_up_to = Some(level);
            match self.prev_forecast {
                Some(prev) => {
                    // The constant z * sigma_hat cancels between consecutive
                    // levels, so the order is computed z-free.
                    out.order_qty = Some(value - prev + prev_demand);
                }
                None => {
                    // First level: establish the inventory position without an
                    // order movement.
                    if self.track_inventory {
                        self.net_inventory = Some(level);
                    }
                }
            }
            self.prev_forecast = Some(value);
        }

        self.in_flight.push_back(Order {
            placed: t,
            arrival: t + new_order_lead as u64,
            qty: out.order_qty.unwrap_or(0.0),
            accrued: 0.0,
            forecast: forecast_value,
        });
        self.prev_lead = Some(new_order_lead);
        out.net_inventory = self.net_inventory;
        Ok(out)
    }

    fn ltd_forecast(&self, new_order_lead: u32) -> Option<f64> {
        match self.strategy {
            LtdStrategy::ProductMa => self.forecast.ltd_forecast_product().ok(),
            LtdStrategy::KimMa { delay } => {
                if self.completed_ltd.len() == delay as usize {
                    Some(self.completed_ltd.iter().sum::<f64>() / delay as f64)
                } else {
                    None
                }
            }
            LtdStrategy::Hindsight => self
                .forecast
                .demand_forecast()
                .ok()
                .map(|d| new_order_lead as f64 * d),
            LtdStrategy::Deterministic { lead_time } => self
                .forecast
                .demand_forecast()
                .ok()
                .map(|d| lead_time as f64 * d),
        }
    }
}

/// Summary of one replication over its post-warmup periods.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReplicationSummary {
    pub replication: u32,
    pub measured_periods: u64,
    pub mean_order: f64,
    pub var_order: f64,
    /// Variance over the first and second halves of the measured span.
    pub var_order_halves: (f64, f64),
    pub var_demand: f64,
    /// `var_order / var_demand`; NaN when the demand variance is zero.
    pub bullwhip: f64,
    pub forecast_error_var: f64,
    pub service_level: Option<f64>,
}

/// Aggregated experiment result.
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub replications: Vec<ReplicationSummary>,
    pub mean_order: f64,
    pub var_order: ReplicationStats,
    pub var_demand: f64,
    /// Empirical bullwhip measure with its 95% CI across replications.
    pub bullwhip: ReplicationStats,
    pub forecast_error_var: ReplicationStats,
    /// Closed-form decomposition, available for the product-ma strategy.
    pub analytic: Option<BullwhipDecomposition<f64>>,
    /// Closed-form forecast-error variance.
    pub analytic_forecast_error_var: Option<f64>,
    pub service_level: Option<f64>,
}

impl SimulationReport {
    /// Sample variance of the realized-minus-forecast lead-time demand.
    pub fn empirical_forecast_error_variance(&self) -> Result<f64> {
        if self.forecast_error_var.mean.is_nan() {
            return Err(Error::OutOfRange(
                "horizon too short: no completed orders measured".to_string(),
            ));
        }
        Ok(self.forecast_error_var.mean)
    }

    /// Fraction of periods with demand fully met from on-hand inventory.
    pub fn service_level(&self) -> Result<f64> {
        self.service_level
            .ok_or_else(|| Error::Config("inventory tracking disabled".to_string()))
    }
}

/// Per-period trace of a single replication.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub period: u64,
    /// Demand observed at the start of the period (the previous period's demand).
    pub demand: f64,
    pub ltd_forecast: Option<f64>,
    pub order_up_to: Option<f64>,
    pub order_qty: Option<f64>,
    pub arrivals: f64,
    pub net_inventory: Option<f64>,
}

fn build_state(config: &SimulationConfig, plan: &RunPlan) -> Result<RetailerState> {
    let forecast = if config.bounded {
        ForecastState::bounded(config.n, config.m, plan.bound)?
    } else {
        ForecastState::new(config.n, config.m)?
    };
    Ok(RetailerState::new(
        plan.strategy,
        forecast,
        plan.safety_stock,
        config.track_inventory,
    ))
}

/// Demand and lead-time stream handles for one replication. Distinct stream ids
/// keep replications independent under a single seed.
pub fn replication_streams(config: &SimulationConfig, replication: u32) -> (StreamHandle, StreamHandle) {
    (
        StreamHandle::new(config.demand.clone(), config.seed, 2 * replication as u64),
        StreamHandle::new(config.lead_time.clone(), config.seed, 2 * replication as u64 + 1),
    )
}

fn run_replication(
    config: &SimulationConfig,
    plan: &RunPlan,
    replication: u32,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> Result<ReplicationSummary> {
    let (demand_handle, lead_handle) = replication_streams(config, replication);
    let mut demand = demand_handle.sampler(Role::Demand)?;
    let mut lead = lead_handle.sampler(Role::LeadTime)?;
    let mut state = build_state(config, plan)?;

    let warmup = plan.warmup;
    let measured = config.horizon - warmup;
    let half = measured / 2;

    let mut orders = Welford::new();
    let mut orders_half1 = Welford::new();
    let mut orders_half2 = Welford::new();
    let mut demands = Welford::new();
    let mut errors = Welford::new();
    let mut service_ok = 0u64;
    let mut service_total = 0u64;

    let mut prev_demand = demand.draw();
    for t in 1..=config.horizon {
        let new_lead = lead.draw_lead_time();
        let out = state.observe(prev_demand, new_lead)?;
        debug_assert_eq!(out.period, t);

        if t > warmup {
            if let Some(q) = out.order_qty {
                orders.push(q);
                if orders.count() <= half {
                    orders_half1.push(q);
                } else {
                    orders_half2.push(q);
                }
            }
        }
        // Stockout flag refers to the previous period.
        if t > warmup + 1 {
            if let Some(stockout) = out.prev_period_stockout {
                service_total += 1;
                if !stockout {
                    service_ok += 1;
                }
            }
        }
        for (placed, err) in state.last_completions() {
            if *placed > warmup {
                errors.push(*err);
            }
        }

        let d = demand.draw();
        if t > warmup {
            demands.push(d);
        }
        if let Some(rows) = trace.as_deref_mut() {
            rows.push(TraceRow {
                period: t,
                demand: prev_demand,
                ltd_forecast: out.ltd_forecast,
                order_up_to: out.order_up_to,
                order_qty: out.order_qty,
                arrivals: out.arrivals,
                net_inventory: out.net_inventory,
            });
        }
        prev_demand = d;
    }

    let var_order = orders.variance();
    let var_demand = demands.variance();
    Ok(ReplicationSummary {
        replication,
        measured_periods: orders.count(),
        mean_order: orders.mean(),
        var_order,
        var_order_halves: (orders_half1.variance(), orders_half2.variance()),
        var_demand,
        bullwhip: var_order / var_demand,
        forecast_error_var: errors.variance(),
        service_level: config
            .track_inventory
            .then(|| service_ok as f64 / service_total.max(1) as f64),
    })
}

/// Run all replications in parallel and aggregate.
pub fn run(config: &SimulationConfig) -> Result<SimulationReport> {
    let plan = config.validate()?;
    let summaries: Vec<ReplicationSummary> = (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, &plan, r, None))
        .collect::<Result<_>>()?;

    let collect = |f: fn(&ReplicationSummary) -> f64| -> Vec<f64> {
        summaries.iter().map(f).collect()
    };
    let bullwhip = replication_stats(&collect(|s| s.bullwhip), 0.95);
    let var_order = replication_stats(&collect(|s| s.var_order), 0.95);
    let forecast_error_var = replication_stats(&collect(|s| s.forecast_error_var), 0.95);
    let mean_order = collect(|s| s.mean_order).iter().sum::<f64>() / summaries.len() as f64;
    let var_demand = collect(|s| s.var_demand).iter().sum::<f64>() / summaries.len() as f64;
    let service_level = config.track_inventory.then(|| {
        summaries.iter().filter_map(|s| s.service_level).sum::<f64>() / summaries.len() as f64
    });

    let (analytic, analytic_sigma2) = if matches!(plan.strategy, LtdStrategy::ProductMa) {
        match config.model_params() {
            Ok(p) => (
                analytics::bullwhip_measure(&p).ok(),
                analytics::forecast_error_variance(&p).ok(),
            ),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };

    Ok(SimulationReport {
        replications: summaries,
        mean_order,
        var_order,
        var_demand,
        bullwhip,
        forecast_error_var,
        analytic,
        analytic_forecast_error_var: analytic_sigma2,
        service_level,
    })
}

/// Re-run one replication collecting its per-period trace.
pub fn run_trace(config: &SimulationConfig, replication: u32) -> Result<Vec<TraceRow>> {
    let plan = config.validate()?;
    let mut rows = Vec::with_capacity(config.horizon as usize);
    run_replication(config, &plan, replication, Some(&mut rows))?;
    Ok(rows)
}
