//! Command-line front end: closed-form evaluation, table reproduction, parameter
//! sweeps and Monte Carlo runs, all emitting deterministic CSV.
//!
//! Printed values are truncated (not rounded) to 5 decimals, matching the
//! presentation convention of the published tables. Relative `--out` paths resolve
//! against `BULLWHIP_OUT_DIR` when set.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analytics::{self, ModelParams};
use crate::error::{Error, Result};
use crate::simulator::{self, SimulationConfig};
use crate::stochastic::DistributionSpec;

pub const OUT_DIR_ENV: &str = "BULLWHIP_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "bullwhip", version, about = "Bullwhip-effect analytics and Monte Carlo validation for an order-up-to supply chain with forecasted demands and lead times")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the closed-form decomposition for one parameter set
    Analytic(AnalyticArgs),
    /// Reproduce one of the published bullwhip tables as CSV
    Table(TableArgs),
    /// Evaluate the measure over a one- or two-axis parameter grid
    Sweep(SweepArgs),
    /// Run the Monte Carlo simulator and compare against the closed form
    Simulate(SimulateArgs),
}

/// Model moments and window lengths, shared by the analytic commands.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Demand moving-average window length
    #[arg(long, default_value_t = 5)]
    pub n: u32,
    /// Lead-time moving-average window length
    #[arg(long, default_value_t = 5)]
    pub m: u32,
    /// Mean lead time (periods)
    #[arg(long = "muL", default_value_t = 3.0)]
    pub mu_l: f64,
    /// Lead-time standard deviation
    #[arg(long = "sigL", default_value_t = 2.0)]
    pub sig_l: f64,
    /// Mean demand per period
    #[arg(long = "muD", default_value_t = 2.0)]
    pub mu_d: f64,
    /// Demand standard deviation (overrides --cvD)
    #[arg(long = "sigD")]
    pub sig_d: Option<f64>,
    /// Demand coefficient of variation; sigD = cvD * muD
    #[arg(long = "cvD")]
    pub cv_d: Option<f64>,
}

impl ModelArgs {
    pub fn to_params(&self) -> Result<ModelParams<f64>> {
        let sd = match (self.sig_d, self.cv_d) {
            (Some(sd), _) => sd,
            (None, Some(cv)) => cv * self.mu_d,
            (None, None) => 0.5 * self.mu_d,
        };
        let params = ModelParams {
            mean_demand: self.mu_d,
            var_demand: sd * sd,
            mean_lead_time: self.mu_l,
            var_lead_time: self.sig_l * self.sig_l,
            demand_window: self.n,
            lead_time_window: self.m,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Write the printout to a file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Table number
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub id: u8,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Sweep axis as name=min:max:steps with name in {m, n, muL, sigL}; repeat for
    /// a second axis
    #[arg(long = "axis")]
    pub axes: Vec<String>,
    /// Preset grid matching one of the published surface plots
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub figure: Option<u8>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML experiment file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    /// Mean demand: replaces the demand law with normal(muD, sigD)
    #[arg(long = "muD")]
    pub mu_d: Option<f64>,
    #[arg(long = "sigD")]
    pub sig_d: Option<f64>,
    #[arg(long = "cvD")]
    pub cv_d: Option<f64>,
    /// Mean lead time: with --sigL builds a constant or symmetric two-point
    /// integer law with those moments
    #[arg(long = "muL")]
    pub mu_l: Option<f64>,
    #[arg(long = "sigL")]
    pub sig_l: Option<f64>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub warmup: Option<u64>,
    #[arg(long)]
    pub reps: Option<u32>,
    /// product-ma | kim-ma | hindsight | deterministic
    #[arg(long)]
    pub strategy: Option<String>,
    /// Delay parameter for kim-ma
    #[arg(long)]
    pub p: Option<u32>,
    /// Fixed lead time for the deterministic strategy
    #[arg(long = "L")]
    pub fixed_lead_time: Option<u32>,
    /// Forecast from lead times lagged by the bound M
    #[arg(long)]
    pub bounded: bool,
    /// Lead-time bound override
    #[arg(long = "M")]
    pub lead_time_bound: Option<u32>,
    #[arg(long)]
    pub track_inventory: bool,
    /// Write the per-replication report CSV here
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a per-period trace CSV of replication 0 here
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

/// Truncate toward zero at 5 decimals, with a one-ulp-scale guard so exact
/// decimal values do not fall through.
pub fn trunc5(x: f64) -> f64 {
    (x * 1e5 + 1e-6).floor() / 1e5
}

pub fn fmt5(x: f64) -> String {
    format!("{:.5}", trunc5(x))
}

pub fn cmd_analytic(args: &AnalyticArgs) -> Result<String> {
    let params = args.model.to_params()?;
    let d = analytics::bullwhip_measure(&params)?;
    let sigma2 = analytics::forecast_error_variance(&params)?;
    let var_q = analytics::order_variance(&params)?;
    let mut s = String::new();
    writeln!(s, "BM1 = {}", fmt5(d.bm1)).unwrap();
    writeln!(s, "BM2 = {}", fmt5(d.bm2)).unwrap();
    writeln!(s, "BM3 = {}", fmt5(d.bm3)).unwrap();
    writeln!(s, "BM  = {}", fmt5(d.bm)).unwrap();
    writeln!(s, "forecast error variance = {}", fmt5(sigma2)).unwrap();
    writeln!(s, "order variance = {}", fmt5(var_q)).unwrap();
    Ok(s)
}

/// Row set shared by all four published tables.
pub const TABLE_LEAD_WINDOWS: [u32; 12] = [1, 3, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50];
/// Demand window per table id.
pub const TABLE_DEMAND_WINDOWS: [u32; 4] = [5, 10, 20, 30];

pub fn cmd_table(id: u8) -> Result<String> {
    if !(1..=4).contains(&id) {
        return Err(Error::Usage(format!("table id must be 1..4, got {id}")));
    }
    let n = TABLE_DEMAND_WINDOWS[id as usize - 1];
    let mut s = String::from("m,BM1,BM2,BM\n");
    for m in TABLE_LEAD_WINDOWS {
        let params = ModelParams {
            mean_demand: 2.0,
            var_demand: 1.0,
            mean_lead_time: 3.0,
            var_lead_time: 4.0,
            demand_window: n,
            lead_time_window: m,
        };
        let d = analytics::bullwhip_measure(&params)?;
        writeln!(s, "{m},{},{},{}", fmt5(d.bm1), fmt5(d.bm2), fmt5(d.bm)).unwrap();
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AxisName {
    M,
    N,
    MeanLeadTime,
    SigmaLeadTime,
}

impl AxisName {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(AxisName::M),
            "n" => Ok(AxisName::N),
            "muL" => Ok(AxisName::MeanLeadTime),
            "sigL" => Ok(AxisName::SigmaLeadTime),
            other => Err(Error::Usage(format!(
                "unknown sweep axis {other:?}; expected one of m, n, muL, sigL"
            ))),
        }
    }

    fn label(self) -> &'static str {
        match self {
            AxisName::M => "m",
            AxisName::N => "n",
            AxisName::MeanLeadTime => "muL",
            AxisName::SigmaLeadTime => "sigL",
        }
    }

    fn integer(self) -> bool {
        matches!(self, AxisName::M | AxisName::N)
    }
}

#[derive(Debug, Clone)]
struct Axis {
    name: AxisName,
    values: Vec<f64>,
}

impl Axis {
    fn parse(spec: &str) -> Result<Self> {
        let (name, range) = spec
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("axis {spec:?} must look like name=min:max:steps")))?;
        let name = AxisName::parse(name)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Usage(format!("axis {spec:?} must look like name=min:max:steps")));
        }
        let min: f64 = parts[0].parse().map_err(|_| Error::Usage(format!("bad axis minimum {:?}", parts[0])))?;
        let max: f64 = parts[1].parse().map_err(|_| Error::Usage(format!("bad axis maximum {:?}", parts[1])))?;
        let steps: usize = parts[2].parse().map_err(|_| Error::Usage(format!("bad axis step count {:?}", parts[2])))?;
        Self::linspace(name, min, max, steps)
    }

    fn linspace(name: AxisName, min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps == 0 || max < min {
            return Err(Error::Usage(format!(
                "axis {} needs min <= max and steps >= 1",
                name.label()
            )));
        }
        let values = if steps == 1 {
            vec![min]
        } else {
            (0..steps)
                .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
                .collect()
        };
        let values = if name.integer() {
            values.iter().map(|v| v.round()).collect()
        } else {
            values
        };
        if name.integer() && values.iter().any(|v| *v < 1.0) {
            return Err(Error::Usage(format!("axis {} must stay >= 1", name.label())));
        }
        Ok(Axis { name, values })
    }
}

fn figure_axes(figure: u8) -> Result<(Vec<Axis>, Vec<(AxisName, f64)>)> {
    // Grids mirror the published surface plots; fixed values listed second.
    let (a, b, fixed) = match figure {
        1 => (
            Axis::linspace(AxisName::M, 20.0, 40.0, 21)?,
            Axis::linspace(AxisName::SigmaLeadTime, 0.5, 6.0, 12)?,
            vec![(AxisName::N, 10.0), (AxisName::MeanLeadTime, 3.0)],
        ),
        2 => (
            Axis::linspace(AxisName::M, 5.0, 40.0, 36)?,
            Axis::linspace(AxisName::MeanLeadTime, 1.0, 10.0, 10)?,
            vec![(AxisName::N, 10.0), (AxisName::SigmaLeadTime, 3.0)],
        ),
        3 => (
            Axis::linspace(AxisName::N, 20.0, 40.0, 21)?,
            Axis::linspace(AxisName::SigmaLeadTime, 0.5, 6.0, 12)?,
            vec![(AxisName::M, 10.0), (AxisName::MeanLeadTime, 3.0)],
        ),
        4 => (
            Axis::linspace(AxisName::M, 20.0, 40.0, 21)?,
            Axis::linspace(AxisName::N, 20.0, 40.0, 21)?,
            vec![(AxisName::MeanLeadTime, 3.0), (AxisName::SigmaLeadTime, 3.0)],
        ),
        5 => (
            Axis::linspace(AxisName::N, 20.0, 40.0, 21)?,
            Axis::linspace(AxisName::MeanLeadTime, 1.0, 10.0, 10)?,
            vec![(AxisName::M, 10.0), (AxisName::SigmaLeadTime, 3.0)],
        ),
        other => return Err(Error::Usage(format!("figure preset must be 1..5, got {other}"))),
    };
    Ok((vec![a, b], fixed))
}

fn apply_axis(params: &mut ModelParams<f64>, name: AxisName, value: f64) {
    match name {
        AxisName::M => params.lead_time_window = value as u32,
        AxisName::N => params.demand_window = value as u32,
        AxisName::MeanLeadTime => params.mean_lead_time = value,
        AxisName::SigmaLeadTime => params.var_lead_time = value * value,
    }
}

fn axis_value(name: AxisName, value: f64) -> String {
    if name.integer() {
        format!("{}", value as i64)
    } else {
        format!("{value}")
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<String> {
    let (axes, fixed) = if let Some(figure) = args.figure {
        if !args.axes.is_empty() {
            return Err(Error::Usage("--figure and --axis are mutually exclusive".to_string()));
        }
        figure_axes(figure)?
    } else {
        if args.axes.is_empty() || args.axes.len() > 2 {
            return Err(Error::Usage(format!(
                "sweep takes 1 or 2 --axis arguments, got {}",
                args.axes.len()
            )));
        }
        let axes = args
            .axes
            .iter()
            .map(|s| Axis::parse(s))
            .collect::<Result<Vec<_>>>()?;
        (axes, Vec::new())
    };

    let mut base = args.model.to_params()?;
    for (name, value) in &fixed {
        apply_axis(&mut base, *name, *value);
    }

    let mut s = String::new();
    if axes.len() == 2 {
        writeln!(s, "{},{},BM,BM1,BM2,BM3", axes[0].name.label(), axes[1].name.label()).unwrap();
        for a in &axes[0].values {
            for b in &axes[1].values {
                let mut params = base;
                apply_axis(&mut params, axes[0].name, *a);
                apply_axis(&mut params, axes[1].name, *b);
                let d = analytics::bullwhip_measure(&params)?;
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    axis_value(axes[0].name, *a),
                    axis_value(axes[1].name, *b),
                    fmt5(d.bm),
                    fmt5(d.bm1),
                    fmt5(d.bm2),
                    fmt5(d.bm3)
                )
                .unwrap();
            }
        }
    } else {
        writeln!(s, "{},BM,BM1,BM2,BM3", axes[0].name.label()).unwrap();
        for a in &axes[0].values {
            let mut params = base;
            apply_axis(&mut params, axes[0].name, *a);
            let d = analytics::bullwhip_measure(&params)?;
            writeln!(
                s,
                "{},{},{},{},{}",
                axis_value(axes[0].name, *a),
                fmt5(d.bm),
                fmt5(d.bm1),
                fmt5(d.bm2),
                fmt5(d.bm3)
            )
            .unwrap();
        }
    }
    Ok(s)
}

/// Build an integer lead-time law with the requested moments: constant when
/// sigL = 0, otherwise the symmetric two-point law {muL - sigL, muL + sigL}.
fn lead_time_from_moments(mu_l: f64, sig_l: f64) -> Result<DistributionSpec> {
    if sig_l == 0.0 {
        if mu_l.fract() != 0.0 || mu_l < 1.0 {
            return Err(Error::invalid("muL", format!("constant lead time must be an integer >= 1, got {mu_l}")));
        }
        return Ok(DistributionSpec::Constant { value: mu_l });
    }
    let low = mu_l - sig_l;
    let high = mu_l + sig_l;
    if low.fract() != 0.0 || high.fract() != 0.0 || low < 1.0 {
        return Err(Error::invalid(
            "sigL",
            format!("two-point lead-time law needs integer muL +- sigL with muL - sigL >= 1, got {{{low}, {high}}}"),
        ));
    }
    Ok(DistributionSpec::Empirical {
        values: vec![low as i64, high as i64],
        probs: vec![0.5, 0.5],
    })
}

pub fn simulate_config(args: &SimulateArgs) -> Result<SimulationConfig> {
    let mut config: SimulationConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => SimulationConfig::default(),
    };
    if args.mu_d.is_some() || args.sig_d.is_some() || args.cv_d.is_some() {
        let mu = args.mu_d.unwrap_or(2.0);
        let sd = match (args.sig_d, args.cv_d) {
            (Some(sd), _) => sd,
            (None, Some(cv)) => cv * mu,
            (None, None) => 0.5 * mu,
        };
        config.demand = DistributionSpec::Normal { mean: mu, sd };
    }
    if args.mu_l.is_some() || args.sig_l.is_some() {
        let mu = args.mu_l.unwrap_or(3.0);
        let sig = args.sig_l.unwrap_or(2.0);
        config.lead_time = lead_time_from_moments(mu, sig)?;
    }
    if let Some(v) = args.n {
        config.n = v;
    }
    if let Some(v) = args.m {
        config.m = v;
    }
    if let Some(v) = args.z {
        config.z = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.horizon {
        config.horizon = v;
    }
    if let Some(v) = args.warmup {
        config.warmup = Some(v);
    }
    if let Some(v) = args.reps {
        config.replications = v;
    }
    if let Some(v) = &args.strategy {
        config.strategy = v.clone();
    }
    if let Some(v) = args.p {
        config.p = Some(v);
    }
    if let Some(v) = args.fixed_lead_time {
        config.fixed_lead_time = Some(v);
    }
    if args.bounded {
        config.bounded = true;
    }
    if let Some(v) = args.lead_time_bound {
        config.lead_time_bound = Some(v);
    }
    if args.track_inventory {
        config.track_inventory = true;
    }
    Ok(config)
}

pub struct SimulateOutput {
    pub summary: String,
    pub report_csv: String,
    pub trace_csv: Option<String>,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<SimulateOutput> {
    let config = simulate_config(args)?;
    let report = simulator::run(&config)?;

    let mut s = String::new();
    writeln!(s, "strategy = {}", config.strategy).unwrap();
    writeln!(
        s,
        "replications = {}, horizon = {}, seed = {}",
        config.replications, config.horizon, config.seed
    )
    .unwrap();
    writeln!(s, "mean order = {}", report.mean_order).unwrap();
    writeln!(
        s,
        "empirical order variance = {} (se {})",
        report.var_order.mean, report.var_order.std_error
    )
    .unwrap();
    writeln!(s, "empirical demand variance = {}", report.var_demand).unwrap();
    if report.bullwhip.mean.is_nan() {
        writeln!(s, "empirical BM = undefined (zero demand variance)").unwrap();
    } else {
        writeln!(
            s,
            "empirical BM = {} (95% CI [{}, {}])",
            report.bullwhip.mean, report.bullwhip.ci_low, report.bullwhip.ci_high
        )
        .unwrap();
    }
    writeln!(
        s,
        "empirical forecast error variance = {}",
        report.forecast_error_var.mean
    )
    .unwrap();
    if let Some(analytic) = &report.analytic {
        writeln!(s, "analytic BM = {}", analytic.bm).unwrap();
        if !report.bullwhip.mean.is_nan() {
            writeln!(s, "empirical / analytic = {}", report.bullwhip.mean / analytic.bm).unwrap();
        }
        if let Some(sigma2) = report.analytic_forecast_error_var {
            writeln!(s, "analytic forecast error variance = {sigma2}").unwrap();
        }
    }
    if let Some(sl) = report.service_level {
        writeln!(s, "service level = {sl}").unwrap();
    }

    let mut csv = String::from(
        "replication,measured_periods,mean_order,var_order,var_demand,bullwhip,forecast_error_var,service_level\n",
    );
    for r in &report.replications {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.replication,
            r.measured_periods,
            r.mean_order,
            r.var_order,
            r.var_demand,
            r.bullwhip,
            r.forecast_error_var,
            r.service_level.map_or(String::new(), |v| v.to_string()),
        )
        .unwrap();
    }

    let trace_csv = if args.trace.is_some() {
        let rows = simulator::run_trace(&config, 0)?;
        let mut t = String::from("period,demand,ltd_forecast,order_up_to,order_qty,arrivals,net_inventory\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for row in rows {
            writeln!(
                t,
                "{},{},{},{},{},{},{}",
                row.period,
                row.demand,
                opt(row.ltd_forecast),
                opt(row.order_up_to),
                opt(row.order_qty),
                row.arrivals,
                opt(row.net_inventory),
            )
            .unwrap();
        }
        Some(t)
    } else {
        None
    };

    Ok(SimulateOutput {
        summary: s,
        report_csv: csv,
        trace_csv,
    })
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            return Path::new(&dir).join(path);
        }
    }
    path.to_path_buf()
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(resolve_out(path), text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Run a parsed command line. Usage problems map to exit 2, validation problems
/// to exit 3 in the binary.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analytic(args) => {
            let text = cmd_analytic(&args)?;
            emit(&text, args.out.as_ref())
        }
        Command::Table(args) => {
            let text = cmd_table(args.id)?;
            emit(&text, args.out.as_ref())
        }
        Command::Sweep(args) => {
            let text = cmd_sweep(&args)?;
            emit(&text, args.out.as_ref())
        }
        Command::Simulate(args) => {
            let output = cmd_simulate(&args)?;
            print!("{}", output.summary);
            if let Some(out) = &args.out {
                std::fs::write(resolve_out(out), &output.report_csv)?;
            }
            if let (Some(path), Some(trace)) = (&args.trace, &output.trace_csv) {
                std::fs::write(resolve_out(path), trace)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model_args() -> ModelArgs {
        ModelArgs {
            n: 5,
            m: 5,
            mu_l: 3.0,
            sig_l: 2.0,
            mu_d: 2.0,
            sig_d: None,
            cv_d: Some(0.5),
        }
    }

    #[test]
    fn analytic_printout_matches_table_rows() {
        let args = AnalyticArgs {
            model: ModelArgs { m: 10, ..model_args() },
            out: None,
        };
        let text = cmd_analytic(&args).unwrap();
        assert!(text.contains("BM1 = 0.04480"), "{text}");
        assert!(text.contains("BM2 = 0.32000"), "{text}");
        assert!(text.contains("BM  = 3.28480"), "{text}");

        let args = AnalyticArgs {
            model: ModelArgs { n: 20, m: 3, ..model_args() },
            out: None,
        };
        assert!(cmd_analytic(&args).unwrap().contains("BM  = 4.94944"));

        // Deterministic special case via sigL = 0.
        let args = AnalyticArgs {
            model: ModelArgs { mu_l: 2.0, sig_l: 0.0, ..model_args() },
            out: None,
        };
        assert!(cmd_analytic(&args).unwrap().contains("BM  = 2.12000"));
    }

    #[test]
    fn table_spot_rows() {
        let t1 = cmd_table(1).unwrap();
        assert!(t1.starts_with("m,BM1,BM2,BM\n"));
        assert!(t1.contains("50,0.00691,0.01280,2.93971\n"), "{t1}");
        let t2 = cmd_table(2).unwrap();
        assert!(t2.contains("15,0.00853,0.14222,1.93075\n"));
        let t4 = cmd_table(4).unwrap();
        assert!(t4.contains("3,0.03160,3.55555,4.80716\n"));
        assert!(cmd_table(0).is_err());
    }

    #[test]
    fn truncation_matches_published_presentation() {
        // The published cells truncate the repeating decimal rather than round.
        assert_eq!(fmt5(56.0 / 225.0), "0.24888");
        assert_eq!(fmt5(32.0 / 9.0), "3.55555");
        assert_eq!(fmt5(1.92), "1.92000");
        assert_eq!(fmt5(0.000768), "0.00076");
    }

    #[test]
    fn sweep_is_consistent_with_analytic() {
        let args = SweepArgs {
            model: ModelArgs { n: 10, ..model_args() },
            axes: vec!["m=20:40:21".to_string(), "sigL=0.5:6:12".to_string()],
            figure: None,
            out: None,
        };
        let csv = cmd_sweep(&args).unwrap();
        assert!(csv.starts_with("m,sigL,BM,BM1,BM2,BM3\n"));
        // (m=20, sigL=2) row must match the analytic command for those params.
        let analytic = cmd_analytic(&AnalyticArgs {
            model: ModelArgs { n: 10, m: 20, sig_l: 2.0, ..model_args() },
            out: None,
        })
        .unwrap();
        let bm_line = analytic.lines().find(|l| l.starts_with("BM  = ")).unwrap();
        let bm = bm_line.trim_start_matches("BM  = ");
        let row = csv.lines().find(|l| l.starts_with("20,2,")).unwrap();
        assert!(row.split(',').nth(2).unwrap() == bm, "{row} vs {bm}");
    }

    #[test]
    fn figure_presets_match_their_grids() {
        let csv = cmd_sweep(&SweepArgs {
            model: model_args(),
            axes: vec![],
            figure: Some(1),
            out: None,
        })
        .unwrap();
        assert!(csv.starts_with("m,sigL,"));
        assert_eq!(csv.lines().count(), 1 + 21 * 12);

        // Figure 4: monotone in both windows, so the (40, 40) corner is the
        // grid minimum.
        let csv = cmd_sweep(&SweepArgs {
            model: model_args(),
            axes: vec![],
            figure: Some(4),
            out: None,
        })
        .unwrap();
        let rows: Vec<(&str, f64)> = csv
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.splitn(3, ',');
                let a = it.next().unwrap();
                let rest = it.nth(1).unwrap();
                let bm: f64 = rest.split(',').next().unwrap().parse().unwrap();
                (a, bm)
            })
            .collect();
        let corner = csv
            .lines()
            .find(|l| l.starts_with("40,40,"))
            .unwrap()
            .split(',')
            .nth(2)
            .unwrap()
            .parse::<f64>()
            .unwrap();
        assert!(rows.iter().all(|(_, bm)| *bm >= corner));

        // Figure 2: large muL with small m exceeds small muL with large m.
        let csv = cmd_sweep(&SweepArgs {
            model: model_args(),
            axes: vec![],
            figure: Some(2),
            out: None,
        })
        .unwrap();
        let bm_at = |m: &str, mul: &str| -> f64 {
            csv.lines()
                .find(|l| l.starts_with(&format!("{m},{mul},")))
                .unwrap()
                .split(',')
                .nth(2)
                .unwrap()
                .parse()
                .unwrap()
        };
        assert!(bm_at("40", "1") < bm_at("5", "10"));
    }

    #[test]
    fn sweep_axis_validation() {
        let bad = SweepArgs {
            model: model_args(),
            axes: vec![
                "m=1:2:2".to_string(),
                "n=1:2:2".to_string(),
                "sigL=1:2:2".to_string(),
            ],
            figure: None,
            out: None,
        };
        assert!(matches!(cmd_sweep(&bad), Err(Error::Usage(_))));
        let bad = SweepArgs {
            model: model_args(),
            axes: vec!["q=1:2:2".to_string()],
            figure: None,
            out: None,
        };
        assert!(matches!(cmd_sweep(&bad), Err(Error::Usage(_))));
    }

    #[test]
    fn config_file_round_trip_and_overrides() {
        let text = r#"
strategy = "product-ma"
n = 4
m = 6
seed = 9
horizon = 5000
replications = 2

[demand]
kind = "normal"
mean = 2.0
sd = 1.0

[lead_time]
kind = "empirical-integer"
values = [1, 5]
probs = [0.5, 0.5]
"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.toml");
        std::fs::write(&path, text).unwrap();
        let args = SimulateArgs {
            config: Some(path),
            n: None,
            m: Some(8),
            mu_d: None,
            sig_d: None,
            cv_d: None,
            mu_l: None,
            sig_l: None,
            z: None,
            seed: None,
            horizon: None,
            warmup: None,
            reps: None,
            strategy: None,
            p: None,
            fixed_lead_time: None,
            bounded: false,
            lead_time_bound: None,
            track_inventory: false,
            out: None,
            trace: None,
        };
        let config = simulate_config(&args).unwrap();
        assert_eq!(config.n, 4);
        assert_eq!(config.m, 8, "flag overrides file");
        assert_eq!(config.seed, 9);
    }

    #[test]
    fn unparseable_config_names_the_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "horizont = 5").unwrap();
        let args = SimulateArgs {
            config: Some(path),
            n: None,
            m: None,
            mu_d: None,
            sig_d: None,
            cv_d: None,
            mu_l: None,
            sig_l: None,
            z: None,
            seed: None,
            horizon: None,
            warmup: None,
            reps: None,
            strategy: None,
            p: None,
            fixed_lead_time: None,
            bounded: false,
            lead_time_bound: None,
            track_inventory: false,
            out: None,
            trace: None,
        };
        let err = simulate_config(&args).unwrap_err().to_string();
        assert!(err.contains("horizont"), "{err}");
    }

    #[test]
    fn lead_time_moment_construction() {
        assert_eq!(
            lead_time_from_moments(3.0, 0.0).unwrap(),
            DistributionSpec::Constant { value: 3.0 }
        );
        let two_point = lead_time_from_moments(3.0, 2.0).unwrap();
        let (mu, var) = two_point.moments().unwrap();
        assert!((mu - 3.0).abs() < 1e-12 && (var - 4.0).abs() < 1e-12);
        assert!(lead_time_from_moments(2.0, 1.5).is_err());
        assert!(lead_time_from_moments(2.0, 2.0).is_err());
    }
}
