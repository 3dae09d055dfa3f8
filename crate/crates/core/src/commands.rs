//! The analyses behind each command-line subcommand, returning tables that
//! render to CSV or JSON.

use crate::channel::{mw_to_dbm, dbm_to_mw, ReceivedPower};
use crate::config::ScenarioConfig;
use crate::density::{charging_analysis, ChargingResult, ChargingSpec};
use crate::error::{Error, Result};
use crate::harvester::{
    fit_quadratic, fit_sigmoid, grid_search_eta, ConstantLinear, ConstantLinearConstant, GroundTruth, Harvester,
    HarvesterCurve, InvertibleHarvester, Linear, PiecewiseLinear, Quadratic, Sigmoid, Spacing,
};
use crate::montecarlo::{simulate_energy, simulate_first_passage, simulate_rfid, SimulationPlan};
use crate::rfid::success_probability;
use crate::stats::{
    expected_power_cl, expected_power_clc, expected_power_linear, expected_power_numeric, expected_power_piecewise,
    sensitivity_outage,
};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::str::FromStr;

/// Output encoding of a [`Table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}` (csv or json)"))),
        }
    }
}

/// Numeric table with named columns and free-form notes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub notes: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Twelve significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Self::default() }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let notes: Map<String, Value> = self.notes.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(|&x| Value::from(x))).collect()))
            .collect();
        let doc = json!({ "notes": notes, "columns": self.columns, "rows": rows });
        serde_json::to_string_pretty(&doc).expect("table serializes") + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Polynomial degree used for user-supplied curves without an explicit one.
pub const DEFAULT_CSV_FIT_DEGREE: usize = 8;

/// The harvester models a configuration describes.
#[derive(Debug, Clone)]
pub struct Models {
    pub curve: HarvesterCurve,
    pub truth: GroundTruth,
    pub piecewise: PiecewiseLinear,
}

pub fn load_models(cfg: &ScenarioConfig) -> Result<Models> {
    let h = &cfg.harvester;
    let (curve, default_degree) = match &h.curve_csv {
        Some(path) => (HarvesterCurve::load_csv(path)?, DEFAULT_CSV_FIT_DEGREE),
        None => (h.dataset.curve(), h.dataset.fit_degree()),
    };
    let truth = GroundTruth::fit(&curve, h.fit_degree.unwrap_or(default_degree))?;
    let piecewise = match h.spacing {
        Spacing::Datapoints => PiecewiseLinear::from_curve(&curve)?,
        s => PiecewiseLinear::from_function(&truth, truth.sensitivity_mw(), truth.saturation_mw(), h.segments, s)?,
    };
    Ok(Models { curve, truth, piecewise })
}

/// Every (transmit power, distance) pair of the sweep, power-major.
fn operating_points(cfg: &ScenarioConfig) -> Vec<(f64, f64)> {
    let ds = cfg.distances();
    cfg.transmit_powers_mw().into_iter().flat_map(|p| ds.iter().map(move |&d| (p, d))).collect()
}

fn received(cfg: &ScenarioConfig, p_mw: f64, d: f64) -> Result<ReceivedPower> {
    let mut link = cfg.link.budget();
    link.transmit_power_mw = p_mw;
    link.distance_m = d;
    ReceivedPower::new(&link, &cfg.channel)
}

/// Efficiency polynomial and fit residuals.
pub fn cmd_fit(cfg: &ScenarioConfig) -> Result<Table> {
    let m = load_models(cfg)?;
    let e = m.truth.efficiency();
    let mut t = Table::new(&["input_dbm", "measured_efficiency", "fitted_efficiency", "residual"]);
    t.note("degree", e.degree());
    t.note("max_residual", format_number(e.max_residual()));
    t.note("sensitivity_mw", format_number(m.truth.sensitivity_mw()));
    t.note("saturation_mw", format_number(m.truth.saturation_mw()));
    let mono: Vec<String> = e.coefficients().iter().map(|&c| format_number(c)).collect();
    t.note("monomial_coefficients_dbm", mono.join(" "));
    let cheb: Vec<String> = e.chebyshev_coefficients().iter().map(|&c| format_number(c)).collect();
    t.note("chebyshev_coefficients", cheb.join(" "));
    for (dbm, eff) in m.curve.efficiency_samples() {
        let fit = e.eval_dbm(dbm);
        t.push(vec![dbm, eff, fit, fit - eff]);
    }
    Ok(t)
}

/// Outage probability `P(P_R <= sensitivity)` over sensitivity, distance and
/// transmit power.
pub fn cmd_outage(cfg: &ScenarioConfig) -> Result<Table> {
    let sens_dbm = match cfg.harvester.sensitivity_sweep_dbm {
        Some(s) => s.values(),
        None => vec![mw_to_dbm(load_models(cfg)?.truth.sensitivity_mw())],
    };
    let mut t = Table::new(&["sensitivity_dBm", "d_m", "P_T_dBm", "outage_probability"]);
    for &s in &sens_dbm {
        for (p, d) in operating_points(cfg) {
            let mut link = cfg.link.budget();
            link.transmit_power_mw = p;
            link.distance_m = d;
            t.push(vec![s, d, mw_to_dbm(p), sensitivity_outage(&link, &cfg.channel, dbm_to_mw(s))?]);
        }
    }
    Ok(t)
}

/// Baseline efficiencies: configured values, or grid-searched to match
/// the ground-truth expected power over the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baselines {
    pub linear: Linear,
    pub constant_linear: ConstantLinear,
    pub constant_linear_constant: ConstantLinearConstant,
}

pub fn resolve_baselines(cfg: &ScenarioConfig, m: &Models, rps: &[ReceivedPower], truth_means: &[f64]) -> Result<Baselines> {
    let (sen, sat) = (m.truth.sensitivity_mw(), m.truth.saturation_mw());
    let grid: Vec<f64> = (1..1000).map(|k| k as f64 / 1000.0).collect();
    let mismatch = |f: &dyn Fn(&ReceivedPower) -> f64| {
        rps.iter()
            .zip(truth_means)
            .filter(|(_, &e)| e > 0.0)
            .map(|(rp, &e)| ((f(rp) - e) / e).powi(2))
            .sum::<f64>()
    };
    let pick = |given: Option<f64>, model: &dyn Fn(f64, &ReceivedPower) -> f64| -> Result<f64> {
        match given {
            Some(eta) => Ok(eta),
            None => grid_search_eta(&grid, |eta| mismatch(&|rp: &ReceivedPower| model(eta, rp)))
                .map(|(eta, _)| eta)
                .ok_or_else(|| Error::Config("no efficiency matches the ground truth".into())),
        }
    };
    let eta = cfg.harvester.eta;
    let l = pick(eta.linear, &|e, rp| expected_power_linear(rp, e))?;
    let cl = pick(eta.constant_linear, &|e, rp| expected_power_cl(rp, &ConstantLinear { eta: e, sensitivity_mw: sen }))?;
    let clc = pick(eta.constant_linear_constant, &|e, rp| {
        expected_power_clc(rp, &ConstantLinearConstant { eta: e, sensitivity_mw: sen, saturation_mw: sat })
    })?;
    Ok(Baselines {
        linear: Linear::new(l)?,
        constant_linear: ConstantLinear::new(cl, sen)?,
        constant_linear_constant: ConstantLinearConstant::new(clc, sen, sat)?,
    })
}

/// Expected harvested energy per coherence block (mW * ms) for every model.
pub fn cmd_energy(cfg: &ScenarioConfig) -> Result<Table> {
    let m = load_models(cfg)?;
    let tol = cfg.numerics.quadrature_tolerance;
    let tp = cfg.charging.spec.packet_duration_ms;
    let points = operating_points(cfg);
    let rps = points.iter().map(|&(p, d)| received(cfg, p, d)).collect::<Result<Vec<_>>>()?;
    let truth_means = rps.iter().map(|rp| expected_power_numeric(rp, &m.truth, tol)).collect::<Result<Vec<_>>>()?;
    let base = resolve_baselines(cfg, &m, &rps, &truth_means)?;
    let sigmoid: Sigmoid = fit_sigmoid(&m.curve)?;
    let quadratic: Quadratic = fit_quadratic(&m.curve)?;

    let mut t = Table::new(&[
        "d_m",
        "P_T_dBm",
        "ground_truth_mc",
        "ground_truth_mc_se",
        "ground_truth_quadrature",
        "piecewise",
        "linear",
        "constant_linear",
        "constant_linear_constant",
        "sigmoid",
        "quadratic",
    ]);
    t.note("unit", "mW*ms per block");
    t.note("segments", m.piecewise.segments());
    t.note("eta_linear", base.linear.eta);
    t.note("eta_constant_linear", base.constant_linear.eta);
    t.note("eta_constant_linear_constant", base.constant_linear_constant.eta);
    t.note("sigmoid", format!("{} {} {}", format_number(sigmoid.saturation_mw), format_number(sigmoid.steepness), format_number(sigmoid.center_mw)));
    t.note("quadratic", format!("{} {} {}", format_number(quadratic.a), format_number(quadratic.b), format_number(quadratic.c)));
    for (k, (&(p, d), rp)) in points.iter().zip(&rps).enumerate() {
        let plan = SimulationPlan::new(*rp, &m.truth, cfg.numerics.mc_trials, 1, cfg.numerics.seed.wrapping_add(k as u64))?;
        let mc = simulate_energy(&plan, tp)?;
        t.push(vec![
            d,
            mw_to_dbm(p),
            mc.mean,
            mc.std_error,
            tp * truth_means[k],
            tp * expected_power_piecewise(rp, &m.piecewise),
            tp * expected_power_linear(rp, base.linear.eta),
            tp * expected_power_cl(rp, &base.constant_linear),
            tp * expected_power_clc(rp, &base.constant_linear_constant),
            tp * expected_power_numeric(rp, &sigmoid, tol)?,
            tp * expected_power_numeric(rp, &quadratic, tol)?,
        ]);
    }
    Ok(t)
}

/// Expected number of coherence blocks to charge the capacitor.
pub fn cmd_charging(cfg: &ScenarioConfig) -> Result<(Table, Option<String>)> {
    let m = load_models(cfg)?;
    let spec: ChargingSpec = cfg.charging.spec;
    let n = &cfg.numerics;
    let mut t = Table::new(&[
        "d_m",
        "P_T_dBm",
        "threshold_mW",
        "expected_blocks",
        "expected_blocks_mc",
        "expected_blocks_mc_se",
        "truncation_residual",
        "bias_bound",
        "expected_time_s",
    ]);
    t.note("grid_intervals", n.grid_intervals);
    let mut dump = cfg.charging.density_dump.as_ref().map(|_| String::from("d_m,P_T_dBm,kind,index,x_mw,value\n"));
    for (k, (p, d)) in operating_points(cfg).into_iter().enumerate() {
        let rp = received(cfg, p, d)?;
        let dist = crate::stats::HarvestedPowerDistribution::new(&m.piecewise, rp);
        let r: ChargingResult = charging_analysis(&dist, &spec, n.grid_intervals, n.passage_tolerance, n.max_blocks)?;
        let horizon = n.max_blocks;
        let plan = SimulationPlan::new(rp, &m.piecewise, n.mc_trials, horizon, n.seed.wrapping_add(k as u64))?;
        let mc = simulate_first_passage(&plan, r.threshold_mw)?;
        t.push(vec![
            d,
            mw_to_dbm(p),
            r.threshold_mw,
            r.estimate.mean_blocks,
            mc.mean().0,
            mc.std_error(),
            r.estimate.residual,
            r.estimate.bias_bound,
            r.expected_time_s,
        ]);
        if let Some(out) = dump.as_mut() {
            let (dd, pp) = (format_number(d), format_number(mw_to_dbm(p)));
            let single = crate::density::discretize(&dist, r.grid)?;
            let stride = (r.grid.intervals / 2048).max(1);
            for j in (0..r.grid.nodes()).step_by(stride) {
                let _ = writeln!(out, "{dd},{pp},density,{j},{},{}", format_number(r.grid.node(j)), format_number(single.values()[j]));
            }
            for (i, &q) in r.passage.pmf.iter().enumerate().skip(1) {
                let _ = writeln!(out, "{dd},{pp},first_passage_pmf,{i},nan,{}", format_number(q));
            }
        }
    }
    Ok((t, dump))
}

/// Round-trip success probability over tag consumption, closed form and
/// Monte Carlo, for the invertible models; Monte Carlo for the ground truth.
pub fn cmd_rfid(cfg: &ScenarioConfig) -> Result<Table> {
    let m = load_models(cfg)?;
    let scn = cfg.rfid.scenario;
    let pcs = cfg.consumptions_mw();
    let n = &cfg.numerics;
    let mut t = Table::new(&[
        "d_m",
        "P_T_dBm",
        "P_c_mW",
        "piecewise",
        "piecewise_mc",
        "piecewise_mc_ci95",
        "linear",
        "linear_mc",
        "constant_linear",
        "constant_linear_mc",
        "constant_linear_constant",
        "constant_linear_constant_mc",
        "ground_truth_mc",
        "ground_truth_mc_ci95",
    ]);
    let points = operating_points(cfg);
    let rps = points.iter().map(|&(p, d)| received(cfg, p, d)).collect::<Result<Vec<_>>>()?;
    let truth_means = rps
        .iter()
        .map(|rp| expected_power_numeric(rp, &m.truth, cfg.numerics.quadrature_tolerance))
        .collect::<Result<Vec<_>>>()?;
    let base = resolve_baselines(cfg, &m, &rps, &truth_means)?;
    t.note("eta_linear", base.linear.eta);
    t.note("eta_constant_linear", base.constant_linear.eta);
    t.note("eta_constant_linear_constant", base.constant_linear_constant.eta);
    let models: [(&dyn InvertibleHarvester, &dyn Harvester); 4] = [
        (&m.piecewise, &m.piecewise),
        (&base.linear, &base.linear),
        (&base.constant_linear, &base.constant_linear),
        (&base.constant_linear_constant, &base.constant_linear_constant),
    ];
    for (k, (&(p, d), rp)) in points.iter().zip(&rps).enumerate() {
        let mut link = cfg.link.budget();
        link.transmit_power_mw = p;
        link.distance_m = d;
        let seed = n.seed.wrapping_add(k as u64);
        let mut columns: Vec<Vec<f64>> = Vec::new();
        for (i, (inv, h)) in models.iter().enumerate() {
            let plan = SimulationPlan::new(*rp, *h, n.mc_trials, 1, seed)?;
            let counts = simulate_rfid(&plan, &scn, &link, &pcs)?;
            let closed = pcs
                .iter()
                .map(|&pc| success_probability(&scn.with_consumption(pc), &link, &cfg.channel, *inv))
                .collect::<Result<Vec<_>>>()?;
            columns.push(closed);
            columns.push(counts.iter().map(|c| c.success_frequency()).collect());
            if i == 0 {
                columns.push(counts.iter().map(|c| 1.96 * c.std_error()).collect());
            }
        }
        let plan = SimulationPlan::new(*rp, &m.truth, n.mc_trials, 1, seed)?;
        let counts = simulate_rfid(&plan, &scn, &link, &pcs)?;
        columns.push(counts.iter().map(|c| c.success_frequency()).collect());
        columns.push(counts.iter().map(|c| 1.96 * c.std_error()).collect());
        for (j, &pc) in pcs.iter().enumerate() {
            let mut row = vec![d, mw_to_dbm(p), pc];
            row.extend(columns.iter().map(|c| c[j]));
            t.push(row);
        }
    }
    Ok(t)
}
