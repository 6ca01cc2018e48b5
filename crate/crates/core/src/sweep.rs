//! Time evolutions, region maps and full-vs-effective comparisons driven by
//! a [`RunConfig`], plus the tabular CSV/JSON output they share.
//!
//! Sweep cells are evaluated in parallel on the current rayon pool and
//! collected in grid order, so output does not depend on scheduling.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{
    classify_regime, validity_report, EffectiveModel, RegimeLabel, DEFAULT_VALIDITY_THRESHOLD,
};
use crate::closed_form::{
    stationary_entanglement, stationary_steering, steering_region, Direction, SteeringRegion,
};
use crate::config::{Format, RunConfig, System, SystemKind};
use crate::dynamics::{
    analytic_applies, analytic_effective_cm, build_effective_drift_diffusion, characteristic_time,
    propagate, uniform_grid, Integrator,
};
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, ResourceReport};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Text(b.to_string())
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            // `Display` for f64 is the shortest representation that parses
            // back to the same value.
            Self::Num(x) => write!(f, "{x}"),
            Self::Text(s) => f.write_str(s),
        }
    }
}

/// Named columns of numbers and labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column by name; text cells become NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(x) => *x,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn text_column(&self, name: &str) -> Option<Vec<String>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].to_string()).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses CSV written by [`Table::write_csv`]; fields that parse as f64
    /// become numbers.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(
                rec?.iter()
                    .map(|f| match f.parse::<f64>() {
                        Ok(x) => Cell::Num(x),
                        Err(_) => Cell::Text(f.to_string()),
                    })
                    .collect(),
            );
        }
        Ok(Self { columns, rows })
    }

    /// Array of row objects; non-finite numbers become `null`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| {
                        let v = match c {
                            Cell::Num(x) => serde_json::Number::from_f64(*x)
                                .map_or(serde_json::Value::Null, serde_json::Value::Number),
                            Cell::Text(s) => serde_json::Value::String(s.clone()),
                        };
                        (k.clone(), v)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    pub fn write<W: Write>(&self, mut out: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json())?;
                writeln!(out)?;
                Ok(())
            }
        }
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn write_to(&self, path: Option<&Path>, format: Format) -> Result<()> {
        match path {
            Some(p) => {
                let file = std::io::BufWriter::new(std::fs::File::create(p)?);
                self.write(file, format)
            }
            None => self.write(std::io::stdout().lock(), format),
        }
    }
}

/// Uniform samples on `[0, t_end_in_tau · τ]` with `τ` and `2τ` inserted
/// exactly when they fall inside the window.
pub fn evolution_times(tau: f64, t_end_in_tau: f64, samples: usize) -> Vec<f64> {
    let t_end = t_end_in_tau * tau;
    let mut times = uniform_grid(t_end, samples);
    let eps = 1e-9 * t_end;
    for special in [tau, 2.0 * tau] {
        if special > t_end + eps {
            continue;
        }
        match times.iter().position(|&t| (t - special).abs() <= eps) {
            Some(i) => times[i] = special,
            None => times.push(special),
        }
    }
    times.sort_by(f64::total_cmp);
    times
}

/// States of `system` at `grid`. The effective model and chains use the
/// closed-form solution away from the critical pole and `integrator` is unset; full
/// platforms propagate their complete drift/diffusion.
pub fn system_states(
    system: &System,
    grid: &[f64],
    integrator: Option<Integrator>,
) -> Result<Vec<CovarianceMatrix>> {
    if let Some(dd) = system.full_drift_diffusion()? {
        let v0 = system
            .full_initial_state()
            .expect("full systems have an initial state");
        return Ok(propagate(&dd, &v0, grid, integrator.unwrap_or_default())?.states);
    }
    let m = system.effective_model()?;
    effective_states(&m, grid, integrator)
}

pub fn effective_states(
    m: &EffectiveModel,
    grid: &[f64],
    integrator: Option<Integrator>,
) -> Result<Vec<CovarianceMatrix>> {
    if integrator.is_none() && analytic_applies(m) {
        return grid.iter().map(|&t| analytic_effective_cm(m, t)).collect();
    }
    let dd = build_effective_drift_diffusion(m);
    Ok(propagate(
        &dd,
        &CovarianceMatrix::vacuum(2),
        grid,
        integrator.unwrap_or_default(),
    )?
    .states)
}

fn axis_cells(overrides: &[(String, f64)]) -> impl Iterator<Item = Cell> + '_ {
    overrides.iter().map(|(_, v)| Cell::Num(*v))
}

/// Time series of resources for every sweep cell.
///
/// Columns: sweep axes, `t`, `t_over_tau`, `E`, `S_ac_raw`, `S_ca_raw`,
/// `regime`, then `v11`, `v44`, `v14` for two-mode models or the monogamy
/// residuals of the microwave mode for full platforms.
pub fn run_evolve(cfg: &RunConfig) -> Result<Table> {
    let two_mode = matches!(cfg.system, SystemKind::Effective | SystemKind::Chain);
    let mut columns = cfg.axis_names();
    columns.extend(["t", "t_over_tau", "E", "S_ac_raw", "S_ca_raw", "regime"].map(String::from));
    if two_mode {
        columns.extend(["v11", "v44", "v14"].map(String::from));
    } else {
        columns.extend(["monogamy_ent_residual", "monogamy_steer_residual"].map(String::from));
    }

    let cells = cfg.grid()?;
    let blocks: Vec<Vec<Vec<Cell>>> = cells
        .par_iter()
        .map(|overrides| {
            let system = cfg.system_at(overrides)?;
            let m = system.effective_model()?;
            let regime = classify_regime(&m);
            let tau = characteristic_time(&m)?;
            let times = evolution_times(tau, cfg.times.t_end_in_tau, cfg.times.samples);
            let states = system_states(&system, &times, cfg.times.integrator)?;
            times
                .iter()
                .zip(&states)
                .map(|(&t, v)| {
                    let r = ResourceReport::evaluate(v, Some(regime))?;
                    let mut row: Vec<Cell> = axis_cells(overrides).collect();
                    row.extend([
                        t.into(),
                        (t / tau).into(),
                        r.entanglement.into(),
                        r.steering_ab_raw.into(),
                        r.steering_ba_raw.into(),
                        regime.name().into(),
                    ]);
                    if two_mode {
                        row.extend([v.get(0, 0).into(), v.get(3, 3).into(), v.get(0, 3).into()]);
                    } else {
                        row.extend([
                            r.monogamy_ent_residual.unwrap_or(f64::NAN).into(),
                            r.monogamy_steer_residual.unwrap_or(f64::NAN).into(),
                        ]);
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(columns);
    table.rows = blocks.into_iter().flatten().collect();
    Ok(table)
}

/// Resource values obtained from an evolved covariance matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NumericResources {
    pub entanglement: f64,
    pub steering_ac: f64,
    pub steering_ca: f64,
    pub region: SteeringRegion,
}

/// One cell of a two-parameter region map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionCell {
    pub axes: Vec<(String, f64)>,
    pub g_eff: f64,
    pub regime: RegimeLabel,
    pub entanglement: f64,
    pub steering_ac: f64,
    pub steering_ca: f64,
    /// Region from the signs of the closed-form steering values.
    pub region: SteeringRegion,
    /// Region from the parameter inequalities.
    pub region_inequality: SteeringRegion,
    pub numeric: Option<NumericResources>,
    /// Every available route gives the same steering pattern.
    pub agreement: bool,
}

fn numeric_at(system: &System, t: f64, integrator: Option<Integrator>) -> Result<NumericResources> {
    let v = system_states(system, &[t], integrator)?
        .pop()
        .expect("one state per time");
    let r = ResourceReport::evaluate(&v, None)?;
    Ok(NumericResources {
        entanglement: r.entanglement,
        steering_ac: r.steering_ab_raw,
        steering_ca: r.steering_ba_raw,
        region: SteeringRegion::from_raw(r.steering_ab_raw, r.steering_ba_raw),
    })
}

/// Region map over two sweep axes. With `cfg.numeric` each cell is also
/// evolved to `t_end_in_tau · τ` and classified from the resulting state.
pub fn run_region(cfg: &RunConfig) -> Result<Vec<RegionCell>> {
    if cfg.sweep.as_ref().and_then(|s| s.axis2.as_ref()).is_none() {
        return Err(Error::Config("region maps need two sweep axes".into()));
    }
    cfg.grid()?
        .par_iter()
        .map(|overrides| {
            let system = cfg.system_at(overrides)?;
            let m = system.effective_model()?;
            let s_ac = stationary_steering(&m, Direction::AtoC);
            let s_ca = stationary_steering(&m, Direction::CtoA);
            let region = SteeringRegion::from_raw(s_ac, s_ca);
            let region_inequality = steering_region(&m);
            let numeric = if cfg.numeric {
                let t = cfg.times.t_end_in_tau * characteristic_time(&m)?;
                Some(numeric_at(&system, t, cfg.times.integrator)?)
            } else {
                None
            };
            let agreement =
                region == region_inequality && numeric.is_none_or(|n| n.region == region);
            Ok(RegionCell {
                axes: overrides.clone(),
                g_eff: m.g_eff,
                regime: classify_regime(&m),
                entanglement: stationary_entanglement(&m),
                steering_ac: s_ac,
                steering_ca: s_ca,
                region,
                region_inequality,
                numeric,
                agreement,
            })
        })
        .collect()
}

pub fn region_table(cfg: &RunConfig, cells: &[RegionCell]) -> Table {
    let mut columns = cfg.axis_names();
    columns.extend(
        [
            "g_eff",
            "regime",
            "E",
            "S_ac",
            "S_ca",
            "region",
            "region_inequality",
            "E_num",
            "S_ac_num",
            "S_ca_num",
            "region_num",
            "agreement",
        ]
        .map(String::from),
    );
    let mut table = Table::new(columns);
    for c in cells {
        let mut row: Vec<Cell> = axis_cells(&c.axes).collect();
        let num = c.numeric;
        row.extend([
            c.g_eff.into(),
            c.regime.name().into(),
            c.entanglement.into(),
            c.steering_ac.into(),
            c.steering_ca.into(),
            c.region.name().into(),
            c.region_inequality.name().into(),
            num.map_or(f64::NAN, |n| n.entanglement).into(),
            num.map_or(f64::NAN, |n| n.steering_ac).into(),
            num.map_or(f64::NAN, |n| n.steering_ca).into(),
            num.map_or("", |n| n.region.name()).into(),
            c.agreement.into(),
        ]);
        table.rows.push(row);
    }
    table
}

/// `|numeric − closed| / |closed|`, or the absolute difference when the
/// closed-form value is zero.
pub fn relative_deviation(numeric: f64, closed: f64) -> f64 {
    let diff = (numeric - closed).abs();
    if closed == 0.0 {
        diff
    } else {
        diff / closed.abs()
    }
}

/// Closed-form versus full-system resources at one parameter point.
/// Steering values are clamped at zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub axes: Vec<(String, f64)>,
    pub g_eff: f64,
    pub regime: RegimeLabel,
    pub closed: [f64; 3],
    pub at_tau: [f64; 3],
    pub at_2tau: [f64; 3],
    pub max_validity_ratio: f64,
    pub validity_pass: bool,
}

impl ComparisonRow {
    pub fn deviations_at_tau(&self) -> [f64; 3] {
        std::array::from_fn(|i| relative_deviation(self.at_tau[i], self.closed[i]))
    }

    pub fn deviations_at_2tau(&self) -> [f64; 3] {
        std::array::from_fn(|i| relative_deviation(self.at_2tau[i], self.closed[i]))
    }
}

pub fn run_compare(cfg: &RunConfig) -> Result<Vec<ComparisonRow>> {
    if !matches!(cfg.system, SystemKind::Eom | SystemKind::Comm) {
        return Err(Error::Config(
            "compare needs a full platform (system \"eom\" or \"comm\")".into(),
        ));
    }
    cfg.grid()?
        .par_iter()
        .map(|overrides| {
            let system = cfg.system_at(overrides)?;
            let chain = system.chain()?.expect("platforms map to chains");
            let m = system.effective_model()?;
            let tau = characteristic_time(&m)?;
            let states = system_states(&system, &[tau, 2.0 * tau], cfg.times.integrator)?;
            let values = |v: &CovarianceMatrix| -> Result<[f64; 3]> {
                let r = ResourceReport::evaluate(v, None)?;
                Ok([r.entanglement, r.steering_ab, r.steering_ba])
            };
            let validity = validity_report(&chain, DEFAULT_VALIDITY_THRESHOLD);
            Ok(ComparisonRow {
                axes: overrides.clone(),
                g_eff: m.g_eff,
                regime: classify_regime(&m),
                closed: [
                    stationary_entanglement(&m),
                    stationary_steering(&m, Direction::AtoC).max(0.0),
                    stationary_steering(&m, Direction::CtoA).max(0.0),
                ],
                at_tau: values(&states[0])?,
                at_2tau: values(&states[1])?,
                max_validity_ratio: validity.iter().map(|e| e.value).fold(0.0, f64::max),
                validity_pass: validity.iter().all(|e| e.pass),
            })
        })
        .collect()
}

pub fn comparison_table(cfg: &RunConfig, rows: &[ComparisonRow]) -> Table {
    let mut columns = cfg.axis_names();
    columns.extend(
        [
            "g_eff",
            "regime",
            "E",
            "S_ac",
            "S_ca",
            "E_tau",
            "S_ac_tau",
            "S_ca_tau",
            "E_2tau",
            "S_ac_2tau",
            "S_ca_2tau",
            "dev_E_tau",
            "dev_S_ac_tau",
            "dev_S_ca_tau",
            "dev_E_2tau",
            "dev_S_ac_2tau",
            "dev_S_ca_2tau",
            "max_validity_ratio",
            "validity_pass",
        ]
        .map(String::from),
    );
    let mut table = Table::new(columns);
    for r in rows {
        let mut row: Vec<Cell> = axis_cells(&r.axes).collect();
        row.push(r.g_eff.into());
        row.push(r.regime.name().into());
        row.extend(r.closed.iter().map(|&x| Cell::Num(x)));
        row.extend(r.at_tau.iter().map(|&x| Cell::Num(x)));
        row.extend(r.at_2tau.iter().map(|&x| Cell::Num(x)));
        row.extend(r.deviations_at_tau().iter().map(|&x| Cell::Num(x)));
        row.extend(r.deviations_at_2tau().iter().map(|&x| Cell::Num(x)));
        row.push(r.max_validity_ratio.into());
        row.push(r.validity_pass.into());
        table.rows.push(row);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_json(text).unwrap()
    }

    #[test]
    fn grid_contains_tau_exactly() {
        let times = evolution_times(3.5, 2.0, 10);
        assert!(times.contains(&3.5) && times.contains(&7.0));
        assert!(times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(evolution_times(3.5, 2.0, 11).len(), 11);
    }

    #[test]
    fn evolve_zero_coupling_has_no_entanglement() {
        let c = cfg(
            r#"{"system":"effective","parameters":{"g_eff":0,"kappa_a":0.5,"kappa_c":1},
                      "times":{"t_end_in_tau":2,"samples":11}}"#,
        );
        let t = run_evolve(&c).unwrap();
        assert!(t.column("E").unwrap().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn evolve_reaches_closed_form() {
        let c = cfg(
            r#"{"system":"effective","parameters":{"g_eff":1,"kappa_a":0.5,"kappa_c":1},
                      "times":{"t_end_in_tau":2,"samples":21}}"#,
        );
        let t = run_evolve(&c).unwrap();
        let e = *t.column("E").unwrap().last().unwrap();
        assert!((e - 0.787).abs() < 2e-3, "E(2tau) = {e}");
        assert_eq!(t.text_column("regime").unwrap()[0], "Unsteady");
    }

    #[test]
    fn csv_round_trip() {
        let mut table = Table::new(vec!["x".into(), "label".into()]);
        for x in [0.1 + 0.2, std::f64::consts::PI, 1e-300, -2.5e17, f64::NAN] {
            table.rows.push(vec![x.into(), "Steady".into()]);
        }
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        assert!(!buf.contains(&b'\r'));
        let back = Table::read_csv(buf.as_slice()).unwrap();
        let (a, b) = (table.column("x").unwrap(), back.column("x").unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
        assert_eq!(back.text_column("label").unwrap()[0], "Steady");
    }

    #[test]
    fn region_needs_two_axes() {
        let c = cfg(r#"{"system":"effective","parameters":{"g_eff":1,"kappa_a":0.5,"kappa_c":1}}"#);
        assert!(run_region(&c).is_err());
    }

    #[test]
    fn region_symmetric_diagonal_is_none() {
        let c = cfg(r#"{"system":"effective","parameters":{"g_eff":0.5},
            "sweep":{"axis1":{"name":"kappa_a","min":1,"max":2,"points":3},
                     "axis2":{"name":"kappa_c","min":1,"max":2,"points":3}}}"#);
        let cells = run_region(&c).unwrap();
        for cell in &cells {
            if cell.axes[0].1 == cell.axes[1].1 {
                assert_eq!(cell.region, SteeringRegion::None);
            }
            assert!(cell.agreement);
        }
    }

    #[test]
    fn compare_zero_coupling_is_zero_on_both_routes() {
        let c = cfg(r#"{"system":"eom","parameters":{"g_a":0}}"#);
        let rows = run_compare(&c).unwrap();
        assert_eq!(rows[0].closed, [0.0; 3]);
        // The microwave block stays I/2 up to round-off in the propagator.
        assert!(
            rows[0].at_tau.iter().all(|&x| x.abs() < 1e-10),
            "{:?}",
            rows[0].at_tau
        );
        let c = cfg(r#"{"system":"effective","parameters":{"g_eff":1,"kappa_a":0.5,"kappa_c":1}}"#);
        assert!(run_compare(&c).is_err());
    }
}
