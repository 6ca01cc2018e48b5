//! JSON run configuration.
//!
//! ```json
//! {
//!   "system": "eom",
//!   "parameters": { "g_a": 0.12, "kappa_a": 5e-4 },
//!   "sweep": { "axis1": { "name": "g_a", "min": 0.02, "max": 0.2, "points": 10 } },
//!   "times": { "t_end_in_tau": 2.0, "samples": 201 },
//!   "outputs": { "path": "out.csv", "format": "csv" }
//! }
//! ```
//!
//! `parameters` is a flat map. Chain systems use indexed names for their
//! per-mode lists: `omega_1..omega_N`, `g_1..g_{N-1}`, `kappa_mid_k`,
//! `n_mid_k`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain::{matched_detunings, reduce, ChainParams, EffectiveModel};
use crate::dynamics::{DriftDiffusion, Integrator};
use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::systems::{
    comm_full_drift_diffusion, comm_to_chain, eom_full_drift_diffusion, eom_to_chain, CommParams,
    EomParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Effective,
    Chain,
    Eom,
    Comm,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepAxis {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::Config(format!(
                "sweep axis `{}` needs at least 2 points",
                self.name
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            return Err(Error::Config(format!(
                "sweep axis `{}` has a degenerate range [{}, {}]",
                self.name, self.min, self.max
            )));
        }
        let n = (self.points - 1) as f64;
        Ok(match self.scale {
            Scale::Linear => (0..self.points)
                .map(|i| self.min + (self.max - self.min) * i as f64 / n)
                .collect(),
            Scale::Log => {
                if self.min <= 0.0 {
                    return Err(Error::Config(format!(
                        "log-scaled axis `{}` needs a positive minimum",
                        self.name
                    )));
                }
                let (lo, hi) = (self.min.ln(), self.max.ln());
                (0..self.points)
                    .map(|i| (lo + (hi - lo) * i as f64 / n).exp())
                    .collect()
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis1: SweepAxis,
    #[serde(default)]
    pub axis2: Option<SweepAxis>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Times {
    #[serde(default = "default_t_end")]
    pub t_end_in_tau: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Forces numerical propagation; the effective model otherwise uses its
    /// closed-form solution and full systems the exact propagator.
    #[serde(default)]
    pub integrator: Option<Integrator>,
}

fn default_t_end() -> f64 {
    2.0
}

fn default_samples() -> usize {
    201
}

impl Default for Times {
    fn default() -> Self {
        Self {
            t_end_in_tau: default_t_end(),
            samples: default_samples(),
            integrator: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemKind,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub times: Times,
    #[serde(default)]
    pub outputs: Outputs,
    /// Adds a numerical pass to region maps.
    #[serde(default)]
    pub numeric: bool,
    /// Free-form unit label, kept for documentation.
    #[serde(default)]
    pub unit: Option<String>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let mut params = self.parameters.clone();
        let names = self.axis_names();
        if names.len() == 2 && names[0] == names[1] {
            return Err(Error::Config(format!("both sweep axes use `{}`", names[0])));
        }
        if let Some(sweep) = &self.sweep {
            for axis in std::iter::once(&sweep.axis1).chain(&sweep.axis2) {
                axis.values()?;
                params.insert(axis.name.clone(), axis.min);
            }
        }
        System::build(self.system, &params).map_err(|e| match e {
            Error::Config(msg) if !names.is_empty() => {
                Error::Config(format!("{msg} (sweep axes: {names:?})"))
            }
            other => other,
        })?;
        if !(self.times.t_end_in_tau > 0.0 && self.times.t_end_in_tau.is_finite()) {
            return Err(Error::Config("times.t_end_in_tau must be positive".into()));
        }
        if self.times.samples < 2 {
            return Err(Error::Config("times.samples must be at least 2".into()));
        }
        Ok(())
    }

    /// Points of the sweep: one entry per cell, each a list of
    /// `(name, value)` overrides. Without a sweep there is a single empty
    /// cell.
    pub fn grid(&self) -> Result<Vec<Vec<(String, f64)>>> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![vec![]]);
        };
        let a1 = sweep.axis1.values()?;
        let mut cells = Vec::new();
        match &sweep.axis2 {
            None => {
                for x in a1 {
                    cells.push(vec![(sweep.axis1.name.clone(), x)]);
                }
            }
            Some(axis2) => {
                let a2 = axis2.values()?;
                for &x in &a1 {
                    for &y in &a2 {
                        cells.push(vec![(sweep.axis1.name.clone(), x), (axis2.name.clone(), y)]);
                    }
                }
            }
        }
        Ok(cells)
    }

    pub fn axis_names(&self) -> Vec<String> {
        self.sweep
            .iter()
            .flat_map(|s| std::iter::once(&s.axis1).chain(&s.axis2))
            .map(|a| a.name.clone())
            .collect()
    }

    /// System at one sweep cell.
    pub fn system_at(&self, overrides: &[(String, f64)]) -> Result<System> {
        let mut params = self.parameters.clone();
        for (k, v) in overrides {
            params.insert(k.clone(), *v);
        }
        System::build(self.system, &params)
    }
}

/// A concrete model built from a configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum System {
    Effective(EffectiveModel),
    Chain(ChainParams),
    Eom(EomParams),
    Comm(CommParams),
}

fn from_map<T: serde::de::DeserializeOwned>(
    kind: &str,
    params: &BTreeMap<String, f64>,
) -> Result<T> {
    let value = serde_json::to_value(params)?;
    serde_json::from_value(value).map_err(|e| Error::Config(format!("{kind} parameters: {e}")))
}

impl System {
    pub fn build(kind: SystemKind, params: &BTreeMap<String, f64>) -> Result<Self> {
        let system = match kind {
            SystemKind::Effective => {
                let m: EffectiveModel = from_map("effective", params)?;
                m.validate()?;
                Self::Effective(m)
            }
            SystemKind::Eom => {
                let p: EomParams = from_map("eom", params)?;
                p.validate()?;
                Self::Eom(p)
            }
            SystemKind::Comm => {
                let p: CommParams = from_map("comm", params)?;
                p.validate()?;
                Self::Comm(p)
            }
            SystemKind::Chain => Self::Chain(chain_from_map(params)?),
        };
        Ok(system)
    }

    pub fn kind(&self) -> SystemKind {
        match self {
            Self::Effective(_) => SystemKind::Effective,
            Self::Chain(_) => SystemKind::Chain,
            Self::Eom(_) => SystemKind::Eom,
            Self::Comm(_) => SystemKind::Comm,
        }
    }

    pub fn chain(&self) -> Result<Option<ChainParams>> {
        Ok(match self {
            Self::Effective(_) => None,
            Self::Chain(p) => Some(p.clone()),
            Self::Eom(p) => Some(eom_to_chain(p)?),
            Self::Comm(p) => Some(comm_to_chain(p)?),
        })
    }

    pub fn effective_model(&self) -> Result<EffectiveModel> {
        match self {
            Self::Effective(m) => Ok(*m),
            _ => reduce(&self.chain()?.expect("non-effective systems map to a chain")),
        }
    }

    /// Full drift/diffusion for platforms that have one.
    pub fn full_drift_diffusion(&self) -> Result<Option<DriftDiffusion>> {
        Ok(match self {
            Self::Eom(p) => Some(eom_full_drift_diffusion(p)?),
            Self::Comm(p) => Some(comm_full_drift_diffusion(p)?),
            _ => None,
        })
    }

    /// Initial state of the full system: every mode in the vacuum, as for
    /// the effective model. Bath occupations enter only through diffusion.
    pub fn full_initial_state(&self) -> Option<CovarianceMatrix> {
        match self {
            Self::Eom(_) => Some(CovarianceMatrix::vacuum(3)),
            Self::Comm(_) => Some(CovarianceMatrix::vacuum(4)),
            _ => None,
        }
    }
}

fn indexed(params: &BTreeMap<String, f64>, prefix: &str) -> Vec<(usize, f64)> {
    params
        .iter()
        .filter_map(|(k, &v)| {
            let idx = k.strip_prefix(prefix)?.parse::<usize>().ok()?;
            Some((idx, v))
        })
        .collect()
}

fn contiguous(name: &str, mut items: Vec<(usize, f64)>, len: usize) -> Result<Vec<f64>> {
    items.sort_by_key(|(i, _)| *i);
    let got: Vec<usize> = items.iter().map(|(i, _)| *i).collect();
    let want: Vec<usize> = (1..=len).collect();
    if got != want {
        return Err(Error::Config(format!(
            "chain parameters: expected {name}1..{name}{len}, got indices {got:?}"
        )));
    }
    Ok(items.into_iter().map(|(_, v)| v).collect())
}

fn chain_from_map(params: &BTreeMap<String, f64>) -> Result<ChainParams> {
    const SCALARS: [&str; 10] = [
        "delta_a", "delta_c", "g_a", "g_c", "theta", "phi", "kappa_a", "kappa_c", "n_a", "n_c",
    ];
    let omegas = indexed(params, "omega_");
    let n = omegas.len();
    let g_mid = indexed(params, "g_");
    let kappa_mid = indexed(params, "kappa_mid_");
    let n_mid = indexed(params, "n_mid_");
    let scalars = params
        .keys()
        .filter(|k| SCALARS.contains(&k.as_str()))
        .count();
    if scalars + n + g_mid.len() + kappa_mid.len() + n_mid.len() != params.len() {
        let unknown: Vec<&String> = params
            .keys()
            .filter(|k| {
                !SCALARS.contains(&k.as_str())
                    && !["omega_", "g_", "kappa_mid_", "n_mid_"].iter().any(|p| {
                        k.strip_prefix(p)
                            .is_some_and(|rest| rest.parse::<usize>().is_ok())
                    })
            })
            .collect();
        return Err(Error::Config(format!(
            "chain parameters: unknown keys {unknown:?}"
        )));
    }
    let req = |k: &str| {
        params
            .get(k)
            .copied()
            .ok_or_else(|| Error::Config(format!("chain parameters: missing `{k}`")))
    };
    let mut p = ChainParams {
        delta_a: req("delta_a")?,
        delta_c: 0.0,
        omegas: contiguous("omega_", omegas, n)?,
        g_a: req("g_a")?,
        g_c: req("g_c")?,
        g_mid: contiguous("g_", g_mid, n.saturating_sub(1))?,
        theta: req("theta")?,
        phi: req("phi")?,
        kappa_a: req("kappa_a")?,
        kappa_c: req("kappa_c")?,
        kappa_mid: if kappa_mid.is_empty() {
            vec![]
        } else {
            contiguous("kappa_mid_", kappa_mid, n)?
        },
        n_a: params.get("n_a").copied().unwrap_or(0.0),
        n_c: params.get("n_c").copied().unwrap_or(0.0),
        n_mid: if n_mid.is_empty() {
            vec![]
        } else {
            contiguous("n_mid_", n_mid, n)?
        },
    };
    p.delta_c = -p.delta_a;
    p.validate()?;
    p.delta_c = match params.get("delta_c") {
        Some(&d) => d,
        None => matched_detunings(&p)?.1,
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let ok = r#"{"system":"effective","parameters":{"g_eff":1,"kappa_a":0.5,"kappa_c":1}}"#;
        let cfg = RunConfig::from_json(ok).unwrap();
        assert_eq!(cfg.times.samples, 201);
        let bad = r#"{"system":"effective","parameters":{"g_eff":1,"kappa_a":0.5,"kappa_c":1},"extra":1}"#;
        assert!(RunConfig::from_json(bad).is_err());
        let bad_param = r#"{"system":"eom","parameters":{"g_x":1}}"#;
        let err = RunConfig::from_json(bad_param).unwrap_err().to_string();
        assert!(err.contains("g_x"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = RunConfig::from_json("{\n \"system\": \"eom\",\n oops\n}")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn sweep_validation() {
        let cfg =
            r#"{"system":"eom","sweep":{"axis1":{"name":"g_z","min":0.1,"max":0.2,"points":3}}}"#;
        assert!(RunConfig::from_json(cfg).is_err());
        let cfg =
            r#"{"system":"eom","sweep":{"axis1":{"name":"g_a","min":0.2,"max":0.2,"points":3}}}"#;
        assert!(RunConfig::from_json(cfg).is_err());
        let cfg =
            r#"{"system":"eom","sweep":{"axis1":{"name":"g_a","min":0.1,"max":0.2,"points":1}}}"#;
        assert!(RunConfig::from_json(cfg).is_err());
        let cfg = r#"{"system":"comm","sweep":{"axis1":{"name":"kappa_a","min":1e-5,"max":1e-3,"points":3,"scale":"log"},
                      "axis2":{"name":"kappa_c","min":1e-5,"max":1e-3,"points":2}}}"#;
        let cfg = RunConfig::from_json(cfg).unwrap();
        let grid = cfg.grid().unwrap();
        assert_eq!(grid.len(), 6);
        assert!((grid[4][0].1 - 1e-3).abs() < 1e-15);
        assert!((grid[2][0].1 - 1e-4).abs() < 1e-16);
    }

    #[test]
    fn chain_from_flat_map() {
        let cfg = r#"{"system":"chain","parameters":{"delta_a":3,"omega_1":1,"omega_2":1,"g_a":0.12,
            "g_1":0.1,"g_c":0.16970562748477142,"theta":0,"phi":0.7853981633974483,"kappa_a":1e-4,"kappa_c":2e-4}}"#;
        let cfg = RunConfig::from_json(cfg).unwrap();
        let m = cfg.system_at(&[]).unwrap().effective_model().unwrap();
        assert!((m.g_eff - 1.8e-4).abs() < 1e-12);

        let missing = r#"{"system":"chain","parameters":{"delta_a":3,"omega_1":1,"omega_2":1,"g_a":0.12,
            "g_c":0.1,"theta":0,"phi":0,"kappa_a":1e-4,"kappa_c":2e-4}}"#;
        assert!(RunConfig::from_json(missing).is_err());
        let unknown = r#"{"system":"chain","parameters":{"delta_a":3,"omega_1":1,"g_a":0.12,
            "g_c":0.1,"theta":0,"phi":0,"kappa_a":1e-4,"kappa_c":2e-4,"bogus":1}}"#;
        let err = RunConfig::from_json(unknown).unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
    }
}
