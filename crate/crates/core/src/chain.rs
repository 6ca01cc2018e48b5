//! General chain Hamiltonian linking a microwave mode `a` to an optical mode
//! `c` through `N` intermediary modes, and its reduction to an effective
//! two-mode squeezing model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaps below this are treated as exact resonances.
pub const RESONANCE_GAP: f64 = 1e-12;

/// Relative width of the critical band `|g² − κaκc| ≤ CRITICAL_REL · κaκc`.
pub const CRITICAL_REL: f64 = 1e-9;

/// Default coupling-to-gap ratio accepted by [`validity_report`].
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.2;

/// Parameters of the chain `a – 1 – 2 – … – N – c`.
///
/// `g_a` couples `a` to mode 1 with the mixture angle `theta` between its
/// beam-splitter (`cos θ`) and squeezing (`sin θ`) parts; `g_c` couples mode
/// `N` to `c` likewise with `phi`. `g_mid[s]` couples modes `s+1` and `s+2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub delta_a: f64,
    pub delta_c: f64,
    pub omegas: Vec<f64>,
    pub g_a: f64,
    pub g_c: f64,
    #[serde(default)]
    pub g_mid: Vec<f64>,
    pub theta: f64,
    pub phi: f64,
    pub kappa_a: f64,
    pub kappa_c: f64,
    #[serde(default)]
    pub kappa_mid: Vec<f64>,
    #[serde(default)]
    pub n_a: f64,
    #[serde(default)]
    pub n_c: f64,
    #[serde(default)]
    pub n_mid: Vec<f64>,
}

impl ChainParams {
    /// Number of intermediary modes.
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Err(Error::InvalidInput(
                "chain needs at least one intermediary mode".into(),
            ));
        }
        if self.g_mid.len() != n - 1 {
            return Err(Error::InvalidInput(format!(
                "chain with {n} intermediary modes needs {} middle couplings, got {}",
                n - 1,
                self.g_mid.len()
            )));
        }
        for (name, list) in [("kappa_mid", &self.kappa_mid), ("n_mid", &self.n_mid)] {
            if !list.is_empty() && list.len() != n {
                return Err(Error::InvalidInput(format!(
                    "{name} must be empty or have {n} entries, got {}",
                    list.len()
                )));
            }
        }
        let scalars = [
            self.delta_a,
            self.delta_c,
            self.g_a,
            self.g_c,
            self.theta,
            self.phi,
        ];
        if scalars
            .iter()
            .chain(&self.omegas)
            .chain(&self.g_mid)
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidInput(
                "chain parameters must be finite".into(),
            ));
        }
        if !(self.kappa_a > 0.0 && self.kappa_c > 0.0) || self.kappa_mid.iter().any(|k| !(*k > 0.0))
        {
            return Err(Error::InvalidInput("decay rates must be positive".into()));
        }
        if !(self.n_a >= 0.0 && self.n_c >= 0.0) || self.n_mid.iter().any(|n| !(*n >= 0.0)) {
            return Err(Error::InvalidInput(
                "thermal occupations must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Reduced two-mode description.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveModel {
    pub g_eff: f64,
    pub kappa_a: f64,
    pub kappa_c: f64,
    #[serde(default)]
    pub n_a: f64,
    #[serde(default)]
    pub n_c: f64,
}

impl EffectiveModel {
    pub fn new(g_eff: f64, kappa_a: f64, kappa_c: f64) -> Result<Self> {
        Self::with_thermal(g_eff, kappa_a, kappa_c, 0.0, 0.0)
    }

    pub fn with_thermal(
        g_eff: f64,
        kappa_a: f64,
        kappa_c: f64,
        n_a: f64,
        n_c: f64,
    ) -> Result<Self> {
        let m = Self {
            g_eff,
            kappa_a,
            kappa_c,
            n_a,
            n_c,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.g_eff.is_finite() {
            return Err(Error::InvalidInput("g_eff must be finite".into()));
        }
        if !(self.kappa_a > 0.0 && self.kappa_c > 0.0)
            || !self.kappa_a.is_finite()
            || !self.kappa_c.is_finite()
        {
            return Err(Error::InvalidInput(
                "decay rates must be positive and finite".into(),
            ));
        }
        if !(self.n_a >= 0.0 && self.n_c >= 0.0) {
            return Err(Error::InvalidInput(
                "thermal occupations must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn regime(&self) -> RegimeLabel {
        classify_regime(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    Steady,
    Critical,
    Unsteady,
}

impl RegimeLabel {
    pub fn name(self) -> &'static str {
        match self {
            Self::Steady => "Steady",
            Self::Critical => "Critical",
            Self::Unsteady => "Unsteady",
        }
    }

    /// Critical points use the unsteady formulas.
    pub fn is_steady(self) -> bool {
        self == Self::Steady
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn gap(value: f64, what: impl FnOnce() -> String) -> Result<f64> {
    if value.abs() < RESONANCE_GAP {
        return Err(Error::Resonance {
            what: what(),
            gap: value.abs(),
        });
    }
    Ok(value)
}

/// Leading-order effective coupling between `a` and `c`.
pub fn effective_coupling(p: &ChainParams) -> Result<f64> {
    p.validate()?;
    let n = p.len();
    let da = p.delta_a;
    let minus = |s: usize| gap(da - p.omegas[s], || format!("delta_a - omega_{}", s + 1));
    let plus = |s: usize| gap(da + p.omegas[s], || format!("delta_a + omega_{}", s + 1));
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();

    if n == 1 {
        return Ok(p.g_a * p.g_c * (ct * sp / minus(0)? - st * cp / plus(0)?));
    }

    let mut middle = 1.0;
    for s in 1..n - 1 {
        let w = p.omegas[s];
        middle *= 2.0 * p.g_mid[s] * w / (minus(s)? * plus(s)?);
    }
    let head = st / plus(0)? - ct / minus(0)?;
    let tail = cp / plus(n - 1)? - sp / minus(n - 1)?;
    Ok(p.g_a * p.g_mid[0] * p.g_c * middle * head * tail)
}

/// Second-order energy shift `δ` of the near-degenerate pair, evaluated with
/// the stored `delta_c`.
pub fn energy_shift(p: &ChainParams) -> Result<f64> {
    p.validate()?;
    let w1 = p.omegas[0];
    let wn = p.omegas[p.len() - 1];
    let den_a = gap(w1 * w1 - p.delta_a * p.delta_a, || {
        "omega_1^2 - delta_a^2".into()
    })?;
    let den_c = gap(wn * wn - p.delta_c * p.delta_c, || {
        "omega_N^2 - delta_c^2".into()
    })?;
    Ok(
        p.g_a * p.g_a * (w1 + p.delta_a * (2.0 * p.theta).cos()) / den_a
            + p.g_c * p.g_c * (wn + p.delta_c * (2.0 * p.phi).cos()) / den_c,
    )
}

/// `(Δa, Δc)` with `Δc = −Δa + δ`: `δ` is first evaluated at `Δc = −Δa` and
/// then once more at the corrected `Δc`.
pub fn matched_detunings(p: &ChainParams) -> Result<(f64, f64)> {
    let mut q = p.clone();
    q.delta_c = -p.delta_a;
    q.delta_c = -p.delta_a + energy_shift(&q)?;
    let delta_c = -p.delta_a + energy_shift(&q)?;
    Ok((p.delta_a, delta_c))
}

/// First-pass matched `Δc`, `−Δa + δ(Δc = −Δa)`.
pub fn matched_delta_c_first_pass(p: &ChainParams) -> Result<f64> {
    let mut q = p.clone();
    q.delta_c = -p.delta_a;
    Ok(-p.delta_a + energy_shift(&q)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityEntry {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

/// Every coupling divided by every gap `|Δa − ω_s|`, `|Δc − ω_s|`.
/// Advisory only.
pub fn validity_report(p: &ChainParams, threshold: f64) -> Vec<ValidityEntry> {
    let mut couplings = vec![("g_a".to_string(), p.g_a)];
    couplings.extend(
        p.g_mid
            .iter()
            .enumerate()
            .map(|(i, &g)| (format!("g_{}", i + 1), g)),
    );
    couplings.push(("g_c".to_string(), p.g_c));

    let mut out = Vec::new();
    for (s, &w) in p.omegas.iter().enumerate() {
        for (side, detuning) in [("delta_a", p.delta_a), ("delta_c", p.delta_c)] {
            let gap = (detuning - w).abs();
            for (name, g) in &couplings {
                let value = if *g == 0.0 { 0.0 } else { g.abs() / gap };
                out.push(ValidityEntry {
                    name: format!("{name}/|{side}-omega_{}|", s + 1),
                    value,
                    pass: value < threshold,
                });
            }
        }
    }
    out
}

pub fn reduce(p: &ChainParams) -> Result<EffectiveModel> {
    EffectiveModel::with_thermal(effective_coupling(p)?, p.kappa_a, p.kappa_c, p.n_a, p.n_c)
}

pub fn classify_regime(m: &EffectiveModel) -> RegimeLabel {
    let kk = m.kappa_a * m.kappa_c;
    let diff = m.g_eff * m.g_eff - kk;
    if diff.abs() <= CRITICAL_REL * kk {
        RegimeLabel::Critical
    } else if diff < 0.0 {
        RegimeLabel::Steady
    } else {
        RegimeLabel::Unsteady
    }
}
