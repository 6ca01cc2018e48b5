//! Electro-optomechanical (EOM) and cavity optomagnomechanical (COMM)
//! platforms: their chain mappings and full linearized drift/diffusion.
//!
//! Full systems order their modes as `(a, c, intermediaries…)` so the
//! microwave–optical pair always sits in rows `0..4`. Everything is in units
//! of the mechanical frequency.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chain::{matched_detunings, ChainParams};
use crate::dynamics::DriftDiffusion;
use crate::error::{Error, Result};

/// Microwave `a` and optical `c` both coupled to one mechanical mode `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EomParams {
    pub omega_b: f64,
    pub delta_a: f64,
    /// Optical detuning; matched to `delta_a` when absent.
    pub delta_c: Option<f64>,
    pub g_a: f64,
    pub g_c: f64,
    pub kappa_a: f64,
    pub kappa_c: f64,
    pub kappa_b: f64,
    pub n_a: f64,
    pub n_c: f64,
    pub n_b: f64,
}

impl Default for EomParams {
    fn default() -> Self {
        Self {
            omega_b: 1.0,
            delta_a: 5.0,
            delta_c: None,
            g_a: 0.12,
            g_c: 0.12,
            kappa_a: 5e-4,
            kappa_c: 1e-3,
            kappa_b: 1e-6,
            n_a: 0.0,
            n_c: 0.0,
            n_b: 10.0,
        }
    }
}

/// Microwave `a` – magnon `m` – mechanics `b` – optical `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CommParams {
    pub omega_b: f64,
    pub delta_a: f64,
    pub delta_c: Option<f64>,
    /// Magnon detuning; defaults to `omega_b` when absent.
    pub delta_m: Option<f64>,
    pub g_a: f64,
    pub g_m: f64,
    pub g_c: f64,
    pub kappa_a: f64,
    pub kappa_c: f64,
    pub kappa_m: f64,
    pub kappa_b: f64,
    pub n_a: f64,
    pub n_c: f64,
    pub n_m: f64,
    pub n_b: f64,
}

impl Default for CommParams {
    fn default() -> Self {
        Self {
            omega_b: 1.0,
            delta_a: 3.0,
            delta_c: None,
            delta_m: None,
            g_a: 0.12,
            g_m: 0.1,
            g_c: 0.12,
            kappa_a: 1e-4,
            kappa_c: 2e-4,
            kappa_m: 1e-3,
            kappa_b: 1e-6,
            n_a: 0.0,
            n_c: 0.0,
            n_m: 0.0,
            n_b: 10.0,
        }
    }
}

fn check_rates(rates: &[f64], occupations: &[f64], omega_b: f64) -> Result<()> {
    if !(omega_b > 0.0 && omega_b.is_finite()) {
        return Err(Error::InvalidInput("omega_b must be positive".into()));
    }
    if rates.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
        return Err(Error::InvalidInput("decay rates must be positive".into()));
    }
    if occupations.iter().any(|n| !(*n >= 0.0 && n.is_finite())) {
        return Err(Error::InvalidInput(
            "thermal occupations must be non-negative".into(),
        ));
    }
    Ok(())
}

impl EomParams {
    pub fn validate(&self) -> Result<()> {
        check_rates(
            &[self.kappa_a, self.kappa_c, self.kappa_b],
            &[self.n_a, self.n_c, self.n_b],
            self.omega_b,
        )
    }

    /// `2 g_a g_c ω_b / (Δa² − ω_b²)`.
    pub fn effective_coupling(&self) -> f64 {
        2.0 * self.g_a * self.g_c * self.omega_b / (self.delta_a.powi(2) - self.omega_b.powi(2))
    }
}

impl CommParams {
    pub fn validate(&self) -> Result<()> {
        check_rates(
            &[self.kappa_a, self.kappa_c, self.kappa_m, self.kappa_b],
            &[self.n_a, self.n_c, self.n_m, self.n_b],
            self.omega_b,
        )
    }

    pub fn magnon_detuning(&self) -> f64 {
        self.delta_m.unwrap_or(self.omega_b)
    }

    /// `2 g_a g_m g_c ω_b / [(Δm − Δa)(ω_b² − Δa²)]`.
    pub fn effective_coupling(&self) -> f64 {
        2.0 * self.g_a * self.g_m * self.g_c * self.omega_b
            / ((self.magnon_detuning() - self.delta_a)
                * (self.omega_b.powi(2) - self.delta_a.powi(2)))
    }
}

fn with_delta_c(mut chain: ChainParams, delta_c: Option<f64>) -> Result<ChainParams> {
    chain.delta_c = match delta_c {
        Some(d) => d,
        None => matched_detunings(&chain)?.1,
    };
    Ok(chain)
}

/// `N = 1`, `θ = φ = π/4`, `ω_1 = ω_b`, end couplings scaled by `√2`.
pub fn eom_to_chain(p: &EomParams) -> Result<ChainParams> {
    p.validate()?;
    let chain = ChainParams {
        delta_a: p.delta_a,
        delta_c: -p.delta_a,
        omegas: vec![p.omega_b],
        g_a: SQRT_2 * p.g_a,
        g_c: SQRT_2 * p.g_c,
        g_mid: vec![],
        theta: FRAC_PI_4,
        phi: FRAC_PI_4,
        kappa_a: p.kappa_a,
        kappa_c: p.kappa_c,
        kappa_mid: vec![p.kappa_b],
        n_a: p.n_a,
        n_c: p.n_c,
        n_mid: vec![p.n_b],
    };
    with_delta_c(chain, p.delta_c)
}

/// `N = 2`, `θ = 0`, `φ = π/4`, `ω_1 = Δm`, `ω_2 = ω_b`, `g_c` scaled by `√2`.
pub fn comm_to_chain(p: &CommParams) -> Result<ChainParams> {
    p.validate()?;
    let chain = ChainParams {
        delta_a: p.delta_a,
        delta_c: -p.delta_a,
        omegas: vec![p.magnon_detuning(), p.omega_b],
        g_a: p.g_a,
        g_c: SQRT_2 * p.g_c,
        g_mid: vec![p.g_m],
        theta: 0.0,
        phi: FRAC_PI_4,
        kappa_a: p.kappa_a,
        kappa_c: p.kappa_c,
        kappa_mid: vec![p.kappa_m, p.kappa_b],
        n_a: p.n_a,
        n_c: p.n_c,
        n_mid: vec![p.n_m, p.n_b],
    };
    with_delta_c(chain, p.delta_c)
}

fn diffusion(rates: &[(f64, f64)]) -> DMatrix<f64> {
    let diag: Vec<f64> = rates
        .iter()
        .flat_map(|&(k, n)| {
            let d = k * (2.0 * n + 1.0);
            [d, d]
        })
        .collect();
    DMatrix::from_diagonal(&DVector::from_vec(diag))
}

fn damped_rotations(modes: &[(f64, f64)]) -> DMatrix<f64> {
    let n = 2 * modes.len();
    let mut a = DMatrix::zeros(n, n);
    for (k, &(kappa, freq)) in modes.iter().enumerate() {
        let (x, y) = (2 * k, 2 * k + 1);
        a[(x, x)] = -kappa;
        a[(y, y)] = -kappa;
        a[(x, y)] = freq;
        a[(y, x)] = -freq;
    }
    a
}

/// 6×6 drift and diffusion in the order `(a, c, b)`.
pub fn eom_full_drift_diffusion(p: &EomParams) -> Result<DriftDiffusion> {
    let delta_c = eom_to_chain(p)?.delta_c;
    let mut a = damped_rotations(&[
        (p.kappa_a, p.delta_a),
        (p.kappa_c, delta_c),
        (p.kappa_b, p.omega_b),
    ]);
    a[(1, 4)] = -2.0 * p.g_a;
    a[(3, 4)] = -2.0 * p.g_c;
    a[(5, 0)] = -2.0 * p.g_a;
    a[(5, 2)] = -2.0 * p.g_c;
    let d = diffusion(&[(p.kappa_a, p.n_a), (p.kappa_c, p.n_c), (p.kappa_b, p.n_b)]);
    DriftDiffusion::new(a, d)
}

/// 8×8 drift and diffusion in the order `(a, c, m, b)`.
pub fn comm_full_drift_diffusion(p: &CommParams) -> Result<DriftDiffusion> {
    let delta_c = comm_to_chain(p)?.delta_c;
    let mut a = damped_rotations(&[
        (p.kappa_a, p.delta_a),
        (p.kappa_c, delta_c),
        (p.kappa_m, p.magnon_detuning()),
        (p.kappa_b, p.omega_b),
    ]);
    a[(0, 5)] = p.g_a;
    a[(1, 4)] = -p.g_a;
    a[(4, 1)] = p.g_a;
    a[(5, 0)] = -p.g_a;
    a[(3, 6)] = -2.0 * p.g_c;
    a[(5, 6)] = -2.0 * p.g_m;
    a[(7, 2)] = -2.0 * p.g_c;
    a[(7, 4)] = -2.0 * p.g_m;
    let d = diffusion(&[
        (p.kappa_a, p.n_a),
        (p.kappa_c, p.n_c),
        (p.kappa_m, p.n_m),
        (p.kappa_b, p.n_b),
    ]);
    DriftDiffusion::new(a, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{effective_coupling, reduce};
    use crate::dynamics::steady_state;

    #[test]
    fn caption_couplings() {
        let eom = EomParams::default();
        assert!((reduce(&eom_to_chain(&eom).unwrap()).unwrap().g_eff - 0.0012).abs() < 1e-15);
        assert!((eom.effective_coupling() - 0.0012).abs() < 1e-15);
        let comm = CommParams::default();
        assert!(
            (effective_coupling(&comm_to_chain(&comm).unwrap()).unwrap() - 1.8e-4).abs() < 1e-15
        );
        assert!((comm.effective_coupling() - 1.8e-4).abs() < 1e-15);
    }

    #[test]
    fn zero_couplings_give_zero() {
        let eom = EomParams {
            g_a: 0.0,
            ..Default::default()
        };
        assert_eq!(
            effective_coupling(&eom_to_chain(&eom).unwrap()).unwrap(),
            0.0
        );
        let comm = CommParams {
            g_m: 0.0,
            ..Default::default()
        };
        assert_eq!(
            effective_coupling(&comm_to_chain(&comm).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn matched_optical_detuning_is_used_unless_overridden() {
        let eom = EomParams::default();
        let chain = eom_to_chain(&eom).unwrap();
        assert!((chain.delta_c + 5.0024).abs() < 1e-5);
        let fixed = EomParams {
            delta_c: Some(-4.9),
            ..Default::default()
        };
        assert_eq!(eom_to_chain(&fixed).unwrap().delta_c, -4.9);
        let dd = eom_full_drift_diffusion(&fixed).unwrap();
        assert_eq!(dd.drift()[(2, 3)], -4.9);
    }

    #[test]
    fn drift_structure() {
        let eom = EomParams::default();
        let dd = eom_full_drift_diffusion(&eom).unwrap();
        let a = dd.drift();
        assert!((a.trace() + 2.0 * (eom.kappa_a + eom.kappa_c + eom.kappa_b)).abs() < 1e-15);
        assert_eq!(a[(0, 1)], 5.0);
        assert_eq!(a[(1, 0)], -5.0);
        assert_eq!(a[(4, 5)], 1.0);
        assert_eq!(a[(5, 0)], -0.24);
        assert_eq!(dd.diffusion()[(4, 4)], 21.0 * eom.kappa_b);

        let comm = CommParams::default();
        let dd = comm_full_drift_diffusion(&comm).unwrap();
        let a = dd.drift();
        let kappas = comm.kappa_a + comm.kappa_c + comm.kappa_m + comm.kappa_b;
        assert!((a.trace() + 2.0 * kappas).abs() < 1e-15);
        assert_eq!(
            (a[(0, 5)], a[(1, 4)], a[(4, 1)], a[(5, 0)]),
            (0.12, -0.12, 0.12, -0.12)
        );
        assert_eq!((a[(5, 6)], a[(7, 4)]), (-0.2, -0.2));
        assert_eq!(a[(4, 5)], 1.0);
    }

    #[test]
    fn uncoupled_steady_state_is_thermal() {
        let eom = EomParams {
            g_a: 0.0,
            g_c: 0.0,
            kappa_b: 1e-2,
            ..Default::default()
        };
        let ss = steady_state(&eom_full_drift_diffusion(&eom).unwrap()).unwrap();
        let want = [0.5, 0.5, 0.5, 0.5, 10.5, 10.5];
        for (i, w) in want.iter().enumerate() {
            assert!((ss.get(i, i) - w).abs() < 1e-9, "{i}: {}", ss.get(i, i));
        }
    }

    #[test]
    fn rejects_bad_rates() {
        let eom = EomParams {
            kappa_b: 0.0,
            ..Default::default()
        };
        assert!(eom_full_drift_diffusion(&eom).is_err());
        let comm = CommParams {
            omega_b: -1.0,
            ..Default::default()
        };
        assert!(comm_to_chain(&comm).is_err());
    }
}
