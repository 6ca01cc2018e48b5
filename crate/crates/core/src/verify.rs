//! Self-verification suite: every numerical invariant of the library checked
//! with fixed seeds and reported as a worst-case residual against a pinned
//! tolerance.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::{
    effective_coupling, energy_shift, matched_delta_c_first_pass, matched_detunings, reduce,
    ChainParams, EffectiveModel,
};
use crate::closed_form::{
    boundary_limits, entanglement_steady_branch, entanglement_unsteady_branch,
    stationary_entanglement, stationary_steering, steering_region, steering_steady_branch,
    steering_unsteady_branch, Direction, SteeringRegion,
};
use crate::dynamics::{
    analytic_effective_cm, build_effective_drift_diffusion, characteristic_time, lyapunov_rk4,
    propagate_exact, squeeze_combination, squeeze_variances, steady_state, uniform_grid, StepSize,
};
use crate::error::Result;
use crate::gaussian::random::{random_physical_cm, RandomStateSpec};
use crate::gaussian::{
    gaussian_steering, local_phase_rotate, log_negativity, monogamy_residuals, partial_transpose,
    two_mode, CovarianceMatrix, ModePartition, ResourceReport,
};
use crate::sweep::{Cell, Table};
use crate::systems::{
    comm_full_drift_diffusion, comm_to_chain, eom_full_drift_diffusion, eom_to_chain, CommParams,
    EomParams,
};

/// Seed shared by every randomized check.
pub const VERIFY_SEED: u64 = 0x5EED_2024;

/// RK4 step used against the closed-form covariance matrix.
pub const RK4_ORACLE_STEP: f64 = 5e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `worst <= tolerance`.
    fn at_most(name: &'static str, worst: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name,
            worst,
            tolerance,
            passed: worst <= tolerance,
            detail: detail.into(),
        }
    }

    fn failed(name: &'static str, err: crate::Error) -> Self {
        Self {
            name,
            worst: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
            detail: format!("error: {err}"),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<34} worst={:<12.4e} tol={:<9.1e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.detail
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        writeln!(
            f,
            "{} of {} checks passed (seed {VERIFY_SEED:#x})",
            self.checks.len() - failed,
            self.checks.len()
        )
    }
}

fn model(g: f64, ka: f64, kc: f64) -> EffectiveModel {
    EffectiveModel::new(g, ka, kc).expect("valid verification model")
}

/// Representative `(g, κa, κc)` triples.
pub const STEADY_MODELS: [(f64, f64, f64); 4] = [
    (0.5, 1.0, 1.0),
    (0.5, 0.5, 1.0),
    (0.3, 1.0, 0.5),
    (0.2, 0.4, 0.9),
];
pub const UNSTEADY_MODELS: [(f64, f64, f64); 4] = [
    (1.0, 0.5, 1.0),
    (SQRT_2, 0.5, 1.0),
    (2.0, 1.0, 1.0),
    (1.5, 0.7, 1.2),
];

/// Parameter sets spanning both regimes and both coupling signs.
pub fn oracle_models() -> Vec<EffectiveModel> {
    let mut out = Vec::new();
    for (g, ka, kc) in STEADY_MODELS.iter().chain(&UNSTEADY_MODELS) {
        out.push(model(*g, *ka, *kc));
        out.push(model(-*g, *ka, *kc));
    }
    for (g, ka, kc) in [
        (0.8, 0.6, 1.3),
        (0.1, 0.2, 0.3),
        (1.1, 1.0, 0.4),
        (0.9, 0.3, 0.3),
    ] {
        out.push(model(g, ka, kc));
    }
    out
}

/// Runs the whole suite.
pub fn run_verify() -> VerifyReport {
    type CheckFn = fn() -> Result<Check>;
    let suite: [(&'static str, CheckFn); 30] = [
        ("symplectic_vs_two_mode", symplectic_vs_two_mode),
        ("analytic_vs_rk4", analytic_vs_rk4),
        ("rk4_fourth_order", rk4_fourth_order),
        ("steady_state_residual", steady_state_residual),
        ("closed_form_examples", closed_form_examples),
        ("boundary_continuity", || {
            Ok(check_boundary_continuity(entanglement_unsteady_branch))
        }),
        ("continuity_detects_mutation", continuity_detects_mutation),
        ("dual_route_stationary", dual_route_stationary),
        ("monotonic_in_g2", monotonic_in_g2),
        ("entanglement_dominates_steering", dominance),
        ("region_matches_signs", region_matches_signs),
        ("specialized_couplings", specialized_couplings),
        ("coupling_odd_in_theta", coupling_odd_in_theta),
        ("shift_ignores_idle_middle", shift_ignores_idle_middle),
        ("sign_invariance", sign_invariance),
        ("phase_invariance", phase_invariance),
        ("squeeze_tracks_zeta", squeeze_tracks_zeta),
        ("squeeze_saturation", squeeze_saturation),
        ("matched_detuning_converges", matched_detuning_converges),
        ("characteristic_time_value", characteristic_time_value),
        ("caption_couplings", caption_couplings),
        ("monogamy_dominant_pair", monogamy_dominant_pair),
        ("region_grid_labels", region_grid_labels),
        ("stabilised_by_tau", stabilised_by_tau),
        ("physical_along_trajectories", physical_along_trajectories),
        ("monogamy_along_trajectories", monogamy_along_trajectories),
        ("eom_full_vs_effective", eom_full_vs_effective),
        ("comm_region_signs", comm_region_signs),
        ("csv_round_trip", csv_round_trip),
        ("analytic_initial_vacuum", analytic_initial_vacuum),
    ];
    let checks = suite
        .par_iter()
        .map(|(name, f)| f().unwrap_or_else(|e| Check::failed(name, e)))
        .collect();
    VerifyReport { checks }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(VERIFY_SEED)
}

fn symplectic_vs_two_mode() -> Result<Check> {
    let mut rng = rng();
    let spec = RandomStateSpec::default();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let v = random_physical_cm(&mut rng, 2, &spec);
        let general = v.symplectic_eigenvalues()?;
        let (lo, hi) = two_mode::symplectic_eigenvalues(&v)?;
        let pt = partial_transpose(&v, &[0])?.min_symplectic_eigenvalue()?;
        let eta = two_mode::min_pt_eigenvalue(&v)?;
        worst = worst
            .max((general[0] - lo).abs())
            .max((general[1] - hi).abs())
            .max((pt - eta).abs());
    }
    Ok(Check::at_most(
        "symplectic_vs_two_mode",
        worst,
        1e-10,
        "1000 random states",
    ))
}

fn analytic_vs_rk4() -> Result<Check> {
    let models = oracle_models();
    let worst = models
        .par_iter()
        .map(|m| -> Result<f64> {
            let tau = characteristic_time(m)?;
            let grid = uniform_grid(2.0 * tau, 21);
            let dd = build_effective_drift_diffusion(m);
            let traj = lyapunov_rk4(
                &dd,
                &CovarianceMatrix::vacuum(2),
                &grid,
                StepSize::Fixed(RK4_ORACLE_STEP),
            )?;
            let mut worst = 0.0f64;
            for (t, v) in traj.iter() {
                let a = analytic_effective_cm(m, t)?;
                worst = worst.max((v.matrix() - a.matrix()).amax());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Check::at_most(
        "analytic_vs_rk4",
        worst,
        1e-8,
        format!(
            "{} models, t in [0, 2tau], h = {RK4_ORACLE_STEP:e}",
            models.len()
        ),
    ))
}

/// Error ratio of RK4 between steps `h` and `h/2` at `t = 2τ`.
pub fn rk4_error_ratio(m: &EffectiveModel, h: f64) -> Result<f64> {
    let tau = characteristic_time(m)?;
    let grid = [2.0 * tau];
    let dd = build_effective_drift_diffusion(m);
    let exact = analytic_effective_cm(m, 2.0 * tau)?;
    let err = |h: f64| -> Result<f64> {
        let traj = lyapunov_rk4(&dd, &CovarianceMatrix::vacuum(2), &grid, StepSize::Fixed(h))?;
        Ok((traj.states[0].matrix() - exact.matrix()).amax())
    };
    Ok(err(h)? / err(h / 2.0)?)
}

fn rk4_fourth_order() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut ratios = Vec::new();
    for (g, ka, kc) in [(1.0, 0.5, 1.0), (0.5, 1.0, 1.0)] {
        let r = rk4_error_ratio(&model(g, ka, kc), 0.1)?;
        ratios.push(r);
        worst = worst.max((r - 16.0).abs());
    }
    Ok(Check::at_most(
        "rk4_fourth_order",
        worst,
        2.0,
        format!("ratios {ratios:.3?}"),
    ))
}

fn steady_state_residual() -> Result<Check> {
    let mut worst = 0.0f64;
    for (g, ka, kc) in STEADY_MODELS {
        let dd = build_effective_drift_diffusion(&model(g, ka, kc));
        worst = worst.max(dd.residual(&steady_state(&dd)?));
    }
    let eom = EomParams {
        g_a: 0.01,
        g_c: 0.01,
        ..EomParams::default()
    };
    let dd = eom_full_drift_diffusion(&eom)?;
    worst = worst.max(dd.residual(&steady_state(&dd)?));
    Ok(Check::at_most(
        "steady_state_residual",
        worst,
        1e-10,
        "effective and weak-coupling EOM",
    ))
}

fn closed_form_examples() -> Result<Check> {
    // Each error is scaled by its own tolerance, so the check passes below 1.
    let scaled = [
        (stationary_entanglement(&model(0.5, 1.0, 1.0)) - 1.5f64.ln()).abs() / 1e-12,
        (stationary_entanglement(&model(1.0, 0.5, 1.0)) - 0.78698).abs() / 1e-5,
        (stationary_steering(&model(0.5, 0.5, 1.0), Direction::AtoC) - 0.10008).abs() / 1e-5,
    ];
    let worst = scaled.iter().copied().fold(0.0, f64::max);
    Ok(Check::at_most(
        "closed_form_examples",
        worst,
        1.0,
        "ln 1.5 to 1e-12, 0.78698 and 0.10008 to 1e-5 (scaled)",
    ))
}

/// Largest gap between either branch and the boundary limits at
/// `g² = κaκc(1 ± 1e−9)`, using `unsteady` as the unsteady entanglement
/// branch. Passing a deliberately broken formula shows the check bites.
pub fn check_boundary_continuity(unsteady: fn(f64, f64, f64) -> f64) -> Check {
    let mut worst = 0.0f64;
    for (ka, kc) in [(0.5, 1.0), (1.0, 1.0), (2.0, 0.3), (1e-4, 2e-4), (3.0, 7.0)] {
        let lim = boundary_limits(ka, kc);
        let pairs = [
            (
                entanglement_steady_branch as fn(f64, f64, f64) -> f64,
                unsteady,
                lim.entanglement,
                false,
            ),
            (
                steering_steady_branch,
                steering_unsteady_branch,
                lim.steering_ac,
                false,
            ),
            (
                steering_steady_branch,
                steering_unsteady_branch,
                lim.steering_ca,
                true,
            ),
        ];
        for (steady, unst, target, swap) in pairs {
            let (a, c) = if swap { (kc, ka) } else { (ka, kc) };
            for g2 in [ka * kc * (1.0 - 1e-9), ka * kc * (1.0 + 1e-9)] {
                worst = worst
                    .max((steady(g2, a, c) - target).abs())
                    .max((unst(g2, a, c) - target).abs());
            }
        }
    }
    let sym = (boundary_limits(1.3, 1.3).entanglement - 2f64.ln()).abs();
    Check::at_most(
        "boundary_continuity",
        worst.max(sym * 1e6),
        1e-6,
        "both branches at g^2 = kakc(1 +- 1e-9)",
    )
}

/// Unsteady entanglement with the `(κa − κc)²` term of `χ̃` dropped.
pub fn mutated_unsteady_entanglement(g2: f64, ka: f64, kc: f64) -> f64 {
    let omega = (4.0 * g2 + (ka - kc).powi(2)).sqrt();
    (4.0 * g2 / (omega * (ka + kc))).ln_1p()
}

fn continuity_detects_mutation() -> Result<Check> {
    let mutated = check_boundary_continuity(mutated_unsteady_entanglement);
    Ok(Check {
        name: "continuity_detects_mutation",
        worst: mutated.worst,
        tolerance: mutated.tolerance,
        passed: !mutated.passed,
        detail: "continuity must fail once chi~ loses its (ka-kc)^2 term".into(),
    })
}

/// `(E, S_ac, S_ca)` from the state: the steady state in the steady regime,
/// the closed-form CM at `2τ` otherwise.
pub fn dynamic_route(m: &EffectiveModel) -> Result<[f64; 3]> {
    let v = if m.regime().is_steady() {
        steady_state(&build_effective_drift_diffusion(m))?
    } else {
        analytic_effective_cm(m, 2.0 * characteristic_time(m)?)?
    };
    let r = ResourceReport::evaluate(&v, None)?;
    Ok([r.entanglement, r.steering_ab_raw, r.steering_ba_raw])
}

/// The three reference values as `(label, closed form, dynamic route)`.
pub fn reference_values() -> Result<Vec<(&'static str, f64, f64)>> {
    let e_steady = model(0.5, 1.0, 1.0);
    let e_unsteady = model(1.0, 0.5, 1.0);
    let s_steady = model(0.5, 0.5, 1.0);
    Ok(vec![
        (
            "E(ka=kc=1, g=0.5)",
            stationary_entanglement(&e_steady),
            dynamic_route(&e_steady)?[0],
        ),
        (
            "E(ka=0.5, kc=1, g=1)",
            stationary_entanglement(&e_unsteady),
            dynamic_route(&e_unsteady)?[0],
        ),
        (
            "S_ac(ka=0.5, kc=1, g=0.5)",
            stationary_steering(&s_steady, Direction::AtoC),
            dynamic_route(&s_steady)?[1],
        ),
    ])
}

fn dual_route_stationary() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut at = "";
    for (name, closed, dynamic) in reference_values()? {
        let d = (closed - dynamic).abs();
        if d > worst {
            worst = d;
            at = name;
        }
    }
    Ok(Check::at_most(
        "dual_route_stationary",
        worst,
        1e-3,
        format!("worst at {at}"),
    ))
}

fn monotonic_in_g2() -> Result<Check> {
    let mut worst = 0.0f64;
    for (ka, kc) in [(0.5, 1.0), (1.0, 0.5), (1.0, 1.0), (0.2, 0.9)] {
        let g2_max = 6.0 * ka * kc;
        let mut prev = [f64::NEG_INFINITY; 3];
        for i in 0..100 {
            let g2 = g2_max * (i as f64 + 1.0) / 100.0;
            let m = model(g2.sqrt(), ka, kc);
            let now = [
                stationary_entanglement(&m),
                stationary_steering(&m, Direction::AtoC),
                stationary_steering(&m, Direction::CtoA),
            ];
            for k in 0..3 {
                if k == 0 || (now[k] > 0.0 && prev[k] > 0.0) {
                    worst = worst.max(prev[k] - now[k]);
                }
            }
            prev = now;
        }
    }
    Ok(Check::at_most(
        "monotonic_in_g2",
        worst.max(0.0),
        1e-12,
        "largest decrease on 100-point grids",
    ))
}

fn dominance() -> Result<Check> {
    let mut rng = rng();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..2000 {
        let ka: f64 = rng.random_range(0.05..2.0);
        let kc: f64 = rng.random_range(0.05..2.0);
        let g: f64 = rng.random_range(0.01..3.0);
        let m = model(g, ka, kc);
        let e = stationary_entanglement(&m);
        for d in [Direction::AtoC, Direction::CtoA] {
            let s = stationary_steering(&m, d);
            if s > 0.0 {
                worst = worst.max(s - e);
            }
        }
    }
    // Strict E > S: the largest S − E must be negative.
    Ok(Check {
        name: "entanglement_dominates_steering",
        worst,
        tolerance: 0.0,
        passed: worst < 0.0,
        detail: "max(S - E) over 2000 draws with S > 0".into(),
    })
}

fn region_matches_signs() -> Result<Check> {
    let mut rng = rng();
    let mut mismatches = 0usize;
    let n = 10_000;
    for _ in 0..n {
        let ka: f64 = rng.random_range(0.01..2.0);
        let kc: f64 = rng.random_range(0.01..2.0);
        let g: f64 = rng.random_range(0.0..3.0);
        let m = model(g, ka, kc);
        let signs = SteeringRegion::from_raw(
            stationary_steering(&m, Direction::AtoC),
            stationary_steering(&m, Direction::CtoA),
        );
        if signs != steering_region(&m) {
            mismatches += 1;
        }
    }
    Ok(Check::at_most(
        "region_matches_signs",
        mismatches as f64,
        0.0,
        format!("{n} random models"),
    ))
}

fn specialized_couplings() -> Result<Check> {
    let mut rng = rng();
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let omega_b: f64 = rng.random_range(0.5..2.0);
        let eom = EomParams {
            omega_b,
            delta_a: omega_b * rng.random_range(1.5..8.0),
            g_a: rng.random_range(0.01..0.3),
            g_c: rng.random_range(0.01..0.3),
            ..EomParams::default()
        };
        let chain = effective_coupling(&eom_to_chain(&eom)?)?;
        worst = worst.max(((chain - eom.effective_coupling()) / eom.effective_coupling()).abs());

        let comm = CommParams {
            omega_b,
            delta_a: omega_b * rng.random_range(1.5..8.0),
            delta_m: Some(omega_b * rng.random_range(0.3..1.4)),
            g_a: rng.random_range(0.01..0.3),
            g_m: rng.random_range(0.01..0.3),
            g_c: rng.random_range(0.01..0.3),
            ..CommParams::default()
        };
        let chain = effective_coupling(&comm_to_chain(&comm)?)?;
        worst = worst.max(((chain - comm.effective_coupling()) / comm.effective_coupling()).abs());
    }
    Ok(Check::at_most(
        "specialized_couplings",
        worst,
        1e-12,
        "10^4 EOM and COMM draws",
    ))
}

fn sample_chain(rng: &mut ChaCha8Rng, n: usize) -> ChainParams {
    ChainParams {
        delta_a: rng.random_range(2.5..6.0),
        delta_c: -4.0,
        omegas: (0..n).map(|_| rng.random_range(0.5..2.0)).collect(),
        g_a: rng.random_range(0.01..0.2),
        g_c: rng.random_range(0.01..0.2),
        g_mid: (1..n).map(|_| rng.random_range(0.01..0.2)).collect(),
        theta: rng.random_range(0.0..PI),
        phi: rng.random_range(0.0..PI),
        kappa_a: 1e-3,
        kappa_c: 1e-3,
        kappa_mid: vec![],
        n_a: 0.0,
        n_c: 0.0,
        n_mid: vec![],
    }
}

fn coupling_odd_in_theta() -> Result<Check> {
    let mut rng = rng();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = sample_chain(&mut rng, 1);
        let flipped = ChainParams {
            theta: p.theta + PI,
            ..p.clone()
        };
        let (g, gf) = (effective_coupling(&p)?, effective_coupling(&flipped)?);
        worst = worst.max((g + gf).abs() / g.abs().max(1e-300));
        let (mp, mf) = (reduce(&p)?, reduce(&flipped)?);
        worst = worst.max((stationary_entanglement(&mp) - stationary_entanglement(&mf)).abs());
    }
    Ok(Check::at_most(
        "coupling_odd_in_theta",
        worst,
        1e-10,
        "N = 1, 1000 draws",
    ))
}

fn shift_ignores_idle_middle() -> Result<Check> {
    let mut rng = rng();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = sample_chain(&mut rng, 2);
        let mut longer = p.clone();
        longer.omegas.insert(1, rng.random_range(0.5..2.0));
        longer.g_mid = vec![p.g_mid[0], 0.0];
        worst = worst.max((energy_shift(&p)? - energy_shift(&longer)?).abs());
    }
    Ok(Check::at_most(
        "shift_ignores_idle_middle",
        worst,
        1e-15,
        "zero-coupled middle modes",
    ))
}

fn sign_invariance() -> Result<Check> {
    let mut worst = 0.0f64;
    for (g, ka, kc) in STEADY_MODELS.iter().chain(&UNSTEADY_MODELS) {
        let (mp, mn) = (model(*g, *ka, *kc), model(-*g, *ka, *kc));
        let t = characteristic_time(&mp)?;
        let rp = ResourceReport::evaluate(&analytic_effective_cm(&mp, t)?, None)?;
        let rn = ResourceReport::evaluate(&analytic_effective_cm(&mn, t)?, None)?;
        worst = worst
            .max((rp.entanglement - rn.entanglement).abs())
            .max((rp.steering_ab_raw - rn.steering_ab_raw).abs())
            .max((rp.steering_ba_raw - rn.steering_ba_raw).abs());
    }
    Ok(Check::at_most(
        "sign_invariance",
        worst,
        1e-12,
        "resources at tau for +-g",
    ))
}

fn resource_vector(v: &CovarianceMatrix) -> Result<Vec<f64>> {
    let m = v.modes();
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if a != b {
                out.push(gaussian_steering(v, &[a], &[b])?.raw);
                if a < b {
                    out.push(log_negativity(v, &ModePartition::pair(a, b)?)?);
                }
            }
        }
    }
    if m >= 3 {
        let mono = monogamy_residuals(v, 0)?;
        out.push(mono.ent_residual);
        out.push(mono.steer_residual);
    }
    Ok(out)
}

fn phase_invariance() -> Result<Check> {
    let mut rng = rng();
    let spec = RandomStateSpec {
        max_squeeze: 0.8,
        max_nu: 2.0,
    };
    let mut worst = 0.0f64;
    for modes in [2, 3, 4] {
        for _ in 0..100 {
            let v = random_physical_cm(&mut rng, modes, &spec);
            let mut rotated = v.clone();
            for k in 0..modes {
                rotated = local_phase_rotate(&rotated, k, rng.random_range(0.0..2.0 * PI))?;
            }
            let (a, b) = (resource_vector(&v)?, resource_vector(&rotated)?);
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(Check::at_most(
        "phase_invariance",
        worst,
        1e-10,
        "2-4 modes, random local phases",
    ))
}

fn squeeze_tracks_zeta() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for (g, ka, kc) in UNSTEADY_MODELS {
        let m = model(g, ka, kc);
        let tau = characteristic_time(&m)?;
        for i in 0..=20 {
            let t = tau * (1.0 + i as f64 / 20.0);
            let zeta = squeeze_combination(&analytic_effective_cm(&m, t)?);
            let dx = squeeze_variances(&m, t)?.dx;
            let d = (zeta - 2.0 * dx).abs() / zeta;
            if d > worst {
                worst = d;
                at = format!(
                    "worst at (g, ka, kc) = ({g:.4}, {ka}, {kc}), t = {:.2} tau",
                    t / tau
                );
            }
        }
    }
    Ok(Check::at_most("squeeze_tracks_zeta", worst, 0.01, at))
}

/// Caption-derived chains used for the detuning refinement check.
pub fn caption_chains() -> Result<Vec<(String, ChainParams)>> {
    let mut out = Vec::new();
    for g_c in [0.05, 0.1, 0.12, 0.15] {
        let p = EomParams {
            g_c,
            ..EomParams::default()
        };
        out.push((format!("EOM g_c = {g_c}"), eom_to_chain(&p)?));
    }
    let p = EomParams {
        delta_a: 4.5,
        ..EomParams::default()
    };
    out.push(("EOM delta_a = 4.5".into(), eom_to_chain(&p)?));
    out.push(("COMM".into(), comm_to_chain(&CommParams::default())?));
    Ok(out)
}

/// `|Δc(pass 2) − Δc(pass 1)| / |Δa|`.
pub fn detuning_refinement(p: &ChainParams) -> Result<f64> {
    let first = matched_delta_c_first_pass(p)?;
    let (_, second) = matched_detunings(p)?;
    Ok((second - first).abs() / p.delta_a.abs())
}

fn matched_detuning_converges() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for (name, p) in caption_chains()? {
        let d = detuning_refinement(&p)?;
        if d > worst {
            worst = d;
            at = format!("worst for {name}");
        }
    }
    Ok(Check::at_most(
        "matched_detuning_converges",
        worst,
        1e-6,
        at,
    ))
}

/// Long-time squeezing for `g² = 4κaκc`, `κc = 2κa = 1`:
/// `(ζ(∞) from the state, 2ΔX(∞), E(∞) closed form, −ln ζ(∞))`.
pub fn saturation_values() -> Result<[f64; 4]> {
    let m = model((4.0f64 * 0.5).sqrt(), 0.5, 1.0);
    // Five τ leaves the transients below 1e-9 while the diverging entries
    // stay small enough for ζ to keep seven digits.
    let t = 5.0 * characteristic_time(&m)?;
    let zeta = squeeze_combination(&analytic_effective_cm(&m, t)?);
    let dx = squeeze_variances(&m, f64::INFINITY)?.dx;
    Ok([zeta, 2.0 * dx, stationary_entanglement(&m), -zeta.ln()])
}

fn squeeze_saturation() -> Result<Check> {
    let [zeta, two_dx, e, log_zeta] = saturation_values()?;
    let worst = [
        zeta - 0.3630,
        two_dx - 0.3630,
        e - 1.0134,
        log_zeta - 1.0134,
    ]
    .iter()
    .fold(0.0f64, |w, d| w.max(d.abs()));
    Ok(Check::at_most(
        "squeeze_saturation",
        worst,
        1e-3,
        format!("zeta {zeta:.5}, 2dX {two_dx:.5}, E {e:.5}, -ln zeta {log_zeta:.5}"),
    ))
}

fn characteristic_time_value() -> Result<Check> {
    let tau = characteristic_time(&model(1.0, 0.5, 1.0))?;
    Ok(Check::at_most(
        "characteristic_time_value",
        (tau - 3.5284).abs(),
        1e-4,
        format!("tau = {tau:.6}"),
    ))
}

fn caption_couplings() -> Result<Check> {
    let eom = effective_coupling(&eom_to_chain(&EomParams::default())?)?;
    let comm = effective_coupling(&comm_to_chain(&CommParams::default())?)?;
    let worst = ((eom.abs() - 1.2e-3) / 1.2e-3)
        .abs()
        .max(((comm.abs() - 1.8e-4) / 1.8e-4).abs());
    Ok(Check::at_most(
        "caption_couplings",
        worst,
        1e-6,
        format!("EOM {eom:.6e}, COMM {comm:.6e}"),
    ))
}

/// `|E(τ) − E(2τ)| / E(2τ)` from the closed-form covariance matrix.
pub fn stabilisation_gap(m: &EffectiveModel) -> Result<f64> {
    let tau = characteristic_time(m)?;
    let p = ModePartition::pair(0, 1)?;
    let e1 = log_negativity(&analytic_effective_cm(m, tau)?, &p)?;
    let e2 = log_negativity(&analytic_effective_cm(m, 2.0 * tau)?, &p)?;
    Ok((e1 - e2).abs() / e2)
}

fn stabilised_by_tau() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for (g, ka, kc) in STEADY_MODELS.iter().chain(&UNSTEADY_MODELS) {
        let m = model(*g, *ka, *kc);
        let gap = stabilisation_gap(&m)?;
        if gap > worst {
            worst = gap;
            at = format!("worst at (g, ka, kc) = ({g:.4}, {ka}, {kc})");
        }
    }
    Ok(Check::at_most("stabilised_by_tau", worst, 0.01, at))
}

fn physical_along_trajectories() -> Result<Check> {
    let mut lowest = f64::INFINITY;
    for m in oracle_models() {
        let tau = characteristic_time(&m)?;
        let dd = build_effective_drift_diffusion(&m);
        let traj = lyapunov_rk4(
            &dd,
            &CovarianceMatrix::vacuum(2),
            &uniform_grid(2.0 * tau, 41),
            StepSize::Auto,
        )?;
        for v in &traj.states {
            lowest = lowest.min(v.min_symplectic_eigenvalue()?);
        }
    }
    let eom = EomParams::default();
    let tau = characteristic_time(&reduce(&eom_to_chain(&eom)?)?)?;
    let traj = propagate_exact(
        &eom_full_drift_diffusion(&eom)?,
        &CovarianceMatrix::vacuum(3),
        &uniform_grid(2.0 * tau, 101),
    )?;
    for v in &traj.states {
        lowest = lowest.min(v.min_symplectic_eigenvalue()?);
    }
    Ok(Check::at_most(
        "physical_along_trajectories",
        (0.5 - lowest).max(0.0),
        1e-9,
        format!("smallest symplectic eigenvalue {lowest:.12}"),
    ))
}

/// Smallest monogamy residual along full EOM and COMM trajectories.
pub fn min_monogamy_residual(samples: usize) -> Result<f64> {
    let eom = EomParams::default();
    let comm = CommParams::default();
    let mut worst = f64::INFINITY;
    let runs = [
        (
            eom_full_drift_diffusion(&eom)?,
            CovarianceMatrix::vacuum(3),
            characteristic_time(&reduce(&eom_to_chain(&eom)?)?)?,
        ),
        (
            comm_full_drift_diffusion(&comm)?,
            CovarianceMatrix::vacuum(4),
            characteristic_time(&reduce(&comm_to_chain(&comm)?)?)?,
        ),
    ];
    for (dd, v0, tau) in runs {
        let traj = propagate_exact(&dd, &v0, &uniform_grid(2.0 * tau, samples))?;
        for v in &traj.states {
            for focus in 0..v.modes() {
                let r = monogamy_residuals(v, focus)?;
                worst = worst.min(r.ent_residual).min(r.steer_residual);
            }
        }
    }
    Ok(worst)
}

fn monogamy_along_trajectories() -> Result<Check> {
    let worst = min_monogamy_residual(101)?;
    Ok(Check::at_most(
        "monogamy_along_trajectories",
        (-worst).max(0.0),
        1e-9,
        format!("min residual {worst:.3e} over EOM and COMM, every focus mode"),
    ))
}

/// COMM at `τ` with the default parameters: `(E²_{a|rest}, E²_{ac}, largest
/// other pairwise E²)` for focus mode `a`.
pub fn comm_entanglement_shares() -> Result<[f64; 3]> {
    let p = CommParams::default();
    let tau = characteristic_time(&reduce(&comm_to_chain(&p)?)?)?;
    let dd = comm_full_drift_diffusion(&p)?;
    let v = propagate_exact(&dd, &CovarianceMatrix::vacuum(4), &[tau])?
        .states
        .remove(0);
    let total = log_negativity(&v, &ModePartition::one_vs_rest(0, 4)?)?.powi(2);
    let ac = log_negativity(&v, &ModePartition::pair(0, 1)?)?.powi(2);
    let mut other = 0.0f64;
    for j in 2..4 {
        other = other.max(log_negativity(&v, &ModePartition::pair(0, j)?)?.powi(2));
    }
    Ok([total, ac, other])
}

fn monogamy_dominant_pair() -> Result<Check> {
    let [total, ac, other] = comm_entanglement_shares()?;
    let worst = ((total - ac) / total).abs().max(other / total);
    Ok(Check::at_most(
        "monogamy_dominant_pair",
        worst,
        0.05,
        format!("E2 a|rest {total:.4}, E2 ac {ac:.4}, other {other:.2e}"),
    ))
}

/// Log-spaced `n`-point axis over `[lo, hi]`.
pub fn log_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn region_grid_labels() -> Result<Check> {
    let axis = log_axis(0.05, 4.0, 50);
    let mut mismatches = 0usize;
    for &ka in &axis {
        for &kc in &axis {
            let m = model(1.0, ka, kc);
            let signs = SteeringRegion::from_raw(
                stationary_steering(&m, Direction::AtoC),
                stationary_steering(&m, Direction::CtoA),
            );
            mismatches += usize::from(signs != steering_region(&m));
        }
    }
    Ok(Check::at_most(
        "region_grid_labels",
        mismatches as f64,
        0.0,
        "50x50 grid, g = 1",
    ))
}

/// Relative deviation of full-EOM `(E, S_ac)` at `τ` from the closed form,
/// for the caption parameters with `g_a` swept over `[0.02, 0.2]`.
pub fn eom_sweep_deviations(points: usize) -> Result<Vec<(f64, f64, f64, bool)>> {
    (0..points)
        .into_par_iter()
        .map(|i| {
            let g_a = 0.02 + 0.18 * i as f64 / (points - 1) as f64;
            let p = EomParams {
                g_a,
                ..EomParams::default()
            };
            let chain = eom_to_chain(&p)?;
            let m = reduce(&chain)?;
            let tau = characteristic_time(&m)?;
            let dd = eom_full_drift_diffusion(&p)?;
            let v0 = CovarianceMatrix::vacuum(3);
            let v = propagate_exact(&dd, &v0, &[tau])?.states.remove(0);
            let r = ResourceReport::evaluate(&v, None)?;
            let e = stationary_entanglement(&m);
            let s = stationary_steering(&m, Direction::AtoC).max(0.0);
            let valid =
                crate::chain::validity_report(&chain, crate::chain::DEFAULT_VALIDITY_THRESHOLD)
                    .iter()
                    .all(|e| e.pass);
            Ok((
                g_a,
                (r.entanglement - e).abs() / e,
                (r.steering_ab - s).abs() / s,
                valid,
            ))
        })
        .collect()
}

fn eom_full_vs_effective() -> Result<Check> {
    let rows = eom_sweep_deviations(10)?;
    let mut worst = 0.0f64;
    let mut at = 0.0;
    for (g_a, de, ds, valid) in rows {
        if valid && de.max(ds) > worst {
            worst = de.max(ds);
            at = g_a;
        }
    }
    Ok(Check::at_most(
        "eom_full_vs_effective",
        worst,
        0.10,
        format!("worst at g_a = {at:.3}"),
    ))
}

fn comm_region_signs() -> Result<Check> {
    let n = 50;
    let axis = log_axis(2e-5, 4e-4, n);
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let results = cells
        .par_iter()
        .map(|&(i, j)| -> Result<(SteeringRegion, SteeringRegion)> {
            let p = CommParams {
                kappa_a: axis[i],
                kappa_c: axis[j],
                ..CommParams::default()
            };
            let m = reduce(&comm_to_chain(&p)?)?;
            let tau = characteristic_time(&m)?;
            let dd = comm_full_drift_diffusion(&p)?;
            let v0 = CovarianceMatrix::vacuum(4);
            let v = propagate_exact(&dd, &v0, &[tau])?.states.remove(0);
            let r = ResourceReport::evaluate(&v, None)?;
            Ok((
                steering_region(&m),
                SteeringRegion::from_raw(r.steering_ab_raw, r.steering_ba_raw),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<SteeringRegion> = results.iter().map(|r| r.0).collect();
    let near_boundary = |i: usize, j: usize| {
        let here = labels[i * n + j];
        (i.saturating_sub(2)..(i + 3).min(n))
            .any(|a| (j.saturating_sub(2)..(j + 3).min(n)).any(|b| labels[a * n + b] != here))
    };
    let (mut total, mut agree) = (0usize, 0usize);
    for (idx, (closed, numeric)) in results.iter().enumerate() {
        if near_boundary(idx / n, idx % n) {
            continue;
        }
        total += 1;
        agree += usize::from(closed == numeric);
    }
    let frac = agree as f64 / total.max(1) as f64;
    Ok(Check::at_most(
        "comm_region_signs",
        1.0 - frac,
        0.05,
        format!("{agree}/{total} cells agree outside a 2-cell boundary band"),
    ))
}

fn csv_round_trip() -> Result<Check> {
    let mut rng = rng();
    let mut table = Table::new(vec!["x".into(), "y".into()]);
    for _ in 0..1000 {
        let x: f64 = rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-300..300));
        table
            .rows
            .push(vec![Cell::Num(x), Cell::Num(1.0 / 3.0 + x)]);
    }
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    let back = Table::read_csv(buf.as_slice())?;
    let mismatches = table
        .rows
        .iter()
        .zip(&back.rows)
        .filter(|(a, b)| a != b)
        .count();
    Ok(Check::at_most(
        "csv_round_trip",
        mismatches as f64,
        0.0,
        "1000 rows, bitwise",
    ))
}

fn analytic_initial_vacuum() -> Result<Check> {
    let mut worst = 0.0f64;
    for m in oracle_models() {
        let v = analytic_effective_cm(&m, 0.0)?;
        worst = worst.max((v.matrix() - CovarianceMatrix::vacuum(2).matrix()).amax());
    }
    Ok(Check::at_most(
        "analytic_initial_vacuum",
        worst,
        1e-12,
        "v(0) = I/2",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutation_is_detected() {
        assert!(check_boundary_continuity(entanglement_unsteady_branch).passed);
        assert!(!check_boundary_continuity(mutated_unsteady_entanglement).passed);
    }

    #[test]
    fn report_formatting() {
        let c = Check::at_most("x", 0.5, 1.0, "d");
        assert!(c.to_string().starts_with("PASS x"));
        let report = VerifyReport { checks: vec![c] };
        assert!(report.all_passed());
        assert!(report.to_string().contains("1 of 1 checks passed"));
    }
}
