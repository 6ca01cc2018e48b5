//! Acceptance criteria. Each criterion prints one PASS/FAIL line per
//! sub-check with its pinned tolerance; the process fails if any line fails.

use std::time::{Duration, Instant};

use mo_resources_acceptance::Report;

use mo_resources::chain::{effective_coupling, reduce, ChainParams};
use mo_resources::closed_form::{boundary_limits, stationary_steering, Direction, SteeringRegion};
use mo_resources::dynamics::{
    analytic_effective_cm, build_effective_drift_diffusion, characteristic_time, lyapunov_rk4,
    propagate_exact, uniform_grid, StepSize,
};
use mo_resources::gaussian::random::{random_physical_cm, RandomStateSpec};
use mo_resources::gaussian::{local_phase_rotate, two_mode, CovarianceMatrix, ResourceReport};
use mo_resources::systems::{
    comm_full_drift_diffusion, comm_to_chain, eom_to_chain, CommParams, EomParams,
};
use mo_resources::verify::{
    check_boundary_continuity, comm_entanglement_shares, eom_sweep_deviations, log_axis,
    min_monogamy_residual, oracle_models, reference_values, rk4_error_ratio, saturation_values,
    stabilisation_gap, RK4_ORACLE_STEP, STEADY_MODELS, UNSTEADY_MODELS,
};
use mo_resources::{EffectiveModel, RegimeLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 7;

fn model(g: f64, ka: f64, kc: f64) -> EffectiveModel {
    EffectiveModel::new(g, ka, kc).unwrap()
}

fn ac1(l: &mut Report) {
    let start = Instant::now();
    let models = oracle_models();
    let worst = models
        .par_iter()
        .map(|m| {
            let tau = characteristic_time(m).unwrap();
            let dd = build_effective_drift_diffusion(m);
            let grid = uniform_grid(2.0 * tau, 41);
            let traj = lyapunov_rk4(
                &dd,
                &CovarianceMatrix::vacuum(2),
                &grid,
                StepSize::Fixed(RK4_ORACLE_STEP),
            )
            .unwrap();
            traj.iter()
                .map(|(t, v)| (v.matrix() - analytic_effective_cm(m, t).unwrap().matrix()).amax())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let steady = models
        .iter()
        .filter(|m| m.regime() == RegimeLabel::Steady)
        .count();
    l.line(
        "AC1",
        "parameter sets (>= 20, both regimes)",
        models.len() as f64,
        20.0,
        models.len() >= 20 && steady > 0 && steady < models.len(),
    );
    l.within(
        "AC1",
        "max |analytic - RK4| over t in [0, 2tau]",
        worst,
        1e-8,
    );
    l.timed(
        "AC1",
        "runtime (s)",
        start.elapsed(),
        Duration::from_secs(5),
    );
}

fn ac2(l: &mut Report) {
    let tols = [1e-12, 1e-5, 1e-5];
    let targets = [1.5f64.ln(), 0.78698, 0.10008];
    for (((name, closed, dynamic), tol), target) in reference_values()
        .unwrap()
        .into_iter()
        .zip(tols)
        .zip(targets)
    {
        l.within("AC2", &format!("{name} closed form"), closed - target, tol);
        l.within(
            "AC2",
            &format!("{name} dynamic route"),
            dynamic - closed,
            1e-3,
        );
    }
}

fn ac3(l: &mut Report) {
    let c = check_boundary_continuity(mo_resources::closed_form::entanglement_unsteady_branch);
    l.within(
        "AC3",
        "branches vs limit at g^2 = kakc(1 +- 1e-9)",
        c.worst,
        1e-6,
    );
    let sym = [0.3, 1.0, 2.5]
        .iter()
        .map(|&k| (boundary_limits(k, k).entanglement - 2f64.ln()).abs())
        .fold(0.0, f64::max);
    l.within("AC3", "E_lim(k, k) - ln 2", sym, 1e-12);
}

fn ac4(l: &mut Report) {
    let [zeta, two_dx, e, log_zeta] = saturation_values().unwrap();
    l.within("AC4", "zeta(inf) - 0.3630", zeta - 0.3630, 1e-3);
    l.within("AC4", "2 dX(inf) - 0.3630", two_dx - 0.3630, 1e-3);
    l.within("AC4", "E(inf) closed form - 1.0134", e - 1.0134, 1e-3);
    l.within("AC4", "-ln zeta(inf) - 1.0134", log_zeta - 1.0134, 1e-3);
}

fn ac5(l: &mut Report) {
    let tau = characteristic_time(&model(1.0, 0.5, 1.0)).unwrap();
    l.within("AC5", "tau(ka=0.5, kc=1, g=1) - 3.5284", tau - 3.5284, 1e-4);
    for (g, ka, kc) in STEADY_MODELS.iter().chain(&UNSTEADY_MODELS) {
        let gap = stabilisation_gap(&model(*g, *ka, *kc)).unwrap();
        l.line(
            "AC5",
            &format!("|E(tau) - E(2tau)| / E(2tau) at ({g:.4}, {ka}, {kc})"),
            gap,
            0.01,
            gap < 0.01,
        );
    }
}

fn ac6(l: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst_eom, mut worst_comm) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let omega_b: f64 = rng.random_range(0.5..2.0);
        let eom = EomParams {
            omega_b,
            delta_a: omega_b * rng.random_range(1.5..8.0),
            g_a: rng.random_range(0.01..0.3),
            g_c: rng.random_range(0.01..0.3),
            ..EomParams::default()
        };
        let chain = effective_coupling(&eom_to_chain(&eom).unwrap()).unwrap();
        worst_eom = worst_eom.max((chain / eom.effective_coupling() - 1.0).abs());
        let comm = CommParams {
            omega_b,
            delta_a: omega_b * rng.random_range(1.5..8.0),
            delta_m: Some(omega_b * rng.random_range(0.3..1.4)),
            g_a: rng.random_range(0.01..0.3),
            g_m: rng.random_range(0.01..0.3),
            g_c: rng.random_range(0.01..0.3),
            ..CommParams::default()
        };
        let chain = effective_coupling(&comm_to_chain(&comm).unwrap()).unwrap();
        worst_comm = worst_comm.max((chain / comm.effective_coupling() - 1.0).abs());
    }
    l.within(
        "AC6",
        "chain vs EOM formula, 1e4 draws (relative)",
        worst_eom,
        1e-12,
    );
    l.within(
        "AC6",
        "chain vs COMM formula, 1e4 draws (relative)",
        worst_comm,
        1e-12,
    );
    let eom: ChainParams = eom_to_chain(&EomParams::default()).unwrap();
    let g = effective_coupling(&eom).unwrap().abs();
    l.within(
        "AC6",
        "EOM caption g_eff / 1.2e-3 - 1",
        g / 1.2e-3 - 1.0,
        1e-9,
    );
    let g = effective_coupling(&comm_to_chain(&CommParams::default()).unwrap())
        .unwrap()
        .abs();
    l.within(
        "AC6",
        "COMM caption g_eff / 1.8e-4 - 1",
        g / 1.8e-4 - 1.0,
        1e-9,
    );
}

fn ac7(l: &mut Report) {
    let start = Instant::now();
    let rows = eom_sweep_deviations(19).unwrap();
    let elapsed = start.elapsed();
    for (g_a, de, ds, valid) in rows {
        if !valid {
            println!("SKIP AC7   g_a = {g_a:.3}: validity ratio >= 0.2");
            continue;
        }
        l.line(
            "AC7",
            &format!("g_a = {g_a:.3}: E(tau) relative deviation"),
            de,
            0.10,
            de <= 0.10,
        );
        l.line(
            "AC7",
            &format!("g_a = {g_a:.3}: S_ac(tau) relative deviation"),
            ds,
            0.10,
            ds <= 0.10,
        );
    }
    l.timed("AC7", "runtime (s)", elapsed, Duration::from_secs(300));
}

/// Steering presence from the region inequalities alone.
fn inequality_region(g: f64, ka: f64, kc: f64) -> SteeringRegion {
    let (g2, kk) = (g * g, ka * kc);
    let present = |k1: f64, k2: f64| {
        if g2 < kk {
            k1 < k2
        } else {
            g2 + kk > 2.0 * k1 * k1
        }
    };
    SteeringRegion::from_presence(present(ka, kc), present(kc, ka))
}

fn ac8(l: &mut Report) {
    let axis = log_axis(0.05, 4.0, 50);
    let mut mismatches = 0usize;
    for &ka in &axis {
        for &kc in &axis {
            let m = model(1.0, ka, kc);
            let closed = SteeringRegion::from_raw(
                stationary_steering(&m, Direction::AtoC),
                stationary_steering(&m, Direction::CtoA),
            );
            mismatches += usize::from(closed != inequality_region(1.0, ka, kc));
        }
    }
    l.within(
        "AC8",
        "closed-form vs inequality labels, 50x50 (mismatches)",
        mismatches as f64,
        0.0,
    );

    let n = 50;
    let axis = log_axis(2e-5, 4e-4, n);
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let results: Vec<(SteeringRegion, SteeringRegion)> = cells
        .par_iter()
        .map(|&(i, j)| {
            let p = CommParams {
                kappa_a: axis[i],
                kappa_c: axis[j],
                ..CommParams::default()
            };
            let m = reduce(&comm_to_chain(&p).unwrap()).unwrap();
            let tau = characteristic_time(&m).unwrap();
            let dd = comm_full_drift_diffusion(&p).unwrap();
            let v = propagate_exact(&dd, &CovarianceMatrix::vacuum(4), &[tau]).unwrap();
            let r = ResourceReport::evaluate(&v.states[0], None).unwrap();
            (
                inequality_region(m.g_eff, m.kappa_a, m.kappa_c),
                SteeringRegion::from_raw(r.steering_ab_raw, r.steering_ba_raw),
            )
        })
        .collect();
    let label = |i: usize, j: usize| results[i * n + j].0;
    let (mut total, mut agree) = (0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            let band = (i.saturating_sub(2)..(i + 3).min(n))
                .any(|a| (j.saturating_sub(2)..(j + 3).min(n)).any(|b| label(a, b) != label(i, j)));
            if !band {
                total += 1;
                agree += usize::from(results[i * n + j].0 == results[i * n + j].1);
            }
        }
    }
    let frac = agree as f64 / total as f64;
    l.line(
        "AC8",
        &format!("COMM numeric sign agreement ({agree}/{total} cells)"),
        frac,
        0.95,
        frac >= 0.95,
    );
}

fn ac9(l: &mut Report) {
    let worst = min_monogamy_residual(201).unwrap();
    l.line(
        "AC9",
        "min monogamy residual along EOM and COMM",
        worst,
        -1e-9,
        worst >= -1e-9,
    );
    let [total, ac, other] = comm_entanglement_shares().unwrap();
    l.within(
        "AC9",
        "(E2_a|rest - E2_ac) / E2_a|rest at tau",
        (total - ac) / total,
        0.05,
    );
    l.within(
        "AC9",
        "largest other pairwise E2 / E2_a|rest at tau",
        other / total,
        0.05,
    );
}

fn ac10(l: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let spec = RandomStateSpec::default();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let v = random_physical_cm(&mut rng, 2, &spec);
        let general = v.symplectic_eigenvalues().unwrap();
        let (lo, hi) = two_mode::symplectic_eigenvalues(&v).unwrap();
        worst = worst
            .max((general[0] - lo).abs())
            .max((general[1] - hi).abs());
    }
    l.within(
        "AC10",
        "general vs two-mode symplectic eigenvalues",
        worst,
        1e-10,
    );

    for (g, ka, kc) in [(1.0, 0.5, 1.0), (0.5, 1.0, 1.0)] {
        let r = rk4_error_ratio(&model(g, ka, kc), 0.1).unwrap();
        l.within(
            "AC10",
            &format!("RK4 error ratio - 16 at ({g}, {ka}, {kc})"),
            r - 16.0,
            2.0,
        );
    }

    let spec = RandomStateSpec {
        max_squeeze: 0.8,
        max_nu: 2.0,
    };
    let mut worst = 0.0f64;
    for modes in [2, 3, 4] {
        for _ in 0..100 {
            let v = random_physical_cm(&mut rng, modes, &spec);
            let mut w = v.clone();
            for k in 0..modes {
                w = local_phase_rotate(&w, k, rng.random_range(0.0..std::f64::consts::TAU))
                    .unwrap();
            }
            let (a, b) = (
                ResourceReport::evaluate(&v, None).unwrap(),
                ResourceReport::evaluate(&w, None).unwrap(),
            );
            let pairs = [
                (a.entanglement, b.entanglement),
                (a.steering_ab_raw, b.steering_ab_raw),
                (a.steering_ba_raw, b.steering_ba_raw),
                (
                    a.monogamy_ent_residual.unwrap_or(0.0),
                    b.monogamy_ent_residual.unwrap_or(0.0),
                ),
                (
                    a.monogamy_steer_residual.unwrap_or(0.0),
                    b.monogamy_steer_residual.unwrap_or(0.0),
                ),
            ];
            for (x, y) in pairs {
                worst = worst.max((x - y).abs());
            }
        }
    }
    l.within(
        "AC10",
        "resources under local phase rotations",
        worst,
        1e-10,
    );
}

fn main() {
    let mut report = Report::default();
    let criteria: [fn(&mut Report); 10] = [ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10];
    for ac in criteria {
        ac(&mut report);
    }
    report.finish();
}
