//! Covariance dynamics `dv/dt = A v + v Aᵀ + D`: the closed-form solution of
//! the effective model, RK4 and exact-step propagation for any drift and
//! diffusion pair, steady states and squeezing diagnostics.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chain::{classify_regime, EffectiveModel, RegimeLabel};
use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;

/// Upper bound on `‖A‖∞ h` for the series part of [`propagate_exact`].
const SERIES_NORM: f64 = 0.1;

/// Steps per fastest period when [`StepSize::Auto`] is used.
pub const AUTO_STEPS_PER_PERIOD: f64 = 200.0;

/// Largest accepted `‖Av + vAᵀ + D‖_max` for [`steady_state`].
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;

/// Drift and diffusion matrices of a linear Gaussian system.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftDiffusion {
    a: DMatrix<f64>,
    d: DMatrix<f64>,
}

impl DriftDiffusion {
    pub fn new(a: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || d.shape() != (n, n) || n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "drift {:?} and diffusion {:?} must be matching even square matrices",
                a.shape(),
                d.shape()
            )));
        }
        if a.iter().chain(d.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("drift/diffusion must be finite".into()));
        }
        let scale = d.amax().max(f64::MIN_POSITIVE);
        if (&d - d.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidInput(
                "diffusion matrix must be symmetric".into(),
            ));
        }
        let d = (&d + d.transpose()) * 0.5;
        if d.clone().symmetric_eigenvalues().min() < -1e-12 * scale {
            return Err(Error::InvalidInput(
                "diffusion matrix must be positive semidefinite".into(),
            ));
        }
        Ok(Self { a, d })
    }

    pub fn modes(&self) -> usize {
        self.a.nrows() / 2
    }

    pub fn drift(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn diffusion(&self) -> &DMatrix<f64> {
        &self.d
    }

    fn eigenvalues(&self) -> Result<Vec<nalgebra::Complex<f64>>> {
        let schur = self
            .a
            .clone()
            .try_schur(1e-15, 10_000)
            .ok_or(Error::NonConvergence {
                residual: f64::INFINITY,
            })?;
        Ok(schur.complex_eigenvalues().iter().copied().collect())
    }

    /// Largest real part of the eigenvalues of `A`.
    pub fn spectral_abscissa(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Largest eigenvalue modulus of `A`.
    pub fn spectral_radius(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    /// `A v + v Aᵀ + D` for symmetric `v`, written into `out`.
    fn rhs(&self, v: &DMatrix<f64>, work: &mut DMatrix<f64>, out: &mut DMatrix<f64>) {
        work.gemm(1.0, &self.a, v, 0.0);
        let n = v.nrows();
        for j in 0..n {
            for i in 0..n {
                out[(i, j)] = work[(i, j)] + work[(j, i)] + self.d[(i, j)];
            }
        }
    }

    /// `‖A v + v Aᵀ + D‖_max`.
    pub fn residual(&self, v: &CovarianceMatrix) -> f64 {
        let m = v.matrix();
        (&self.a * m + m * self.a.transpose() + &self.d).amax()
    }
}

/// Drift and diffusion of the effective two-mode squeezing model.
pub fn build_effective_drift_diffusion(m: &EffectiveModel) -> DriftDiffusion {
    let (g, ka, kc) = (m.g_eff, m.kappa_a, m.kappa_c);
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(4, 4, &[
        -ka, 0.0, 0.0, -g,
        0.0, -ka, -g, 0.0,
        0.0, -g, -kc, 0.0,
        -g, 0.0, 0.0, -kc,
    ]);
    let da = ka * (2.0 * m.n_a + 1.0);
    let dc = kc * (2.0 * m.n_c + 1.0);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![da, da, dc, dc]));
    DriftDiffusion { a, d }
}

/// Constants of the closed-form effective covariance matrix.
///
/// They are computed for `|g_eff|`; [`analytic_effective_cm`] restores the
/// sign on the cross-correlation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalyticConstants {
    pub omega: f64,
    pub varphi: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `sign(g_eff)`, `+1` for zero coupling.
    pub sign: f64,
}

impl AnalyticConstants {
    pub fn new(m: &EffectiveModel) -> Result<Self> {
        m.validate()?;
        if classify_regime(m) == RegimeLabel::Critical {
            return Err(Error::CriticalPole);
        }
        let (ka, kc) = (m.kappa_a, m.kappa_c);
        let g = m.g_eff.abs();
        let (sum, diff) = (ka + kc, ka - kc);
        let omega = (4.0 * g * g + diff * diff).sqrt();
        let varphi = diff.atan2(2.0 * g);
        let num = omega - diff * varphi.sin();
        let c3 = g * ka * kc / (sum * (g * g - ka * kc));
        Ok(Self {
            omega,
            varphi,
            c_plus: num / (4.0 * (omega - sum)),
            c_minus: num / (4.0 * (omega + sum)),
            c0: varphi.cos().powi(2) * diff / (2.0 * sum),
            c1: 0.5 - g * c3 / ka,
            c2: 0.5 - g * c3 / kc,
            c3,
            sign: if m.g_eff < 0.0 { -1.0 } else { 1.0 },
        })
    }
}

fn require_vacuum_baths(m: &EffectiveModel) -> Result<()> {
    if m.n_a != 0.0 || m.n_c != 0.0 {
        return Err(Error::InvalidInput(
            "closed-form effective dynamics assume vacuum baths (n_a = n_c = 0)".into(),
        ));
    }
    Ok(())
}

/// Relative distance `|g² − κaκc| / κaκc` below which the closed-form CM
/// loses digits to the pole in `c3`; callers should integrate instead.
pub const ANALYTIC_MIN_CRITICAL_GAP: f64 = 1e-2;

/// Vacuum baths and far enough from the critical pole for the closed-form
/// CM to be accurate to round-off.
pub fn analytic_applies(m: &EffectiveModel) -> bool {
    let kk = m.kappa_a * m.kappa_c;
    m.n_a == 0.0 && m.n_c == 0.0 && (m.g_eff * m.g_eff - kk).abs() > ANALYTIC_MIN_CRITICAL_GAP * kk
}

/// Closed-form `v(t)` of the effective model from the vacuum.
pub fn analytic_effective_cm(m: &EffectiveModel, t: f64) -> Result<CovarianceMatrix> {
    require_vacuum_baths(m)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "time must be non-negative, got {t}"
        )));
    }
    if m.g_eff == 0.0 {
        m.validate()?;
        return Ok(CovarianceMatrix::vacuum(2));
    }
    let k = AnalyticConstants::new(m)?;
    let sum = m.kappa_a + m.kappa_c;
    let em = (-(k.omega + sum) * t).exp();
    let e0 = (-sum * t).exp();
    let ep = ((k.omega - sum) * t).exp();
    let (s, c) = k.varphi.sin_cos();
    // c0·tanφ without dividing by cos φ.
    let c0_tan = s * c * (m.kappa_a - m.kappa_c) / (2.0 * sum);

    let v11 = (1.0 + s) * k.c_minus * em - k.c0 * e0 + (1.0 - s) * k.c_plus * ep + k.c1;
    let v44 = (1.0 - s) * k.c_minus * em + k.c0 * e0 + (1.0 + s) * k.c_plus * ep + k.c2;
    let v14 = k.sign * (c * k.c_minus * em + c0_tan * e0 - c * k.c_plus * ep + k.c3);
    if !(v11.is_finite() && v44.is_finite() && v14.is_finite()) {
        return Err(Error::Overflow {
            last_valid_time: f64::NAN,
        });
    }
    #[rustfmt::skip]
    let data = [
        v11, 0.0, 0.0, v14,
        0.0, v11, v14, 0.0,
        0.0, v14, v44, 0.0,
        v14, 0.0, 0.0, v44,
    ];
    CovarianceMatrix::from_row_slice(4, &data)
}

/// Sampled covariance trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CovarianceMatrix>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &CovarianceMatrix)> {
        Some((*self.times.last()?, self.states.last()?))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &CovarianceMatrix)> {
        self.times.iter().copied().zip(&self.states)
    }
}

/// `samples` evenly spaced times on `[0, t_end]`.
pub fn uniform_grid(t_end: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => vec![],
        1 => vec![t_end],
        n => (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSize {
    /// `h = T_fast / 200` with `T_fast = 2π / max(ρ(A), 1)`.
    Auto,
    Fixed(f64),
}

impl StepSize {
    pub fn resolve(self, dd: &DriftDiffusion) -> Result<f64> {
        match self {
            Self::Fixed(h) if h > 0.0 && h.is_finite() => Ok(h),
            Self::Fixed(h) => Err(Error::InvalidInput(format!("invalid step size {h}"))),
            Self::Auto => {
                let fastest = dd.spectral_radius()?.max(1.0);
                Ok(2.0 * PI / fastest / AUTO_STEPS_PER_PERIOD)
            }
        }
    }
}

fn check_grid(dd: &DriftDiffusion, v0: &CovarianceMatrix, grid: &[f64]) -> Result<()> {
    if v0.dim() != dd.a.nrows() {
        return Err(Error::InvalidInput(format!(
            "initial state has {} modes, system has {}",
            v0.modes(),
            dd.modes()
        )));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput(
            "time grid must be finite and ascending".into(),
        ));
    }
    if grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidInput("time grid must start at t >= 0".into()));
    }
    Ok(())
}

/// `y += a x`.
fn axpy(y: &mut DMatrix<f64>, a: f64, x: &DMatrix<f64>) {
    y.zip_apply(x, |yi, xi| *yi += a * xi);
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..j {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Classical fourth-order Runge–Kutta on the matrix equation, starting from
/// `v0` at `t = 0` and recording the state at every grid time.
pub fn lyapunov_rk4(
    dd: &DriftDiffusion,
    v0: &CovarianceMatrix,
    grid: &[f64],
    step: StepSize,
) -> Result<Trajectory> {
    check_grid(dd, v0, grid)?;
    let h_max = step.resolve(dd)?;
    let n = v0.dim();
    let mut v = v0.matrix().clone();
    let mut work = DMatrix::zeros(n, n);
    let mut stage = DMatrix::zeros(n, n);
    let mut k = [
        DMatrix::zeros(n, n),
        DMatrix::zeros(n, n),
        DMatrix::zeros(n, n),
        DMatrix::zeros(n, n),
    ];

    let mut t = 0.0;
    let mut states = Vec::with_capacity(grid.len());
    for &target in grid {
        let span = target - t;
        let steps = (span / h_max).ceil() as usize;
        if steps > 0 {
            let h = span / steps as f64;
            for _ in 0..steps {
                let [k1, k2, k3, k4] = &mut k;
                dd.rhs(&v, &mut work, k1);
                stage.copy_from(&v);
                axpy(&mut stage, 0.5 * h, k1);
                dd.rhs(&stage, &mut work, k2);
                stage.copy_from(&v);
                axpy(&mut stage, 0.5 * h, k2);
                dd.rhs(&stage, &mut work, k3);
                stage.copy_from(&v);
                axpy(&mut stage, h, k3);
                dd.rhs(&stage, &mut work, k4);

                axpy(&mut v, h / 6.0, k1);
                axpy(&mut v, h / 3.0, k2);
                axpy(&mut v, h / 3.0, k3);
                axpy(&mut v, h / 6.0, k4);
                symmetrize(&mut v);
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Overflow { last_valid_time: t });
                }
                t += h;
            }
        }
        t = target;
        states.push(CovarianceMatrix::new(v.clone())?);
    }
    Ok(Trajectory {
        times: grid.to_vec(),
        states,
    })
}

/// Transition pair `(Φ, Q)` for a step of length `dt`: the exact solution
/// maps `v` to `Φ v Φᵀ + Q`.
fn exact_step(dd: &DriftDiffusion, dt: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = dd.a.nrows();
    let norm =
        dd.a.row_iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max);
    let mut doublings = 0;
    let mut h = dt;
    while norm * h > SERIES_NORM {
        h *= 0.5;
        doublings += 1;
    }

    // Φ_h = Σ (Ah)^k/k!,  Q_h = Σ h^{k+1}/(k+1)! L^k(D) with L(X) = AX + XAᵀ.
    let mut phi = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    let mut q = &dd.d * h;
    let mut lk = dd.d.clone();
    let mut coeff = h;
    for k in 1..=30 {
        term = (&term * &dd.a) * (h / k as f64);
        phi += &term;
        lk = &dd.a * &lk + &lk * dd.a.transpose();
        coeff *= h / (k + 1) as f64;
        let q_term = &lk * coeff;
        q += &q_term;
        if term.amax() < 1e-18 * phi.amax() && q_term.amax() <= 1e-18 * q.amax() {
            break;
        }
    }
    for _ in 0..doublings {
        q = &phi * &q * phi.transpose() + &q;
        phi = &phi * &phi;
        symmetrize(&mut q);
    }
    (phi, q)
}

/// Exact propagation over each grid interval by scaling and squaring of the
/// transition pair. Intended for long horizons where RK4 would need millions
/// of steps.
pub fn propagate_exact(
    dd: &DriftDiffusion,
    v0: &CovarianceMatrix,
    grid: &[f64],
) -> Result<Trajectory> {
    check_grid(dd, v0, grid)?;
    let mut v = v0.matrix().clone();
    let mut t = 0.0;
    let mut cached: Option<(f64, DMatrix<f64>, DMatrix<f64>)> = None;
    let mut states = Vec::with_capacity(grid.len());
    for &target in grid {
        let dt = target - t;
        if dt > 0.0 {
            let reuse = cached
                .as_ref()
                .is_some_and(|(h, _, _)| (h - dt).abs() <= 1e-12 * dt);
            if !reuse {
                let (phi, q) = exact_step(dd, dt);
                cached = Some((dt, phi, q));
            }
            let (_, phi, q) = cached.as_ref().expect("populated above");
            let mut next = phi * &v * phi.transpose() + q;
            symmetrize(&mut next);
            if next.iter().any(|x| !x.is_finite()) {
                return Err(Error::Overflow { last_valid_time: t });
            }
            v = next;
        }
        t = target;
        states.push(CovarianceMatrix::new(v.clone())?);
    }
    Ok(Trajectory {
        times: grid.to_vec(),
        states,
    })
}

/// Numerical propagation scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Rk4(StepSize),
    #[default]
    Exact,
}

pub fn propagate(
    dd: &DriftDiffusion,
    v0: &CovarianceMatrix,
    grid: &[f64],
    integrator: Integrator,
) -> Result<Trajectory> {
    match integrator {
        Integrator::Rk4(step) => lyapunov_rk4(dd, v0, grid, step),
        Integrator::Exact => propagate_exact(dd, v0, grid),
    }
}

/// Stationary solution of `A v + v Aᵀ + D = 0`.
pub fn steady_state(dd: &DriftDiffusion) -> Result<CovarianceMatrix> {
    let abscissa = dd.spectral_abscissa()?;
    if abscissa >= 0.0 {
        return Err(Error::Unstable { abscissa });
    }
    let n = dd.a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    // Column-major vec: vec(AV) = (I⊗A) vec V, vec(VAᵀ) = (A⊗I) vec V.
    let op = id.kronecker(&dd.a) + dd.a.kronecker(&id);
    let rhs = nalgebra::DVector::from_iterator(n * n, dd.d.iter().map(|x| -x));
    let lu = op.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::Singular {
        what: "Lyapunov operator",
        condition: f64::INFINITY,
    })?;
    // One round of iterative refinement.
    let r = &rhs - &op * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let v = CovarianceMatrix::new(DMatrix::from_column_slice(n, n, x.as_slice()))?;
    let residual = dd.residual(&v);
    if residual > STEADY_RESIDUAL_TOL {
        return Err(Error::NonConvergence { residual });
    }
    Ok(v)
}

/// `τ = 4π/(Ω + κa + κc)`.
pub fn characteristic_time(m: &EffectiveModel) -> Result<f64> {
    let g = m.g_eff;
    let omega = (4.0 * g * g + (m.kappa_a - m.kappa_c).powi(2)).sqrt();
    let denom = omega + m.kappa_a + m.kappa_c;
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::InvalidInput(
            "characteristic time needs a non-zero coupling or decay rate".into(),
        ));
    }
    Ok(4.0 * PI / denom)
}

/// Variances of the rotated quadratures and their correlation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqueezeVariances {
    pub dx: f64,
    pub dy: f64,
    pub xy: f64,
}

/// Asymptotic squeezing diagnostics of the effective model. `dx` and `dy`
/// are exact for all `t`; `xy` matches the rotated correlation only once the
/// `e^{−(κa+κc)t}` transient has decayed.
pub fn squeeze_variances(m: &EffectiveModel, t: f64) -> Result<SqueezeVariances> {
    require_vacuum_baths(m)?;
    let k = AnalyticConstants::new(m)?;
    let sum = m.kappa_a + m.kappa_c;
    Ok(SqueezeVariances {
        dx: 0.5 + 2.0 * k.c_minus * (-(k.omega + sum) * t).exp() - 2.0 * k.c_minus,
        dy: 0.5 + 2.0 * k.c_plus * ((k.omega - sum) * t).exp() - 2.0 * k.c_plus,
        xy: k.c0 / k.varphi.cos() * (1.0 + (-sum * t).exp()),
    })
}

/// `ζ = (v11 + v44)(1 − √(1 + 4(v14² − v11 v44)/(v11 + v44)²))`, twice the
/// smallest eigenvalue of the `(X_a, Y_c)` block of a two-mode state.
pub fn squeeze_combination(v: &CovarianceMatrix) -> f64 {
    let (v11, v44, v14) = (v.get(0, 0), v.get(3, 3), v.get(0, 3));
    let s = v11 + v44;
    s - ((v11 - v44).powi(2) + 4.0 * v14 * v14).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(g: f64, ka: f64, kc: f64) -> EffectiveModel {
        EffectiveModel::new(g, ka, kc).unwrap()
    }

    #[test]
    fn drift_examples() {
        let dd = build_effective_drift_diffusion(&model(0.0, 1.0, 1.0));
        assert_eq!(dd.drift(), &(-DMatrix::<f64>::identity(4, 4)));
        assert_eq!(dd.diffusion(), &DMatrix::<f64>::identity(4, 4));
        let ss = steady_state(&dd).unwrap();
        assert!((ss.matrix() - CovarianceMatrix::vacuum(2).matrix()).amax() < 1e-14);

        let dd = build_effective_drift_diffusion(&model(1.0, 0.5, 1.0));
        let expected = (4.25f64.sqrt() - 1.5) / 2.0;
        assert!((dd.spectral_abscissa().unwrap() - expected).abs() < 1e-12);
        assert!(matches!(steady_state(&dd), Err(Error::Unstable { .. })));

        let hot = EffectiveModel::with_thermal(0.1, 0.5, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(
            build_effective_drift_diffusion(&hot).diffusion()[(0, 0)],
            1.5
        );
    }

    #[test]
    fn analytic_initial_value_is_vacuum() {
        for (g, ka, kc) in [
            (0.5, 1.0, 1.0),
            (1.0, 0.5, 1.0),
            (-0.3, 2.0, 0.7),
            (2.0f64.sqrt(), 0.5, 1.0),
        ] {
            let v = analytic_effective_cm(&model(g, ka, kc), 0.0).unwrap();
            let err = (v.matrix() - CovarianceMatrix::vacuum(2).matrix()).amax();
            assert!(err < 1e-12, "g={g} err={err}");
        }
    }

    #[test]
    fn analytic_steady_limit() {
        let v = analytic_effective_cm(&model(0.5, 1.0, 1.0), 40.0).unwrap();
        assert!((v.get(0, 0) - 2.0 / 3.0).abs() < 1e-10);
        assert!((v.get(3, 3) - 2.0 / 3.0).abs() < 1e-10);
        assert!((v.get(0, 3).abs() - 1.0 / 3.0).abs() < 1e-10);
        let ss = steady_state(&build_effective_drift_diffusion(&model(0.5, 1.0, 1.0))).unwrap();
        assert!((ss.matrix() - v.matrix()).amax() < 1e-10);
    }

    #[test]
    fn analytic_rejects_critical_and_thermal() {
        let m = model(0.5f64.sqrt(), 0.5, 1.0);
        assert!(matches!(
            analytic_effective_cm(&m, 1.0),
            Err(Error::CriticalPole)
        ));
        let hot = EffectiveModel::with_thermal(0.1, 0.5, 1.0, 1.0, 0.0).unwrap();
        assert!(analytic_effective_cm(&hot, 1.0).is_err());
    }

    #[test]
    fn rk4_thermal_decay() {
        let dd = build_effective_drift_diffusion(&model(0.0, 1.0, 1.0));
        let v0 = CovarianceMatrix::new(DMatrix::identity(4, 4)).unwrap();
        let grid = uniform_grid(2.0, 5);
        let traj = lyapunov_rk4(&dd, &v0, &grid, StepSize::Fixed(1e-3)).unwrap();
        for (t, v) in traj.iter() {
            let want = 0.5 + 0.5 * (-2.0 * t).exp();
            assert!((v.get(0, 0) - want).abs() < 1e-12);
            assert!(v.get(0, 1).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_propagation_matches_analytic() {
        for g in [0.5, 1.0, -1.0] {
            let m = model(g, 0.5, 1.0);
            let dd = build_effective_drift_diffusion(&m);
            let tau = characteristic_time(&m).unwrap();
            let grid = uniform_grid(2.0 * tau, 9);
            let traj = propagate_exact(&dd, &CovarianceMatrix::vacuum(2), &grid).unwrap();
            for (t, v) in traj.iter() {
                let a = analytic_effective_cm(&m, t).unwrap();
                let scale = a.matrix().amax();
                assert!(
                    (v.matrix() - a.matrix()).amax() < 1e-10 * scale,
                    "g={g} t={t}"
                );
            }
        }
    }

    #[test]
    fn characteristic_time_examples() {
        let tau = characteristic_time(&model(1.0, 0.5, 1.0)).unwrap();
        assert!((tau - 4.0 * PI / (4.25f64.sqrt() + 1.5)).abs() < 1e-12);
        assert!((tau - 3.5284).abs() < 1e-4);
        let tau0 = characteristic_time(&model(0.0, 0.5, 1.0)).unwrap();
        assert!((tau0 - 2.0 * PI).abs() < 1e-12);
        let fast = characteristic_time(&model(10.0, 5.0, 10.0)).unwrap();
        assert!((fast - tau / 10.0).abs() < 1e-12);
    }

    #[test]
    fn squeeze_examples() {
        let m = model(2.0f64.sqrt(), 0.5, 1.0);
        let k = AnalyticConstants::new(&m).unwrap();
        let at0 = squeeze_variances(&m, 0.0).unwrap();
        assert!((at0.dx - 0.5).abs() < 1e-15 && (at0.dy - 0.5).abs() < 1e-15);
        assert!((at0.xy - 2.0 * k.c0 / k.varphi.cos()).abs() < 1e-15);
        let late = squeeze_variances(&m, 200.0).unwrap();
        assert!((late.dx - 0.18148).abs() < 1e-5);
        let mut prev = 0.0;
        for i in 0..20 {
            let dy = squeeze_variances(&m, i as f64 * 0.5).unwrap().dy;
            assert!(dy > prev);
            prev = dy;
        }
    }

    #[test]
    fn diffusion_validation() {
        let a = DMatrix::identity(2, 2);
        assert!(DriftDiffusion::new(a.clone(), -DMatrix::identity(2, 2)).is_err());
        assert!(DriftDiffusion::new(
            a.clone(),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0])
        )
        .is_err());
        assert!(DriftDiffusion::new(a, DMatrix::identity(4, 4)).is_err());
    }
}
