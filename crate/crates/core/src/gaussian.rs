//! Gaussian covariance matrices and the resource functionals evaluated on
//! them: logarithmic negativity, Gaussian steering and the monogamy
//! residuals of a single focus mode against the rest of the system.
//!
//! Quadrature ordering is fixed: mode `k` occupies rows/columns `2k` and
//! `2k + 1` as `(X_k, Y_k)` with `X = (o + o†)/√2`, `Y = (o − o†)/(i√2)`.
//! In this convention the vacuum is `I/2` and a state is physical when every
//! symplectic eigenvalue is at least `1/2`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::chain::RegimeLabel;
use crate::error::{Error, Result};

pub mod random;
pub mod two_mode;

/// Absolute slack allowed below `1/2` when testing physicality.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Relative round-off of the symplectic spectrum, in units of the largest
/// matrix entry.
pub const ROUNDOFF_REL: f64 = 1e-14;

/// Relative mismatch above which two moduli of the `Ωv` spectrum are not
/// accepted as a `±iν` pair.
const PAIRING_TOL: f64 = 1e-6;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

/// Symmetric `2M × 2M` matrix of quadrature second moments.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    data: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Builds a covariance matrix, symmetrizing the input as `(v + vᵀ)/2`.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "covariance matrix must be square with even dimension, got {rows}x{cols}"
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "covariance matrix has non-finite entries".into(),
            ));
        }
        let data = (&data + data.transpose()) * 0.5;
        Ok(Self { data })
    }

    pub fn from_row_slice(dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                values.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, values))
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            data: DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        }
    }

    /// Product of thermal states with the given mean occupations.
    pub fn thermal(occupations: &[f64]) -> Self {
        let diag: Vec<f64> = occupations
            .iter()
            .flat_map(|&n| [n + 0.5, n + 0.5])
            .collect();
        Self {
            data: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
        }
    }

    pub fn modes(&self) -> usize {
        self.data.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[(row, col)]
    }

    /// Reduced covariance matrix of `modes`, in the order given.
    pub fn submatrix(&self, modes: &[usize]) -> Result<Self> {
        self.check_modes(modes)?;
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let n = idx.len();
        let data = DMatrix::from_fn(n, n, |i, j| self.data[(idx[i], idx[j])]);
        Ok(Self { data })
    }

    /// The 2×2 block `(mode_row, mode_col)`.
    pub fn block(&self, mode_row: usize, mode_col: usize) -> [[f64; 2]; 2] {
        let (r, c) = (2 * mode_row, 2 * mode_col);
        [
            [self.data[(r, c)], self.data[(r, c + 1)]],
            [self.data[(r + 1, c)], self.data[(r + 1, c + 1)]],
        ]
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(self)
    }

    pub fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        Ok(symplectic_eigenvalues(self)?[0])
    }

    /// Slack allowed below `1/2`: `PHYSICALITY_TOL`, widened to the
    /// eigenvalue round-off `ROUNDOFF_REL · max|v_ij|` for large matrices.
    pub fn physicality_tolerance(&self) -> f64 {
        PHYSICALITY_TOL.max(ROUNDOFF_REL * self.data.amax())
    }

    pub fn is_physical(&self) -> Result<bool> {
        Ok(self.min_symplectic_eigenvalue()? >= 0.5 - self.physicality_tolerance())
    }

    /// Fails with [`Error::Unphysical`] unless every symplectic eigenvalue
    /// is at least `1/2` minus [`Self::physicality_tolerance`].
    pub fn ensure_physical(&self) -> Result<()> {
        let min = self.min_symplectic_eigenvalue()?;
        if min < 0.5 - self.physicality_tolerance() {
            return Err(Error::Unphysical {
                min_symplectic: min,
            });
        }
        Ok(())
    }

    fn check_modes(&self, modes: &[usize]) -> Result<()> {
        let m = self.modes();
        if let Some(&bad) = modes.iter().find(|&&k| k >= m) {
            return Err(Error::InvalidInput(format!(
                "mode index {bad} out of range for {m}-mode state"
            )));
        }
        for (i, a) in modes.iter().enumerate() {
            if modes[i + 1..].contains(a) {
                return Err(Error::InvalidInput(format!("mode {a} listed twice")));
            }
        }
        Ok(())
    }
}

/// Disjoint bipartition `left | right` of (a subset of) the modes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModePartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl ModePartition {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidInput(
                "both sides of a mode partition must be non-empty".into(),
            ));
        }
        if left.iter().any(|m| right.contains(m)) {
            return Err(Error::InvalidInput(
                "mode partition sides must be disjoint".into(),
            ));
        }
        Ok(Self { left, right })
    }

    /// `focus | every other mode` for an `modes`-mode system.
    pub fn one_vs_rest(focus: usize, modes: usize) -> Result<Self> {
        Self::new(vec![focus], (0..modes).filter(|&k| k != focus).collect())
    }

    pub fn pair(a: usize, b: usize) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }
}

/// Symplectic form `Ω = ⊕ [[0, 1], [−1, 0]]` on `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// `v^{1/2}` for a symmetric positive-definite `v`, `None` otherwise.
fn sqrt_positive_definite(v: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let eig = v.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
        return None;
    }
    let roots = eig.eigenvalues.map(f64::sqrt);
    let q = &eig.eigenvectors;
    Some(q * DMatrix::from_diagonal(&roots) * q.transpose())
}

/// Symplectic eigenvalues in ascending order.
///
/// These are the moduli of the eigenvalues of `Ωv`, which come in `±iν`
/// pairs; each pair is reported once. Positive-definite inputs go through
/// an SVD, anything else through a real Schur decomposition.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<Vec<f64>> {
    let modes = v.modes();
    if modes == 1 {
        // Ωv is 2×2 with eigenvalues ±i√det v.
        let d = v.data[(0, 0)] * v.data[(1, 1)] - v.data[(0, 1)] * v.data[(1, 0)];
        return Ok(vec![d.abs().sqrt()]);
    }
    let omega = symplectic_form(modes);
    let scale = v.data.amax().max(f64::MIN_POSITIVE);
    let mut moduli = match sqrt_positive_definite(&v.data) {
        // For v > 0, v^{1/2} Ω v^{1/2} is antisymmetric and similar to Ωv,
        // so its singular values are the moduli sought. SVD always converges.
        Some(root) => (&root * &omega * &root)
            .singular_values()
            .as_slice()
            .to_vec(),
        None => {
            let schur = (&omega * &v.data)
                .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
                .ok_or(Error::NonConvergence {
                    residual: f64::INFINITY,
                })?;
            schur
                .complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .collect()
        }
    };
    moduli.sort_by(f64::total_cmp);

    let mut out = Vec::with_capacity(modes);
    for pair in moduli.chunks_exact(2) {
        let mismatch = (pair[1] - pair[0]).abs();
        if mismatch > PAIRING_TOL * scale.max(pair[1]) {
            return Err(Error::NonConvergence { residual: mismatch });
        }
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}

/// Flips the sign of `Y_k` for every `k` in `flipped` (`P v P`).
pub fn partial_transpose(v: &CovarianceMatrix, flipped: &[usize]) -> Result<CovarianceMatrix> {
    if flipped.is_empty() {
        return Err(Error::InvalidInput(
            "partial transpose needs at least one mode".into(),
        ));
    }
    v.check_modes(flipped)?;
    let mut data = v.data.clone();
    for &k in flipped {
        let y = 2 * k + 1;
        data.row_mut(y).neg_mut();
        data.column_mut(y).neg_mut();
    }
    Ok(CovarianceMatrix { data })
}

/// Logarithmic negativity `max[0, −ln(2η⁻)]` across `partition`, where `η⁻`
/// is the smallest symplectic eigenvalue of the reduced state on
/// `left ∪ right` after partially transposing `left`.
pub fn log_negativity(v: &CovarianceMatrix, partition: &ModePartition) -> Result<f64> {
    let (reduced, n_left) = reduce_to(v, partition.left(), partition.right())?;
    reduced.ensure_physical()?;
    let flipped: Vec<usize> = (0..n_left).collect();
    let eta = partial_transpose(&reduced, &flipped)?.min_symplectic_eigenvalue()?;
    Ok((-(2.0 * eta).ln()).max(0.0))
}

/// Raw and clamped Gaussian steering quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Steering {
    pub raw: f64,
    pub clamped: f64,
}

impl Steering {
    pub fn from_raw(raw: f64) -> Self {
        Self {
            raw,
            clamped: raw.max(0.0),
        }
    }
}

/// Steering from the single mode `steerer` to the modes in `steered`,
/// `−ln(2μ)` with `μ` the smallest symplectic eigenvalue of the Schur
/// complement `v_B − v_aBᵀ v_a⁻¹ v_aB` of the reduced state.
pub fn gaussian_steering(
    v: &CovarianceMatrix,
    steerer: &[usize],
    steered: &[usize],
) -> Result<Steering> {
    if steerer.len() != 1 {
        return Err(Error::InvalidInput(
            "steering is only defined here for a single-mode steering party".into(),
        ));
    }
    if steered.is_empty() || steered.iter().any(|m| steerer.contains(m)) {
        return Err(Error::InvalidInput(
            "steered modes must be non-empty and disjoint from the steerer".into(),
        ));
    }
    let (reduced, _) = reduce_to(v, steerer, steered)?;
    reduced.ensure_physical()?;

    let d = reduced.dim();
    let va = reduced.data.view((0, 0), (2, 2)).clone_owned();
    let vab = reduced.data.view((0, 2), (2, d - 2)).clone_owned();
    let vb = reduced.data.view((2, 2), (d - 2, d - 2)).clone_owned();

    let eig = va.clone().symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition < 1e12) {
        return Err(Error::Singular {
            what: "steering-party",
            condition,
        });
    }
    let va_inv = va.try_inverse().ok_or(Error::Singular {
        what: "steering-party",
        condition,
    })?;
    let schur = vb - vab.transpose() * va_inv * vab;
    let mu = CovarianceMatrix::new(schur)?.min_symplectic_eigenvalue()?;
    Ok(Steering::from_raw(-(2.0 * mu).ln()))
}

/// Monogamy residuals of `focus` against the rest of the system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Monogamy {
    /// `E²_{f|rest} − Σ_j E²_{f,j}`.
    pub ent_residual: f64,
    /// `S_{f→rest} − Σ_j S_{f→j}`, clamped steering values.
    pub steer_residual: f64,
}

pub fn monogamy_residuals(v: &CovarianceMatrix, focus: usize) -> Result<Monogamy> {
    let m = v.modes();
    if m < 3 {
        return Err(Error::InvalidInput(format!(
            "monogamy needs at least three modes, got {m}"
        )));
    }
    if focus >= m {
        return Err(Error::InvalidInput(format!(
            "focus mode {focus} out of range for {m}-mode state"
        )));
    }
    let rest: Vec<usize> = (0..m).filter(|&k| k != focus).collect();
    let whole_e = log_negativity(v, &ModePartition::new(vec![focus], rest.clone())?)?;
    let whole_s = gaussian_steering(v, &[focus], &rest)?.clamped;

    let mut pair_e2 = 0.0;
    let mut pair_s = 0.0;
    for &j in &rest {
        let e = log_negativity(v, &ModePartition::pair(focus, j)?)?;
        pair_e2 += e * e;
        pair_s += gaussian_steering(v, &[focus], &[j])?.clamped;
    }
    Ok(Monogamy {
        ent_residual: whole_e * whole_e - pair_e2,
        steer_residual: whole_s - pair_s,
    })
}

/// Rotates the quadratures of `mode` by `angle` (a local phase shift
/// `o → o e^{−iθ}`), conjugating its rows and columns.
pub fn local_phase_rotate(
    v: &CovarianceMatrix,
    mode: usize,
    angle: f64,
) -> Result<CovarianceMatrix> {
    v.check_modes(&[mode])?;
    let (s, c) = angle.sin_cos();
    let mut rot = DMatrix::identity(v.dim(), v.dim());
    let k = 2 * mode;
    rot[(k, k)] = c;
    rot[(k, k + 1)] = s;
    rot[(k + 1, k)] = -s;
    rot[(k + 1, k + 1)] = c;
    CovarianceMatrix::new(&rot * &v.data * rot.transpose())
}

/// Reduced state on `first ++ second` and the number of modes in `first`.
fn reduce_to(
    v: &CovarianceMatrix,
    first: &[usize],
    second: &[usize],
) -> Result<(CovarianceMatrix, usize)> {
    let order: Vec<usize> = first.iter().chain(second).copied().collect();
    Ok((v.submatrix(&order)?, first.len()))
}

/// Entanglement, steering and monogamy of the pair `(0, 1)` of a state,
/// the microwave and optical modes in every builder of this crate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    pub entanglement: f64,
    pub steering_ab_raw: f64,
    pub steering_ba_raw: f64,
    pub steering_ab: f64,
    pub steering_ba: f64,
    /// `None` when the state does not come from an effective model.
    pub regime: Option<RegimeLabel>,
    pub monogamy_ent_residual: Option<f64>,
    pub monogamy_steer_residual: Option<f64>,
}

impl ResourceReport {
    pub fn evaluate(v: &CovarianceMatrix, regime: Option<RegimeLabel>) -> Result<Self> {
        let entanglement = log_negativity(v, &ModePartition::pair(0, 1)?)?;
        let ab = gaussian_steering(v, &[0], &[1])?;
        let ba = gaussian_steering(v, &[1], &[0])?;
        let monogamy = if v.modes() >= 3 {
            Some(monogamy_residuals(v, 0)?)
        } else {
            None
        };
        Ok(Self {
            entanglement,
            steering_ab_raw: ab.raw,
            steering_ba_raw: ba.raw,
            steering_ab: ab.clamped,
            steering_ba: ba.clamped,
            regime,
            monogamy_ent_residual: monogamy.map(|m| m.ent_residual),
            monogamy_steer_residual: monogamy.map(|m| m.steer_residual),
        })
    }

    pub fn regime_name(&self) -> &'static str {
        self.regime.map_or("NotApplicable", RegimeLabel::name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steady_cm() -> CovarianceMatrix {
        // κa = κc = 1, g = 0.5 stationary state.
        let (d, x) = (2.0 / 3.0, -1.0 / 3.0);
        CovarianceMatrix::from_row_slice(
            4,
            &[
                d, 0.0, 0.0, x, //
                0.0, d, x, 0.0, //
                0.0, x, d, 0.0, //
                x, 0.0, 0.0, d,
            ],
        )
        .unwrap()
    }

    #[test]
    fn vacuum_and_thermal_spectra() {
        let vac = symplectic_eigenvalues(&CovarianceMatrix::vacuum(2)).unwrap();
        assert!(vac.iter().all(|&nu| (nu - 0.5).abs() < 1e-14));

        let v = CovarianceMatrix::from_row_slice(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 2.0, 0.0, //
                0.0, 0.0, 0.0, 2.0,
            ],
        )
        .unwrap();
        let nu = symplectic_eigenvalues(&v).unwrap();
        assert!((nu[0] - 1.0).abs() < 1e-14 && (nu[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn constructor_symmetrizes_and_rejects_garbage() {
        let v = CovarianceMatrix::from_row_slice(2, &[1.0, 0.2, 0.0, 1.0]).unwrap();
        assert_eq!(v.get(0, 1), v.get(1, 0));
        assert_eq!(v.get(0, 1), 0.1);
        assert!(CovarianceMatrix::from_row_slice(2, &[1.0, f64::NAN, 0.0, 1.0]).is_err());
        assert!(CovarianceMatrix::new(DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let v = steady_cm();
        let twice = partial_transpose(&partial_transpose(&v, &[0]).unwrap(), &[0]).unwrap();
        assert_eq!(twice, v);
        let vac = CovarianceMatrix::vacuum(2);
        assert_eq!(partial_transpose(&vac, &[1]).unwrap(), vac);
        assert!(partial_transpose(&v, &[]).is_err());
        assert!(partial_transpose(&v, &[2]).is_err());
    }

    #[test]
    fn steady_state_negativity_matches_hand_value() {
        let v = steady_cm();
        let pt = partial_transpose(&v, &[0]).unwrap();
        let eta = pt.min_symplectic_eigenvalue().unwrap();
        assert!((eta - 1.0 / 3.0).abs() < 1e-12, "eta = {eta}");
        let e = log_negativity(&v, &ModePartition::pair(0, 1).unwrap()).unwrap();
        assert!((e - 1.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn product_states_carry_nothing() {
        let v = CovarianceMatrix::thermal(&[0.3, 2.0]);
        let p = ModePartition::pair(0, 1).unwrap();
        assert_eq!(log_negativity(&v, &p).unwrap(), 0.0);
        let s = gaussian_steering(&v, &[0], &[1]).unwrap();
        assert!(s.raw <= 0.0 && s.clamped == 0.0);
    }

    #[test]
    fn symmetric_decay_has_zero_steering() {
        let v = steady_cm();
        let ab = gaussian_steering(&v, &[0], &[1]).unwrap();
        let ba = gaussian_steering(&v, &[1], &[0]).unwrap();
        assert!(ab.raw.abs() < 1e-12 && ba.raw.abs() < 1e-12);
    }

    #[test]
    fn unphysical_input_is_rejected() {
        let v = CovarianceMatrix::from_row_slice(
            4,
            &[
                0.1, 0.0, 0.0, 0.0, //
                0.0, 0.1, 0.0, 0.0, //
                0.0, 0.0, 0.5, 0.0, //
                0.0, 0.0, 0.0, 0.5,
            ],
        )
        .unwrap();
        let p = ModePartition::pair(0, 1).unwrap();
        assert!(matches!(
            log_negativity(&v, &p),
            Err(Error::Unphysical { .. })
        ));
        assert!(matches!(
            gaussian_steering(&v, &[0], &[1]),
            Err(Error::Unphysical { .. })
        ));
    }

    #[test]
    fn partition_validation() {
        assert!(ModePartition::new(vec![], vec![1]).is_err());
        assert!(ModePartition::new(vec![0], vec![]).is_err());
        assert!(ModePartition::new(vec![0], vec![0, 1]).is_err());
        let p = ModePartition::one_vs_rest(1, 3).unwrap();
        assert_eq!(p.right(), &[0, 2]);
    }

    #[test]
    fn monogamy_of_vacuum_and_small_systems() {
        let m = monogamy_residuals(&CovarianceMatrix::vacuum(3), 0).unwrap();
        assert_eq!(m.ent_residual, 0.0);
        assert!(m.steer_residual.abs() < 1e-15);
        assert!(monogamy_residuals(&CovarianceMatrix::vacuum(2), 0).is_err());
    }

    #[test]
    fn phase_rotation_edge_angles() {
        let v = steady_cm();
        assert_eq!(local_phase_rotate(&v, 1, 0.0).unwrap(), v);
        let full = local_phase_rotate(&v, 0, 2.0 * std::f64::consts::PI).unwrap();
        assert!((full.matrix() - v.matrix()).amax() < 1e-12);
        assert!(local_phase_rotate(&v, 2, 0.3).is_err());
    }

    #[test]
    fn report_on_two_mode_state() {
        let r = ResourceReport::evaluate(&steady_cm(), Some(RegimeLabel::Steady)).unwrap();
        assert!((r.entanglement - 1.5f64.ln()).abs() < 1e-12);
        assert_eq!(r.monogamy_ent_residual, None);
        assert_eq!(r.regime_name(), "Steady");
        let r = ResourceReport::evaluate(&CovarianceMatrix::vacuum(3), None).unwrap();
        assert_eq!(r.regime_name(), "NotApplicable");
        assert!(r.monogamy_ent_residual.is_some());
    }
}
