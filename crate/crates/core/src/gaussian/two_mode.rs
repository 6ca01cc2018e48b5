//! Closed-form invariants of two-mode states, kept as an independent check
//! on the general symplectic routines.
//!
//! With `v = [[v_a, v_ac], [v_acᵀ, v_c]]` and `Δ = det v_a + det v_c + 2 det v_ac`
//! the symplectic eigenvalues are `ν± = √[(Δ ± √(Δ² − 4 det v))/2]`. Partial
//! transposition flips the sign of `det v_ac`.

use nalgebra::Matrix2;

use super::CovarianceMatrix;
use crate::error::{Error, Result};

/// `(det v_a, det v_c, det v_ac, det v)`.
pub fn invariants(v: &CovarianceMatrix) -> Result<(f64, f64, f64, f64)> {
    if v.modes() != 2 {
        return Err(Error::InvalidInput(format!(
            "two-mode formula applied to a {}-mode state",
            v.modes()
        )));
    }
    let block = |r, c| {
        let b = v.block(r, c);
        Matrix2::new(b[0][0], b[0][1], b[1][0], b[1][1]).determinant()
    };
    Ok((
        block(0, 0),
        block(1, 1),
        block(0, 1),
        v.matrix().determinant(),
    ))
}

fn roots(sum: f64, det: f64) -> (f64, f64) {
    let disc = (sum * sum - 4.0 * det).max(0.0).sqrt();
    (
        ((sum - disc) / 2.0).max(0.0).sqrt(),
        ((sum + disc) / 2.0).sqrt(),
    )
}

/// `(ν−, ν+)`.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<(f64, f64)> {
    let (da, dc, dac, d) = invariants(v)?;
    Ok(roots(da + dc + 2.0 * dac, d))
}

/// Smallest symplectic eigenvalue `η⁻` of the partial transpose.
pub fn min_pt_eigenvalue(v: &CovarianceMatrix) -> Result<f64> {
    let (da, dc, dac, d) = invariants(v)?;
    Ok(roots(da + dc - 2.0 * dac, d).0)
}

pub fn log_negativity(v: &CovarianceMatrix) -> Result<f64> {
    Ok((-(2.0 * min_pt_eigenvalue(v)?).ln()).max(0.0))
}

/// Unclamped `(S_{0→1}, S_{1→0})` from `½ ln[det v_x / (4 det v)]`.
pub fn steering_raw(v: &CovarianceMatrix) -> Result<(f64, f64)> {
    let (da, dc, _, d) = invariants(v)?;
    Ok((0.5 * (da / (4.0 * d)).ln(), 0.5 * (dc / (4.0 * d)).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_invariants() {
        let v = CovarianceMatrix::vacuum(2);
        let (lo, hi) = symplectic_eigenvalues(&v).unwrap();
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        assert!((min_pt_eigenvalue(&v).unwrap() - 0.5).abs() < 1e-15);
        let (ab, ba) = steering_raw(&v).unwrap();
        assert!(ab.abs() < 1e-15 && ba.abs() < 1e-15);
    }

    #[test]
    fn rejects_other_mode_counts() {
        assert!(invariants(&CovarianceMatrix::vacuum(3)).is_err());
    }
}
