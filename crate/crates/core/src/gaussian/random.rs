//! Random physical covariance matrices `S diag(ν) Sᵀ` with `ν ≥ 1/2` and
//! `S` a product of random passive and squeezing symplectic maps.

use nalgebra::DMatrix;
use rand::Rng;

use super::CovarianceMatrix;

/// Bounds on the random state generator.
#[derive(Clone, Copy, Debug)]
pub struct RandomStateSpec {
    /// Largest single- or two-mode squeezing parameter.
    pub max_squeeze: f64,
    /// Largest symplectic eigenvalue of the underlying thermal state.
    pub max_nu: f64,
}

impl Default for RandomStateSpec {
    fn default() -> Self {
        Self {
            max_squeeze: 1.0,
            max_nu: 3.0,
        }
    }
}

fn local<R: Rng + ?Sized>(rng: &mut R, modes: usize, spec: &RandomStateSpec) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * modes, 2 * modes);
    for k in 0..modes {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r: f64 = rng.random_range(-spec.max_squeeze..=spec.max_squeeze);
        let (sn, cs) = theta.sin_cos();
        let i = 2 * k;
        s[(i, i)] = cs * (-r).exp();
        s[(i, i + 1)] = sn * (-r).exp();
        s[(i + 1, i)] = -sn * r.exp();
        s[(i + 1, i + 1)] = cs * r.exp();
    }
    s
}

fn pair<R: Rng + ?Sized>(
    rng: &mut R,
    modes: usize,
    a: usize,
    b: usize,
    spec: &RandomStateSpec,
) -> DMatrix<f64> {
    let mut bs = DMatrix::identity(2 * modes, 2 * modes);
    let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let (sn, cs) = angle.sin_cos();
    let mut tms = DMatrix::identity(2 * modes, 2 * modes);
    let r: f64 = rng.random_range(0.0..=spec.max_squeeze);
    let (ch, sh) = (r.cosh(), r.sinh());
    for q in 0..2 {
        let (i, j) = (2 * a + q, 2 * b + q);
        bs[(i, i)] = cs;
        bs[(j, j)] = cs;
        bs[(i, j)] = sn;
        bs[(j, i)] = -sn;
        let sign = if q == 0 { 1.0 } else { -1.0 };
        tms[(i, i)] = ch;
        tms[(j, j)] = ch;
        tms[(i, j)] = sign * sh;
        tms[(j, i)] = sign * sh;
    }
    tms * bs
}

/// Random symplectic matrix on `modes` modes.
pub fn random_symplectic<R: Rng + ?Sized>(
    rng: &mut R,
    modes: usize,
    spec: &RandomStateSpec,
) -> DMatrix<f64> {
    let mut s = local(rng, modes, spec);
    for a in 0..modes {
        for b in a + 1..modes {
            s = pair(rng, modes, a, b, spec) * s;
        }
    }
    local(rng, modes, spec) * s
}

/// Random physical state on `modes` modes.
pub fn random_physical_cm<R: Rng + ?Sized>(
    rng: &mut R,
    modes: usize,
    spec: &RandomStateSpec,
) -> CovarianceMatrix {
    let s = random_symplectic(rng, modes, spec);
    let nus: Vec<f64> = (0..modes)
        .map(|_| rng.random_range(0.5..=spec.max_nu.max(0.5)))
        .collect();
    let thermal = CovarianceMatrix::thermal(&nus.iter().map(|nu| nu - 0.5).collect::<Vec<_>>());
    CovarianceMatrix::new(&s * thermal.matrix() * s.transpose())
        .expect("finite product of finite matrices")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::symplectic_form;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_maps_are_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for modes in 1..=4 {
            let s = random_symplectic(&mut rng, modes, &RandomStateSpec::default());
            let omega = symplectic_form(modes);
            let err = (&s * &omega * s.transpose() - &omega).amax();
            assert!(err < 1e-10, "modes={modes} err={err}");
        }
    }

    #[test]
    fn generated_states_are_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let v = random_physical_cm(&mut rng, 3, &RandomStateSpec::default());
            assert!(v.is_physical().unwrap());
        }
    }
}
