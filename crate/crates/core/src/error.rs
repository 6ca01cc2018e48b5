use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unphysical covariance matrix: minimum symplectic eigenvalue {min_symplectic} < 1/2")]
    Unphysical { min_symplectic: f64 },

    #[error("eigenvalue iteration failed to converge (residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("singular {what} block (condition number {condition:e})")]
    Singular { what: &'static str, condition: f64 },

    #[error("resonant denominator in {what}: |gap| = {gap:e}")]
    Resonance { what: String, gap: f64 },

    #[error(
        "analytic covariance matrix has a pole at g_eff^2 = kappa_a*kappa_c \
         (critical regime); integrate numerically instead"
    )]
    CriticalPole,

    #[error("steady state undefined: drift matrix has spectral abscissa {abscissa:e} >= 0")]
    Unstable { abscissa: f64 },

    #[error("integration produced non-finite values; last valid time {last_valid_time}")]
    Overflow { last_valid_time: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
