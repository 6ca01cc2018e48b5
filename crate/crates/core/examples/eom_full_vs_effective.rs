//! Full electro-optomechanical dynamics against the effective closed form.

use mo_resources::chain::reduce;
use mo_resources::dynamics::{analytic_effective_cm, characteristic_time, propagate_exact};
use mo_resources::systems::{eom_full_drift_diffusion, eom_to_chain, EomParams};
use mo_resources::{CovarianceMatrix, ResourceReport};

fn main() -> mo_resources::Result<()> {
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "g_a", "E_full", "E_eff", "S_full", "S_eff"
    );
    for g in [0.04, 0.08, 0.12, 0.16] {
        let p = EomParams {
            g_a: g,
            g_c: g,
            ..EomParams::default()
        };
        let m = reduce(&eom_to_chain(&p)?)?;
        let tau = characteristic_time(&m)?;
        let dd = eom_full_drift_diffusion(&p)?;
        let traj = propagate_exact(&dd, &CovarianceMatrix::vacuum(3), &[0.0, tau])?;
        let (_, v) = traj.last().expect("two samples");
        let full = ResourceReport::evaluate(v, None)?;
        let eff = ResourceReport::evaluate(&analytic_effective_cm(&m, tau)?, None)?;
        println!(
            "{g:>6} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            full.entanglement, eff.entanglement, full.steering_ab, eff.steering_ab
        );
    }
    Ok(())
}
