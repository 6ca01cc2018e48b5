//! How the entanglement of cavity a is shared across the four COMM modes.

use mo_resources::chain::reduce;
use mo_resources::dynamics::{characteristic_time, propagate_exact};
use mo_resources::gaussian::{log_negativity, monogamy_residuals};
use mo_resources::systems::{comm_full_drift_diffusion, comm_to_chain, CommParams};
use mo_resources::{CovarianceMatrix, ModePartition};

fn main() -> mo_resources::Result<()> {
    let p = CommParams::default();
    let tau = characteristic_time(&reduce(&comm_to_chain(&p)?)?)?;
    let dd = comm_full_drift_diffusion(&p)?;
    let traj = propagate_exact(&dd, &CovarianceMatrix::vacuum(4), &[0.0, tau])?;
    let (_, v) = traj.last().expect("two samples");
    let rest = ModePartition::one_vs_rest(0, 4)?;
    println!("E_a|rest = {:.6}", log_negativity(v, &rest)?);
    for (j, name) in [(1, "c"), (2, "m"), (3, "b")] {
        println!(
            "E_a{name}     = {:.6}",
            log_negativity(v, &ModePartition::pair(0, j)?)?
        );
    }
    let r = monogamy_residuals(v, 0)?;
    println!("entanglement residual = {:.3e}", r.ent_residual);
    println!("steering residual     = {:.3e}", r.steer_residual);
    Ok(())
}
