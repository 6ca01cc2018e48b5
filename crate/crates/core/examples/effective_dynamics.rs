//! Closed-form time evolution of the two-cavity effective model.

use mo_resources::dynamics::{analytic_effective_cm, characteristic_time, uniform_grid};
use mo_resources::{EffectiveModel, ResourceReport};

fn main() -> mo_resources::Result<()> {
    for (g, ka, kc) in [(1.0, 0.5, 1.0), (1.0, 1.0, 0.5)] {
        let m = EffectiveModel::new(g, ka, kc)?;
        let tau = characteristic_time(&m)?;
        println!(
            "g={g} kappa_a={ka} kappa_c={kc} regime={} tau={tau:.4}",
            m.regime().name()
        );
        println!("{:>7} {:>10} {:>10} {:>10}", "t/tau", "E", "S_ac", "S_ca");
        for t in uniform_grid(2.0 * tau, 9) {
            let r = ResourceReport::evaluate(&analytic_effective_cm(&m, t)?, Some(m.regime()))?;
            println!(
                "{:>7.3} {:>10.5} {:>10.5} {:>10.5}",
                t / tau,
                r.entanglement,
                r.steering_ab,
                r.steering_ba
            );
        }
        println!();
    }
    Ok(())
}
