//! EPR-type quadrature variances of the effective model.

use mo_resources::dynamics::{
    analytic_effective_cm, characteristic_time, squeeze_combination, squeeze_variances,
    uniform_grid,
};
use mo_resources::EffectiveModel;

fn main() -> mo_resources::Result<()> {
    let m = EffectiveModel::new(1.0, 0.5, 1.0)?;
    let tau = characteristic_time(&m)?;
    println!("{:>7} {:>10} {:>10} {:>10}", "t/tau", "dX", "dY", "zeta");
    for t in uniform_grid(3.0 * tau, 7) {
        let s = squeeze_variances(&m, t)?;
        let zeta = squeeze_combination(&analytic_effective_cm(&m, t)?);
        println!(
            "{:>7.2} {:>10.5} {:>10.5} {:>10.5}",
            t / tau,
            s.dx,
            s.dy,
            zeta
        );
    }
    Ok(())
}
