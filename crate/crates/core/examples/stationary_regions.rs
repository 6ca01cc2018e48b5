//! Stationary entanglement, steering and the steering-region label.

use mo_resources::closed_form::{stationary_entanglement, stationary_steering, steering_region};
use mo_resources::{Direction, EffectiveModel};

fn main() -> mo_resources::Result<()> {
    println!(
        "{:>6} {:>6} {:>9} {:>9} {:>9}  region",
        "k_a", "k_c", "E", "S_ac", "S_ca"
    );
    for ka in [0.25, 0.5, 1.0, 2.0] {
        for kc in [0.25, 0.5, 1.0, 2.0] {
            let m = EffectiveModel::new(1.0, ka, kc)?;
            println!(
                "{ka:>6} {kc:>6} {:>9.4} {:>9.4} {:>9.4}  {}",
                stationary_entanglement(&m),
                stationary_steering(&m, Direction::AtoC),
                stationary_steering(&m, Direction::CtoA),
                steering_region(&m).name()
            );
        }
    }
    Ok(())
}
