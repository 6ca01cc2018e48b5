//! Coarse steering-region map of the cavity-opto-magnomechanical platform.

use mo_resources::config::RunConfig;
use mo_resources::sweep::{region_table, run_region};

const CONFIG: &str = r#"{
  "system": "comm",
  "numeric": true,
  "times": {"t_end_in_tau": 1},
  "sweep": {
    "axis1": {"name": "kappa_a", "min": 2e-5, "max": 4e-4, "points": 6, "scale": "log"},
    "axis2": {"name": "kappa_c", "min": 2e-5, "max": 4e-4, "points": 6, "scale": "log"}
  }
}"#;

fn main() -> mo_resources::Result<()> {
    let cfg = RunConfig::from_json(CONFIG)?;
    let table = region_table(&cfg, &run_region(&cfg)?);
    table.write(&mut std::io::stdout().lock(), cfg.outputs.format)
}
