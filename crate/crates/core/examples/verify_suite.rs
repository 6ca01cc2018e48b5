//! Run the built-in verification suite and list any failing checks.

use mo_resources::verify::run_verify;

fn main() {
    let report = run_verify();
    print!("{report}");
    for c in report.failures() {
        eprintln!("failing: {} ({})", c.name, c.detail);
    }
}
