//! Reduce a chain of far-detuned intermediaries to an effective two-cavity model.

use mo_resources::chain::{
    effective_coupling, energy_shift, matched_detunings, reduce, validity_report,
};
use mo_resources::ChainParams;

fn main() -> mo_resources::Result<()> {
    let mut p = ChainParams {
        delta_a: 5.0,
        delta_c: -5.0,
        omegas: vec![1.0, 1.2, 0.9],
        g_a: 0.1,
        g_c: 0.1,
        g_mid: vec![0.05, 0.05],
        theta: 0.3,
        phi: 0.0,
        kappa_a: 1e-3,
        kappa_c: 1e-3,
        kappa_mid: vec![1e-6; 3],
        n_a: 0.0,
        n_c: 0.0,
        n_mid: vec![0.0; 3],
    };
    let (_, delta_c) = matched_detunings(&p)?;
    p.delta_c = delta_c;
    println!("matched delta_c = {delta_c:.9}");
    println!("energy shift    = {:.3e}", energy_shift(&p)?);
    println!("g_eff           = {:.6e}", effective_coupling(&p)?);
    let report = validity_report(&p, 0.2);
    let worst = report
        .iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .expect("non-empty report");
    let ok = report.iter().filter(|v| v.pass).count();
    println!("validity: {ok} of {} ratios below 0.2", report.len());
    println!("  worst {} = {:.3e}", worst.name, worst.value);
    let m = reduce(&p)?;
    println!("effective regime: {}", m.regime().name());
    Ok(())
}
