//! Prepare the Rydberg ground state from |00> with GRAPE.

use motzkin_rydberg::config::RunConfig;
use motzkin_rydberg::grape::prepare_ground_state;

fn main() -> motzkin_rydberg::Result<()> {
    let cfg = RunConfig::fixture("rb87_adiabatic")?;
    let n = 2;
    let g = cfg.geometry.for_sites(n)?;
    let prep = prepare_ground_state(&cfg.interactions, &g, &cfg.model, &cfg.grape.settings(), cfg.seed)?;
    let r = &prep.result;
    println!("ground energy {:.4} MHz", prep.ground_energy);
    println!("fidelity {:.6} after {} iterations (converged: {})", r.final_fidelity, r.iterations, r.converged);
    for (k, f) in r.fidelity_history.iter().enumerate().step_by(5) {
        println!("  iter {k:>3}  F = {f:.6}");
    }
    let labels: Vec<String> = r.grid.channels.iter().map(|c| c.label()).collect();
    println!("\nfirst slices ({}):", labels.join(", "));
    for row in r.grid.values.iter().take(5) {
        println!("  {:?}", row.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>());
    }
    Ok(())
}
