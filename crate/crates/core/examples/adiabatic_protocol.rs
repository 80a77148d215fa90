//! Detuning-ramp protocol for N = 2 and 3 starting from the Rydberg ground
//! state. Pass a chain length to run a single size.

use motzkin_rydberg::config::RunConfig;
use motzkin_rydberg::dynamics::{adiabaticity_report, sweep_adiabatic_protocol};
use motzkin_rydberg::spectra::ground_state;
use motzkin_rydberg::rydberg::build_rydberg_hamiltonian;

fn main() -> motzkin_rydberg::Result<()> {
    let cfg = RunConfig::fixture("rb87_adiabatic")?;
    let ns: Vec<usize> = match std::env::args().nth(1) {
        Some(a) => vec![a.parse().expect("chain length")],
        None => vec![2, 3],
    };
    let settings = cfg.protocol.settings();
    for n in ns {
        let g = cfg.geometry.for_sites(n)?;
        let h = build_rydberg_hamiltonian(&cfg.interactions, &g, &cfg.model)?;
        let (_, psi0) = ground_state(&h, cfg.spectrum.dense_cap, &cfg.solver)?;
        let sweep = sweep_adiabatic_protocol(&cfg.interactions, &g, &cfg.model, &settings, &psi0)?;
        for run in &sweep.runs {
            println!(
                "N={n} T={:>4} us  F: {:.4} -> {:.4} (peak {:.4} at {:.2} us)  norm drift {:.1e}",
                run.duration,
                run.initial_fidelity,
                run.final_fidelity,
                run.peak_fidelity,
                run.peak_time,
                run.trajectory.max_norm_drift()
            );
        }
        let rep = adiabaticity_report(&settings.schedule(n, sweep.best_run().duration)?, cfg.protocol.adiabatic_scale_mhz);
        println!("  ramp rate {:.1} MHz/us vs interaction scale {:.0} MHz: {}", rep.max_ramp_rate, rep.interaction_scale, if rep.pass { "adiabatic" } else { "too fast" });
    }
    Ok(())
}
