//! Reduced density matrix of the half chain, split into magnetisation
//! blocks, for the ideal state and the Rydberg ground state.

use motzkin_rydberg::config::RunConfig;
use motzkin_rydberg::entanglement::EntanglementReport;
use motzkin_rydberg::motzkin::build_motzkin_state;
use motzkin_rydberg::rydberg::build_rydberg_hamiltonian;
use motzkin_rydberg::spectra::ground_state;

fn show(label: &str, r: &EntanglementReport) {
    println!("{label}: S1 = {:.4}, S2 = {:.4}, off-block max {:.1e}", r.s1, r.s2, r.blocks.offdiag_leakage);
    for (m, w) in &r.blocks.weights {
        println!("  M_A = {m:>2}  weight {w:.4}");
    }
}

fn main() -> motzkin_rydberg::Result<()> {
    let n = 4;
    show("ideal", &EntanglementReport::half_chain(&build_motzkin_state(n)?)?);

    let cfg = RunConfig::fixture("rb87_adiabatic")?;
    let h = build_rydberg_hamiltonian(&cfg.interactions, &cfg.geometry.for_sites(n)?, &cfg.model)?;
    let (_, gs) = ground_state(&h, cfg.spectrum.dense_cap, &cfg.solver)?;
    show("rydberg ground", &EntanglementReport::half_chain(&gs)?);
    Ok(())
}
