//! Spectrum of the Rydberg chain for the rubidium fixture.

use motzkin_rydberg::config::RunConfig;
use motzkin_rydberg::dynamics::fidelity;
use motzkin_rydberg::motzkin::build_motzkin_state;
use motzkin_rydberg::rydberg::build_rydberg_hamiltonian;
use motzkin_rydberg::spectra::dense_spectrum;

fn main() -> motzkin_rydberg::Result<()> {
    let cfg = RunConfig::fixture("rb87_adiabatic")?;
    for n in 2..=5 {
        let g = cfg.geometry.for_sites(n)?;
        let h = build_rydberg_hamiltonian(&cfg.interactions, &g, &cfg.model)?;
        let s = dense_spectrum(&h)?;
        let f = fidelity(&s.ground_vector, &build_motzkin_state(n)?)?;
        println!(
            "N={n}  dim={:<4} nnz={:<6} E0={:>10.4} MHz  gap={:.4} MHz  deg={}  F(Motzkin)={f:.4}",
            h.dim(),
            h.nnz(),
            s.eigenvalues[0],
            s.gap,
            s.degeneracy
        );
    }

    let g = cfg.geometry.for_sites(2)?;
    let h = build_rydberg_hamiltonian(&cfg.interactions, &g, &cfg.model)?;
    let s = dense_spectrum(&h)?;
    println!("\nN=2 levels (MHz): {:?}", s.eigenvalues.iter().map(|e| (e * 1e3).round() / 1e3).collect::<Vec<_>>());
    println!("N=2 ground state: {:?}", s.ground_vector.dominant_config().to_ascii());
    Ok(())
}
