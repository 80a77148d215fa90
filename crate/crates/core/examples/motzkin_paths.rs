//! Count and list Motzkin paths, then check that the equal superposition
//! is a zero-energy ground state of the Motzkin Hamiltonian.

use motzkin_rydberg::motzkin::{build_motzkin_hamiltonian, build_motzkin_state, enumerate_paths, motzkin_number};
use motzkin_rydberg::spectra::dense_spectrum;

fn main() -> motzkin_rydberg::Result<()> {
    for n in 1..=12 {
        println!("M_{n:<2} = {}", motzkin_number(n));
    }

    let paths = enumerate_paths(4)?;
    println!("\n{} paths of length 4:", paths.len());
    for p in &paths {
        println!("  {}  heights {:?}", p.steps().to_ascii(), p.heights());
    }

    for n in 2..=5 {
        let h = build_motzkin_hamiltonian(n)?;
        let psi = build_motzkin_state(n)?;
        let e = h.apply(&psi)?.inner(&psi)?.re;
        let spec = dense_spectrum(&h)?;
        println!("N={n}: <M|H|M> = {e:.2e}, E0 = {:.2e}, gap = {:.4}", spec.eigenvalues[0], spec.gap);
    }
    Ok(())
}
