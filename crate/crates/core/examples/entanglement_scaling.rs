//! Half-chain entropies of the ideal Motzkin state against log N.

use motzkin_rydberg::entanglement::{scaling_study, FamilyState};
use motzkin_rydberg::motzkin::build_motzkin_state;

fn main() -> motzkin_rydberg::Result<()> {
    let ns: Vec<usize> = (2..=12).step_by(2).collect();
    let rows = scaling_study(&ns, |n| Ok(FamilyState { state: build_motzkin_state(n)?, fidelity: None }))?;
    println!("{:>3} {:>8} {:>8} {:>8}", "N", "ln N", "S1", "S2");
    for r in &rows {
        println!("{:>3} {:>8.4} {:>8.4} {:>8.4}", r.n_sites, (r.n_sites as f64).ln(), r.s1, r.s2);
    }
    let (a, b) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
    let slope = (b.s1 - a.s1) / ((b.n_sites as f64).ln() - (a.n_sites as f64).ln());
    println!("local slope dS1/dlnN = {slope:.3}");
    Ok(())
}
