//! Check the two-site fine-tuning conditions for the caesium fixture and
//! compare the pair block with the Motzkin projector structure.

use motzkin_rydberg::config::RunConfig;
use motzkin_rydberg::rydberg::{check_fine_tuning, compare_to_motzkin};

fn main() -> motzkin_rydberg::Result<()> {
    let cfg = RunConfig::fixture("cs133_finetune")?;
    let g = cfg.geometry.for_sites(2)?;
    let report = check_fine_tuning(&cfg.interactions, &g, &cfg.model, 0.05)?;
    println!("a = {} um, theta = {} deg", g.spacing_um, g.theta_deg);
    println!(
        "J(u0) = {:.4}  J(d0) = {:.4}  J(00) = {:.4} MHz",
        report.j_up0, report.j_down0, report.j_00
    );
    println!(
        "V(u0) = {:.4}  V(d0) = {:.4}  V(00) = {:.4}  Vdiag = {:.4}  Vofd = {:.4} MHz",
        report.v_up0, report.v_down0, report.v_00, report.v_diag, report.v_ofd
    );
    for c in &report.conditions {
        println!("  {:<16} lhs={:>9.4} rhs={:>9.4} residual={:.3}  {}", c.name, c.lhs, c.rhs, c.relative_residual, if c.pass { "ok" } else { "FAIL" });
    }

    let cmp = compare_to_motzkin(&cfg.interactions, &g, &cfg.model)?;
    println!("\nentries present only in the Rydberg block:");
    for e in &cmp.extra {
        println!("  <{}|H|{}> = {:.4} MHz", e.row_label, e.col_label, e.rydberg);
    }
    println!("entries missing from the Rydberg block: {}", cmp.missing.len());
    Ok(())
}
