#![allow(dead_code)]

use motzkin_rydberg::config::RunConfig;
use motzkin_rydberg::rydberg::{ForsterCoefficients, InteractionTable};

pub const FIXTURES: [&str; 2] = ["rb87_adiabatic", "cs133_finetune"];

pub fn fixture(name: &str) -> RunConfig {
    RunConfig::fixture(name).unwrap()
}

/// Table at 1 µm spacing and angle `theta` (degrees) for which the pair
/// couplings satisfy every fine-tuning equality exactly. Coefficients are
/// worked out from the coupling formulas directly: dipolar
/// `κ C3 (1 − 3cos²θ)/a³` with κ = 1/2, vdW `C6/a⁶`, Förster
/// `9 sin²θ cos²θ C6/(a⁶ Δ)`.
pub fn tuned_table(theta: f64, target_mhz: f64) -> InteractionTable {
    let c = theta.to_radians().cos();
    let s2 = theta.to_radians().sin().powi(2);
    let dip = 0.5 * (1.0 - 3.0 * c * c);
    let forster = 9.0 * s2 * c * c;
    let mut t = InteractionTable::zero();
    t.c3.up0 = target_mhz / dip / 1e3;
    t.c3.down0 = target_mhz / dip / 1e3;
    t.c3.flat = target_mhz / dip / 1e3;
    t.c6.up0 = target_mhz / 1e3;
    t.c6.down0 = target_mhz / 1e3;
    t.c6.flat = -target_mhz / 1e3;
    t.c6.upup = 1.5;
    t.c6.downdown = 0.7;
    let detuning = 80.0;
    t.forster = Some(ForsterCoefficients { c6: -target_mhz * detuning / forster / 1e6, detuning });
    t
}

/// Number of lattice paths of `len` steps from height 0 to height `h`
/// that never go below zero.
pub fn prefix_count(len: usize, h: usize) -> f64 {
    let mut ways = vec![0.0f64; len + 2];
    ways[0] = 1.0;
    for _ in 0..len {
        let mut next = vec![0.0f64; len + 2];
        for (k, &w) in ways.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            next[k] += w;
            if k + 1 < next.len() {
                next[k + 1] += w;
            }
            if k > 0 {
                next[k - 1] += w;
            }
        }
        ways = next;
    }
    ways.get(h).copied().unwrap_or(0.0)
}

/// Schmidt weights of the Motzkin state across the cut after `n_a` sites,
/// from counting prefixes ending at each height and the matching suffixes.
pub fn motzkin_schmidt_weights(n: usize, n_a: usize) -> Vec<f64> {
    let counts: Vec<f64> = (0..=n_a.min(n - n_a)).map(|h| prefix_count(n_a, h) * prefix_count(n - n_a, h)).collect();
    let total: f64 = counts.iter().sum();
    counts.into_iter().filter(|&c| c > 0.0).map(|c| c / total).collect()
}

pub fn shannon(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

pub fn renyi2(p: &[f64]) -> f64 {
    -p.iter().map(|x| x * x).sum::<f64>().ln()
}
