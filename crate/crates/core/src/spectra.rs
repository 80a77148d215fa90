//! Dense and Lanczos eigensolvers for Hermitian operators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::qutrit::{inner, norm, QutritState};
use crate::sparse::SparseOperator;

/// Default cap on the dimension handed to the dense solver (`3^6`).
pub const DEFAULT_DENSE_CAP: usize = 729;

/// Number of sites `n` with `3^n = dim`.
pub fn sites_for_dim(dim: usize) -> Result<usize> {
    let mut n = 0;
    let mut d = 1usize;
    while d < dim {
        d *= 3;
        n += 1;
    }
    if d != dim {
        return Err(domain(format!("dimension {dim} is not a power of three")));
    }
    Ok(n)
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub n_sites: usize,
    /// Ascending, in MHz.
    pub eigenvalues: Vec<f64>,
    pub ground_vector: QutritState,
    /// `E1 − E0`, or zero for a one-dimensional space.
    pub gap: f64,
    /// Number of eigenvalues within the degeneracy tolerance of `E0`.
    pub degeneracy: usize,
    /// `‖H v − E0 v‖` of the returned ground vector.
    pub residual: f64,
}

impl SpectrumReport {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Tolerance used to group eigenvalues into a degenerate ground multiplet.
fn degeneracy_tol(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

fn residual_of(op: &SparseOperator, v: &[Complex64], e: f64) -> f64 {
    let mut y = vec![Complex64::new(0.0, 0.0); v.len()];
    op.apply_into(v, &mut y);
    y.iter().zip(v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt()
}

/// Full diagonalisation, refusing dimensions above [`DEFAULT_DENSE_CAP`].
pub fn dense_spectrum(op: &SparseOperator) -> Result<SpectrumReport> {
    dense_spectrum_with_cap(op, DEFAULT_DENSE_CAP)
}

pub fn dense_spectrum_with_cap(op: &SparseOperator, cap: usize) -> Result<SpectrumReport> {
    let dim = op.dim();
    if dim > cap {
        return Err(Error::Resource(format!(
            "dimension {dim} exceeds the dense cap {cap}; use the iterative ground-state solver"
        )));
    }
    let n_sites = sites_for_dim(dim)?;
    if !op.is_hermitian(1e-12) {
        return Err(domain("dense_spectrum needs a Hermitian operator"));
    }
    let (eigenvalues, ground) = match op.to_dense_real()? {
        Some(m) => {
            let eig = SymmetricEigen::new(m);
            let order = ascending(eig.eigenvalues.as_slice());
            let k = order[0];
            let v: Vec<Complex64> = eig.eigenvectors.column(k).iter().map(|&x| Complex64::new(x, 0.0)).collect();
            (order.iter().map(|&i| eig.eigenvalues[i]).collect::<Vec<_>>(), v)
        }
        None => {
            let eig = SymmetricEigen::new(op.to_dense()?);
            let order = ascending(eig.eigenvalues.as_slice());
            let v: Vec<Complex64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
            (order.iter().map(|&i| eig.eigenvalues[i]).collect::<Vec<_>>(), v)
        }
    };
    let scale = op.norm_bound();
    let residual = residual_of(op, &ground, eigenvalues[0]);
    if residual > 1e-8 * scale.max(1.0) {
        return Err(Error::Numerical(format!("dense eigenvector residual {residual:.3e} too large")));
    }
    let tol = degeneracy_tol(scale);
    let degeneracy = eigenvalues.iter().take_while(|&&e| e - eigenvalues[0] <= tol).count();
    let gap = eigenvalues.get(1).map_or(0.0, |e1| e1 - eigenvalues[0]);
    let ground_vector = QutritState::from_amplitudes(n_sites, fix_phase(ground))?;
    Ok(SpectrumReport { n_sites, eigenvalues, ground_vector, gap, degeneracy, residual })
}

fn ascending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Rotate the global phase so the largest amplitude is real and positive.
pub(crate) fn fix_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let big = v.iter().copied().fold(Complex64::new(0.0, 0.0), |m, x| if x.norm() > m.norm() * (1.0 + 1e-12) { x } else { m });
    if big.norm() > 0.0 {
        let ph = big.conj() / big.norm();
        v.iter_mut().for_each(|x| *x *= ph);
    }
    v
}

/// Settings for [`iterative_ground_state_with`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LanczosOptions {
    /// Target residual `‖Hv − E0 v‖`.
    pub tol: f64,
    /// Budget of operator applications.
    pub max_iter: usize,
    /// Krylov dimension per restart cycle.
    pub krylov_dim: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 5000, krylov_dim: 60, seed: 0x6d6f747a }
    }
}

/// Extremal-eigenpair Lanczos with full reorthogonalisation and explicit
/// restarts from the current Ritz vector.
pub fn iterative_ground_state(op: &SparseOperator, tol: f64, max_iter: usize, seed: u64) -> Result<(f64, QutritState)> {
    iterative_ground_state_with(op, &LanczosOptions { tol, max_iter, seed, ..Default::default() })
}

pub fn iterative_ground_state_with(op: &SparseOperator, opts: &LanczosOptions) -> Result<(f64, QutritState)> {
    let dim = op.dim();
    let n_sites = sites_for_dim(dim)?;
    if !op.is_flagged_hermitian() && !op.is_hermitian(1e-12) {
        return Err(domain("iterative_ground_state needs a Hermitian operator"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let m = opts.krylov_dim.clamp(2, dim.max(2)).min(dim);
    let mut used = 0usize;
    let mut best = (f64::INFINITY, f64::NAN, start.clone());
    loop {
        let (e, v, applied) = lanczos_cycle(op, &start, m)?;
        used += applied;
        let r = residual_of(op, &v, e);
        used += 1;
        if r < best.0 {
            best = (r, e, v.clone());
        }
        if r <= opts.tol {
            return Ok((e, QutritState::from_amplitudes(n_sites, fix_phase(v))?));
        }
        if used >= opts.max_iter {
            return Err(Error::Convergence { iterations: used, residual: best.0 });
        }
        start = v;
    }
}

/// One Lanczos cycle from `start`; returns the lowest Ritz pair and the
/// number of operator applications.
fn lanczos_cycle(op: &SparseOperator, start: &[Complex64], m: usize) -> Result<(f64, Vec<Complex64>, usize)> {
    let dim = start.len();
    let zero = Complex64::new(0.0, 0.0);
    let nrm = norm(start);
    if !(nrm > 0.0) || !nrm.is_finite() {
        return Err(Error::Numerical("Lanczos start vector has zero or non-finite norm".into()));
    }
    let mut basis: Vec<Vec<Complex64>> = vec![start.iter().map(|x| x / nrm).collect()];
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    let mut w = vec![zero; dim];
    let mut applied = 0;
    for j in 0..m {
        op.apply_into(&basis[j], &mut w);
        applied += 1;
        let a = inner(&basis[j], &w).re;
        alpha.push(a);
        // Two passes of classical Gram–Schmidt against the whole basis.
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bnorm = norm(&w);
        if !bnorm.is_finite() {
            return Err(Error::Numerical("non-finite vector in Lanczos iteration".into()));
        }
        if j + 1 == m || bnorm <= 1e-12 * a.abs().max(1.0) {
            break;
        }
        beta.push(bnorm);
        basis.push(w.iter().map(|x| x / bnorm).collect());
    }
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let lo = ascending(eig.eigenvalues.as_slice())[0];
    let y: DVector<f64> = eig.eigenvectors.column(lo).into_owned();
    let mut v = vec![zero; dim];
    for (c, b) in y.iter().zip(&basis) {
        v.iter_mut().zip(b).for_each(|(x, bb)| *x += bb * *c);
    }
    let vn = norm(&v);
    v.iter_mut().for_each(|x| *x /= vn);
    Ok((eig.eigenvalues[lo], v, applied))
}

/// Ground state by the dense path when the dimension allows, else Lanczos.
pub fn ground_state(op: &SparseOperator, dense_cap: usize, opts: &LanczosOptions) -> Result<(f64, QutritState)> {
    if op.dim() <= dense_cap {
        let r = dense_spectrum_with_cap(op, dense_cap)?;
        Ok((r.eigenvalues[0], r.ground_vector))
    } else {
        iterative_ground_state_with(op, opts)
    }
}

/// Two columns, `index,energy_mhz`, one row per eigenvalue.
pub fn spectrum_export(report: &SpectrumReport) -> String {
    let mut s = String::from("index,energy_mhz\n");
    for (i, e) in report.eigenvalues.iter().enumerate() {
        s.push_str(&format!("{i},{}\n", crate::output::fmt_num(*e)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motzkin::build_motzkin_hamiltonian;
    use crate::rydberg::{build_rydberg_hamiltonian, Geometry, InteractionTable, ModelOptions};

    fn rb(n: usize) -> SparseOperator {
        build_rydberg_hamiltonian(&InteractionTable::rb87(), &Geometry::chain(n, 7.0, 35.1), &ModelOptions::default()).unwrap()
    }

    #[test]
    fn diagonal_spectrum() {
        let op = SparseOperator::diagonal(&[3.0, 1.0, 2.0]);
        let r = dense_spectrum(&op).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(r.gap, 1.0);
        assert_eq!(r.degeneracy, 1);
        assert_eq!(spectrum_export(&r).lines().count(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        let op = SparseOperator::identity(3usize.pow(7));
        assert!(matches!(dense_spectrum(&op), Err(Error::Resource(_))));
    }

    #[test]
    fn identity_lanczos() {
        let (e, v) = iterative_ground_state(&SparseOperator::identity(27), 1e-10, 100, 1).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense() {
        let h = rb(4);
        let d = dense_spectrum(&h).unwrap();
        let (e, _) = iterative_ground_state(&h, 1e-9, 5000, 3).unwrap();
        assert!((e - d.eigenvalues[0]).abs() < 1e-6);
        let trace: f64 = h.diagonal_values().iter().sum();
        let sum: f64 = d.eigenvalues.iter().sum();
        assert!((trace - sum).abs() < 1e-6 * trace.abs().max(1.0));
    }

    #[test]
    fn motzkin_six_is_frustration_free() {
        let h = build_motzkin_hamiltonian(6).unwrap();
        let (e, _) = iterative_ground_state(&h, 1e-9, 20000, 5).unwrap();
        assert!(e.abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_reports_residual() {
        let h = rb(4);
        match iterative_ground_state_with(&h, &LanczosOptions { tol: 1e-30, max_iter: 10, krylov_dim: 5, seed: 1 }) {
            Err(Error::Convergence { residual, .. }) => assert!(residual.is_finite()),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}
