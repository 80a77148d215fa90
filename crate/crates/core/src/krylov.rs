//! Lanczos approximation of `exp(-i τ H) x` for Hermitian `H`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qutrit::{inner, norm};

/// Largest Krylov dimension tried before giving up.
pub const MAX_KRYLOV_DIM: usize = 64;

/// Outcome of one exponential action.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpmStats {
    pub krylov_dim: usize,
    /// A-posteriori error estimate relative to `‖x‖`.
    pub error_estimate: f64,
}

/// Overwrite `x` with `exp(-i τ H) x`, where `apply(v, out)` writes `H v`.
///
/// The Krylov space grows until the standard a-posteriori estimate
/// `β_m |e_mᵀ exp(-iτT) e_1|` falls below `tol`, or the space becomes
/// invariant.
pub fn expm_action<F>(mut apply: F, x: &mut [Complex64], tau: f64, tol: f64) -> Result<ExpmStats>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    let dim = x.len();
    let zero = Complex64::new(0.0, 0.0);
    let x_norm = norm(x);
    if !x_norm.is_finite() {
        return Err(Error::Numerical("non-finite amplitudes entering the propagator".into()));
    }
    if x_norm == 0.0 || tau == 0.0 {
        return Ok(ExpmStats { krylov_dim: 0, error_estimate: 0.0 });
    }
    let mut basis: Vec<Vec<Complex64>> = vec![x.iter().map(|v| v / x_norm).collect()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![zero; dim];
    let max_m = MAX_KRYLOV_DIM.min(dim);
    loop {
        let j = alpha.len();
        apply(&basis[j], &mut w);
        let a = inner(&basis[j], &w).re;
        alpha.push(a);
        for b in &basis {
            let c = inner(b, &w);
            w.iter_mut().zip(b).for_each(|(p, q)| *p -= c * q);
        }
        // A second pass keeps the basis orthogonal to working precision.
        for b in &basis {
            let c = inner(b, &w);
            w.iter_mut().zip(b).for_each(|(p, q)| *p -= c * q);
        }
        let bn = norm(&w);
        if !bn.is_finite() {
            return Err(Error::Numerical("non-finite vector in Krylov propagation".into()));
        }
        let m = alpha.len();
        let invariant = bn <= 1e-13 * a.abs().max(1.0);
        let coeffs = small_expm(&alpha, &beta, tau);
        let estimate = if invariant { 0.0 } else { bn * coeffs[m - 1].norm() };
        if invariant || estimate <= tol || m >= max_m {
            if !invariant && estimate > tol {
                return Err(Error::Numerical(format!(
                    "Krylov propagation did not converge: estimate {estimate:.3e} at dimension {m}; reduce the step"
                )));
            }
            x.iter_mut().for_each(|v| *v = zero);
            for (c, b) in coeffs.iter().zip(&basis) {
                let c = c * x_norm;
                x.iter_mut().zip(b).for_each(|(p, q)| *p += c * q);
            }
            return Ok(ExpmStats { krylov_dim: m, error_estimate: estimate });
        }
        beta.push(bn);
        basis.push(w.iter().map(|v| v / bn).collect());
    }
}

/// `exp(-i τ T) e_1` for the tridiagonal `T` with diagonal `alpha` and
/// off-diagonal `beta`.
fn small_expm(alpha: &[f64], beta: &[f64], tau: f64) -> Vec<Complex64> {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let q = &eig.eigenvectors;
    (0..m)
        .map(|r| {
            (0..m)
                .map(|k| {
                    let ph = Complex64::from_polar(1.0, -tau * eig.eigenvalues[k]);
                    ph * (q[(r, k)] * q[(0, k)])
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseOperator;

    #[test]
    fn diagonal_phases() {
        let d = [1.0, -2.0, 0.5];
        let op = SparseOperator::diagonal(&d);
        let mut x = vec![Complex64::new(1.0, 0.0); 3];
        expm_action(|v, o| op.apply_into(v, o), &mut x, 0.3, 1e-13).unwrap();
        for (xi, di) in x.iter().zip(d) {
            assert!((xi - Complex64::from_polar(1.0, -0.3 * di)).norm() < 1e-12);
        }
    }

    #[test]
    fn two_level_rotation() {
        // σx/2: exp(-i t σx / 2)|0⟩ = cos(t/2)|0⟩ − i sin(t/2)|1⟩
        let op = SparseOperator::from_triplets(
            2,
            [(0, 1, Complex64::new(0.5, 0.0)), (1, 0, Complex64::new(0.5, 0.0))],
            true,
        )
        .unwrap();
        let mut x = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let t = 1.234;
        expm_action(|v, o| op.apply_into(v, o), &mut x, t, 1e-13).unwrap();
        assert!((x[0] - Complex64::new((t / 2.0).cos(), 0.0)).norm() < 1e-12);
        assert!((x[1] - Complex64::new(0.0, -(t / 2.0).sin())).norm() < 1e-12);
    }
}
