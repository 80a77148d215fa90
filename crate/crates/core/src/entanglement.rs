//! Entanglement entropies, magnetisation blocks of reduced density
//! matrices, and half-chain scaling studies.

use std::ops::Range;

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::qutrit::{index_magnetization, DenseMatrix, QutritState};

/// Eigenvalues below this are treated as zero before taking logarithms.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

const VALIDITY_TOL: f64 = 1e-8;

fn validated_spectrum(rdm: &DenseMatrix) -> Result<Vec<f64>> {
    if !rdm.is_square() || rdm.nrows() == 0 {
        return Err(domain("density matrix must be square and non-empty"));
    }
    let d = rdm.nrows();
    let mut defect: f64 = 0.0;
    for r in 0..d {
        for c in r..d {
            defect = defect.max((rdm[(r, c)] - rdm[(c, r)].conj()).norm());
        }
    }
    if defect > VALIDITY_TOL {
        return Err(domain(format!("density matrix is not Hermitian (defect {defect:.3e})")));
    }
    let tr = rdm.trace();
    if (tr.re - 1.0).abs() > VALIDITY_TOL || tr.im.abs() > VALIDITY_TOL {
        return Err(domain(format!("density matrix trace is {tr}, not 1")));
    }
    let herm = (rdm + rdm.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    Ok(SymmetricEigen::new(herm).eigenvalues.iter().copied().collect())
}

/// `−Σ λ ln λ` over eigenvalues above [`EIGENVALUE_FLOOR`].
pub fn von_neumann(rdm: &DenseMatrix) -> Result<f64> {
    let s: f64 = validated_spectrum(rdm)?.iter().filter(|&&l| l > EIGENVALUE_FLOOR).map(|&l| -l * l.ln()).sum();
    Ok(s.max(0.0))
}

/// `−ln Tr ρ²`.
pub fn renyi2(rdm: &DenseMatrix) -> Result<f64> {
    let p: f64 = validated_spectrum(rdm)?.iter().filter(|&&l| l > EIGENVALUE_FLOOR).map(|l| l * l).sum();
    Ok((-p.ln()).max(0.0))
}

/// Per-sector traces of a reduced density matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockReport {
    /// `(M_A, weight)` for `M_A = N_A, …, −N_A`.
    pub weights: Vec<(i32, f64)>,
    /// Largest `|ρ_ab|` with `M(a) ≠ M(b)`.
    pub offdiag_leakage: f64,
}

impl BlockReport {
    pub fn weight(&self, m: i32) -> f64 {
        self.weights.iter().find(|w| w.0 == m).map_or(0.0, |w| w.1)
    }

    /// Total weight in sectors with `M_A < 0`.
    pub fn negative_weight(&self) -> f64 {
        self.weights.iter().filter(|w| w.0 < 0).map(|w| w.1).sum()
    }
}

/// Split `rdm` over `n_a` sites by subsystem magnetisation.
pub fn block_decompose(rdm: &DenseMatrix, n_a: usize) -> Result<BlockReport> {
    let d = 3usize.pow(n_a as u32);
    if rdm.nrows() != d || rdm.ncols() != d {
        return Err(domain(format!("rdm of size {}x{} does not match {n_a} sites", rdm.nrows(), rdm.ncols())));
    }
    let m: Vec<i32> = (0..d).map(|i| index_magnetization(i, n_a)).collect();
    let na = n_a as i32;
    let mut weights: Vec<(i32, f64)> = (-na..=na).rev().map(|k| (k, 0.0)).collect();
    let mut leak: f64 = 0.0;
    for r in 0..d {
        weights[(na - m[r]) as usize].1 += rdm[(r, r)].re;
        for c in 0..d {
            if m[r] != m[c] {
                leak = leak.max(rdm[(r, c)].norm());
            }
        }
    }
    Ok(BlockReport { weights, offdiag_leakage: leak })
}

#[derive(Clone, Debug)]
pub struct EntanglementReport {
    pub n_sites: usize,
    pub subsystem: Range<usize>,
    pub rdm: DenseMatrix,
    pub s1: f64,
    pub s2: f64,
    pub blocks: BlockReport,
}

impl EntanglementReport {
    /// Bipartition `state` at `subsystem`. An empty or full subsystem gives
    /// zero entropies and a 1×1 density matrix.
    pub fn analyze(state: &QutritState, subsystem: Range<usize>) -> Result<Self> {
        let n = state.n_sites();
        if subsystem.start > subsystem.end || subsystem.end > n {
            return Err(domain(format!("subsystem {subsystem:?} outside a chain of {n} sites")));
        }
        if subsystem.is_empty() || subsystem.len() == n {
            let rdm = DenseMatrix::from_element(1, 1, num_complex::Complex64::new(1.0, 0.0));
            let weights = vec![(0, 1.0)];
            return Ok(Self { n_sites: n, subsystem, rdm, s1: 0.0, s2: 0.0, blocks: BlockReport { weights, offdiag_leakage: 0.0 } });
        }
        let rdm = state.partial_trace(subsystem.clone())?;
        let s1 = von_neumann(&rdm)?;
        let s2 = renyi2(&rdm)?;
        let blocks = block_decompose(&rdm, subsystem.len())?;
        Ok(Self { n_sites: n, subsystem, rdm, s1, s2, blocks })
    }

    /// Left half `[0, ⌊N/2⌋)`.
    pub fn half_chain(state: &QutritState) -> Result<Self> {
        Self::analyze(state, 0..state.n_sites() / 2)
    }
}

/// One row of a scaling table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n_sites: usize,
    pub n_a: usize,
    pub s1: f64,
    pub s2: f64,
    /// Fidelity with the Motzkin state, when the family carries one.
    pub fidelity: Option<f64>,
}

/// A state produced for one chain length, plus an optional fidelity tag.
pub struct FamilyState {
    pub state: QutritState,
    pub fidelity: Option<f64>,
}

/// Half-chain `S1`, `S2` for every `N` in `ns`, using `family` to build the
/// states.
pub fn scaling_study<F>(ns: &[usize], mut family: F) -> Result<Vec<ScalingRow>>
where
    F: FnMut(usize) -> Result<FamilyState>,
{
    if ns.is_empty() {
        return Err(domain("scaling study needs at least one chain length"));
    }
    ns.iter()
        .map(|&n| {
            let FamilyState { state, fidelity } = family(n)?;
            if state.n_sites() != n {
                return Err(domain(format!("family produced {} sites for N = {n}", state.n_sites())));
            }
            let r = EntanglementReport::half_chain(&state)?;
            Ok(ScalingRow { n_sites: n, n_a: n / 2, s1: r.s1, s2: r.s2, fidelity })
        })
        .collect()
}
