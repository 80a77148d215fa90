use num_complex::Complex64;
use serde::Serialize;

use super::couplings::{pair_dipole_coupling, pair_forster, pair_vdw_shift, ModelOptions};
use super::geometry::Geometry;
use super::table::{DipoleChannel, InteractionTable, VdwChannel};
use crate::error::{domain, Result};
use crate::motzkin::{bond_projector, pair::*};
use crate::qutrit::{basis_dim, DenseMatrix};
use crate::sparse::{embed_two_site, SparseOperator};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The 9×9 interaction block of the pair `(i, j)` in the ordered two-site
/// basis, first label on site `i`.
pub fn two_site_block(
    table: &InteractionTable,
    geometry: &Geometry,
    options: &ModelOptions,
    i: usize,
    j: usize,
) -> Result<DenseMatrix> {
    let s = options.exchange_sign.factor();
    let dip = |ch| pair_dipole_coupling(table, geometry, options, i, j, ch);
    let vdw = |ch| pair_vdw_shift(table, geometry, options, i, j, ch);
    let j_up = s * dip(DipoleChannel::UpFlat)?;
    let j_down = s * dip(DipoleChannel::DownFlat)?;
    let j_flat = s * dip(DipoleChannel::FlatFlat)?;
    let forster = pair_forster(table, geometry, i, j)?;

    let mut m = DenseMatrix::zeros(9, 9);
    let mut pair = |a: usize, b: usize, v: f64| {
        m[(a, b)] += re(v);
        m[(b, a)] += re(v);
    };
    pair(UP_FLAT, FLAT_UP, j_up);
    pair(DOWN_FLAT, FLAT_DOWN, j_down);
    pair(UP_DOWN, FLAT_FLAT, j_flat);
    pair(DOWN_UP, FLAT_FLAT, j_flat);
    pair(UP_DOWN, DOWN_UP, forster.off_diagonal);

    let up0 = vdw(VdwChannel::UpFlat)?;
    let down0 = vdw(VdwChannel::DownFlat)?;
    for (d, v) in [
        (UP_FLAT, up0),
        (FLAT_UP, up0),
        (DOWN_FLAT, down0),
        (FLAT_DOWN, down0),
        (UP_UP, vdw(VdwChannel::UpUp)?),
        (DOWN_DOWN, vdw(VdwChannel::DownDown)?),
        (FLAT_FLAT, vdw(VdwChannel::FlatFlat)?),
        (UP_DOWN, forster.diagonal),
        (DOWN_UP, forster.diagonal),
    ] {
        m[(d, d)] += re(v);
    }
    Ok(m)
}

/// Sum of [`two_site_block`] over every unordered pair `i < j` within the
/// interaction cutoff.
pub fn build_rydberg_hamiltonian(
    table: &InteractionTable,
    geometry: &Geometry,
    options: &ModelOptions,
) -> Result<SparseOperator> {
    let n = geometry.n_sites;
    if n < 2 {
        return Err(domain("the Rydberg Hamiltonian needs at least two sites"));
    }
    geometry.validate()?;
    let dim = basis_dim(n)?;
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !options.includes_pair(geometry, i, j) {
                continue;
            }
            let block = two_site_block(table, geometry, options, i, j)?;
            triplets.extend(embed_two_site(&block, i, j, n)?.entries());
        }
    }
    SparseOperator::from_triplets(dim, triplets, true)
}

/// One matrix position in the two-site basis, with readable labels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockEntry {
    pub row: usize,
    pub col: usize,
    pub row_label: &'static str,
    pub col_label: &'static str,
    pub rydberg: f64,
    pub motzkin: f64,
}

/// Side-by-side comparison of a Rydberg pair block with the Motzkin bond
/// projector.
#[derive(Clone, Debug)]
pub struct MotzkinComparison {
    pub rydberg: DenseMatrix,
    pub motzkin: DenseMatrix,
    /// Nonzero Rydberg entries with no Motzkin counterpart.
    pub extra: Vec<BlockEntry>,
    /// Nonzero Motzkin entries the Rydberg block lacks.
    pub missing: Vec<BlockEntry>,
    /// Diagonal entries that differ between the two blocks.
    pub diagonal_mismatch: Vec<BlockEntry>,
}

impl MotzkinComparison {
    pub fn extra_positions(&self) -> Vec<(usize, usize)> {
        self.extra.iter().map(|e| (e.row, e.col)).collect()
    }
}

fn entry(r: usize, c: usize, ryd: &DenseMatrix, mot: &DenseMatrix) -> BlockEntry {
    BlockEntry {
        row: r,
        col: c,
        row_label: LABELS[r],
        col_label: LABELS[c],
        rydberg: ryd[(r, c)].re,
        motzkin: mot[(r, c)].re,
    }
}

/// Compare the nearest-neighbour block of a two-site chain with `Π`.
///
/// Configurations that neither block couples to anything else (`↑↑`, `↓↓`)
/// only pick up energy shifts that commute with everything, so they are
/// left out of the extra-entry and diagonal lists.
pub fn compare_to_motzkin(
    table: &InteractionTable,
    geometry: &Geometry,
    options: &ModelOptions,
) -> Result<MotzkinComparison> {
    if geometry.n_sites != 2 {
        return Err(domain(format!("comparison needs a two-site geometry, got {}", geometry.n_sites)));
    }
    let ryd = two_site_block(table, geometry, options, 0, 1)?;
    let mot = bond_projector();
    let nz = |m: &DenseMatrix, r: usize, c: usize| m[(r, c)].norm() > 0.0;
    let frozen: Vec<bool> = (0..9).map(|a| (0..9).all(|b| b == a || (!nz(&ryd, a, b) && !nz(&mot, a, b)))).collect();

    let mut extra = Vec::new();
    let mut missing = Vec::new();
    let mut diagonal_mismatch = Vec::new();
    for r in 0..9 {
        for c in 0..9 {
            if nz(&mot, r, c) && !nz(&ryd, r, c) {
                missing.push(entry(r, c, &ryd, &mot));
            }
            if frozen[r] || frozen[c] {
                continue;
            }
            if nz(&ryd, r, c) && !nz(&mot, r, c) {
                extra.push(entry(r, c, &ryd, &mot));
            } else if r == c && ryd[(r, c)] != mot[(r, c)] {
                diagonal_mismatch.push(entry(r, c, &ryd, &mot));
            }
        }
    }
    Ok(MotzkinComparison { rydberg: ryd, motzkin: mot, extra, missing, diagonal_mismatch })
}

/// One of the fine-tuning equalities, written as `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FineTuningCondition {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / max(|lhs|, |rhs|)`, zero when both vanish.
    pub relative_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FineTuningReport {
    pub tolerance: f64,
    pub j_up0: f64,
    pub j_down0: f64,
    pub j_00: f64,
    pub v_up0: f64,
    pub v_down0: f64,
    pub v_00: f64,
    pub v_diag: f64,
    pub v_ofd: f64,
    pub conditions: Vec<FineTuningCondition>,
}

impl FineTuningReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }
}

fn condition(name: &'static str, lhs: f64, rhs: f64, tol: f64) -> FineTuningCondition {
    let scale = lhs.abs().max(rhs.abs());
    let relative_residual = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    FineTuningCondition { name, lhs, rhs, relative_residual, pass: relative_residual <= tol }
}

/// Evaluate `J⁰⁰ = −V⁰⁰ = −V^diag = −V^ofd`, `J^{↓0} = V^{↓0}` and
/// `J^{↑0} = V^{↑0}` on the first nearest-neighbour pair. The `J` here are
/// the bare dipolar couplings, without the exchange sign.
pub fn check_fine_tuning(
    table: &InteractionTable,
    geometry: &Geometry,
    options: &ModelOptions,
    tolerance: f64,
) -> Result<FineTuningReport> {
    if geometry.n_sites < 2 {
        return Err(domain("fine-tuning needs at least two sites"));
    }
    let (i, j) = (0, 1);
    let dip = |ch| pair_dipole_coupling(table, geometry, options, i, j, ch);
    let vdw = |ch| pair_vdw_shift(table, geometry, options, i, j, ch);
    let f = pair_forster(table, geometry, i, j)?;
    let (j_up0, j_down0, j_00) = (dip(DipoleChannel::UpFlat)?, dip(DipoleChannel::DownFlat)?, dip(DipoleChannel::FlatFlat)?);
    let (v_up0, v_down0, v_00) = (vdw(VdwChannel::UpFlat)?, vdw(VdwChannel::DownFlat)?, vdw(VdwChannel::FlatFlat)?);
    let conditions = vec![
        condition("J00 = -V00", j_00, -v_00, tolerance),
        condition("J00 = -Vdiag", j_00, -f.diagonal, tolerance),
        condition("J00 = -Vofd", j_00, -f.off_diagonal, tolerance),
        condition("Jdown0 = Vdown0", j_down0, v_down0, tolerance),
        condition("Jup0 = Vup0", j_up0, v_up0, tolerance),
    ];
    Ok(FineTuningReport {
        tolerance,
        j_up0,
        j_down0,
        j_00,
        v_up0,
        v_down0,
        v_00,
        v_diag: f.diagonal,
        v_ofd: f.off_diagonal,
        conditions,
    })
}
