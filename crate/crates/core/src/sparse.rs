//! Compressed sparse operators on the `3^N` product space.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::qutrit::{DenseMatrix, QutritState};

/// Dimension above which `apply` splits rows across the rayon pool.
const PARALLEL_ROWS: usize = 1 << 12;

/// Largest dimension `to_dense` will materialise.
pub const MAX_DENSE_DIM: usize = 3usize.pow(8);

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Sparse operator in compressed-row form.
///
/// Built from coordinate triples that are sorted by row then column with
/// duplicates summed and exact zeros dropped, so two operators with the
/// same matrix elements have identical storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
    hermitian: bool,
}

impl SparseOperator {
    pub fn from_triplets<I>(dim: usize, triplets: I, hermitian: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut t: Vec<(usize, usize, Complex64)> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = t.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(domain(format!("entry ({r}, {c}) outside dimension {dim}")));
        }
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != ZERO);
        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let cols = merged.iter().map(|e| e.1).collect();
        let values = merged.iter().map(|e| e.2).collect();
        Ok(Self { dim, row_ptr, cols, values, hermitian })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), values: Vec::new(), hermitian: true }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        Self::from_triplets(dim, diag.iter().enumerate().map(|(i, &d)| (i, i, Complex64::new(d, 0.0))), true)
            .expect("diagonal entries are in range")
    }

    /// Dense matrix → sparse, keeping nonzero entries.
    pub fn from_dense(m: &DenseMatrix, hermitian: bool) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(domain("matrix is not square"));
        }
        let dim = m.nrows();
        let t = (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).map(|(r, c)| (r, c, m[(r, c)]));
        Self::from_triplets(dim, t, hermitian)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_flagged_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Entries in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.values[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.values[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn diagonal_values(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `y = A x` on a state.
    pub fn apply(&self, state: &QutritState) -> Result<QutritState> {
        if state.dim() != self.dim {
            return Err(domain(format!("operator dimension {} vs state dimension {}", self.dim, state.dim())));
        }
        let mut out = vec![ZERO; self.dim];
        self.apply_into(state.amplitudes(), &mut out);
        QutritState::from_amplitudes(state.n_sites(), out)
    }

    /// `y = A x` on raw amplitude slices. Panics on length mismatch.
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let row = |r: usize| -> Complex64 {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            acc
        };
        if self.dim >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(|(r, out)| *out = row(r));
        } else {
            y.iter_mut().enumerate().for_each(|(r, out)| *out = row(r));
        }
    }

    /// `y += coeff · A x`.
    pub fn apply_add(&self, coeff: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let row = |r: usize| -> Complex64 {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            acc
        };
        if self.dim >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(|(r, out)| *out += coeff * row(r));
        } else {
            y.iter_mut().enumerate().for_each(|(r, out)| *out += coeff * row(r));
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        if s == 0.0 {
            return Self::zero(self.dim);
        }
        out
    }

    /// `Σ_k c_k A_k` for operators of equal dimension.
    pub fn linear_combination(terms: &[(f64, &SparseOperator)], dim: usize) -> Result<Self> {
        if let Some((_, op)) = terms.iter().find(|(_, op)| op.dim != dim) {
            return Err(domain(format!("operator dimension {} vs {dim}", op.dim)));
        }
        let hermitian = terms.iter().all(|(_, op)| op.hermitian);
        let t = terms
            .iter()
            .filter(|(c, _)| *c != 0.0)
            .flat_map(|(c, op)| op.entries().map(move |(r, col, v)| (r, col, v * *c)));
        Self::from_triplets(dim, t, hermitian)
    }

    pub fn add(&self, other: &SparseOperator) -> Result<Self> {
        Self::linear_combination(&[(1.0, self), (1.0, other)], self.dim)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c, r, v.conj())), self.hermitian)
            .expect("transpose stays in range")
    }

    /// Largest `|A_ij − conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entry of `[A, D]` for the diagonal operator `D = diag(d)`.
    pub fn commutator_with_diagonal(&self, d: &[f64]) -> f64 {
        self.entries().map(|(r, c, v)| (v * (d[c] - d[r])).norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum; bounds the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        if self.dim > MAX_DENSE_DIM {
            return Err(Error::Resource(format!(
                "dense materialisation of dimension {} above cap {MAX_DENSE_DIM}",
                self.dim
            )));
        }
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        Ok(m)
    }

    /// Real part as a dense real matrix when the operator has no imaginary
    /// entries.
    pub(crate) fn to_dense_real(&self) -> Result<Option<nalgebra::DMatrix<f64>>> {
        if self.values.iter().any(|v| v.im != 0.0) {
            return Ok(None);
        }
        if self.dim > MAX_DENSE_DIM {
            return Err(Error::Resource(format!(
                "dense materialisation of dimension {} above cap {MAX_DENSE_DIM}",
                self.dim
            )));
        }
        let mut m = nalgebra::DMatrix::<f64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v.re;
        }
        Ok(Some(m))
    }
}

fn check_site(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(domain(format!("site {i} outside chain of {n} sites")));
    }
    Ok(())
}

fn place(n: usize, i: usize) -> usize {
    3usize.pow((n - 1 - i) as u32)
}

/// Embed a two-site operator acting on the ordered pair `(i, j)` of an
/// `n`-site chain. `op2` is a 9×9 matrix in the basis
/// `↑↑, ↑0, ↑↓, 0↑, 00, 0↓, ↓↑, ↓0, ↓↓` where the first label refers to site
/// `i` and the second to site `j`. Sites are zero-based; `i > j` is allowed.
pub fn embed_two_site(op2: &DenseMatrix, i: usize, j: usize, n: usize) -> Result<SparseOperator> {
    if op2.nrows() != 9 || op2.ncols() != 9 {
        return Err(domain(format!("two-site operator must be 9x9, got {}x{}", op2.nrows(), op2.ncols())));
    }
    check_site(i, n)?;
    check_site(j, n)?;
    if i == j {
        return Err(domain(format!("site collision at {i}")));
    }
    let dim = crate::qutrit::basis_dim(n)?;
    let (pi, pj) = (place(n, i), place(n, j));
    let nonzero: Vec<(usize, usize, Complex64)> = (0..9)
        .flat_map(|r| (0..9).map(move |c| (r, c)))
        .filter_map(|(r, c)| {
            let v = op2[(r, c)];
            (v != ZERO).then_some((r, c, v))
        })
        .collect();
    let mut triplets = Vec::new();
    for x in 0..dim {
        let di = (x / pi) % 3;
        let dj = (x / pj) % 3;
        let local = 3 * di + dj;
        let rest = x - di * pi - dj * pj;
        for &(r, c, v) in nonzero.iter().filter(|e| e.1 == local) {
            debug_assert_eq!(c, local);
            let row = rest + (r / 3) * pi + (r % 3) * pj;
            triplets.push((row, x, v));
        }
    }
    let hermitian = (0..9).all(|r| (0..9).all(|c| (op2[(r, c)] - op2[(c, r)].conj()).norm() < 1e-14));
    SparseOperator::from_triplets(dim, triplets, hermitian)
}

/// Embed a single-site 3×3 operator (basis `↑, 0, ↓`) at site `i`.
pub fn embed_one_site(op1: &DenseMatrix, i: usize, n: usize) -> Result<SparseOperator> {
    if op1.nrows() != 3 || op1.ncols() != 3 {
        return Err(domain("single-site operator must be 3x3"));
    }
    check_site(i, n)?;
    let dim = crate::qutrit::basis_dim(n)?;
    let p = place(n, i);
    let mut triplets = Vec::new();
    for x in 0..dim {
        let d = (x / p) % 3;
        let rest = x - d * p;
        for r in 0..3 {
            let v = op1[(r, d)];
            if v != ZERO {
                triplets.push((rest + r * p, x, v));
            }
        }
    }
    let hermitian = (0..3).all(|r| (0..3).all(|c| (op1[(r, c)] - op1[(c, r)].conj()).norm() < 1e-14));
    SparseOperator::from_triplets(dim, triplets, hermitian)
}

/// `|a⟩⟨b|` as a 9×9 matrix in the ordered two-site basis.
pub fn two_site_ketbra(a: usize, b: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(9, 9);
    m[(a, b)] = Complex64::new(1.0, 0.0);
    m
}

/// `|a⟩⟨b|` as a 3×3 matrix in the single-site basis.
pub fn site_ketbra(a: usize, b: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(3, 3);
    m[(a, b)] = Complex64::new(1.0, 0.0);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qutrit::BasisConfig;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn idx(s: &str) -> usize {
        s.parse::<BasisConfig>().unwrap().encode()
    }

    #[test]
    fn canonical_merge() {
        let op = SparseOperator::from_triplets(
            3,
            vec![(2, 0, c(1.0)), (0, 1, c(2.0)), (2, 0, c(0.5)), (1, 1, c(1.0)), (1, 1, c(-1.0))],
            false,
        )
        .unwrap();
        let e: Vec<_> = op.entries().collect();
        assert_eq!(e, vec![(0, 1, c(2.0)), (2, 0, c(1.5))]);
        assert!(SparseOperator::from_triplets(2, vec![(2, 0, c(1.0))], false).is_err());
    }

    #[test]
    fn embed_identity() {
        let id = DenseMatrix::identity(9, 9);
        let op = embed_two_site(&id, 0, 2, 3).unwrap();
        assert_eq!(op, SparseOperator::identity(27));
    }

    #[test]
    fn embed_pair_exchange() {
        let mut op2 = two_site_ketbra(2, 4);
        op2 += two_site_ketbra(4, 2);
        let op = embed_two_site(&op2, 0, 1, 2).unwrap();
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.get(idx("ud"), idx("00")), c(1.0));
        assert_eq!(op.get(idx("00"), idx("ud")), c(1.0));
        assert!(op.is_flagged_hermitian());
    }

    #[test]
    fn embed_relabelled_sites() {
        // |0↑⟩⟨↑0| on the ordered pair (1, 0) is |↑0⟩⟨0↑| on (0, 1).
        let swapped = embed_two_site(&two_site_ketbra(3, 1), 1, 0, 2).unwrap();
        let direct = embed_two_site(&two_site_ketbra(1, 3), 0, 1, 2).unwrap();
        assert_eq!(swapped, direct);
    }

    #[test]
    fn embed_errors() {
        let id = DenseMatrix::identity(9, 9);
        assert!(embed_two_site(&id, 1, 1, 3).is_err());
        assert!(embed_two_site(&id, 0, 3, 3).is_err());
        assert!(embed_two_site(&DenseMatrix::identity(3, 3), 0, 1, 3).is_err());
    }

    #[test]
    fn apply_identity_and_zero() {
        let s = QutritState::basis(&"u0d".parse().unwrap()).unwrap();
        assert_eq!(SparseOperator::identity(27).apply(&s).unwrap(), s);
        let z = SparseOperator::zero(27).apply(&s).unwrap();
        assert!(z.norm() == 0.0);
        assert!(SparseOperator::identity(9).apply(&s).is_err());
    }

    #[test]
    fn one_site_embedding() {
        let op = embed_one_site(&site_ketbra(2, 2), 0, 2).unwrap();
        for x in 0..9 {
            let expect = if x / 3 == 2 { 1.0 } else { 0.0 };
            assert_eq!(op.get(x, x).re, expect);
        }
    }

    #[test]
    fn commutator_with_magnetization() {
        let mut op2 = two_site_ketbra(2, 4);
        op2 += two_site_ketbra(4, 2);
        let op = embed_two_site(&op2, 0, 1, 2).unwrap();
        let m: Vec<f64> = (0..9).map(|i| crate::qutrit::index_magnetization(i, 2) as f64).collect();
        assert_eq!(op.commutator_with_diagonal(&m), 0.0);
        let flip = embed_one_site(&(site_ketbra(0, 1) + site_ketbra(1, 0)), 0, 2).unwrap();
        assert!(flip.commutator_with_diagonal(&m) > 0.5);
    }
}
