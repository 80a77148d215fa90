//! Basis indexing, state vectors and partial traces for chains of
//! three-level sites.
//!
//! Configurations are encoded base 3 with site 0 as the most significant
//! digit and the digits `Up = 0`, `Flat = 1`, `Down = 2`. The ordered
//! two-site basis is therefore `↑↑, ↑0, ↑↓, 0↑, 00, 0↓, ↓↑, ↓0, ↓↓`.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Dense complex matrix used for reduced density matrices and small blocks.
pub type DenseMatrix = DMatrix<Complex64>;

/// Largest chain for which a full `3^N` amplitude vector is allocated.
pub const MAX_DENSE_SITES: usize = 14;

/// Local state of one site, read as a Motzkin step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SiteLabel {
    Up,
    Flat,
    Down,
}

impl SiteLabel {
    pub const ALL: [SiteLabel; 3] = [SiteLabel::Up, SiteLabel::Flat, SiteLabel::Down];

    pub fn digit(self) -> usize {
        match self {
            SiteLabel::Up => 0,
            SiteLabel::Flat => 1,
            SiteLabel::Down => 2,
        }
    }

    pub fn from_digit(d: usize) -> Option<Self> {
        match d {
            0 => Some(SiteLabel::Up),
            1 => Some(SiteLabel::Flat),
            2 => Some(SiteLabel::Down),
            _ => None,
        }
    }

    /// Spin projection `S_z`: `+1`, `0`, `-1`.
    pub fn sz(self) -> i32 {
        match self {
            SiteLabel::Up => 1,
            SiteLabel::Flat => 0,
            SiteLabel::Down => -1,
        }
    }

    /// Up and down exchanged.
    pub fn mirror(self) -> Self {
        match self {
            SiteLabel::Up => SiteLabel::Down,
            SiteLabel::Flat => SiteLabel::Flat,
            SiteLabel::Down => SiteLabel::Up,
        }
    }

    pub fn ascii(self) -> char {
        match self {
            SiteLabel::Up => 'u',
            SiteLabel::Flat => '0',
            SiteLabel::Down => 'd',
        }
    }

    fn symbol(self) -> char {
        match self {
            SiteLabel::Up => '↑',
            SiteLabel::Flat => '0',
            SiteLabel::Down => '↓',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'u' | 'U' | '↑' | '+' => Some(SiteLabel::Up),
            '0' | 'f' | 'F' => Some(SiteLabel::Flat),
            'd' | 'D' | '↓' | '-' => Some(SiteLabel::Down),
            _ => None,
        }
    }
}

/// Product-basis configuration of an `N`-site chain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisConfig {
    sites: Vec<SiteLabel>,
}

impl BasisConfig {
    pub fn new(sites: Vec<SiteLabel>) -> Self {
        Self { sites }
    }

    pub fn uniform(label: SiteLabel, n: usize) -> Self {
        Self { sites: vec![label; n] }
    }

    pub fn sites(&self) -> &[SiteLabel] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Base-3 index with site 0 most significant.
    pub fn encode(&self) -> usize {
        self.sites.iter().fold(0, |acc, s| acc * 3 + s.digit())
    }

    pub fn decode(index: usize, n: usize) -> Result<Self> {
        let dim = basis_dim(n)?;
        if index >= dim {
            return Err(domain(format!("index {index} outside [0, 3^{n})")));
        }
        Ok(Self::decode_unchecked(index, n))
    }

    pub(crate) fn decode_unchecked(mut index: usize, n: usize) -> Self {
        let mut sites = vec![SiteLabel::Flat; n];
        for slot in sites.iter_mut().rev() {
            *slot = SiteLabel::from_digit(index % 3).expect("digit below 3");
            index /= 3;
        }
        Self { sites }
    }

    /// Sum of `S_z` over all sites.
    pub fn total_magnetization(&self) -> i32 {
        self.sites.iter().map(|s| s.sz()).sum()
    }

    pub fn mirrored(&self) -> Self {
        Self { sites: self.sites.iter().map(|s| s.mirror()).collect() }
    }

    pub fn to_ascii(&self) -> String {
        self.sites.iter().map(|s| s.ascii()).collect()
    }
}

impl fmt::Display for BasisConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sites {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for BasisConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sites = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| SiteLabel::from_char(c).ok_or_else(|| domain(format!("bad site label {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if sites.is_empty() {
            return Err(domain("empty configuration"));
        }
        Ok(Self { sites })
    }
}

/// Sum of `S_z` over all sites of `config`.
pub fn total_magnetization(config: &BasisConfig) -> i32 {
    config.total_magnetization()
}

/// Magnetisation of the configuration with the given index, without
/// allocating the decoded configuration.
pub fn index_magnetization(mut index: usize, n: usize) -> i32 {
    let mut m = 0;
    for _ in 0..n {
        m += 1 - (index % 3) as i32;
        index /= 3;
    }
    m
}

/// `3^n`, refusing chains above [`MAX_DENSE_SITES`].
pub fn basis_dim(n: usize) -> Result<usize> {
    if n > MAX_DENSE_SITES {
        return Err(Error::Resource(format!(
            "{n} sites exceeds the dense cap of {MAX_DENSE_SITES}"
        )));
    }
    Ok(3usize.pow(n as u32))
}

/// Dense amplitude vector over the `3^N` product basis.
#[derive(Clone, Debug, PartialEq)]
pub struct QutritState {
    n_sites: usize,
    amplitudes: Vec<Complex64>,
}

impl QutritState {
    pub fn zeros(n_sites: usize) -> Result<Self> {
        let dim = basis_dim(n_sites)?;
        Ok(Self { n_sites, amplitudes: vec![Complex64::new(0.0, 0.0); dim] })
    }

    pub fn basis(config: &BasisConfig) -> Result<Self> {
        let mut s = Self::zeros(config.len())?;
        s.amplitudes[config.encode()] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = basis_dim(n_sites)?;
        if amplitudes.len() != dim {
            return Err(domain(format!(
                "{} amplitudes for {n_sites} sites (expected {dim})",
                amplitudes.len()
            )));
        }
        Ok(Self { n_sites, amplitudes })
    }

    pub fn from_real(n_sites: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(n_sites, amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, config: &BasisConfig) -> Complex64 {
        self.amplitudes[config.encode()]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Numerical(format!("cannot normalise a state of norm {n}")));
        }
        for a in &mut self.amplitudes {
            *a /= n;
        }
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QutritState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(domain(format!("dimension mismatch {} vs {}", self.dim(), other.dim())));
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// `|⟨config|self⟩|²`.
    pub fn population(&self, config: &BasisConfig) -> f64 {
        self.amplitude(config).norm_sqr()
    }

    /// Expectation value of the total magnetisation.
    pub fn magnetization(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * index_magnetization(i, self.n_sites) as f64)
            .sum()
    }

    /// Weight of the state in each total-magnetisation sector.
    pub fn sector_weights(&self) -> Vec<(i32, f64)> {
        let n = self.n_sites as i32;
        let mut w = vec![0.0; (2 * n + 1) as usize];
        for (i, a) in self.amplitudes.iter().enumerate() {
            w[(index_magnetization(i, self.n_sites) + n) as usize] += a.norm_sqr();
        }
        w.into_iter().enumerate().map(|(k, v)| (k as i32 - n, v)).collect()
    }

    /// Largest-magnitude configuration.
    pub fn dominant_config(&self) -> BasisConfig {
        let (idx, _) = self
            .amplitudes
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, a)| if a.norm_sqr() > best.1 { (i, a.norm_sqr()) } else { best });
        BasisConfig::decode_unchecked(idx, self.n_sites)
    }

    /// Reduced density matrix of the contiguous site range `subsystem`.
    pub fn partial_trace(&self, subsystem: Range<usize>) -> Result<DenseMatrix> {
        partial_trace(self, subsystem)
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Reduced density matrix `ρ_A = Tr_B |ψ⟩⟨ψ|` for a contiguous range of
/// sites `A`. Rows and columns are indexed by the base-3 encoding of the
/// subsystem configuration.
pub fn partial_trace(state: &QutritState, subsystem: Range<usize>) -> Result<DenseMatrix> {
    let n = state.n_sites;
    if subsystem.start >= subsystem.end || subsystem.end > n {
        return Err(domain(format!("subsystem {subsystem:?} is not a non-empty range of 0..{n}")));
    }
    if subsystem.end - subsystem.start == n {
        return Err(domain("subsystem covers the whole chain"));
    }
    let left = 3usize.pow(subsystem.start as u32);
    let dim_a = 3usize.pow((subsystem.end - subsystem.start) as u32);
    let right = 3usize.pow((n - subsystem.end) as u32);
    let psi = &state.amplitudes;
    let mut rho = DenseMatrix::zeros(dim_a, dim_a);
    for l in 0..left {
        let base = l * dim_a * right;
        for a in 0..dim_a {
            let row = base + a * right;
            for b in a..dim_a {
                let col = base + b * right;
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..right {
                    acc += psi[row + r] * psi[col + r].conj();
                }
                rho[(a, b)] += acc;
            }
        }
    }
    for a in 0..dim_a {
        rho[(a, a)].im = 0.0;
        for b in a + 1..dim_a {
            rho[(b, a)] = rho[(a, b)].conj();
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: &str) -> BasisConfig {
        s.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(cfg("0").encode(), 1);
        assert_eq!(cfg("ud").encode(), 2);
        assert_eq!(cfg("d0u").encode(), 21);
    }

    #[test]
    fn decode_examples() {
        assert_eq!(BasisConfig::decode(1, 1).unwrap(), cfg("0"));
        assert_eq!(BasisConfig::decode(2, 2).unwrap(), cfg("ud"));
        assert_eq!(BasisConfig::decode(21, 3).unwrap(), cfg("d0u"));
        assert!(matches!(BasisConfig::decode(9, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn decode_encode_exhaustive() {
        for n in 1..=6 {
            for i in 0..3usize.pow(n as u32) {
                let c = BasisConfig::decode(i, n).unwrap();
                assert_eq!(c.encode(), i);
                assert_eq!(index_magnetization(i, n), c.total_magnetization());
            }
        }
    }

    #[test]
    fn magnetization_examples() {
        assert_eq!(total_magnetization(&cfg("00")), 0);
        assert_eq!(total_magnetization(&cfg("ud0")), 0);
        assert_eq!(total_magnetization(&cfg("dd")), -2);
    }

    #[test]
    fn display_and_parse() {
        let c = cfg("↑0↓");
        assert_eq!(c.to_string(), "↑0↓");
        assert_eq!(c.to_ascii(), "u0d");
        assert!("u x".parse::<BasisConfig>().is_err());
    }

    #[test]
    fn partial_trace_product_state() {
        let s = QutritState::basis(&cfg("00")).unwrap();
        let rho = s.partial_trace(0..1).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let expect = if a == 1 && b == 1 { 1.0 } else { 0.0 };
                assert!((rho[(a, b)] - Complex64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn partial_trace_bell_like() {
        let h = 1.0 / 2f64.sqrt();
        let mut amps = vec![0.0; 9];
        amps[cfg("ud").encode()] = h;
        amps[cfg("00").encode()] = h;
        let s = QutritState::from_real(2, &amps).unwrap();
        let rho = s.partial_trace(0..1).unwrap();
        let diag: Vec<f64> = (0..3).map(|i| rho[(i, i)].re).collect();
        assert!((diag[0] - 0.5).abs() < 1e-15);
        assert!((diag[1] - 0.5).abs() < 1e-15);
        assert!(diag[2].abs() < 1e-15);
        assert!(rho[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_ranges() {
        let s = QutritState::basis(&cfg("000")).unwrap();
        assert!(s.partial_trace(1..1).is_err());
        assert!(s.partial_trace(0..3).is_err());
        assert!(s.partial_trace(2..4).is_err());
        assert!(s.partial_trace(1..2).is_ok());
    }

    #[test]
    fn normalize_zero_fails() {
        let mut s = QutritState::zeros(2).unwrap();
        assert!(s.normalize().is_err());
    }

    #[test]
    fn dense_cap() {
        assert!(matches!(QutritState::zeros(MAX_DENSE_SITES + 1), Err(Error::Resource(_))));
    }
}
