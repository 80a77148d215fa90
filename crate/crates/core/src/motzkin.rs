//! Motzkin path combinatorics, the Motzkin state and the Motzkin Hamiltonian.

use num_bigint::BigUint;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qutrit::{BasisConfig, DenseMatrix, QutritState, SiteLabel};
use crate::sparse::{embed_one_site, embed_two_site, site_ketbra, two_site_ketbra, SparseOperator};

/// Longest chain [`enumerate_paths`] will list.
pub const MAX_ENUMERATION_SITES: usize = 16;

/// Indices into the ordered two-site basis.
pub mod pair {
    pub const UP_UP: usize = 0;
    pub const UP_FLAT: usize = 1;
    pub const UP_DOWN: usize = 2;
    pub const FLAT_UP: usize = 3;
    pub const FLAT_FLAT: usize = 4;
    pub const FLAT_DOWN: usize = 5;
    pub const DOWN_UP: usize = 6;
    pub const DOWN_FLAT: usize = 7;
    pub const DOWN_DOWN: usize = 8;

    pub const LABELS: [&str; 9] = ["↑↑", "↑0", "↑↓", "0↑", "00", "0↓", "↓↑", "↓0", "↓↓"];
}

/// A configuration read as a lattice path, with its running heights
/// `h_0 = 0, h_k = h_{k-1} + S_z(step_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotzkinPath {
    steps: BasisConfig,
    heights: Vec<i32>,
}

impl MotzkinPath {
    pub fn new(steps: BasisConfig) -> Self {
        let heights = heights(&steps);
        Self { steps, heights }
    }

    pub fn steps(&self) -> &BasisConfig {
        &self.steps
    }

    pub fn heights(&self) -> &[i32] {
        &self.heights
    }

    /// Starts and ends at height zero and never dips below it.
    pub fn is_valid(&self) -> bool {
        self.heights.last() == Some(&0) && self.heights.iter().all(|&h| h >= 0)
    }
}

fn heights(steps: &BasisConfig) -> Vec<i32> {
    let mut h = Vec::with_capacity(steps.len() + 1);
    h.push(0);
    let mut cur = 0;
    for s in steps.sites() {
        cur += s.sz();
        h.push(cur);
    }
    h
}

fn is_motzkin(steps: &[SiteLabel]) -> bool {
    let mut h = 0;
    for s in steps {
        h += s.sz();
        if h < 0 {
            return false;
        }
    }
    h == 0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PathClass {
    Motzkin,
    /// Not a Motzkin path, but its up/down mirror is.
    InverseMotzkin,
    Other,
}

impl PathClass {
    pub fn name(self) -> &'static str {
        match self {
            PathClass::Motzkin => "motzkin",
            PathClass::InverseMotzkin => "inverse-motzkin",
            PathClass::Other => "other",
        }
    }
}

pub fn classify(config: &BasisConfig) -> PathClass {
    if is_motzkin(config.sites()) {
        PathClass::Motzkin
    } else if is_motzkin(config.mirrored().sites()) {
        PathClass::InverseMotzkin
    } else {
        PathClass::Other
    }
}

/// Number of Motzkin paths of length `n`, from
/// `M_{k+1} = M_k + Σ_{j<k} M_j M_{k-1-j}`.
pub fn motzkin_number(n: usize) -> BigUint {
    let mut m: Vec<BigUint> = vec![BigUint::from(1u32), BigUint::from(1u32)];
    for k in 1..n {
        let mut next = m[k].clone();
        for j in 0..k {
            next += &m[j] * &m[k - 1 - j];
        }
        m.push(next);
    }
    m.swap_remove(n)
}

/// All Motzkin paths of length `n` in increasing index order.
pub fn enumerate_paths(n: usize) -> Result<Vec<MotzkinPath>> {
    if n == 0 {
        return Err(Error::Domain("paths need at least one step".into()));
    }
    if n > MAX_ENUMERATION_SITES {
        return Err(Error::Resource(format!(
            "enumerating length-{n} paths exceeds the cap of {MAX_ENUMERATION_SITES}"
        )));
    }
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(n);
    descend(n, 0, &mut stack, &mut out);
    Ok(out)
}

// Labels are tried in digit order, so output is sorted by encode().
fn descend(n: usize, height: i32, prefix: &mut Vec<SiteLabel>, out: &mut Vec<MotzkinPath>) {
    let remaining = (n - prefix.len()) as i32;
    if remaining == 0 {
        if height == 0 {
            out.push(MotzkinPath::new(BasisConfig::new(prefix.clone())));
        }
        return;
    }
    for label in SiteLabel::ALL {
        let h = height + label.sz();
        if h < 0 || h > remaining - 1 {
            continue;
        }
        prefix.push(label);
        descend(n, h, prefix, out);
        prefix.pop();
    }
}

/// Equal-weight superposition of all Motzkin paths of length `n`.
pub fn build_motzkin_state(n: usize) -> Result<QutritState> {
    let paths = enumerate_paths(n)?;
    let mut state = QutritState::zeros(n)?;
    let amp = Complex64::new(1.0 / (paths.len() as f64).sqrt(), 0.0);
    for p in &paths {
        state.amplitudes_mut()[p.steps().encode()] = amp;
    }
    Ok(state)
}

/// Nearest-neighbour projector `Π_{i,i+1}` in the ordered two-site basis:
/// unit weight on `↑0, 0↑, ↓0, 0↓, 00, ↑↓` and `−1` on the exchange pairs
/// `↓0↔0↓`, `↑0↔0↑`, `↑↓↔00`.
pub fn bond_projector() -> DenseMatrix {
    use pair::*;
    let mut m = DenseMatrix::zeros(9, 9);
    for d in [UP_FLAT, FLAT_UP, DOWN_FLAT, FLAT_DOWN, FLAT_FLAT, UP_DOWN] {
        m[(d, d)] = Complex64::new(1.0, 0.0);
    }
    for (a, b) in [(DOWN_FLAT, FLAT_DOWN), (UP_FLAT, FLAT_UP), (UP_DOWN, FLAT_FLAT)] {
        m[(a, b)] = Complex64::new(-1.0, 0.0);
        m[(b, a)] = Complex64::new(-1.0, 0.0);
    }
    m
}

fn half_projector(a: usize, b: usize) -> DenseMatrix {
    // (1/2)(|a⟩ − |b⟩)(⟨a| − ⟨b|)
    (two_site_ketbra(a, a) + two_site_ketbra(b, b) - two_site_ketbra(a, b) - two_site_ketbra(b, a)) * Complex64::new(0.5, 0.0)
}

/// The local projectors `Û`, `D̂`, `F̂` that cancel `uf/fu`, `df/fd` and
/// `ud/ff` pairs, each carrying its factor 1/2.
pub fn local_projectors() -> [DenseMatrix; 3] {
    use pair::*;
    [
        half_projector(UP_FLAT, FLAT_UP),
        half_projector(DOWN_FLAT, FLAT_DOWN),
        half_projector(UP_DOWN, FLAT_FLAT),
    ]
}

/// `|↓⟩⟨↓|` on the first site plus `|↑⟩⟨↑|` on the last.
pub fn boundary_projector(n: usize) -> Result<SparseOperator> {
    if n == 0 {
        return Err(Error::Domain("boundary projector needs at least one site".into()));
    }
    let down = embed_one_site(&site_ketbra(2, 2), 0, n)?;
    let up = embed_one_site(&site_ketbra(0, 0), n - 1, n)?;
    down.add(&up)
}

/// `H = ½ Σ_i Π_{i,i+1} + Π_boundary`.
pub fn build_motzkin_hamiltonian(n: usize) -> Result<SparseOperator> {
    if n < 2 {
        return Err(Error::Domain("Motzkin Hamiltonian needs at least two sites".into()));
    }
    let bond = bond_projector();
    let mut h = boundary_projector(n)?;
    for i in 0..n - 1 {
        let term = embed_two_site(&bond, i, i + 1, n)?;
        h = SparseOperator::linear_combination(&[(1.0, &h), (0.5, &term)], h.dim())?;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qutrit::index_magnetization;

    fn cfg(s: &str) -> BasisConfig {
        s.parse().unwrap()
    }

    fn brute_count(n: usize) -> usize {
        (0..3usize.pow(n as u32))
            .filter(|&i| classify(&BasisConfig::decode(i, n).unwrap()) == PathClass::Motzkin)
            .count()
    }

    #[test]
    fn small_motzkin_numbers() {
        assert_eq!(motzkin_number(0), BigUint::from(1u32));
        assert_eq!(motzkin_number(1), BigUint::from(1u32));
        assert_eq!(motzkin_number(2), BigUint::from(2u32));
        assert_eq!(motzkin_number(3), BigUint::from(4u32));
        assert_eq!(motzkin_number(4), BigUint::from(9u32));
    }

    #[test]
    fn recurrence_matches_enumeration() {
        for n in 1..=12 {
            let count = brute_count(n);
            assert_eq!(motzkin_number(n), BigUint::from(count), "n = {n}");
            assert_eq!(enumerate_paths(n).unwrap().len(), count);
        }
    }

    #[test]
    fn enumerated_paths() {
        let two: Vec<String> = enumerate_paths(2).unwrap().iter().map(|p| p.steps().to_ascii()).collect();
        assert_eq!(two, ["ud", "00"]);
        let three: Vec<String> = enumerate_paths(3).unwrap().iter().map(|p| p.steps().to_ascii()).collect();
        assert_eq!(three, ["u0d", "ud0", "0ud", "000"]);
        let idx: Vec<usize> = enumerate_paths(6).unwrap().iter().map(|p| p.steps().encode()).collect();
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(enumerate_paths(MAX_ENUMERATION_SITES + 1), Err(Error::Resource(_))));
    }

    #[test]
    fn paths_carry_heights() {
        let p = MotzkinPath::new(cfg("uu0dd"));
        assert_eq!(p.heights(), &[0, 1, 2, 2, 1, 0]);
        assert!(p.is_valid());
        assert!(!MotzkinPath::new(cfg("du")).is_valid());
    }

    #[test]
    fn enumerated_paths_have_zero_magnetization() {
        for n in 1..=10 {
            for p in enumerate_paths(n).unwrap() {
                assert_eq!(p.steps().total_magnetization(), 0);
                assert!(p.is_valid());
            }
        }
    }

    #[test]
    fn motzkin_states() {
        let s1 = build_motzkin_state(1).unwrap();
        assert_eq!(s1.amplitude(&cfg("0")).re, 1.0);
        let s2 = build_motzkin_state(2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((s2.amplitude(&cfg("ud")).re - h).abs() < 1e-15);
        assert!((s2.amplitude(&cfg("00")).re - h).abs() < 1e-15);
        let s3 = build_motzkin_state(3).unwrap();
        for c in ["ud0", "u0d", "0ud", "000"] {
            assert!((s3.amplitude(&cfg(c)).re - 0.5).abs() < 1e-15);
        }
        assert!((s3.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&cfg("ud")), PathClass::Motzkin);
        assert_eq!(classify(&cfg("du")), PathClass::InverseMotzkin);
        assert_eq!(classify(&cfg("uu")), PathClass::Other);
        assert_eq!(classify(&cfg("00")), PathClass::Motzkin);
    }

    #[test]
    fn classify_is_mirror_consistent() {
        for n in 1..=6 {
            for i in 0..3usize.pow(n as u32) {
                let c = BasisConfig::decode(i, n).unwrap();
                let class = classify(&c);
                let mirror = classify(&c.mirrored());
                match class {
                    PathClass::InverseMotzkin => assert_eq!(mirror, PathClass::Motzkin),
                    PathClass::Motzkin => assert_ne!(mirror, PathClass::Other),
                    PathClass::Other => assert_eq!(mirror, PathClass::Other),
                }
                if mirror == PathClass::Motzkin {
                    assert_ne!(class, PathClass::Other);
                }
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let b2 = boundary_projector(2).unwrap();
        assert_eq!(b2.get(cfg("00").encode(), cfg("00").encode()).re, 0.0);
        assert_eq!(b2.get(cfg("du").encode(), cfg("du").encode()).re, 2.0);
        let b3 = boundary_projector(3).unwrap();
        let i = cfg("d0d").encode();
        assert_eq!(b3.get(i, i).re, 1.0);
        for (r, c, _) in b3.entries() {
            assert_eq!(r, c);
        }
    }

    #[test]
    fn projector_forms_agree() {
        let [u, d, f] = local_projectors();
        let sum = u + d + f;
        let half = bond_projector() * Complex64::new(0.5, 0.0);
        assert!((sum - half).norm() < 1e-15);
        // Π is twice a projector: Π² = 2Π.
        let p = bond_projector();
        assert!((&p * &p - &p * Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hamiltonian_annihilates_motzkin_state() {
        for n in 2..=8 {
            let h = build_motzkin_hamiltonian(n).unwrap();
            let psi = build_motzkin_state(n).unwrap();
            assert!(h.apply(&psi).unwrap().norm() < 1e-12, "n = {n}");
            assert!(h.is_hermitian(1e-15));
        }
    }

    #[test]
    fn hamiltonian_two_site_elements() {
        let h = build_motzkin_hamiltonian(2).unwrap();
        let du = cfg("du").encode();
        assert_eq!(h.get(du, du).re, 2.0);
        let (ud, ff) = (cfg("ud").encode(), cfg("00").encode());
        assert_eq!(h.get(ud, ff).re, -0.5);
        assert!(build_motzkin_hamiltonian(1).is_err());
    }

    #[test]
    fn hamiltonian_conserves_magnetization() {
        let n = 4;
        let h = build_motzkin_hamiltonian(n).unwrap();
        let m: Vec<f64> = (0..h.dim()).map(|i| index_magnetization(i, n) as f64).collect();
        assert_eq!(h.commutator_with_diagonal(&m), 0.0);
    }
}
