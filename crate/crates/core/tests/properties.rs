mod common;

use motzkin_rydberg::dynamics::{evolve_static, propagate, PropagationOptions};
use motzkin_rydberg::entanglement::{renyi2, von_neumann, EntanglementReport};
use motzkin_rydberg::grape::{grape_fidelity, grape_gradient, GrapeProblem};
use motzkin_rydberg::motzkin::build_motzkin_state;
use motzkin_rydberg::qutrit::{index_magnetization, DenseMatrix};
use motzkin_rydberg::rydberg::{
    build_control_hamiltonian, build_rydberg_hamiltonian, global_channels, per_site_channels, ControlSchedule, DetuningPlan, Geometry,
    InteractionTable, PulseGrid,
};
use motzkin_rydberg::sparse::embed_two_site;
use motzkin_rydberg::{BasisConfig, Complex64, QutritState, SparseOperator};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn state_from(n: usize, parts: &[(f64, f64)]) -> QutritState {
    let amps: Vec<Complex64> = parts.iter().map(|&(a, b)| c(a, b)).collect();
    QutritState::from_amplitudes(n, amps).unwrap().normalized().unwrap()
}

fn random_state(max_sites: usize) -> impl Strategy<Value = QutritState> {
    (1..=max_sites).prop_flat_map(|n| {
        proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3usize.pow(n as u32))
            .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
            .prop_map(move |v| state_from(n, &v))
    })
}

fn dense_kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.kronecker(b)
}

fn identity(d: usize) -> DenseMatrix {
    DMatrix::identity(d, d)
}

fn magnetization_diagonal(n: usize) -> Vec<f64> {
    (0..3usize.pow(n as u32)).map(|i| index_magnetization(i, n) as f64).collect()
}

fn dense_apply(m: &DenseMatrix, s: &QutritState) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(s.amplitudes());
    (m * v).iter().copied().collect()
}

/// Reduced density matrix of sites `range`, straight from the amplitudes.
fn naive_partial_trace(s: &QutritState, range: std::ops::Range<usize>) -> DenseMatrix {
    let n = s.n_sites();
    let da = 3usize.pow(range.len() as u32);
    let mut rho = DenseMatrix::zeros(da, da);
    let split = |i: usize| {
        let cfg = BasisConfig::decode(i, n).unwrap();
        let digits: Vec<usize> = cfg.sites().iter().map(|l| l.digit()).collect();
        let a = digits[range.clone()].iter().fold(0, |acc, d| acc * 3 + d);
        let rest: Vec<usize> = digits.iter().enumerate().filter(|(k, _)| !range.contains(k)).map(|(_, &d)| d).collect();
        (a, rest)
    };
    let amps = s.amplitudes();
    for i in 0..s.dim() {
        let (ai, ri) = split(i);
        for j in 0..s.dim() {
            let (aj, rj) = split(j);
            if ri == rj {
                rho[(ai, aj)] += amps[i] * amps[j].conj();
            }
        }
    }
    rho
}

fn fixture_geometry(table: &str, n: usize) -> (InteractionTable, Geometry, motzkin_rydberg::rydberg::ModelOptions) {
    let cfg = common::fixture(table);
    (cfg.interactions.clone(), cfg.geometry.for_sites(n).unwrap(), cfg.model.clone())
}

proptest! {
    #[test]
    fn encode_decode_roundtrip(n in 1usize..=10, seed in any::<u64>()) {
        let i = (seed % 3u64.pow(n as u32)) as usize;
        let cfg = BasisConfig::decode(i, n).unwrap();
        prop_assert_eq!(cfg.encode(), i);
        let text = cfg.to_ascii();
        let back: BasisConfig = text.parse().unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn two_site_embedding_matches_dense_oracle(
        n in 2usize..=4,
        pick in any::<(u8, u8)>(),
        vals in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 81),
    ) {
        let i = pick.0 as usize % n;
        let mut j = pick.1 as usize % n;
        if j == i { j = (i + 1) % n; }
        let op = DenseMatrix::from_iterator(9, 9, vals.iter().map(|&(a, b)| c(a, b)));
        let emb = embed_two_site(&op, i, j, n).unwrap().to_dense().unwrap();
        let dim = 3usize.pow(n as u32);
        for r in 0..dim {
            let rc: Vec<usize> = BasisConfig::decode(r, n).unwrap().sites().iter().map(|l| l.digit()).collect();
            for col in 0..dim {
                let cc: Vec<usize> = BasisConfig::decode(col, n).unwrap().sites().iter().map(|l| l.digit()).collect();
                let spectators = (0..n).filter(|&k| k != i && k != j).all(|k| rc[k] == cc[k]);
                let want = if spectators { op[(rc[i] * 3 + rc[j], cc[i] * 3 + cc[j])] } else { c(0.0, 0.0) };
                prop_assert!((emb[(r, col)] - want).norm() < 1e-14);
            }
        }
        if j == i + 1 {
            let kron = dense_kron(&dense_kron(&identity(3usize.pow(i as u32)), &op), &identity(3usize.pow((n - i - 2) as u32)));
            prop_assert!((&kron - &emb).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-14);
        }
    }

    #[test]
    fn sparse_apply_matches_dense(s in random_state(4), seed in any::<u64>()) {
        let n = s.n_sites().max(2);
        let s = if s.n_sites() < 2 { build_motzkin_state(2).unwrap() } else { s };
        let (t, _, o) = fixture_geometry(common::FIXTURES[(seed % 2) as usize], n);
        let g = Geometry::chain(n, 5.0 + (seed % 50) as f64 / 10.0, (seed % 90) as f64);
        let h = build_rydberg_hamiltonian(&t, &g, &o).unwrap();
        let sparse = h.apply(&s).unwrap();
        let dense = dense_apply(&h.to_dense().unwrap(), &s);
        for (a, b) in sparse.amplitudes().iter().zip(&dense) {
            prop_assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn partial_trace_matches_oracle(s in random_state(4), cut in any::<(u8, u8)>()) {
        let n = s.n_sites();
        let a = cut.0 as usize % (n + 1);
        let b = a + cut.1 as usize % (n - a + 1);
        if a == b || b - a == n { return Ok(()); }
        let rho = s.partial_trace(a..b).unwrap();
        let want = naive_partial_trace(&s, a..b);
        prop_assert!((&rho - &want).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sector_states_have_block_diagonal_rdm(n in 2usize..=6, m in -2i32..=2, seed in any::<u64>()) {
        let mut amps = vec![c(0.0, 0.0); 3usize.pow(n as u32)];
        let mut x = seed | 1;
        for (i, a) in amps.iter_mut().enumerate() {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            if index_magnetization(i, n) == m {
                *a = c((x % 1000) as f64 / 1000.0 - 0.5, ((x >> 20) % 1000) as f64 / 1000.0 - 0.5);
            }
        }
        let Ok(s) = QutritState::from_amplitudes(n, amps).unwrap().normalized() else { return Ok(()); };
        let r = EntanglementReport::analyze(&s, 0..n / 2).unwrap();
        prop_assert!(r.blocks.offdiag_leakage < 1e-14);
        let total: f64 = r.blocks.weights.iter().map(|w| w.1).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn renyi_never_exceeds_von_neumann(s in random_state(4)) {
        if s.n_sites() < 2 { return Ok(()); }
        let rho = s.partial_trace(0..s.n_sites() / 2).unwrap();
        let s1 = von_neumann(&rho).unwrap();
        let s2 = renyi2(&rho).unwrap();
        prop_assert!(s2 <= s1 + 1e-12);
        prop_assert!(s1 <= (rho.nrows() as f64).ln() + 1e-12);
    }

    #[test]
    fn schmidt_symmetry(s in random_state(4), k in any::<u8>()) {
        let n = s.n_sites();
        if n < 2 { return Ok(()); }
        let cut = 1 + k as usize % (n - 1);
        let left = EntanglementReport::analyze(&s, 0..cut).unwrap();
        let right = EntanglementReport::analyze(&s, cut..n).unwrap();
        prop_assert!((left.s1 - right.s1).abs() < 1e-9);
        prop_assert!((left.s2 - right.s2).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonians_are_hermitian_and_conserve_magnetization(
        which in 0usize..2,
        n in 2usize..=5,
        spacing in 4.0..12.0f64,
        theta in 0.0..90.0f64,
    ) {
        let (t, _, o) = fixture_geometry(common::FIXTURES[which], n);
        let g = Geometry::chain(n, spacing, theta);
        let h = build_rydberg_hamiltonian(&t, &g, &o).unwrap();
        prop_assert!(h.hermiticity_defect() < 1e-12);
        prop_assert!(h.commutator_with_diagonal(&magnetization_diagonal(n)) < 1e-12);

        let sched = ControlSchedule::linear_ramp(n, 10.0, 200.0, 0.1, &DetuningPlan::Edges).unwrap();
        let hc = build_control_hamiltonian(&sched, 3.3, n).unwrap();
        prop_assert!(hc.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn distance_scaling(which in 0usize..2, n in 2usize..=3, s in 0.5..2.0f64, theta in 5.0..85.0f64) {
        let (t, _, o) = fixture_geometry(common::FIXTURES[which], n);
        let g = Geometry::chain(n, 7.0, theta);
        let gs = g.scaled(s);
        let mut dip = InteractionTable::zero();
        dip.c3 = t.c3.clone();
        let mut vdw = t.clone();
        vdw.c3 = InteractionTable::zero().c3;
        for (table, power) in [(dip, -3), (vdw, -6)] {
            let a = build_rydberg_hamiltonian(&table, &g, &o).unwrap().to_dense().unwrap();
            let b = build_rydberg_hamiltonian(&table, &gs, &o).unwrap().to_dense().unwrap();
            let k = s.powi(power);
            let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!((&b - &a * c(k, 0.0)).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn propagation_conserves_norm(which in 0usize..2, n in 2usize..=4, dur in 0.2..2.0f64, omega in 0.0..5.0f64) {
        let (t, g, o) = fixture_geometry(common::FIXTURES[which], n);
        let h = build_rydberg_hamiltonian(&t, &g, &o).unwrap();
        let sched = ControlSchedule::linear_ramp(n, dur, 200.0, omega, &DetuningPlan::Edges).unwrap();
        let psi = build_motzkin_state(n).unwrap();
        let tr = propagate(&psi, &h, &sched, &PropagationOptions { output_points: 5, ..Default::default() }).unwrap();
        prop_assert!(tr.max_norm_drift() < 1e-10);
    }

    #[test]
    fn static_evolution_reverses(which in 0usize..2, n in 2usize..=4, t_us in 0.01..1.0f64) {
        let (t, g, o) = fixture_geometry(common::FIXTURES[which], n);
        let h = build_rydberg_hamiltonian(&t, &g, &o).unwrap();
        let psi = build_motzkin_state(n).unwrap();
        let fwd = evolve_static(&psi, &h, t_us, 1.0).unwrap();
        let back = evolve_static(&fwd, &h.scaled(-1.0), t_us, 1.0).unwrap();
        let err = back.amplitudes().iter().zip(psi.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9, "err {err}");
    }
}

fn grape_problem(n: usize, slices: usize, per_site: bool) -> GrapeProblem {
    let cfg = common::fixture("rb87_adiabatic");
    let g = cfg.geometry.for_sites(n).unwrap();
    let h = build_rydberg_hamiltonian(&cfg.interactions, &g, &cfg.model).unwrap();
    let channels = if per_site { per_site_channels(n) } else { global_channels() };
    let grid = PulseGrid::zeros(slices, 0.4, channels).unwrap();
    let bounds = vec![(-100.0, 100.0); grid.channels.len()];
    GrapeProblem {
        static_op: h,
        n_sites: n,
        grid,
        initial: QutritState::basis(&BasisConfig::uniform(motzkin_rydberg::SiteLabel::Flat, n)).unwrap(),
        target: build_motzkin_state(n).unwrap(),
        bounds,
        max_iter: 10,
        target_fidelity: 0.9999,
        gradient_tol: 1e-10,
        phase_scale: 1.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grape_gradient_matches_finite_differences(
        slices in 1usize..=8,
        per_site in any::<bool>(),
        vals in proptest::collection::vec(-3.0..3.0f64, 64),
        pick in any::<(u16, u16)>(),
    ) {
        let p = grape_problem(2, slices, per_site);
        let mut grid = p.grid.clone();
        let nc = grid.channels.len();
        for (k, row) in grid.values.iter_mut().enumerate() {
            for (ch, v) in row.iter_mut().enumerate() {
                *v = vals[(k * nc + ch) % vals.len()];
            }
        }
        let grad = grape_gradient(&p, &grid).unwrap();
        let scale = grad.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max).max(1e-3);
        // Check every entry for small problems and a sampled pair otherwise.
        let entries: Vec<(usize, usize)> = if slices * nc <= 16 {
            (0..slices).flat_map(|k| (0..nc).map(move |ch| (k, ch))).collect()
        } else {
            vec![(pick.0 as usize % slices, pick.1 as usize % nc), (slices - 1, 0), (0, nc - 1)]
        };
        for (k, ch) in entries {
            let h = 1e-5;
            let mut up = grid.clone();
            up.values[k][ch] += h;
            let mut dn = grid.clone();
            dn.values[k][ch] -= h;
            let fd = (grape_fidelity(&p, &up).unwrap() - grape_fidelity(&p, &dn).unwrap()) / (2.0 * h);
            let err = (fd - grad[k][ch]).abs() / scale;
            prop_assert!(err < 1e-5, "slice {k} channel {ch}: analytic {} fd {fd}", grad[k][ch]);
        }
    }
}

#[test]
fn step_halving_converges_at_fourth_order() {
    for name in common::FIXTURES {
        let (t, g, o) = fixture_geometry(name, 3);
        let h = build_rydberg_hamiltonian(&t, &g, &o).unwrap();
        let sched = ControlSchedule::linear_ramp(3, 1.0, 200.0, 2.0, &DetuningPlan::Edges).unwrap();
        let psi = build_motzkin_state(3).unwrap();
        let run = |dt: f64| {
            let opts = PropagationOptions { dt_max: dt, max_phase_per_step: 1e3, output_points: 2, ..Default::default() };
            propagate(&psi, &h, &sched, &opts).unwrap().final_state
        };
        let reference = run(0.0005);
        let err = |s: &QutritState| s.amplitudes().iter().zip(reference.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let (e1, e2) = (err(&run(0.01)), err(&run(0.005)));
        assert!(e1 / e2 >= 4.0, "{name}: errors {e1:e} -> {e2:e}");
    }
}

#[test]
fn ideal_entropies_match_path_counting() {
    for n in 2..=8 {
        let s = build_motzkin_state(n).unwrap();
        for cut in 1..n {
            let r = EntanglementReport::analyze(&s, 0..cut).unwrap();
            let p = common::motzkin_schmidt_weights(n, cut);
            assert!((r.s1 - common::shannon(&p)).abs() < 1e-10, "N={n} cut={cut}");
            assert!((r.s2 - common::renyi2(&p)).abs() < 1e-10, "N={n} cut={cut}");
        }
    }
}

#[test]
fn motzkin_state_is_annihilated_by_its_hamiltonian() {
    for n in 2..=8 {
        let h = motzkin_rydberg::motzkin::build_motzkin_hamiltonian(n).unwrap();
        let out = h.apply(&build_motzkin_state(n).unwrap()).unwrap();
        assert!(out.norm() < 1e-12);
    }
}

#[test]
fn zero_operator_leaves_state_alone() {
    let psi = build_motzkin_state(4).unwrap();
    let out = evolve_static(&psi, &SparseOperator::zero(81), 3.0, 1.0).unwrap();
    assert_eq!(out, psi);
}
