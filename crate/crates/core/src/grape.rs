//! Gradient ascent pulse engineering on piecewise-constant microwave
//! controls.
//!
//! Each slice propagator is formed from a dense Hermitian eigendecomposition,
//! which also yields the exact derivative of the slice propagator with
//! respect to each control (divided differences of `exp(-iλ dt)` in the
//! eigenbasis).

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::qutrit::{BasisConfig, DenseMatrix, QutritState, SiteLabel};
use crate::rydberg::{
    build_rydberg_hamiltonian, channel_operators, global_channels, per_site_channels, ControlKind, Geometry,
    InteractionTable, ModelOptions, PulseGrid,
};
use crate::sparse::SparseOperator;
use crate::spectra::{dense_spectrum_with_cap, iterative_ground_state_with, LanczosOptions};

/// Largest dimension the dense slice propagators accept (`3^5`).
pub const MAX_GRAPE_DIM: usize = 243;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlMode {
    /// One `Ω↑, Ω↓, δ↑, δ↓` set shared by all sites.
    #[default]
    Global,
    /// Independent controls on every site.
    PerSite,
}

/// Optimiser and pulse-grid settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrapeSettings {
    pub n_slices: usize,
    pub duration_us: f64,
    pub mode: ControlMode,
    pub omega_bounds: (f64, f64),
    pub delta_bounds: (f64, f64),
    pub max_iter: usize,
    pub target_fidelity: f64,
    /// Stop when the projected gradient norm falls below this.
    pub gradient_tol: f64,
    /// Width of the random initial guess as a fraction of each bound range,
    /// centred on the middle of the range.
    pub init_spread: f64,
}

impl Default for GrapeSettings {
    fn default() -> Self {
        Self {
            n_slices: 100,
            duration_us: 10.0,
            mode: ControlMode::Global,
            omega_bounds: (0.0, 10.0),
            delta_bounds: (-50.0, 50.0),
            max_iter: 500,
            target_fidelity: 0.9999,
            gradient_tol: 1e-10,
            init_spread: 0.2,
        }
    }
}

impl GrapeSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = |b: (f64, f64)| b.0.is_finite() && b.1.is_finite() && b.0 <= b.1;
        if !ok(self.omega_bounds) || !ok(self.delta_bounds) {
            return Err(Error::Config("grape bounds must be finite with min <= max".into()));
        }
        if self.n_slices == 0 || !(self.duration_us > 0.0) {
            return Err(Error::Config("grape.n_slices and grape.duration_us must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.target_fidelity) {
            return Err(Error::Config("grape.target_fidelity must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GrapeProblem {
    pub static_op: SparseOperator,
    pub n_sites: usize,
    /// Initial guess; its channel list fixes the control set.
    pub grid: PulseGrid,
    pub initial: QutritState,
    pub target: QutritState,
    /// `(min, max)` per channel.
    pub bounds: Vec<(f64, f64)>,
    pub max_iter: usize,
    pub target_fidelity: f64,
    pub gradient_tol: f64,
    pub phase_scale: f64,
}

impl GrapeProblem {
    pub fn validate(&self) -> Result<()> {
        let n = self.n_sites;
        self.grid.validate(n)?;
        let dim = self.static_op.dim();
        if self.initial.dim() != dim || self.target.dim() != dim {
            return Err(domain("initial, target and static operator dimensions differ"));
        }
        if dim > MAX_GRAPE_DIM {
            return Err(Error::Resource(format!("GRAPE uses dense slice propagators; dimension {dim} exceeds {MAX_GRAPE_DIM}")));
        }
        for s in [&self.initial, &self.target] {
            if (s.norm() - 1.0).abs() > 1e-8 {
                return Err(domain("GRAPE initial and target states must be normalised"));
            }
        }
        if self.bounds.len() != self.grid.channels.len() || self.bounds.iter().any(|b| !(b.0 <= b.1)) {
            return Err(domain("one (min, max) bound with min <= max is needed per channel"));
        }
        if !(self.grid.dt >= 0.0) {
            return Err(domain("pulse grid duration must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GrapeResult {
    pub grid: PulseGrid,
    /// Fidelity after each accepted iterate, starting with the initial guess.
    pub fidelity_history: Vec<f64>,
    pub final_fidelity: f64,
    pub converged: bool,
    pub iterations: usize,
    /// `ψ(T)` under the returned grid.
    pub final_state: QutritState,
}

/// Dense pieces shared by every evaluation of one problem.
struct Model {
    h0: DenseMatrix,
    ops: Vec<DenseMatrix>,
    dim: usize,
}

impl Model {
    fn new(p: &GrapeProblem) -> Result<Self> {
        let s = Complex64::new(p.phase_scale, 0.0);
        let h0 = p.static_op.to_dense()? * s;
        let ops = channel_operators(&p.grid, p.n_sites)?
            .iter()
            .map(|o| Ok(o.to_dense()? * s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { h0, ops, dim: p.static_op.dim() })
    }

    fn slice_eig(&self, values: &[f64]) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
        let mut h = self.h0.clone();
        for (v, o) in values.iter().zip(&self.ops) {
            if *v != 0.0 {
                h += o * Complex64::new(*v, 0.0);
            }
        }
        let herm = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(herm)
    }
}

fn apply_exp(eig: &SymmetricEigen<Complex64, nalgebra::Dyn>, dt: f64, x: &nalgebra::DVector<Complex64>, adjoint: bool) -> nalgebra::DVector<Complex64> {
    let v = &eig.eigenvectors;
    let mut c = v.adjoint() * x;
    for (ci, l) in c.iter_mut().zip(eig.eigenvalues.iter()) {
        let ph = Complex64::from_polar(1.0, -l * dt);
        *ci *= if adjoint { ph.conj() } else { ph };
    }
    v * c
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite GRAPE quantity".into()));
    }
    Ok(())
}

struct Evaluation {
    fidelity: f64,
    final_state: nalgebra::DVector<Complex64>,
    gradient: Option<Vec<Vec<f64>>>,
}

fn evaluate(model: &Model, p: &GrapeProblem, grid: &PulseGrid, with_gradient: bool) -> Result<Evaluation> {
    let dt = grid.dt;
    let eigs: Vec<_> = grid.values.par_iter().map(|row| model.slice_eig(row)).collect();
    let psi0 = nalgebra::DVector::from_column_slice(p.initial.amplitudes());
    let target = nalgebra::DVector::from_column_slice(p.target.amplitudes());
    let mut forward = Vec::with_capacity(eigs.len() + 1);
    forward.push(psi0);
    for e in &eigs {
        let next = apply_exp(e, dt, forward.last().unwrap(), false);
        forward.push(next);
    }
    let psi_t = forward.last().unwrap().clone();
    let overlap = target.dotc(&psi_t);
    let fidelity = overlap.norm_sqr();
    check_finite(&[fidelity])?;
    if !with_gradient {
        return Ok(Evaluation { fidelity, final_state: psi_t, gradient: None });
    }
    // chi[k] = U_{k+1}† … U_K† |target⟩, so chi[K] = target.
    let k_slices = eigs.len();
    let mut chi = vec![target; k_slices + 1];
    for k in (0..k_slices).rev() {
        chi[k] = apply_exp(&eigs[k], dt, &chi[k + 1], true);
    }
    let gradient: Vec<Vec<f64>> = (0..k_slices)
        .into_par_iter()
        .map(|k| {
            let e = &eigs[k];
            let v = &e.eigenvectors;
            let a = v.adjoint() * &chi[k + 1];
            let b = v.adjoint() * &forward[k];
            let lam = &e.eigenvalues;
            let d = model.dim;
            let mut g = DenseMatrix::zeros(d, d);
            for r in 0..d {
                for c in 0..d {
                    let (lr, lc) = (lam[r], lam[c]);
                    let er = Complex64::from_polar(1.0, -lr * dt);
                    g[(r, c)] = if (lr - lc).abs() > 1e-9 * (1.0 + lr.abs()) {
                        (er - Complex64::from_polar(1.0, -lc * dt)) / (lr - lc)
                    } else {
                        Complex64::new(0.0, -dt) * er
                    };
                }
            }
            model
                .ops
                .iter()
                .map(|o| {
                    let oe = v.adjoint() * o * v;
                    let mut d_overlap = Complex64::new(0.0, 0.0);
                    for r in 0..d {
                        let ar = a[r].conj();
                        if ar == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        let mut row = Complex64::new(0.0, 0.0);
                        for c in 0..d {
                            row += g[(r, c)] * oe[(r, c)] * b[c];
                        }
                        d_overlap += ar * row;
                    }
                    2.0 * (overlap.conj() * d_overlap).re
                })
                .collect()
        })
        .collect();
    for row in &gradient {
        check_finite(row)?;
    }
    Ok(Evaluation { fidelity, final_state: psi_t, gradient: Some(gradient) })
}

/// `F = |⟨target|U(T)|initial⟩|²` for `grid`.
pub fn grape_fidelity(problem: &GrapeProblem, grid: &PulseGrid) -> Result<f64> {
    problem.validate()?;
    Ok(evaluate(&Model::new(problem)?, problem, grid, false)?.fidelity)
}

/// `∂F/∂u[slice][channel]` for `grid`.
pub fn grape_gradient(problem: &GrapeProblem, grid: &PulseGrid) -> Result<Vec<Vec<f64>>> {
    problem.validate()?;
    if grid.channels != problem.grid.channels {
        return Err(domain("grid channels differ from the problem's"));
    }
    Ok(evaluate(&Model::new(problem)?, problem, grid, true)?.gradient.expect("requested"))
}

fn project(values: &mut [Vec<f64>], bounds: &[(f64, f64)]) {
    for row in values.iter_mut() {
        for (v, b) in row.iter_mut().zip(bounds) {
            *v = v.clamp(b.0, b.1);
        }
    }
}

fn dot(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| x * y).sum()
}

/// Projected gradient ascent with Barzilai–Borwein steps and monotone
/// backtracking. Every returned control lies inside its bounds.
pub fn grape_optimize(problem: &GrapeProblem) -> Result<GrapeResult> {
    problem.validate()?;
    let model = Model::new(problem)?;
    let mut grid = problem.grid.clone();
    project(&mut grid.values, &problem.bounds);
    let mut ev = evaluate(&model, problem, &grid, true)?;
    let mut history = vec![ev.fidelity];
    let mut iterations = 0;
    let mut step = {
        let gmax = ev.gradient.as_ref().unwrap().iter().flatten().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax > 0.0 { 1.0 / gmax } else { 1.0 }
    };
    while ev.fidelity < problem.target_fidelity && iterations < problem.max_iter {
        let g = ev.gradient.as_ref().unwrap();
        // Projected-gradient stationarity measure.
        let mut probe = grid.values.clone();
        for (row, grow) in probe.iter_mut().zip(g) {
            row.iter_mut().zip(grow).for_each(|(v, gv)| *v += gv);
        }
        project(&mut probe, &problem.bounds);
        let pg: f64 = probe.iter().flatten().zip(grid.values.iter().flatten()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if pg < problem.gradient_tol {
            break;
        }
        let mut accepted = None;
        let mut alpha = step;
        for _ in 0..40 {
            let mut trial = grid.clone();
            for (row, grow) in trial.values.iter_mut().zip(g) {
                row.iter_mut().zip(grow).for_each(|(v, gv)| *v += alpha * gv);
            }
            project(&mut trial.values, &problem.bounds);
            let f = evaluate(&model, problem, &trial, false)?.fidelity;
            let moved: Vec<Vec<f64>> = trial.values.iter().zip(&grid.values).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
            if f > ev.fidelity + 1e-4 * dot(g, &moved).max(0.0) {
                accepted = Some((trial, moved));
                break;
            }
            alpha *= 0.5;
        }
        let Some((trial, s)) = accepted else { break };
        let next = evaluate(&model, problem, &trial, true)?;
        if next.fidelity < ev.fidelity {
            break;
        }
        // Ascent form of the BB1 step: s·s / s·(g − g_new).
        let gn = next.gradient.as_ref().unwrap();
        let y: Vec<Vec<f64>> = g.iter().zip(gn).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
        let sy = dot(&s, &y);
        let ss = dot(&s, &s);
        step = if sy > 0.0 { (ss / sy).clamp(1e-6 * step, 1e6 * step) } else { 4.0 * alpha };
        grid = trial;
        ev = next;
        history.push(ev.fidelity);
        iterations += 1;
    }
    let n = problem.n_sites;
    let final_state = QutritState::from_amplitudes(n, ev.final_state.iter().copied().collect())?;
    Ok(GrapeResult {
        grid,
        final_fidelity: ev.fidelity,
        converged: ev.fidelity >= problem.target_fidelity,
        fidelity_history: history,
        iterations,
        final_state,
    })
}

/// Bounds for each channel of `grid` according to its kind.
pub fn channel_bounds(grid: &PulseGrid, settings: &GrapeSettings) -> Vec<(f64, f64)> {
    grid.channels
        .iter()
        .map(|c| match c.kind {
            ControlKind::Rabi => settings.omega_bounds,
            ControlKind::Detuning => settings.delta_bounds,
        })
        .collect()
}

/// Seeded random guess around the middle of each bound range.
pub fn random_grid(n_sites: usize, settings: &GrapeSettings, seed: u64) -> Result<PulseGrid> {
    let channels = match settings.mode {
        ControlMode::Global => global_channels(),
        ControlMode::PerSite => per_site_channels(n_sites),
    };
    let mut grid = PulseGrid::zeros(settings.n_slices, settings.duration_us, channels)?;
    let bounds = channel_bounds(&grid, settings);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for row in grid.values.iter_mut() {
        for (v, b) in row.iter_mut().zip(&bounds) {
            let mid = 0.5 * (b.0 + b.1);
            *v = (mid + (rng.random::<f64>() - 0.5) * settings.init_spread * (b.1 - b.0)).clamp(b.0, b.1);
        }
    }
    Ok(grid)
}

#[derive(Clone, Debug)]
pub struct Preparation {
    /// Physically prepared state `ψ(T)`.
    pub state: QutritState,
    pub result: GrapeResult,
    /// Solver ground state used as the target.
    pub target: QutritState,
    pub ground_energy: f64,
}

/// Drive `|00…0⟩` towards the Rydberg ground state.
///
/// When the ground level is degenerate the target is the normalised
/// projection of `|00…0⟩` onto the ground multiplet. If the unoptimised
/// zero-control grid already meets the fidelity target it is returned
/// as is; otherwise optimisation starts from a seeded random guess.
pub fn prepare_ground_state(
    table: &InteractionTable,
    geometry: &Geometry,
    model: &ModelOptions,
    settings: &GrapeSettings,
    seed: u64,
) -> Result<Preparation> {
    settings.validate()?;
    let n = geometry.n_sites;
    let h = build_rydberg_hamiltonian(table, geometry, model)?;
    let initial = QutritState::basis(&BasisConfig::uniform(SiteLabel::Flat, n))?;
    let (ground_energy, target) = if h.dim() <= MAX_GRAPE_DIM {
        let spec = dense_spectrum_with_cap(&h, MAX_GRAPE_DIM)?;
        let target = if spec.degeneracy > 1 { ground_projection(&h, &spec.eigenvalues, &initial)? } else { spec.ground_vector };
        (spec.eigenvalues[0], target)
    } else {
        iterative_ground_state_with(&h, &LanczosOptions { seed, ..Default::default() })?
    };
    let mut problem = GrapeProblem {
        static_op: h,
        n_sites: n,
        grid: PulseGrid::zeros(settings.n_slices, settings.duration_us, match settings.mode {
            ControlMode::Global => global_channels(),
            ControlMode::PerSite => per_site_channels(n),
        })?,
        initial,
        target: target.clone(),
        bounds: Vec::new(),
        max_iter: settings.max_iter,
        target_fidelity: settings.target_fidelity,
        gradient_tol: settings.gradient_tol,
        phase_scale: model.phase_convention.scale(),
    };
    problem.bounds = channel_bounds(&problem.grid, settings);
    let zero_ok = problem.bounds.iter().all(|b| b.0 <= 0.0 && 0.0 <= b.1);
    if !(zero_ok && grape_fidelity(&problem, &problem.grid)? >= settings.target_fidelity) {
        problem.grid = random_grid(n, settings, seed)?;
    }
    let result = grape_optimize(&problem)?;
    Ok(Preparation { state: result.final_state.clone(), result, target, ground_energy })
}

/// Normalised projection of `x` onto the lowest eigenspace of `h`.
fn ground_projection(h: &SparseOperator, eigenvalues: &[f64], x: &QutritState) -> Result<QutritState> {
    let eig = SymmetricEigen::new(h.to_dense()?);
    let tol = 1e-9 * h.norm_bound().max(1.0);
    let e0 = eigenvalues[0];
    let xv = nalgebra::DVector::from_column_slice(x.amplitudes());
    let mut out = nalgebra::DVector::<Complex64>::zeros(xv.len());
    for (k, l) in eig.eigenvalues.iter().enumerate() {
        if l - e0 <= tol {
            let col = eig.eigenvectors.column(k);
            out += col * col.dotc(&xv);
        }
    }
    QutritState::from_amplitudes(x.n_sites(), out.iter().copied().collect())?.normalized()
}
