//! Time propagation under `H_static + H_control(t)` and the adiabatic
//! detuning-ramp protocol.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::krylov::expm_action;
use crate::motzkin::{build_motzkin_state, classify, enumerate_paths, PathClass};
use crate::qutrit::{index_magnetization, BasisConfig, QutritState};
use crate::rydberg::{
    build_rydberg_hamiltonian, level_projector_diagonal, ControlSchedule, DetuningPlan, Geometry, InteractionTable,
    ModelOptions, PiecewiseLinear,
};
use crate::sparse::SparseOperator;

/// Fourth-order commutator-free nodes and weights.
const C1: f64 = 0.5 - 0.288_675_134_594_812_9;
const C2: f64 = 0.5 + 0.288_675_134_594_812_9;
const A1: f64 = 0.25 - 0.288_675_134_594_812_9;
const A2: f64 = 0.25 + 0.288_675_134_594_812_9;

/// Above this many micro-steps a run is treated as a step-size collapse.
const MAX_MICRO_STEPS: usize = 50_000_000;

#[derive(Clone, Debug)]
pub struct PropagationOptions {
    /// Upper bound on the micro-step in µs.
    pub dt_max: f64,
    /// Upper bound on `‖H‖·dt` per micro-step, in radians.
    pub max_phase_per_step: f64,
    /// Number of evenly spaced output times, endpoints included.
    pub output_points: usize,
    pub krylov_tol: f64,
    /// Multiplies every Hamiltonian before exponentiation (1 or 2π).
    pub phase_scale: f64,
    /// Configurations whose populations are recorded. `None` tracks every
    /// Motzkin and inverse-Motzkin configuration plus the dominant
    /// configuration of the initial state.
    pub tracked: Option<Vec<BasisConfig>>,
    /// Fidelity reference recorded at every output time.
    pub target: Option<QutritState>,
    /// Keep full state vectors at the output times.
    pub keep_snapshots: bool,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            dt_max: 0.05,
            max_phase_per_step: 0.5,
            output_points: 200,
            krylov_tol: 1e-12,
            phase_scale: 1.0,
            tracked: None,
            target: None,
            keep_snapshots: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub tracked: Vec<BasisConfig>,
    /// `populations[k][t]` for tracked configuration `k`.
    pub populations: Vec<Vec<f64>>,
    pub fidelity: Option<Vec<f64>>,
    pub magnetization: Vec<f64>,
    pub norms: Vec<f64>,
    pub snapshots: Option<Vec<QutritState>>,
    pub final_state: QutritState,
    pub micro_steps: usize,
}

impl TrajectoryRecord {
    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// `|⟨target|state⟩|²`.
pub fn fidelity(state: &QutritState, target: &QutritState) -> Result<f64> {
    if state.dim() != target.dim() {
        return Err(domain(format!("fidelity between dimensions {} and {}", state.dim(), target.dim())));
    }
    Ok(target.inner(state)?.norm_sqr())
}

/// Every Motzkin path followed by every inverse-Motzkin configuration, each
/// in index order.
pub fn motzkin_and_inverse_configs(n: usize) -> Result<Vec<BasisConfig>> {
    let paths = enumerate_paths(n)?;
    let mut out: Vec<BasisConfig> = paths.iter().map(|p| p.steps().clone()).collect();
    let mut inverse: Vec<BasisConfig> = paths
        .iter()
        .map(|p| p.steps().mirrored())
        .filter(|c| classify(c) == PathClass::InverseMotzkin)
        .collect();
    inverse.sort_by_key(|c| c.encode());
    out.extend(inverse);
    Ok(out)
}

/// `H(t) = base + Σ_k δ_k(t) P_k`, with diagonal projectors `P_k`.
struct Driven<'a> {
    base: SparseOperator,
    ramps: Vec<(Vec<f64>, &'a PiecewiseLinear)>,
    norm_bound: f64,
}

impl<'a> Driven<'a> {
    fn new(static_op: &SparseOperator, schedule: &'a ControlSchedule, n: usize) -> Result<Self> {
        schedule.validate(n)?;
        let base = static_op.add(&schedule.rabi_operator(n)?)?;
        let ramps = schedule
            .detunings
            .iter()
            .map(|d| Ok((level_projector_diagonal(d.site, d.level, n)?, &d.ramp)))
            .collect::<Result<Vec<_>>>()?;
        let norm_bound = base.norm_bound() + ramps.iter().map(|(_, r)| r.max_abs()).sum::<f64>();
        Ok(Self { base, ramps, norm_bound })
    }

    fn diagonal(&self, t: f64, dim: usize) -> Vec<f64> {
        let mut d = vec![0.0; dim];
        for (p, ramp) in &self.ramps {
            let v = ramp.eval(t);
            if v != 0.0 {
                d.iter_mut().zip(p).for_each(|(x, q)| *x += v * q);
            }
        }
        d
    }

    /// `x ← exp(-i τ (w·base + diag)) x`.
    fn exp_step(&self, x: &mut [Complex64], w: f64, diag: &[f64], tau: f64, tol: f64) -> Result<()> {
        let base = &self.base;
        expm_action(
            |v, out| {
                base.apply_into(v, out);
                for ((o, vi), d) in out.iter_mut().zip(v).zip(diag) {
                    *o = *o * w + vi * *d;
                }
            },
            x,
            tau,
            tol,
        )?;
        Ok(())
    }

    /// One fourth-order commutator-free step from `t` to `t + dt`.
    fn step(&self, x: &mut [Complex64], t: f64, dt: f64, scale: f64, tol: f64) -> Result<()> {
        let dim = x.len();
        if self.ramps.is_empty() {
            return self.exp_step(x, 1.0, &vec![0.0; dim], scale * dt, tol);
        }
        let d1 = self.diagonal(t + C1 * dt, dim);
        let d2 = self.diagonal(t + C2 * dt, dim);
        let first: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| 2.0 * (A2 * a + A1 * b)).collect();
        let second: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| 2.0 * (A1 * a + A2 * b)).collect();
        // Each factor is exp(-i dt/2 (base + 2(a·d1 + b·d2))).
        self.exp_step(x, 1.0, &first, 0.5 * scale * dt, tol)?;
        self.exp_step(x, 1.0, &second, 0.5 * scale * dt, tol)
    }
}

struct Recorder {
    indices: Vec<usize>,
    populations: Vec<Vec<f64>>,
    fidelity: Option<Vec<f64>>,
    magnetization: Vec<f64>,
    norms: Vec<f64>,
    snapshots: Option<Vec<QutritState>>,
    m_of_index: Vec<f64>,
}

impl Recorder {
    fn record(&mut self, state: &QutritState, target: Option<&QutritState>) -> Result<()> {
        let amps = state.amplitudes();
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Numerical("non-finite amplitudes during propagation".into()));
        }
        for (k, &i) in self.indices.iter().enumerate() {
            self.populations[k].push(amps[i].norm_sqr());
        }
        if let (Some(f), Some(t)) = (self.fidelity.as_mut(), target) {
            f.push(fidelity(state, t)?);
        }
        self.magnetization.push(amps.iter().zip(&self.m_of_index).map(|(a, m)| a.norm_sqr() * m).sum());
        self.norms.push(state.norm());
        if let Some(s) = self.snapshots.as_mut() {
            s.push(state.clone());
        }
        Ok(())
    }
}

/// Integrate `i dψ/dt = s (H_static + H_control(t)) ψ` over the schedule,
/// where `s` is `options.phase_scale`.
pub fn propagate(
    state: &QutritState,
    static_op: &SparseOperator,
    schedule: &ControlSchedule,
    options: &PropagationOptions,
) -> Result<TrajectoryRecord> {
    let n = state.n_sites();
    if static_op.dim() != state.dim() {
        return Err(domain(format!("operator dimension {} does not match state dimension {}", static_op.dim(), state.dim())));
    }
    if (state.norm() - 1.0).abs() > 1e-8 {
        return Err(domain("propagate needs a normalised initial state"));
    }
    if !(options.dt_max > 0.0) || !(options.max_phase_per_step > 0.0) {
        return Err(domain("dt_max and max_phase_per_step must be positive"));
    }
    if let Some(t) = &options.target {
        if t.dim() != state.dim() {
            return Err(domain("fidelity target has the wrong dimension"));
        }
    }
    let driven = Driven::new(static_op, schedule, n)?;
    let tracked = match &options.tracked {
        Some(t) => t.clone(),
        None => {
            let mut t = motzkin_and_inverse_configs(n)?;
            let init = state.dominant_config();
            if !t.contains(&init) {
                t.push(init);
            }
            t
        }
    };
    if let Some(c) = tracked.iter().find(|c| c.len() != n) {
        return Err(domain(format!("tracked configuration {c} has the wrong length")));
    }
    let duration = schedule.duration;
    let points = if duration == 0.0 { 1 } else { options.output_points.max(2) };
    let times: Vec<f64> = (0..points)
        .map(|k| if points == 1 { 0.0 } else { duration * k as f64 / (points - 1) as f64 })
        .collect();

    let mut rec = Recorder {
        indices: tracked.iter().map(|c| c.encode()).collect(),
        populations: vec![Vec::with_capacity(points); tracked.len()],
        fidelity: options.target.as_ref().map(|_| Vec::with_capacity(points)),
        magnetization: Vec::with_capacity(points),
        norms: Vec::with_capacity(points),
        snapshots: options.keep_snapshots.then(Vec::new),
        m_of_index: (0..state.dim()).map(|i| index_magnetization(i, n) as f64).collect(),
    };

    let scale = options.phase_scale;
    let h_max = driven.norm_bound * scale.abs();
    let dt_cap = if h_max > 0.0 { options.dt_max.min(options.max_phase_per_step / h_max) } else { options.dt_max };
    let mut psi = state.clone();
    let mut micro_steps = 0usize;
    rec.record(&psi, options.target.as_ref())?;
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let steps = (span / dt_cap).ceil().max(1.0);
        if steps > MAX_MICRO_STEPS as f64 {
            return Err(Error::Numerical(format!("step size collapsed: {steps:.3e} micro-steps for one output interval")));
        }
        let steps = steps as usize;
        let dt = span / steps as f64;
        for s in 0..steps {
            let t = w[0] + s as f64 * dt;
            if h_max > 0.0 {
                driven.step(psi.amplitudes_mut(), t, dt, scale, options.krylov_tol)?;
            }
        }
        micro_steps += steps;
        rec.record(&psi, options.target.as_ref())?;
    }
    Ok(TrajectoryRecord {
        times,
        tracked,
        populations: rec.populations,
        fidelity: rec.fidelity,
        magnetization: rec.magnetization,
        norms: rec.norms,
        snapshots: rec.snapshots,
        final_state: psi,
        micro_steps,
    })
}

/// `exp(-i s t H) ψ` for a time-independent `H`, in micro-steps that keep
/// `‖H‖·dt` below half a radian.
pub fn evolve_static(state: &QutritState, op: &SparseOperator, t: f64, phase_scale: f64) -> Result<QutritState> {
    let opts = PropagationOptions { output_points: 2, tracked: Some(Vec::new()), phase_scale, ..Default::default() };
    Ok(propagate(state, op, &ControlSchedule::empty(t), &opts)?.final_state)
}

/// Settings of the detuning-ramp protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSettings {
    /// Ramp durations tried, in µs.
    pub durations_us: Vec<f64>,
    pub delta_max_mhz: f64,
    pub omega_mhz: f64,
    pub plan: DetuningPlan,
    pub dt_max_us: f64,
    pub output_points: usize,
}

impl Default for ProtocolSettings {
    fn default() -> Self {
        Self {
            durations_us: vec![10.0, 20.0],
            delta_max_mhz: 200.0,
            omega_mhz: 0.1,
            plan: DetuningPlan::Edges,
            dt_max_us: 0.05,
            output_points: 200,
        }
    }
}

impl ProtocolSettings {
    pub fn schedule(&self, n: usize, duration: f64) -> Result<ControlSchedule> {
        ControlSchedule::linear_ramp(n, duration, self.delta_max_mhz, self.omega_mhz, &self.plan)
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub duration: f64,
    pub trajectory: TrajectoryRecord,
    /// Overlap of the initial state with the Motzkin state.
    pub initial_fidelity: f64,
    pub final_fidelity: f64,
    pub peak_fidelity: f64,
    pub peak_time: f64,
}

/// Propagate `initial` under `H_Rydberg + H_control(t)` while recording the
/// fidelity with the ideal Motzkin state.
pub fn run_adiabatic_protocol(
    table: &InteractionTable,
    geometry: &Geometry,
    model: &ModelOptions,
    schedule: &ControlSchedule,
    initial: &QutritState,
    options: &PropagationOptions,
) -> Result<ProtocolResult> {
    let n = geometry.n_sites;
    if n < 2 {
        return Err(domain("the protocol needs at least two sites"));
    }
    if initial.n_sites() != n {
        return Err(domain("initial state and geometry disagree on the number of sites"));
    }
    let h = build_rydberg_hamiltonian(table, geometry, model)?;
    let target = build_motzkin_state(n)?;
    let opts = PropagationOptions { target: Some(target), phase_scale: model.phase_convention.scale(), ..options.clone() };
    let trajectory = propagate(initial, &h, schedule, &opts)?;
    let f = trajectory.fidelity.as_ref().expect("target was set");
    let (peak_idx, peak) = f.iter().copied().enumerate().fold((0, f64::MIN), |m, (i, v)| if v > m.1 { (i, v) } else { m });
    Ok(ProtocolResult {
        duration: schedule.duration,
        initial_fidelity: f[0],
        final_fidelity: *f.last().unwrap(),
        peak_fidelity: peak,
        peak_time: trajectory.times[peak_idx],
        trajectory,
    })
}

/// Runs over every configured duration; `best` maximises the final fidelity.
#[derive(Clone, Debug)]
pub struct ProtocolSweep {
    pub runs: Vec<ProtocolResult>,
    pub best: usize,
}

impl ProtocolSweep {
    pub fn best_run(&self) -> &ProtocolResult {
        &self.runs[self.best]
    }
}

pub fn sweep_adiabatic_protocol(
    table: &InteractionTable,
    geometry: &Geometry,
    model: &ModelOptions,
    settings: &ProtocolSettings,
    initial: &QutritState,
) -> Result<ProtocolSweep> {
    if settings.durations_us.is_empty() {
        return Err(Error::Config("protocol.durations_us is empty".into()));
    }
    let opts = PropagationOptions {
        dt_max: settings.dt_max_us,
        output_points: settings.output_points,
        ..Default::default()
    };
    let runs = settings
        .durations_us
        .iter()
        .map(|&d| run_adiabatic_protocol(table, geometry, model, &settings.schedule(geometry.n_sites, d)?, initial, &opts))
        .collect::<Result<Vec<_>>>()?;
    let best = (0..runs.len()).fold(0, |b, i| if runs[i].final_fidelity > runs[b].final_fidelity { i } else { b });
    Ok(ProtocolSweep { runs, best })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdiabaticityReport {
    pub max_ramp_rate: f64,
    pub interaction_scale: f64,
    pub pass: bool,
}

/// Compare the steepest detuning ramp (MHz/µs) with an interaction scale.
pub fn adiabaticity_report(schedule: &ControlSchedule, min_interaction_scale: f64) -> AdiabaticityReport {
    let rate = schedule.max_ramp_rate();
    AdiabaticityReport { max_ramp_rate: rate, interaction_scale: min_interaction_scale, pass: rate < min_interaction_scale }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rydberg::{Level, RabiDrive};

    fn c(s: &str) -> BasisConfig {
        s.parse().unwrap()
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let psi = build_motzkin_state(3).unwrap();
        let out = evolve_static(&psi, &SparseOperator::zero(27), 5.0, 1.0).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn rabi_oscillation() {
        let mut s = ControlSchedule::empty(std::f64::consts::PI);
        s.rabi.push(RabiDrive { site: 0, level: Level::Up, omega: 1.0 });
        let psi = QutritState::basis(&c("0")).unwrap();
        let opts = PropagationOptions { tracked: Some(vec![c("0"), c("u")]), output_points: 11, ..Default::default() };
        let tr = propagate(&psi, &SparseOperator::zero(3), &s, &opts).unwrap();
        for (k, t) in tr.times.iter().enumerate() {
            assert!((tr.populations[0][k] - (t / 2.0).cos().powi(2)).abs() < 1e-10);
        }
        assert!(tr.populations[1].last().unwrap() > &(1.0 - 1e-10));
    }

    #[test]
    fn fidelity_examples() {
        let t = build_motzkin_state(2).unwrap();
        assert!((fidelity(&t, &t).unwrap() - 1.0).abs() < 1e-15);
        let mut amps = vec![0.0; 9];
        amps[4] = 0.65;
        amps[2] = 0.76;
        amps[6] = 0.02;
        let s = QutritState::from_real(2, &amps).unwrap();
        let want = ((0.65 + 0.76) / 2f64.sqrt()).powi(2);
        assert!((fidelity(&s, &t).unwrap() - want).abs() < 1e-12);
        assert!(fidelity(&s, &build_motzkin_state(3).unwrap()).is_err());
    }

    #[test]
    fn tracked_defaults() {
        let cfgs = motzkin_and_inverse_configs(3).unwrap();
        let names: Vec<String> = cfgs.iter().map(|c| c.to_ascii()).collect();
        assert_eq!(names, ["u0d", "ud0", "0ud", "000", "0du", "du0", "d0u"]);
    }

    #[test]
    fn adiabaticity() {
        let s = ControlSchedule::linear_ramp(2, 10.0, 200.0, 0.1, &DetuningPlan::Edges).unwrap();
        let r = adiabaticity_report(&s, 35.0);
        assert!(r.pass && (r.max_ramp_rate - 20.0).abs() < 1e-12);
        let s = ControlSchedule::linear_ramp(2, 2.0, 200.0, 0.1, &DetuningPlan::Edges).unwrap();
        assert!(!adiabaticity_report(&s, 35.0).pass);
        assert!(adiabaticity_report(&ControlSchedule::empty(1.0), 35.0).pass);
    }
}
