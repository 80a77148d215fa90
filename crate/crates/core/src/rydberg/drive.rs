use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::qutrit::basis_dim;
use crate::sparse::{embed_one_site, site_ketbra, SparseOperator};

/// A driven level. The Rabi drive on `Up` couples `|0⟩ ↔ |↑⟩`, the one on
/// `Down` couples `|0⟩ ↔ |↓⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Up,
    Down,
}

impl Level {
    pub fn digit(self) -> usize {
        match self {
            Level::Up => 0,
            Level::Down => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::Up => "up",
            Level::Down => "down",
        }
    }
}

/// Piecewise-linear function through `(time, value)` knots, held constant
/// outside the knot range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(domain("a ramp needs at least one knot"));
        }
        if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(domain("ramp knots must be finite"));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(domain("ramp knot times must be strictly increasing"));
        }
        Ok(Self { knots })
    }

    pub fn constant(value: f64) -> Self {
        Self { knots: vec![(0.0, value)] }
    }

    pub fn linear(t0: f64, v0: f64, t1: f64, v1: f64) -> Result<Self> {
        Self::new(vec![(t0, v0), (t1, v1)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= k[0].0 {
            return k[0].1;
        }
        let last = k[k.len() - 1];
        if t >= last.0 {
            return last.1;
        }
        let i = k.partition_point(|&(tk, _)| tk <= t);
        let ((t0, v0), (t1, v1)) = (k[i - 1], k[i]);
        if t == t1 {
            return v1;
        }
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Largest `|dv/dt|` over the segments.
    pub fn max_rate(&self) -> f64 {
        self.knots.windows(2).map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.knots.iter().map(|k| k.1.abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiDrive {
    pub site: usize,
    pub level: Level,
    /// Ω in MHz; the matrix element is Ω/2.
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningRamp {
    pub site: usize,
    pub level: Level,
    pub ramp: PiecewiseLinear,
}

/// Which `(site, level)` pairs receive a detuning ramp.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetuningPlan {
    /// `|↓⟩` on the first site and `|↑⟩` on the last.
    #[default]
    Edges,
    /// Explicit targets, each ramped to the common maximum.
    Custom(Vec<(usize, Level)>),
}

impl DetuningPlan {
    pub fn targets(&self, n: usize) -> Vec<(usize, Level)> {
        match self {
            DetuningPlan::Edges => vec![(0, Level::Down), (n - 1, Level::Up)],
            DetuningPlan::Custom(t) => t.clone(),
        }
    }
}

/// Constant Rabi drives plus time-dependent detunings on `[0, duration]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSchedule {
    pub duration: f64,
    #[serde(default)]
    pub rabi: Vec<RabiDrive>,
    #[serde(default)]
    pub detunings: Vec<DetuningRamp>,
}

impl ControlSchedule {
    pub fn empty(duration: f64) -> Self {
        Self { duration, rabi: Vec::new(), detunings: Vec::new() }
    }

    /// Linear ramps `0 → delta_max` over the full duration on every planned
    /// target, each with a Rabi drive of strength `omega` on the same level.
    pub fn linear_ramp(n: usize, duration: f64, delta_max: f64, omega: f64, plan: &DetuningPlan) -> Result<Self> {
        if n == 0 {
            return Err(domain("schedule needs at least one site"));
        }
        if !(duration > 0.0) {
            return Err(domain("ramp duration must be positive"));
        }
        let mut s = Self::empty(duration);
        for (site, level) in plan.targets(n) {
            s.detunings.push(DetuningRamp { site, level, ramp: PiecewiseLinear::linear(0.0, 0.0, duration, delta_max)? });
            if omega != 0.0 {
                s.rabi.push(RabiDrive { site, level, omega });
            }
        }
        Ok(s)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(domain("schedule duration must be finite and non-negative"));
        }
        let bad_site = self.rabi.iter().map(|r| r.site).chain(self.detunings.iter().map(|d| d.site)).find(|&s| s >= n);
        if let Some(s) = bad_site {
            return Err(domain(format!("schedule addresses site {s} of a {n}-site chain")));
        }
        if self.rabi.iter().any(|r| !r.omega.is_finite()) {
            return Err(domain("Rabi amplitudes must be finite"));
        }
        Ok(())
    }

    pub fn max_ramp_rate(&self) -> f64 {
        self.detunings.iter().map(|d| d.ramp.max_rate()).fold(0.0, f64::max)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * self.duration.max(1.0);
        if !(t >= -slack && t <= self.duration + slack) {
            return Err(domain(format!("time {t} outside the schedule [0, {}]", self.duration)));
        }
        Ok(())
    }

    /// The drive part that does not depend on time.
    pub fn rabi_operator(&self, n: usize) -> Result<SparseOperator> {
        let dim = basis_dim(n)?;
        let mut triplets = Vec::new();
        for r in &self.rabi {
            triplets.extend(rabi_term(r.site, r.level, n)?.scaled(r.omega).entries());
        }
        SparseOperator::from_triplets(dim, triplets, true)
    }

    /// Diagonal of `Σ δ(t) |α⟩⟨α|` over all ramps.
    pub fn detuning_diagonal(&self, t: f64, n: usize) -> Result<Vec<f64>> {
        let mut d = vec![0.0; basis_dim(n)?];
        for ramp in &self.detunings {
            let v = ramp.ramp.eval(t);
            for (x, p) in d.iter_mut().zip(level_projector_diagonal(ramp.site, ramp.level, n)?) {
                *x += v * p;
            }
        }
        Ok(d)
    }
}

/// `½(|0⟩⟨α| + |α⟩⟨0|)` on `site`.
pub fn rabi_term(site: usize, level: Level, n: usize) -> Result<SparseOperator> {
    let a = level.digit();
    let op = (site_ketbra(1, a) + site_ketbra(a, 1)) * Complex64::new(0.5, 0.0);
    embed_one_site(&op, site, n)
}

/// `|α⟩⟨α|` on `site`.
pub fn detuning_term(site: usize, level: Level, n: usize) -> Result<SparseOperator> {
    embed_one_site(&site_ketbra(level.digit(), level.digit()), site, n)
}

/// Diagonal of `|α⟩⟨α|_site` as 0/1 values.
pub fn level_projector_diagonal(site: usize, level: Level, n: usize) -> Result<Vec<f64>> {
    if site >= n {
        return Err(domain(format!("site {site} outside a chain of {n} sites")));
    }
    let dim = basis_dim(n)?;
    let p = 3usize.pow((n - 1 - site) as u32);
    Ok((0..dim).map(|x| if (x / p) % 3 == level.digit() { 1.0 } else { 0.0 }).collect())
}

/// `Σ_i Σ_α [Ω/2 (|0⟩⟨α| + h.c.) + δ(t) |α⟩⟨α|]` at time `t`.
pub fn build_control_hamiltonian(schedule: &ControlSchedule, t: f64, n: usize) -> Result<SparseOperator> {
    schedule.validate(n)?;
    schedule.check_time(t)?;
    let drive = schedule.rabi_operator(n)?;
    let diag = SparseOperator::diagonal(&schedule.detuning_diagonal(t, n)?);
    drive.add(&diag)
}

/// What a GRAPE control channel does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlKind {
    Rabi,
    Detuning,
}

/// One piecewise-constant control. `site = None` drives every site at once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlChannel {
    pub kind: ControlKind,
    pub level: Level,
    pub site: Option<usize>,
}

impl ControlChannel {
    pub fn label(&self) -> String {
        let k = match self.kind {
            ControlKind::Rabi => "omega",
            ControlKind::Detuning => "delta",
        };
        match self.site {
            Some(s) => format!("{k}_{}_{s}", self.level.name()),
            None => format!("{k}_{}", self.level.name()),
        }
    }

    /// The Hermitian operator multiplying this channel's value.
    pub fn operator(&self, n: usize) -> Result<SparseOperator> {
        let sites: Vec<usize> = match self.site {
            Some(s) => vec![s],
            None => (0..n).collect(),
        };
        let dim = basis_dim(n)?;
        let mut triplets = Vec::new();
        for s in sites {
            let term = match self.kind {
                ControlKind::Rabi => rabi_term(s, self.level, n)?,
                ControlKind::Detuning => detuning_term(s, self.level, n)?,
            };
            triplets.extend(term.entries());
        }
        SparseOperator::from_triplets(dim, triplets, true)
    }
}

/// The four global channels `Ω↑, Ω↓, δ↑, δ↓`.
pub fn global_channels() -> Vec<ControlChannel> {
    let mut v = Vec::new();
    for kind in [ControlKind::Rabi, ControlKind::Detuning] {
        for level in [Level::Up, Level::Down] {
            v.push(ControlChannel { kind, level, site: None });
        }
    }
    v
}

/// The same four channels on every site separately.
pub fn per_site_channels(n: usize) -> Vec<ControlChannel> {
    (0..n)
        .flat_map(|s| global_channels().into_iter().map(move |c| ControlChannel { site: Some(s), ..c }))
        .collect()
}

/// Piecewise-constant controls on `n_slices` equal slices of width `dt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseGrid {
    pub dt: f64,
    pub channels: Vec<ControlChannel>,
    /// `values[slice][channel]` in MHz.
    pub values: Vec<Vec<f64>>,
}

impl PulseGrid {
    pub fn zeros(n_slices: usize, duration: f64, channels: Vec<ControlChannel>) -> Result<Self> {
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(domain("pulse grid duration must be finite and non-negative"));
        }
        if n_slices == 0 {
            return Err(domain("pulse grid needs at least one slice"));
        }
        let values = vec![vec![0.0; channels.len()]; n_slices];
        Ok(Self { dt: duration / n_slices as f64, channels, values })
    }

    /// Per-site grid that samples `schedule` at slice midpoints.
    pub fn from_schedule(schedule: &ControlSchedule, n_slices: usize, n: usize) -> Result<Self> {
        schedule.validate(n)?;
        let mut grid = Self::zeros(n_slices, schedule.duration, per_site_channels(n))?;
        for k in 0..n_slices {
            let t = grid.midpoint(k);
            for (c, ch) in grid.channels.clone().iter().enumerate() {
                let (site, level) = (ch.site.unwrap(), ch.level);
                let v: f64 = match ch.kind {
                    ControlKind::Rabi => schedule.rabi.iter().filter(|r| r.site == site && r.level == level).map(|r| r.omega).sum(),
                    ControlKind::Detuning => schedule
                        .detunings
                        .iter()
                        .filter(|d| d.site == site && d.level == level)
                        .map(|d| d.ramp.eval(t))
                        .sum(),
                };
                grid.values[k][c] = v;
            }
        }
        Ok(grid)
    }

    pub fn n_slices(&self) -> usize {
        self.values.len()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.n_slices() as f64
    }

    pub fn midpoint(&self, slice: usize) -> f64 {
        (slice as f64 + 0.5) * self.dt
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.values.iter().any(|row| row.len() != self.channels.len()) {
            return Err(Error::Config("pulse grid rows must match the channel list".into()));
        }
        if self.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("pulse grid holds a non-finite value".into()));
        }
        if let Some(s) = self.channels.iter().filter_map(|c| c.site).find(|&s| s >= n) {
            return Err(domain(format!("pulse grid addresses site {s} of a {n}-site chain")));
        }
        Ok(())
    }
}

/// Control operators of every channel, built once per grid and chain size.
pub fn channel_operators(grid: &PulseGrid, n: usize) -> Result<Vec<SparseOperator>> {
    grid.channels.iter().map(|c| c.operator(n)).collect()
}

/// The drive Hamiltonian during one slice.
pub fn build_microwave_hamiltonian(grid: &PulseGrid, slice: usize, n: usize) -> Result<SparseOperator> {
    grid.validate(n)?;
    if slice >= grid.n_slices() {
        return Err(domain(format!("slice {slice} outside a grid of {} slices", grid.n_slices())));
    }
    let ops = channel_operators(grid, n)?;
    let terms: Vec<(f64, &SparseOperator)> = grid.values[slice].iter().copied().zip(ops.iter()).collect();
    SparseOperator::linear_combination(&terms, basis_dim(n)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_eval() {
        let p = PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 10.0), (3.0, 0.0)]).unwrap();
        assert_eq!(p.eval(-1.0), 0.0);
        assert_eq!(p.eval(0.5), 5.0);
        assert_eq!(p.eval(1.0), 10.0);
        assert_eq!(p.eval(2.0), 5.0);
        assert_eq!(p.eval(9.0), 0.0);
        assert_eq!(p.max_rate(), 10.0);
        assert!(PiecewiseLinear::new(vec![(1.0, 0.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn zero_schedule_is_zero() {
        let s = ControlSchedule::empty(1.0);
        assert_eq!(build_control_hamiltonian(&s, 0.5, 2).unwrap().nnz(), 0);
        assert!(build_control_hamiltonian(&s, 1.5, 2).is_err());
    }

    #[test]
    fn edge_ramp_endpoint() {
        let mut s = ControlSchedule::linear_ramp(2, 10.0, 200.0, 0.0, &DetuningPlan::Edges).unwrap();
        s.detunings.retain(|d| d.site == 0);
        let h = build_control_hamiltonian(&s, 10.0, 2).unwrap();
        for x in 0..9 {
            let want = if x / 3 == 2 { 200.0 } else { 0.0 };
            assert_eq!(h.get(x, x).re, want);
        }
        assert_eq!(h.nnz(), 3);
        assert_eq!(s.max_ramp_rate(), 20.0);
    }

    #[test]
    fn single_rabi_slice() {
        let mut g = PulseGrid::zeros(2, 1.0, per_site_channels(1)).unwrap();
        g.values[0][0] = 1.0;
        let h = build_microwave_hamiltonian(&g, 0, 1).unwrap();
        assert_eq!(h.nnz(), 2);
        assert_eq!(h.get(0, 1).re, 0.5);
        assert_eq!(h.get(1, 0).re, 0.5);
        assert_eq!(build_microwave_hamiltonian(&g, 1, 1).unwrap().nnz(), 0);
        assert!(build_microwave_hamiltonian(&g, 2, 1).is_err());
    }

    #[test]
    fn grid_matches_schedule_at_midpoints() {
        let s = ControlSchedule::linear_ramp(3, 4.0, 50.0, 0.3, &DetuningPlan::Edges).unwrap();
        let g = PulseGrid::from_schedule(&s, 8, 3).unwrap();
        assert!((g.duration() - 4.0).abs() < 1e-9);
        for k in 0..8 {
            let a = build_microwave_hamiltonian(&g, k, 3).unwrap();
            let b = build_control_hamiltonian(&s, g.midpoint(k), 3).unwrap();
            let d = SparseOperator::linear_combination(&[(1.0, &a), (-1.0, &b)], a.dim()).unwrap();
            assert!(d.max_abs_entry() < 1e-12);
        }
    }
}
