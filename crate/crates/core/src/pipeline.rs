//! End-to-end pipelines behind the command-line tool.
//!
//! Each pipeline writes into one output directory: `config.resolved` (the
//! exact configuration used), a deterministic `summary.json`, a
//! `metadata.json` holding timestamps and wall time, and one `N{n}`
//! subdirectory per chain length with fixed file names.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{RunConfig, StateFamily};
use crate::dynamics::{
    adiabaticity_report, motzkin_and_inverse_configs, propagate, sweep_adiabatic_protocol, PropagationOptions,
    ProtocolSweep, TrajectoryRecord,
};
use crate::entanglement::{scaling_study, EntanglementReport, FamilyState};
use crate::error::{domain, Error, Result};
use crate::grape::{prepare_ground_state, Preparation};
use crate::motzkin::{build_motzkin_state, classify, motzkin_number};
use crate::output::{fmt_num, write_json, write_text, Table};
use crate::qutrit::{BasisConfig, QutritState};
use crate::rydberg::{build_rydberg_hamiltonian, check_fine_tuning, coherence_budget, compare_to_motzkin, Geometry};
use crate::spectra::{dense_spectrum_with_cap, ground_state, iterative_ground_state_with, spectrum_export};

/// A pipeline and its command-specific options.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Spectrum,
    Prepare,
    /// Propagate under the first configured ramp from `initial`, a basis
    /// configuration such as `"0u0d"`, or from the ground state.
    Evolve { initial: Option<String> },
    Protocol,
    Scaling,
    Entropy { state: StateFamily },
    Rdm { state: StateFamily },
    Paths,
    FineTune { tolerance: f64 },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Prepare => "prepare",
            Command::Evolve { .. } => "evolve",
            Command::Protocol => "protocol",
            Command::Scaling => "scaling",
            Command::Entropy { .. } => "entropy",
            Command::Rdm { .. } => "rdm",
            Command::Paths => "paths",
            Command::FineTune { .. } => "fine-tune",
        }
    }
}

/// Round to the twelve significant digits used in every output file.
fn num(x: f64) -> Value {
    match fmt_num(x).parse::<f64>() {
        Ok(v) if v.is_finite() => json!(v),
        _ => Value::Null,
    }
}

fn site_dir(out: &Path, n: usize) -> PathBuf {
    out.join(format!("N{n}"))
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    out: &'a Path,
}

impl Runner<'_> {
    fn geometry(&self, n: usize) -> Result<Geometry> {
        self.cfg.geometry.for_sites(n)
    }

    fn hamiltonian(&self, n: usize) -> Result<crate::SparseOperator> {
        build_rydberg_hamiltonian(&self.cfg.interactions, &self.geometry(n)?, &self.cfg.model)
    }

    fn ground(&self, n: usize) -> Result<(f64, QutritState)> {
        ground_state(&self.hamiltonian(n)?, self.cfg.spectrum.dense_cap, &self.solver())
    }

    fn solver(&self) -> crate::spectra::LanczosOptions {
        let mut s = self.cfg.solver.clone();
        s.seed ^= self.cfg.seed;
        s
    }

    fn prepare(&self, n: usize) -> Result<Preparation> {
        prepare_ground_state(&self.cfg.interactions, &self.geometry(n)?, &self.cfg.model, &self.cfg.grape.settings(), self.cfg.seed.wrapping_add(n as u64))
    }

    /// Initial state for the protocol and a description of its origin.
    fn protocol_initial(&self, n: usize) -> Result<(QutritState, Value)> {
        if self.cfg.protocol.uses_grape(n) {
            let p = self.prepare(n)?;
            let info = json!({
                "source": "grape",
                "grape_fidelity": num(p.result.final_fidelity),
                "grape_converged": p.result.converged,
                "grape_iterations": p.result.iterations,
            });
            Ok((p.state, info))
        } else {
            let (e, s) = self.ground(n)?;
            Ok((s, json!({ "source": "ground", "ground_energy_mhz": num(e) })))
        }
    }

    fn protocol(&self, n: usize) -> Result<(ProtocolSweep, Value)> {
        if n < 2 {
            return Err(domain("the protocol requires N >= 2"));
        }
        let (initial, info) = self.protocol_initial(n)?;
        let sweep = sweep_adiabatic_protocol(&self.cfg.interactions, &self.geometry(n)?, &self.cfg.model, &self.cfg.protocol.settings(), &initial)?;
        Ok((sweep, info))
    }

    fn family_state(&self, family: StateFamily, n: usize) -> Result<FamilyState> {
        match family {
            StateFamily::Ideal => Ok(FamilyState { state: build_motzkin_state(n)?, fidelity: Some(1.0) }),
            StateFamily::RydbergGround => {
                let (_, state) = self.ground(n)?;
                let f = crate::dynamics::fidelity(&state, &build_motzkin_state(n)?)?;
                Ok(FamilyState { state, fidelity: Some(f) })
            }
            StateFamily::Effective => {
                let (sweep, _) = self.protocol(n)?;
                let best = sweep.best_run();
                Ok(FamilyState { state: best.trajectory.final_state.clone(), fidelity: Some(best.final_fidelity) })
            }
        }
    }
}

fn state_table(state: &QutritState) -> Table {
    let n = state.n_sites();
    let mut t = Table::new(["index", "config", "re", "im", "population"]);
    for (i, a) in state.amplitudes().iter().enumerate() {
        let c = BasisConfig::decode(i, n).expect("index in range");
        t.push(vec![i.to_string(), c.to_ascii(), fmt_num(a.re), fmt_num(a.im), fmt_num(a.norm_sqr())]);
    }
    t
}

/// Largest amplitudes, for readable summaries.
fn leading_amplitudes(state: &QutritState, k: usize) -> Value {
    let n = state.n_sites();
    let mut idx: Vec<usize> = (0..state.dim()).collect();
    let a = state.amplitudes();
    idx.sort_by(|&x, &y| a[y].norm().total_cmp(&a[x].norm()).then(x.cmp(&y)));
    Value::Array(
        idx.iter()
            .take(k)
            .filter(|&&i| a[i].norm() > 1e-12)
            .map(|&i| json!({ "config": BasisConfig::decode(i, n).unwrap().to_ascii(), "abs": num(a[i].norm()) }))
            .collect(),
    )
}

fn trajectory_table(tr: &TrajectoryRecord) -> Table {
    let mut header = vec!["time_us".to_string()];
    header.extend(tr.tracked.iter().map(|c| format!("pop_{}", c.to_ascii())));
    if tr.fidelity.is_some() {
        header.push("fidelity".into());
    }
    header.extend(["magnetization".into(), "norm".into()]);
    let mut t = Table::new(header);
    for (k, time) in tr.times.iter().enumerate() {
        let mut row = vec![fmt_num(*time)];
        row.extend(tr.populations.iter().map(|p| fmt_num(p[k])));
        if let Some(f) = &tr.fidelity {
            row.push(fmt_num(f[k]));
        }
        row.push(fmt_num(tr.magnetization[k]));
        row.push(fmt_num(tr.norms[k]));
        t.push(row);
    }
    t
}

fn entropy_rows(report: &EntanglementReport, t: &mut Table) {
    t.push(vec![
        report.subsystem.len().to_string(),
        fmt_num(report.s1),
        fmt_num(report.s2),
        "e".into(),
    ]);
}

fn entropy_table() -> Table {
    Table::new(["n_a", "s1", "s2", "log_base"])
}

fn blocks_json(report: &EntanglementReport) -> Value {
    json!({
        "n_a": report.subsystem.len(),
        "s1": num(report.s1),
        "s2": num(report.s2),
        "block_weights": report.blocks.weights.iter().map(|(m, w)| json!({ "m_a": m, "weight": num(*w) })).collect::<Vec<_>>(),
        "negative_weight": num(report.blocks.negative_weight()),
        "offdiag_leakage": num(report.blocks.offdiag_leakage),
    })
}

fn rdm_table(report: &EntanglementReport) -> Table {
    let na = report.subsystem.len();
    let mut t = Table::new(["row", "col", "abs_value"]);
    let d = report.rdm.nrows();
    for r in 0..d {
        for c in 0..d {
            let rc = BasisConfig::decode(r, na).unwrap().to_ascii();
            let cc = BasisConfig::decode(c, na).unwrap().to_ascii();
            t.push(vec![rc, cc, fmt_num(report.rdm[(r, c)].norm())]);
        }
    }
    t
}

fn per_n<F>(ns: &[usize], f: F) -> Result<Vec<Value>>
where
    F: Fn(usize) -> Result<Value> + Sync,
{
    if ns.is_empty() {
        return Err(Error::Config("the list of chain lengths is empty".into()));
    }
    ns.par_iter().map(|&n| f(n)).collect()
}

fn spectrum(r: &Runner, ns: &[usize]) -> Result<Value> {
    let rows = per_n(ns, |n| {
        let h = r.hamiltonian(n)?;
        let dir = site_dir(r.out, n);
        let (e0, gs, extra) = if h.dim() <= r.cfg.spectrum.dense_cap {
            let rep = dense_spectrum_with_cap(&h, r.cfg.spectrum.dense_cap)?;
            write_text(&dir.join("spectrum.csv"), &spectrum_export(&rep))?;
            let extra = json!({ "method": "dense", "gap_mhz": num(rep.gap), "degeneracy": rep.degeneracy, "levels": rep.eigenvalues.len() });
            (rep.eigenvalues[0], rep.ground_vector, extra)
        } else {
            let (e, v) = iterative_ground_state_with(&h, &r.solver())?;
            write_text(&dir.join("spectrum.csv"), &format!("index,energy_mhz\n0,{}\n", fmt_num(e)))?;
            (e, v, json!({ "method": "lanczos", "levels": 1 }))
        };
        let m0 = gs.sector_weights().iter().find(|w| w.0 == 0).map_or(0.0, |w| w.1);
        let summary = json!({
            "n_sites": n,
            "ground_energy_mhz": num(e0),
            "solver": extra,
            "ground_m0_weight": num(m0),
            "ground_motzkin_fidelity": num(crate::dynamics::fidelity(&gs, &build_motzkin_state(n)?)?),
            "ground_leading_amplitudes": leading_amplitudes(&gs, 6),
        });
        write_json(&dir.join("summary.json"), &summary)?;
        Ok(summary)
    })?;
    Ok(json!({ "runs": rows }))
}

fn prepare(r: &Runner, ns: &[usize]) -> Result<Value> {
    let rows = per_n(ns, |n| {
        let p = r.prepare(n)?;
        let dir = site_dir(r.out, n);
        let g = &p.result.grid;
        let mut header = vec!["slice".to_string(), "t_start_us".to_string()];
        header.extend(g.channels.iter().map(|c| c.label()));
        let mut pulses = Table::new(header);
        for (k, row) in g.values.iter().enumerate() {
            let mut cells = vec![k.to_string(), fmt_num(k as f64 * g.dt)];
            cells.extend(row.iter().map(|v| fmt_num(*v)));
            pulses.push(cells);
        }
        pulses.write(&dir.join("pulses.csv"))?;
        let mut hist = Table::new(["iteration", "fidelity"]);
        for (i, f) in p.result.fidelity_history.iter().enumerate() {
            hist.push(vec![i.to_string(), fmt_num(*f)]);
        }
        hist.write(&dir.join("grape_history.csv"))?;
        state_table(&p.state).write(&dir.join("state.csv"))?;
        let summary = json!({
            "n_sites": n,
            "ground_energy_mhz": num(p.ground_energy),
            "fidelity": num(p.result.final_fidelity),
            "converged": p.result.converged,
            "iterations": p.result.iterations,
            "slices": g.n_slices(),
            "duration_us": num(g.duration()),
            "final_leading_amplitudes": leading_amplitudes(&p.state, 6),
        });
        write_json(&dir.join("summary.json"), &summary)?;
        Ok(summary)
    })?;
    Ok(json!({ "runs": rows }))
}

fn evolve(r: &Runner, ns: &[usize], initial: Option<&str>) -> Result<Value> {
    let rows = per_n(ns, |n| {
        let initial_state = match initial {
            Some(s) => {
                let c: BasisConfig = s.parse()?;
                if c.len() != n {
                    return Err(domain(format!("initial configuration {s:?} has {} sites, expected {n}", c.len())));
                }
                QutritState::basis(&c)?
            }
            None => r.ground(n)?.1,
        };
        let settings = r.cfg.protocol.settings();
        let duration = *settings.durations_us.first().ok_or_else(|| Error::Config("protocol.durations_us is empty".into()))?;
        let schedule = settings.schedule(n, duration)?;
        let opts = PropagationOptions {
            dt_max: settings.dt_max_us,
            output_points: settings.output_points,
            phase_scale: r.cfg.model.phase_convention.scale(),
            target: Some(build_motzkin_state(n)?),
            ..Default::default()
        };
        let tr = propagate(&initial_state, &r.hamiltonian(n)?, &schedule, &opts)?;
        let dir = site_dir(r.out, n);
        trajectory_table(&tr).write(&dir.join("trajectory.csv"))?;
        let summary = json!({
            "n_sites": n,
            "duration_us": num(duration),
            "micro_steps": tr.micro_steps,
            "final_fidelity": num(*tr.fidelity.as_ref().unwrap().last().unwrap()),
            "max_norm_drift": num(tr.max_norm_drift()),
        });
        write_json(&dir.join("summary.json"), &summary)?;
        Ok(summary)
    })?;
    Ok(json!({ "runs": rows }))
}

fn protocol(r: &Runner, ns: &[usize]) -> Result<Value> {
    let rows = per_n(ns, |n| {
        let (sweep, initial) = r.protocol(n)?;
        let best = sweep.best_run();
        let dir = site_dir(r.out, n);
        trajectory_table(&best.trajectory).write(&dir.join("trajectory.csv"))?;
        let ent = EntanglementReport::half_chain(&best.trajectory.final_state)?;
        let mut et = entropy_table();
        entropy_rows(&ent, &mut et);
        et.write(&dir.join("entropy.csv"))?;
        if !ent.subsystem.is_empty() {
            rdm_table(&ent).write(&dir.join("rdm.csv"))?;
        }
        state_table(&best.trajectory.final_state).write(&dir.join("state.csv"))?;
        let runs: Vec<Value> = sweep
            .runs
            .iter()
            .map(|run| {
                json!({
                    "duration_us": num(run.duration),
                    "initial_fidelity": num(run.initial_fidelity),
                    "final_fidelity": num(run.final_fidelity),
                    "peak_fidelity": num(run.peak_fidelity),
                    "peak_time_us": num(run.peak_time),
                    "micro_steps": run.trajectory.micro_steps,
                    "max_norm_drift": num(run.trajectory.max_norm_drift()),
                })
            })
            .collect();
        let schedule = r.cfg.protocol.settings().schedule(n, best.duration)?;
        let adiabatic = adiabaticity_report(&schedule, r.cfg.protocol.adiabatic_scale_mhz);
        let budget = coherence_budget(n, r.cfg.budget.lifetime_us, r.cfg.budget.protocol_time_us)?;
        let summary = json!({
            "n_sites": n,
            "initial_state": initial,
            "sweep": runs,
            "best_duration_us": num(best.duration),
            "final_fidelity": num(best.final_fidelity),
            "peak_fidelity": num(best.peak_fidelity),
            "entanglement": blocks_json(&ent),
            "final_leading_amplitudes": leading_amplitudes(&best.trajectory.final_state, 6),
            "adiabaticity": {
                "max_ramp_rate_mhz_per_us": num(adiabatic.max_ramp_rate),
                "interaction_scale_mhz": num(adiabatic.interaction_scale),
                "pass": adiabatic.pass,
            },
            "coherence_budget": {
                "lifetime_us": num(budget.lifetime_us),
                "protocol_time_us": num(budget.protocol_time_us),
                "effective_lifetime_us": num(budget.effective_lifetime_us),
                "decay_error": num(budget.decay_error),
                "flagged": budget.flagged,
            },
        });
        write_json(&dir.join("summary.json"), &summary)?;
        Ok(summary)
    })?;
    Ok(json!({ "runs": rows }))
}

fn scaling(r: &Runner, ns: &[usize]) -> Result<Value> {
    if ns.is_empty() {
        return Err(Error::Config("scaling.n_values is empty".into()));
    }
    let mut families = serde_json::Map::new();
    for &family in &r.cfg.scaling.families {
        let states: Vec<FamilyState> = ns.par_iter().map(|&n| r.family_state(family, n)).collect::<Result<_>>()?;
        let mut it = states.into_iter();
        let rows = scaling_study(ns, |_| Ok(it.next().expect("one state per N")))?;
        let mut t = Table::new(["n", "n_a", "s1", "s2", "fidelity", "log_base"]);
        for row in &rows {
            t.push(vec![
                row.n_sites.to_string(),
                row.n_a.to_string(),
                fmt_num(row.s1),
                fmt_num(row.s2),
                row.fidelity.map_or(String::new(), fmt_num),
                "e".into(),
            ]);
        }
        t.write(&r.out.join(family.name()).join("entropy.csv"))?;
        families.insert(
            family.name().into(),
            Value::Array(
                rows.iter()
                    .map(|row| json!({ "n_sites": row.n_sites, "s1": num(row.s1), "s2": num(row.s2), "fidelity": row.fidelity.map(num) }))
                    .collect(),
            ),
        );
    }
    Ok(json!({ "families": families }))
}

fn entropy(r: &Runner, ns: &[usize], family: StateFamily) -> Result<Value> {
    let rows = per_n(ns, |n| {
        let fs = r.family_state(family, n)?;
        let mut t = entropy_table();
        let mut cuts = Vec::new();
        for na in 1..n {
            let rep = EntanglementReport::analyze(&fs.state, 0..na)?;
            entropy_rows(&rep, &mut t);
            cuts.push(json!({ "n_a": na, "s1": num(rep.s1), "s2": num(rep.s2) }));
        }
        let dir = site_dir(r.out, n);
        t.write(&dir.join("entropy.csv"))?;
        let summary = json!({ "n_sites": n, "state": family.name(), "fidelity": fs.fidelity.map(num), "cuts": cuts });
        write_json(&dir.join("summary.json"), &summary)?;
        Ok(summary)
    })?;
    Ok(json!({ "runs": rows }))
}

fn rdm(r: &Runner, ns: &[usize], family: StateFamily) -> Result<Value> {
    let rows = per_n(ns, |n| {
        let na = r.cfg.entanglement.n_a.unwrap_or(n / 2);
        if na == 0 || na >= n {
            return Err(domain(format!("subsystem size {na} is not a proper part of {n} sites")));
        }
        let fs = r.family_state(family, n)?;
        let rep = EntanglementReport::analyze(&fs.state, 0..na)?;
        let dir = site_dir(r.out, n);
        rdm_table(&rep).write(&dir.join("rdm.csv"))?;
        let summary = json!({ "n_sites": n, "state": family.name(), "fidelity": fs.fidelity.map(num), "rdm": blocks_json(&rep) });
        write_json(&dir.join("summary.json"), &summary)?;
        Ok(summary)
    })?;
    Ok(json!({ "runs": rows }))
}

fn paths(r: &Runner, ns: &[usize]) -> Result<Value> {
    let rows = per_n(ns, |n| {
        let mut t = Table::new(["index", "config", "class"]);
        for c in motzkin_and_inverse_configs(n)? {
            t.push(vec![c.encode().to_string(), c.to_ascii(), classify(&c).name().into()]);
        }
        t.write(&site_dir(r.out, n).join("paths.csv"))?;
        Ok(json!({ "n_sites": n, "motzkin_number": motzkin_number(n).to_string() }))
    })?;
    Ok(json!({ "runs": rows }))
}

fn fine_tune(r: &Runner, tolerance: f64) -> Result<Value> {
    let g = r.geometry(2)?;
    let report = check_fine_tuning(&r.cfg.interactions, &g, &r.cfg.model, tolerance)?;
    let cmp = compare_to_motzkin(&r.cfg.interactions, &g, &r.cfg.model)?;
    let mut t = Table::new(["condition", "lhs_mhz", "rhs_mhz", "relative_residual", "pass"]);
    for c in &report.conditions {
        t.push(vec![c.name.replace(' ', ""), fmt_num(c.lhs), fmt_num(c.rhs), fmt_num(c.relative_residual), c.pass.to_string()]);
    }
    t.write(&r.out.join("fine_tuning.csv"))?;
    let mut block = Table::new(["row", "col", "rydberg_mhz", "motzkin"]);
    for i in 0..9 {
        for j in 0..9 {
            let (a, b) = (cmp.rydberg[(i, j)].re, cmp.motzkin[(i, j)].re);
            if a != 0.0 || b != 0.0 {
                block.push(vec![crate::motzkin::pair::LABELS[i].into(), crate::motzkin::pair::LABELS[j].into(), fmt_num(a), fmt_num(b)]);
            }
        }
    }
    block.write(&r.out.join("two_site_block.csv"))?;
    let entry = |e: &crate::rydberg::BlockEntry| json!({ "row": e.row_label, "col": e.col_label, "rydberg_mhz": num(e.rydberg), "motzkin": num(e.motzkin) });
    Ok(json!({
        "tolerance": num(tolerance),
        "all_pass": report.all_pass(),
        "couplings_mhz": {
            "j_up0": num(report.j_up0), "j_down0": num(report.j_down0), "j_00": num(report.j_00),
            "v_up0": num(report.v_up0), "v_down0": num(report.v_down0), "v_00": num(report.v_00),
            "v_diag": num(report.v_diag), "v_ofd": num(report.v_ofd),
        },
        "conditions": report.conditions.iter().map(|c| json!({
            "name": c.name, "lhs": num(c.lhs), "rhs": num(c.rhs),
            "relative_residual": num(c.relative_residual), "pass": c.pass,
        })).collect::<Vec<_>>(),
        "extra_entries": cmp.extra.iter().map(entry).collect::<Vec<_>>(),
        "missing_entries": cmp.missing.iter().map(entry).collect::<Vec<_>>(),
        "diagonal_mismatches": cmp.diagonal_mismatch.iter().map(entry).collect::<Vec<_>>(),
    }))
}

/// Chain lengths a command uses when none are given explicitly.
pub fn default_sizes(cmd: &Command, cfg: &RunConfig) -> Vec<usize> {
    match cmd {
        Command::Spectrum => cfg.spectrum.n_values.clone(),
        Command::Prepare => cfg.grape.n_values.clone(),
        Command::Evolve { .. } | Command::Protocol => cfg.protocol.n_values.clone(),
        Command::Scaling => cfg.scaling.n_values.clone(),
        Command::Entropy { .. } | Command::Rdm { .. } => cfg.entanglement.n_values.clone(),
        Command::Paths => cfg.spectrum.n_values.clone(),
        Command::FineTune { .. } => vec![2],
    }
}

/// Run `cmd`, writing every output under `out`. Returns the summary that
/// was written to `summary.json`.
pub fn run(cmd: &Command, cfg: &RunConfig, out: &Path, sizes: Option<&[usize]>) -> Result<Value> {
    cfg.validate()?;
    let started = SystemTime::now();
    let clock = Instant::now();
    std::fs::create_dir_all(out)?;
    write_text(&out.join("config.resolved"), &cfg.resolved_toml()?)?;
    let defaults = default_sizes(cmd, cfg);
    let ns = sizes.unwrap_or(&defaults);
    let r = Runner { cfg, out };
    let body = match cmd {
        Command::Spectrum => spectrum(&r, ns)?,
        Command::Prepare => prepare(&r, ns)?,
        Command::Evolve { initial } => evolve(&r, ns, initial.as_deref())?,
        Command::Protocol => protocol(&r, ns)?,
        Command::Scaling => scaling(&r, ns)?,
        Command::Entropy { state } => entropy(&r, ns, *state)?,
        Command::Rdm { state } => rdm(&r, ns, *state)?,
        Command::Paths => paths(&r, ns)?,
        Command::FineTune { tolerance } => fine_tune(&r, *tolerance)?,
    };
    let summary = json!({
        "command": cmd.name(),
        "name": cfg.name,
        "seed": cfg.seed,
        "result": body,
    });
    write_json(&out.join("summary.json"), &summary)?;
    let unix = |t: SystemTime| t.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    write_json(
        &out.join("metadata.json"),
        &json!({
            "command": cmd.name(),
            "started_unix_s": unix(started),
            "finished_unix_s": unix(SystemTime::now()),
            "wall_time_s": clock.elapsed().as_secs_f64(),
            "threads": rayon::current_num_threads(),
            "version": env!("CARGO_PKG_VERSION"),
        }),
    )?;
    Ok(summary)
}

/// Process exit code for an error: 2 for configuration and input problems,
/// 3 for numerical or convergence failures, 4 for resource caps, 1 for I/O.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Data(_) | Error::Domain(_) => 2,
        Error::Numerical(_) | Error::Convergence { .. } => 3,
        Error::Resource(_) => 4,
        Error::Io(_) => 1,
    }
}
