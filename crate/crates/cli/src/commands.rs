use crate::output::{complex, fmt_f64, num, object, Sink, Table};
use crate::scenario::{Dynamics, Invalid, LoopFile, MethodName, Scenario};
use berryres::holonomy::{berry_phase_discrete_with, Diagnostics};
use berryres::*;
use rayon::prelude::*;
use serde_json::Value;
use std::f64::consts::TAU;
use std::time::Instant;

pub struct Options {
    pub sink: Sink,
    pub quiet: bool,
    pub timing: bool,
}

impl Options {
    fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn wall(&self, t: Instant) -> Value {
        if self.timing {
            num(t.elapsed().as_secs_f64() * 1e3)
        } else {
            Value::Null
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.category() {
        ErrorCategory::Validation | ErrorCategory::Degeneracy => 2,
        ErrorCategory::Convergence => 3,
    }
}

fn state_index(s: State) -> usize {
    s.index()
}

fn sign(s: State) -> f64 {
    match s {
        State::One => 1.0,
        State::Two => -1.0,
    }
}

struct Entry {
    method: MethodName,
    state: State,
    outcome: Result<(Complex64, usize, Option<Diagnostics>)>,
    wall_ms: f64,
}

/// Everything `phase` computes for one scenario.
struct PhaseRun {
    class: Result<PathClass>,
    min_distance: f64,
    entries: Vec<Entry>,
}

impl PhaseRun {
    fn gamma(&self, m: MethodName, s: State) -> Option<Complex64> {
        self.entries
            .iter()
            .find(|e| e.method == m && e.state == s)
            .and_then(|e| e.outcome.as_ref().ok().map(|o| o.0))
    }

    fn sum_residual(&self, m: MethodName) -> Option<f64> {
        let w = self.class.as_ref().ok()?.winding as f64;
        Some((self.gamma(m, State::One)? + self.gamma(m, State::Two)? + TAU * w).norm())
    }

    fn max_discrepancy(&self) -> Option<f64> {
        let ok: Vec<(State, Complex64)> = self
            .entries
            .iter()
            .filter_map(|e| e.outcome.as_ref().ok().map(|o| (e.state, o.0)))
            .collect();
        let mut worst: Option<f64> = None;
        for (i, a) in ok.iter().enumerate() {
            for b in &ok[i + 1..] {
                if a.0 == b.0 {
                    let d = (a.1 - b.1).norm();
                    worst = Some(worst.map_or(d, |w| w.max(d)));
                }
            }
        }
        worst
    }

    fn first_error(&self) -> Option<&Error> {
        self.entries.iter().find_map(|e| e.outcome.as_ref().err())
    }
}

fn run_phase(sc: &Scenario) -> Result<PhaseRun> {
    let lp = sample_loop(&sc.loop_spec(), sc.n, sc.tolerances.min_dist)?;
    let class = classify_path(&lp);
    let tol = &sc.tolerances;
    let mut entries = Vec::new();
    let mut delta: Option<Result<Complex64>> = None;
    for &method in &sc.methods {
        for s in sc.states() {
            let t = Instant::now();
            let outcome = match method {
                MethodName::Discrete => {
                    berry_phase_discrete_with(&lp, s, tol.degeneracy_tol).map(|r| (r.gamma, r.n, Some(r.diagnostics)))
                }
                MethodName::Line => {
                    berry_phase_line_quadrature(&lp, s, tol.quad_rtol).map(|r| (r.gamma, r.n, Some(r.diagnostics)))
                }
                MethodName::Spherical => {
                    berry_phase_spherical(&lp, s, tol.quad_rtol).map(|r| (r.gamma, r.n, Some(r.diagnostics)))
                }
                MethodName::DeltaGamma => {
                    let d = delta.get_or_insert_with(|| delta_gamma_path(&lp, tol.quad_rtol));
                    d.clone().map(|d| (sign(s) * d, sc.n, None))
                }
            };
            entries.push(Entry { method, state: s, outcome, wall_ms: t.elapsed().as_secs_f64() * 1e3 });
        }
    }
    Ok(PhaseRun { class, min_distance: lp.min_degeneracy_distance, entries })
}

fn class_value(c: &Result<PathClass>) -> Value {
    match c {
        Ok(c) => object(vec![
            ("winding", c.winding.into()),
            ("linking", c.linking.into()),
            ("label", format!("{:?}", c.label).into()),
        ]),
        Err(e) => object(vec![("error", e.to_string().into())]),
    }
}

fn diagnostics_value(d: &Diagnostics) -> Value {
    object(vec![
        ("branch_flips", d.branch_flips.into()),
        ("min_eps_abs", num(d.min_eps_abs)),
        ("closure_defect", num(d.closure_defect)),
        ("states_exchanged", d.states_exchanged.into()),
        ("gauge", format!("{:?}", d.gauge).to_lowercase().into()),
        ("notice", d.notice.clone().map_or(Value::Null, Value::from)),
    ])
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn config_value(sc: &Scenario) -> Value {
    serde_json::to_value(sc).expect("scenario serializes")
}

pub fn phase(sc: &Scenario, opts: &Options) -> anyhow::Result<i32> {
    let start = Instant::now();
    let run = run_phase(sc)?;
    if let Err(e) = &run.class {
        opts.note(&format!("classification unavailable: {e}"));
    }
    for e in &run.entries {
        match &e.outcome {
            Err(err) => opts.note(&format!("{} state {}: {err}", e.method.name(), state_index(e.state))),
            Ok((_, _, Some(d))) => {
                if let Some(n) = &d.notice {
                    opts.note(&format!("{} state {}: {n}", e.method.name(), state_index(e.state)));
                }
            }
            _ => {}
        }
    }
    let results: Vec<Value> = run
        .entries
        .iter()
        .map(|e| {
            let mut pairs = vec![("method", e.method.name().into()), ("state", state_index(e.state).into())];
            match &e.outcome {
                Ok((g, n, d)) => {
                    pairs.push(("gamma", complex(*g)));
                    pairs.push(("N", (*n).into()));
                    pairs.push(("diagnostics", d.as_ref().map_or(Value::Null, diagnostics_value)));
                }
                Err(err) => {
                    pairs.push(("error", err.to_string().into()));
                    pairs.push(("category", format!("{:?}", err.category()).to_lowercase().into()));
                }
            }
            if opts.timing {
                pairs.push(("wall_ms", num(e.wall_ms)));
            }
            object(pairs)
        })
        .collect();
    let mut sums = serde_json::Map::new();
    for &m in &sc.methods {
        sums.insert(m.name().to_string(), opt_num(run.sum_residual(m)));
    }
    let mut report = vec![
        ("scenario", sc.name.clone().into()),
        ("config", config_value(sc)),
        ("classification", class_value(&run.class)),
        ("min_degeneracy_distance", num(run.min_distance)),
        ("results", Value::Array(results)),
        ("sum_residual", Value::Object(sums)),
        ("max_discrepancy", opt_num(run.max_discrepancy())),
    ];
    if opts.timing {
        report.push(("wall_ms", opts.wall(start)));
    }
    opts.sink.emit(object(report), || {
        let mut t = Table::new(&[
            "scenario", "method", "state", "re_gamma", "im_gamma", "N", "class_W", "class_L", "sum_residual",
            "max_discrepancy", "wall_ms", "notice", "error",
        ]);
        let (w, l) = match &run.class {
            Ok(c) => (c.winding.to_string(), c.linking.to_string()),
            Err(_) => (String::new(), String::new()),
        };
        for e in &run.entries {
            let (re, im, n, notice, err) = match &e.outcome {
                Ok((g, n, d)) => (
                    fmt_f64(g.re),
                    fmt_f64(g.im),
                    n.to_string(),
                    d.as_ref().and_then(|d| d.notice.clone()).unwrap_or_default(),
                    String::new(),
                ),
                Err(err) => (String::new(), String::new(), String::new(), String::new(), err.to_string()),
            };
            t.push(vec![
                sc.name.clone(),
                e.method.name().into(),
                state_index(e.state).to_string(),
                re,
                im,
                n,
                w.clone(),
                l.clone(),
                opt_cell(run.sum_residual(e.method)),
                opt_cell(run.max_discrepancy()),
                if opts.timing { fmt_f64(e.wall_ms) } else { String::new() },
                notice,
                err,
            ]);
        }
        t
    })?;
    Ok(run.first_error().map_or(0, exit_code))
}

pub fn classify(sc: &Scenario, opts: &Options) -> anyhow::Result<i32> {
    let lp = sample_loop(&sc.loop_spec(), sc.n, sc.tolerances.min_dist)?;
    let class = classify_path(&lp)?;
    let circle = diabolical_circle(sc.gamma).ok();
    let json = object(vec![
        ("scenario", sc.name.clone().into()),
        ("config", config_value(sc)),
        ("winding", class.winding.into()),
        ("linking", class.linking.into()),
        ("label", format!("{:?}", class.label).into()),
        ("min_degeneracy_distance", num(lp.min_degeneracy_distance)),
        (
            "diabolical_circle",
            circle.map_or(Value::Null, |c| {
                object(vec![("radius", num(c.radius)), ("normal", Value::Array(c.normal.iter().map(|&x| num(x)).collect()))])
            }),
        ),
    ]);
    opts.sink.emit(json, || {
        let mut t = Table::new(&["scenario", "class_W", "class_L", "label", "min_degeneracy_distance"]);
        t.push(vec![
            sc.name.clone(),
            class.winding.to_string(),
            class.linking.to_string(),
            format!("{:?}", class.label),
            fmt_f64(lp.min_degeneracy_distance),
        ]);
        t
    })?;
    Ok(0)
}

struct Evolution {
    state: State,
    result: Result<EvolutionResult>,
    extracted: Option<Result<Complex64>>,
    metric: Result<f64>,
}

/// Reference geometric phase from the holonomy module for the same loop.
fn reference_phase(sc: &Scenario, s: State) -> Result<Complex64> {
    let lp = sample_loop(&sc.loop_spec(), sc.n, sc.tolerances.min_dist)?;
    let g = if sc.gamma.iter().any(|&x| x != 0.0) {
        berry_phase_line_quadrature(&lp, s, sc.tolerances.quad_rtol)?
    } else {
        berry_phase_discrete_with(&lp, s, sc.tolerances.degeneracy_tol)?
    };
    Ok(g.gamma)
}

fn dynamics_of(sc: &Scenario) -> std::result::Result<Dynamics, Invalid> {
    sc.dynamics.ok_or_else(|| Invalid("scenario has no dynamics block (needs at least T)".into()))
}

fn evolve_states(sc: &Scenario, d: Dynamics) -> Vec<Evolution> {
    sc.states()
        .into_iter()
        .map(|s| {
            let schedule = DriveSchedule { path: sc.loop_spec(), period: d.period, hbar: d.hbar, steps: d.steps };
            let result = propagate(&schedule, s);
            let extracted = result.as_ref().ok().map(extract_geometric_phase);
            Evolution { state: s, result, extracted, metric: adiabaticity_metric(&schedule) }
        })
        .collect()
}

pub fn evolve(sc: &Scenario, opts: &Options, fixed_frame: bool) -> anyhow::Result<i32> {
    let start = Instant::now();
    let d = dynamics_of(sc)?;
    let runs = evolve_states(sc, d);
    let mut code = 0;
    let mut rows = Vec::new();
    let mut states = Vec::new();
    for ev in &runs {
        let reference = reference_phase(sc, ev.state);
        let mut pairs = vec![("state", state_index(ev.state).into())];
        let mut row = vec![sc.name.clone(), state_index(ev.state).to_string()];
        match &ev.result {
            Err(e) => {
                code = code.max(exit_code(e));
                opts.note(&format!("state {}: {e}", state_index(ev.state)));
                pairs.push(("error", e.to_string().into()));
                row.extend(["", "", "", "", "", "", ""].map(String::from));
                row.push(e.to_string());
            }
            Ok(r) => {
                let extracted = ev.extracted.clone().expect("set when propagation succeeds");
                let err = extracted.as_ref().err().map(|e| e.to_string());
                if let Err(e) = &extracted {
                    code = code.max(exit_code(e));
                    opts.note(&format!("state {}: {e}", state_index(ev.state)));
                }
                let g = extracted.ok();
                let discrepancy = match (&g, &reference) {
                    (Some(g), Ok(h)) => Some((g - h).norm()),
                    _ => None,
                };
                pairs.push(("extracted_gamma", g.map_or(Value::Null, complex)));
                pairs.push(("holonomy_gamma", reference.as_ref().map_or(Value::Null, |h| complex(*h))));
                pairs.push(("discrepancy", opt_num(discrepancy)));
                pairs.push(("leakage", num(r.leakage)));
                pairs.push(("adiabatic", r.is_adiabatic().into()));
                pairs.push(("adiabaticity_max", num(r.adiabaticity_max)));
                pairs.push(("adiabaticity_metric", ev.metric.as_ref().map_or(Value::Null, |m| num(*m))));
                if let Some(e) = &err {
                    pairs.push(("error", e.clone().into()));
                }
                if fixed_frame {
                    let schedule = DriveSchedule { path: sc.loop_spec(), period: d.period, hbar: d.hbar, steps: d.steps };
                    let ff = berryres::dynamics::propagate_fixed_frame(&schedule, ev.state);
                    pairs.push((
                        "fixed_frame_amplitudes",
                        match ff {
                            Ok(c) => Value::Array(vec![complex(c[0]), complex(c[1])]),
                            Err(e) => object(vec![("error", e.to_string().into())]),
                        },
                    ));
                }
                row.extend([
                    g.map(|g| fmt_f64(g.re)).unwrap_or_default(),
                    g.map(|g| fmt_f64(g.im)).unwrap_or_default(),
                    opt_cell(discrepancy),
                    fmt_f64(r.leakage),
                    r.is_adiabatic().to_string(),
                    fmt_f64(r.adiabaticity_max),
                    ev.metric.as_ref().map(|m| fmt_f64(*m)).unwrap_or_default(),
                    err.unwrap_or_default(),
                ]);
            }
        }
        states.push(object(pairs));
        rows.push(row);
    }
    let mut report = vec![
        ("scenario", sc.name.clone().into()),
        ("config", config_value(sc)),
        ("states", Value::Array(states)),
    ];
    if opts.timing {
        report.push(("wall_ms", opts.wall(start)));
    }
    opts.sink.emit(object(report), || {
        let mut t = Table::new(&[
            "scenario", "state", "re_gamma", "im_gamma", "discrepancy", "leakage", "adiabatic", "adiabaticity_max",
            "adiabaticity_metric", "error",
        ]);
        for r in rows {
            t.push(r);
        }
        t
    })?;
    Ok(code)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    #[value(name = "N")]
    N,
    #[value(name = "T")]
    T,
    #[value(name = "radius")]
    Radius,
    #[value(name = "Z")]
    Z,
}

fn unit(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 0.0).then(|| v.map(|x| x / n))
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Sets the height of the loop along the width direction: the circle center,
/// or the centroid of the vertices or samples.
fn set_height(path: &mut LoopFile, axis: [f64; 3], z: f64) {
    let shift = |pts: &mut Vec<[f64; 3]>, skip_last: bool| {
        let m = if skip_last { pts.len() - 1 } else { pts.len() };
        let mean = pts[..m].iter().map(|p| dot(*p, axis)).sum::<f64>() / m as f64;
        for p in pts.iter_mut() {
            for k in 0..3 {
                p[k] += (z - mean) * axis[k];
            }
        }
    };
    match path {
        LoopFile::Circle3D { center, .. } => {
            let h = dot(*center, axis);
            for k in 0..3 {
                center[k] += (z - h) * axis[k];
            }
        }
        LoopFile::PolyPath { vertices } => shift(vertices, true),
        LoopFile::Parametric { samples } => shift(samples, false),
    }
}

fn apply_axis(sc: &Scenario, axis: Axis, v: f64) -> std::result::Result<Scenario, Invalid> {
    let mut s = sc.clone();
    match axis {
        Axis::N => {
            if v.fract() != 0.0 || v < 0.0 {
                return Err(Invalid(format!("N must be a non-negative integer, got {v}")));
            }
            s.n = v as usize;
        }
        Axis::T => {
            let base = sc.dynamics.unwrap_or(Dynamics { period: v, steps: 0, hbar: 1.0 });
            if !(v > 0.0 && v.is_finite()) {
                return Err(Invalid(format!("T must be positive, got {v}")));
            }
            // keep the steps per unit time of the scenario
            let per = if base.steps > 0 { base.steps as f64 / base.period } else { crate::scenario::DEFAULT_STEPS_PER_PERIOD };
            s.dynamics = Some(Dynamics { period: v, steps: ((per * v).ceil() as usize).max(1000), hbar: base.hbar });
        }
        Axis::Radius => match &mut s.path {
            LoopFile::Circle3D { radius, .. } => *radius = v,
            _ => return Err(Invalid("radius sweeps need a Circle3D loop".into())),
        },
        Axis::Z => {
            let g = unit(sc.gamma).unwrap_or([0.0, 0.0, 1.0]);
            set_height(&mut s.path, g, v);
        }
    }
    s.loop_spec().validate().map_err(|e| Invalid(e.to_string()))?;
    Ok(s)
}

struct SweepRow {
    value: f64,
    g: [Option<Complex64>; 2],
    sum_residual: Option<f64>,
    class: Option<PathClass>,
    method: String,
    wall_ms: f64,
    discrepancy: Option<f64>,
    error: Option<(String, i32)>,
}

impl SweepRow {
    fn empty(value: f64, method: &str) -> SweepRow {
        SweepRow {
            value,
            g: [None, None],
            sum_residual: None,
            class: None,
            method: method.into(),
            wall_ms: 0.0,
            discrepancy: None,
            error: None,
        }
    }

    fn fail(&mut self, e: &Error) {
        if self.error.is_none() {
            self.error = Some((e.to_string(), exit_code(e)));
        }
    }
}

fn sweep_phase_row(sc: &Scenario, value: f64) -> SweepRow {
    let primary = sc.methods[0];
    let mut row = SweepRow::empty(value, primary.name());
    match run_phase(sc) {
        Err(e) => row.fail(&e),
        Ok(run) => {
            row.class = run.class.as_ref().ok().copied();
            for s in sc.states() {
                row.g[s.slot()] = run.gamma(primary, s);
            }
            row.sum_residual = run.sum_residual(primary);
            row.discrepancy = run.max_discrepancy();
            if let Some(e) = run.first_error() {
                row.fail(e);
            } else if let Err(e) = &run.class {
                row.fail(e);
            }
        }
    }
    row
}

fn sweep_dynamics_row(sc: &Scenario, value: f64) -> SweepRow {
    let mut row = SweepRow::empty(value, "dynamics");
    let d = sc.dynamics.expect("T axis always sets dynamics");
    if let Ok(lp) = sample_loop(&sc.loop_spec(), sc.n, sc.tolerances.min_dist) {
        row.class = classify_path(&lp).ok();
    }
    for ev in evolve_states(sc, d) {
        let g = match (ev.result, ev.extracted) {
            (Err(e), _) => {
                row.fail(&e);
                continue;
            }
            (Ok(_), Some(Err(e))) => {
                row.fail(&e);
                continue;
            }
            (Ok(_), Some(Ok(g))) => g,
            (Ok(_), None) => unreachable!(),
        };
        row.g[ev.state.slot()] = Some(g);
        match reference_phase(sc, ev.state) {
            Ok(h) => {
                let d = (g - h).norm();
                row.discrepancy = Some(row.discrepancy.map_or(d, |x: f64| x.max(d)));
            }
            Err(e) => row.fail(&e),
        }
    }
    if let (Some(a), Some(b), Some(c)) = (row.g[0], row.g[1], row.class) {
        row.sum_residual = Some((a + b + TAU * c.winding as f64).norm());
    }
    row
}

pub fn sweep(sc: &Scenario, axis: Axis, values: &[f64], opts: &Options) -> anyhow::Result<i32> {
    if values.is_empty() {
        return Err(Invalid("sweep needs at least one value".into()).into());
    }
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&v| {
            let t = Instant::now();
            let mut row = match apply_axis(sc, axis, v) {
                Err(e) => {
                    let mut r = SweepRow::empty(v, if axis == Axis::T { "dynamics" } else { sc.methods[0].name() });
                    r.error = Some((e.to_string(), 2));
                    r
                }
                Ok(s) if axis == Axis::T => sweep_dynamics_row(&s, v),
                Ok(s) => sweep_phase_row(&s, v),
            };
            row.wall_ms = t.elapsed().as_secs_f64() * 1e3;
            row
        })
        .collect();
    for r in &rows {
        if let Some((e, _)) = &r.error {
            opts.note(&format!("value {}: {e}", r.value));
        }
    }
    let code = if rows.iter().any(|r| r.error.is_none()) {
        0
    } else {
        rows[0].error.as_ref().map_or(0, |e| e.1)
    };
    let cell = |z: Option<Complex64>, im: bool| z.map(|z| fmt_f64(if im { z.im } else { z.re })).unwrap_or_default();
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            object(vec![
                ("value", num(r.value)),
                ("gamma_1", r.g[0].map_or(Value::Null, complex)),
                ("gamma_2", r.g[1].map_or(Value::Null, complex)),
                ("sum_residual", opt_num(r.sum_residual)),
                ("class_W", r.class.map_or(Value::Null, |c| c.winding.into())),
                ("class_L", r.class.map_or(Value::Null, |c| c.linking.into())),
                ("method", r.method.clone().into()),
                ("wall_ms", if opts.timing { num(r.wall_ms) } else { Value::Null }),
                ("discrepancy", opt_num(r.discrepancy)),
                ("error", r.error.as_ref().map_or(Value::Null, |e| e.0.clone().into())),
            ])
        })
        .collect();
    let axis_name = match axis {
        Axis::N => "N",
        Axis::T => "T",
        Axis::Radius => "radius",
        Axis::Z => "Z",
    };
    let json = object(vec![
        ("scenario", sc.name.clone().into()),
        ("config", config_value(sc)),
        ("axis", axis_name.into()),
        ("rows", Value::Array(json_rows)),
    ]);
    opts.sink.emit(json, || {
        let mut t = Table::new(&[
            "value", "re_g1", "im_g1", "re_g2", "im_g2", "sum_residual", "class_W", "class_L", "method", "wall_ms",
            "discrepancy", "error",
        ]);
        for r in &rows {
            t.push(vec![
                fmt_f64(r.value),
                cell(r.g[0], false),
                cell(r.g[0], true),
                cell(r.g[1], false),
                cell(r.g[1], true),
                opt_cell(r.sum_residual),
                r.class.map(|c| c.winding.to_string()).unwrap_or_default(),
                r.class.map(|c| c.linking.to_string()).unwrap_or_default(),
                r.method.clone(),
                if opts.timing { fmt_f64(r.wall_ms) } else { String::new() },
                opt_cell(r.discrepancy),
                r.error.as_ref().map(|e| e.0.clone()).unwrap_or_default(),
            ]);
        }
        t
    })?;
    Ok(code)
}

pub struct ChernArgs {
    pub gamma: [f64; 3],
    pub radius: f64,
    pub mesh: (usize, usize),
    pub tol: f64,
    pub rtol: f64,
}

pub fn chern(a: &ChernArgs, opts: &Options) -> anyhow::Result<i32> {
    let start = Instant::now();
    let mesh = SphereMesh::new(a.radius, a.mesh.0, a.mesh.1)?;
    let refine = |e: Error| -> anyhow::Error {
        if matches!(e, Error::Refine(_)) {
            anyhow::Error::new(e).context(format!("try --mesh {}x{}", 2 * a.mesh.0, 2 * a.mesh.1))
        } else {
            e.into()
        }
    };
    let p = chern_trace_plaquette(&mesh, a.gamma, a.tol).map_err(refine)?;
    let s = chern_sum_surface(&mesh, a.gamma, a.rtol).map_err(refine)?;
    let consistency = (s + TAU * p.c1 as f64).norm();
    let mut report = vec![
        ("gamma", Value::Array(a.gamma.iter().map(|&x| num(x)).collect())),
        ("radius", num(a.radius)),
        ("mesh", Value::Array(vec![a.mesh.0.into(), a.mesh.1.into()])),
        ("c1", p.c1.into()),
        ("per_state", Value::Array(p.per_state.iter().map(|&k| k.into()).collect())),
        ("raw", Value::Array(p.raw.iter().map(|&z| complex(z)).collect())),
        ("plaquette_residual", num(p.residual)),
        ("trace_total", p.trace_total.into()),
        ("surface_sum", complex(s)),
        ("consistency_residual", num(consistency)),
    ];
    if opts.timing {
        report.push(("wall_ms", opts.wall(start)));
    }
    opts.sink.emit(object(report), || {
        let mut t = Table::new(&[
            "radius", "n_theta", "n_phi", "c1", "c_state1", "c_state2", "plaquette_residual", "re_surface_sum",
            "im_surface_sum", "consistency_residual",
        ]);
        t.push(vec![
            fmt_f64(a.radius),
            a.mesh.0.to_string(),
            a.mesh.1.to_string(),
            p.c1.to_string(),
            p.per_state[0].to_string(),
            p.per_state[1].to_string(),
            fmt_f64(p.residual),
            fmt_f64(s.re),
            fmt_f64(s.im),
            fmt_f64(consistency),
        ]);
        t
    })?;
    Ok(0)
}
