//! Command implementations: translate a validated config into library calls
//! and emit CSV/JSON artifacts.

use std::path::Path;

use serde_json::json;

use nshwave::waves::{POLE_GUARD_RTOL, WAVE_ATOL};
use nshwave::{
    blowup_report, bloodflow_classify, bloodflow_period, bloodflow_psi, catalog,
    characteristic_solve, convergence_study, default_scan_step, estimate_fields, evolve_ensemble,
    fd_solve, grid_solution, hyperbolic::DEFAULT_ROOT_TOL, integrate_ode, linearized_tw_roots,
    tw_inviscid, tw_viscous_coldplasma, EquilibriumClass, EquilibriumKind, InitialDistribution,
    InitialProfile, ModelEntry, ModelName, OdeTrajectory, PhasePoint, SystemSpec, Termination,
    TravelingWaveProblem, TwModel, Verdict,
};

use crate::config::{
    evaluation_grid, load, AnalyzeParams, Command, LoadedConfig, MonteCarloParams, SimulateParams,
    TravelingWaveParams,
};
use crate::io::{write_csv, write_json, Cell, RunStamp};
use crate::CliError;

pub fn run(config_path: &Path) -> Result<(), CliError> {
    let cfg = load(config_path)?;
    let seed = match &cfg.command {
        Command::MonteCarlo(p) => Some(p.seed),
        _ => None,
    };
    let stamp =
        RunStamp { version: env!("CARGO_PKG_VERSION"), config_hash: cfg.config_hash, seed };
    match &cfg.command {
        Command::Analyze(p) => cmd_analyze(&cfg, p, &stamp),
        Command::Simulate(p) => cmd_simulate(&cfg, p, &stamp),
        Command::TravelingWave(p) => cmd_traveling_wave(&cfg, p, &stamp),
        Command::MonteCarlo(p) => cmd_monte_carlo(&cfg, p, &stamp),
        Command::Models => cmd_models(&cfg),
    }
}

fn numeric<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numeric(e.to_string())
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::BlowsUp => "blows_up",
        Verdict::GloballySmooth => "globally_smooth",
    }
}

fn termination_str(t: Termination) -> &'static str {
    match t {
        Termination::ReachedEnd => "reached_end",
        Termination::SingularityDetected => "singularity",
        Termination::StepUnderflow => "step_underflow",
    }
}

fn kind_str(k: EquilibriumKind) -> &'static str {
    match k {
        EquilibriumKind::Center => "center",
        EquilibriumKind::Saddle => "saddle",
        EquilibriumKind::Focus => "focus",
        EquilibriumKind::Node => "node",
        EquilibriumKind::Degenerate => "degenerate",
    }
}

fn class_json(class: &EquilibriumClass) -> serde_json::Value {
    json!({
        "kind": kind_str(class.kind),
        "periodic": class.is_periodic(),
        "eigenvalues": class
            .eigenvalues
            .iter()
            .map(|z| json!({"re": z.re, "im": z.im}))
            .collect::<Vec<_>>(),
    })
}

fn stamp_json(stamp: &RunStamp) -> serde_json::Value {
    json!({
        "version": stamp.version,
        "config_hash": format!("{:016x}", stamp.config_hash),
        "seed": stamp.seed,
    })
}

/// Drops the dissipation matrix: the blow-up analysis and characteristic
/// transport concern the first-order part only.
fn inviscid_part(entry: &ModelEntry) -> Result<SystemSpec, CliError> {
    SystemSpec::new(entry.name.as_str(), entry.spec.q.clone(), None).map_err(numeric)
}

fn cmd_analyze(
    cfg: &LoadedConfig,
    p: &AnalyzeParams,
    stamp: &RunStamp,
) -> Result<(), CliError> {
    let entry = cfg.require_model()?;
    let prof = cfg.require_profile()?;
    let grid = cfg.require_grid()?;
    if entry.spec.n != prof.n() {
        return Err(CliError::Config(format!(
            "model {} has {} components but the profile supplies {}",
            entry.name,
            entry.spec.n,
            prof.n()
        )));
    }
    if !(p.horizon.is_finite() && p.horizon > 0.0) {
        return Err(CliError::Config(format!("params: horizon must be > 0, got {}", p.horizon)));
    }
    let x_grid = evaluation_grid(grid, prof)?;
    let sys = inviscid_part(entry)?;
    let scan_step = p.scan_step.unwrap_or_else(|| default_scan_step(p.horizon));
    let tol = p.root_tol.unwrap_or(DEFAULT_ROOT_TOL);

    let report =
        blowup_report(&sys, prof, &x_grid, p.horizon, scan_step, tol).map_err(numeric)?;

    let criterion = match entry.criteria.first() {
        Some(c) => Some((c, c.evaluate(prof, &x_grid).map_err(numeric)?)),
        None => None,
    };
    let agreement = criterion.as_ref().map(|(_, cr)| cr.verdict == report.verdict);

    let per_point: Vec<serde_json::Value> = report
        .per_point
        .iter()
        .enumerate()
        .map(|(j, (x, root))| {
            json!({
                "x": x,
                "t_root": root.as_ref().map(|r| r.t),
                "criterion_value": criterion.as_ref().map(|(_, cr)| cr.values[j]),
            })
        })
        .collect();

    let doc = json!({
        "command": "analyze",
        "model": entry.name.as_str(),
        "verdict": verdict_str(report.verdict),
        "t_star": report.t_star,
        "x_star": report.x_star,
        "horizon": report.horizon,
        "criterion": criterion.as_ref().map(|(c, cr)| json!({
            "label": c.label(),
            "verdict": verdict_str(cr.verdict),
            "max_value": cr.max_value,
            "argmax_x": cr.argmax_x,
        })),
        "agreement": agreement,
        "per_point": per_point,
        "run": stamp_json(stamp),
    });
    write_json(cfg.output.report.as_deref(), &doc)?;

    if agreement == Some(false) {
        let (_, cr) = criterion.expect("agreement implies criterion");
        return Err(CliError::Disagreement(format!(
            "closed-form criterion says {} but the scan says {}",
            verdict_str(cr.verdict),
            verdict_str(report.verdict)
        )));
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<f64, CliError> {
    if times.is_empty() {
        return Err(CliError::Config("params: times must not be empty".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(CliError::Config("params: times must be finite and >= 0".into()));
    }
    for w in times.windows(2) {
        if w[1] <= w[0] {
            return Err(CliError::Config("params: times must be strictly increasing".into()));
        }
    }
    Ok(*times.last().expect("non-empty"))
}

/// Refuses simulation requests that reach past the gradient catastrophe.
fn check_before_blowup(
    sys: &SystemSpec,
    prof: &InitialProfile,
    feet: &[f64],
    t_max: f64,
) -> Result<(), CliError> {
    if t_max <= 0.0 {
        return Ok(());
    }
    let report = blowup_report(sys, prof, feet, t_max, default_scan_step(t_max), DEFAULT_ROOT_TOL)
        .map_err(numeric)?;
    if report.verdict == Verdict::BlowsUp {
        let t_star = report.t_star.unwrap_or(t_max);
        if t_star <= t_max {
            return Err(CliError::Numeric(format!(
                "solution loses smoothness at T* = {t_star}; cannot continue \
                 characteristics to t = {t_max}"
            )));
        }
    }
    Ok(())
}

fn cmd_simulate(
    cfg: &LoadedConfig,
    p: &SimulateParams,
    stamp: &RunStamp,
) -> Result<(), CliError> {
    let entry = cfg.require_model()?;
    let prof = cfg.require_profile()?;
    if entry.spec.n != prof.n() {
        return Err(CliError::Config(format!(
            "model {} has {} components but the profile supplies {}",
            entry.name,
            entry.spec.n,
            prof.n()
        )));
    }
    let t_max = check_times(&p.times)?;
    let n = entry.spec.n;
    let comp_headers: Vec<String> = (1..=n).map(|c| format!("v{c}")).collect();

    match p.method.as_str() {
        "characteristics" => {
            if entry.spec.b.is_some() {
                return Err(CliError::Config(
                    "the characteristics path is defined for dissipation-free models; \
                     use method \"fd\""
                        .into(),
                ));
            }
            let grid = cfg.require_grid()?;
            let feet = evaluation_grid(grid, prof)?;
            check_before_blowup(&entry.spec, prof, &feet, t_max)?;

            let mut header: Vec<&str> = vec!["t", "x"];
            header.extend(comp_headers.iter().map(String::as_str));
            header.push("q");
            let mut rows = Vec::with_capacity(p.times.len() * feet.len());
            for &t in &p.times {
                for &x0 in &feet {
                    let state = characteristic_solve(&entry.spec, prof, x0, t).map_err(numeric)?;
                    let mut row = vec![Cell::Value(t), Cell::Value(state.x)];
                    row.extend(state.v.iter().map(|v| Cell::Value(*v)));
                    row.push(Cell::Value(state.q));
                    rows.push(row);
                }
            }
            write_csv(cfg.output.data.as_deref(), stamp, &header, &rows)
        }
        "fd" | "cross_check" => {
            let dx = p.dx.ok_or_else(|| {
                CliError::Config("params: the finite-difference path needs \"dx\"".into())
            })?;
            let dt = p.dt.ok_or_else(|| {
                CliError::Config("params: the finite-difference path needs \"dt\"".into())
            })?;
            let domain = cfg
                .grid
                .as_ref()
                .and_then(|g| g.domain)
                .unwrap_or_else(|| prof.domain());
            let history =
                fd_solve(&entry.spec, prof, domain, dx, dt, t_max, p.safety, &p.times)
                    .map_err(numeric)?;

            if p.method == "fd" {
                let mut header: Vec<&str> = vec!["t", "x"];
                header.extend(comp_headers.iter().map(String::as_str));
                let mut rows = Vec::new();
                for snap in &history {
                    for (j, &x) in snap.x_grid.iter().enumerate() {
                        let mut row = vec![Cell::Value(snap.t), Cell::Value(x)];
                        row.extend((0..n).map(|c| Cell::Value(snap.fields[c][j])));
                        rows.push(row);
                    }
                }
                return write_csv(cfg.output.data.as_deref(), stamp, &header, &rows);
            }

            // Cross-check: requires the dissipation-free system so both
            // routes solve the same equations.
            if entry.spec.b.is_some() {
                return Err(CliError::Config(
                    "cross_check compares against characteristics and therefore needs a \
                     dissipation-free model"
                        .into(),
                ));
            }
            check_before_blowup(&entry.spec, prof, &history[0].x_grid, t_max)?;
            let fd_headers: Vec<String> = (1..=n).map(|c| format!("fd_v{c}")).collect();
            let mut header: Vec<&str> = vec!["t", "x"];
            header.extend(comp_headers.iter().map(String::as_str));
            header.extend(fd_headers.iter().map(String::as_str));
            header.push("max_abs_err");
            let mut rows = Vec::new();
            for snap in &history {
                let exact =
                    grid_solution(&entry.spec, prof, snap.t, &snap.x_grid).map_err(numeric)?;
                for (j, &x) in snap.x_grid.iter().enumerate() {
                    let mut row = vec![Cell::Value(snap.t), Cell::Value(x)];
                    row.extend(exact.v[j].iter().map(|v| Cell::Value(*v)));
                    row.extend((0..n).map(|c| Cell::Value(snap.fields[c][j])));
                    let err = (0..n)
                        .map(|c| (snap.fields[c][j] - exact.v[j][c]).abs())
                        .fold(0.0f64, f64::max);
                    row.push(Cell::Value(err));
                    rows.push(row);
                }
            }
            write_csv(cfg.output.data.as_deref(), stamp, &header, &rows)
        }
        other => Err(CliError::Config(format!(
            "unknown method {other:?}; expected characteristics, fd, or cross_check"
        ))),
    }
}

/// Linear resample of an adaptive trajectory onto a uniform parameter grid;
/// the final adaptive point is always included so terminations stay visible.
fn resample(traj: &OdeTrajectory, step: f64) -> Vec<(f64, Vec<f64>)> {
    let params = &traj.params;
    let states = &traj.states;
    let start = params[0];
    let end = *params.last().expect("at least the initial state");
    let mut out = Vec::new();
    let mut seg = 0usize;
    let mut k = 0usize;
    loop {
        let target = start + step * k as f64;
        if target > end {
            break;
        }
        while seg + 1 < params.len() && params[seg + 1] < target {
            seg += 1;
        }
        let state = if seg + 1 == params.len() {
            states[seg].clone()
        } else {
            let (a, b) = (params[seg], params[seg + 1]);
            let w = if b > a { (target - a) / (b - a) } else { 0.0 };
            states[seg]
                .iter()
                .zip(&states[seg + 1])
                .map(|(u, v)| u + w * (v - u))
                .collect()
        };
        out.push((target, state));
        k += 1;
    }
    let last = out.last().map(|(t, _)| *t);
    if last != Some(end) {
        out.push((end, states.last().expect("non-empty").clone()));
    }
    out
}

fn orbit_rows(samples: &[(f64, Vec<f64>)]) -> Vec<Vec<Cell>> {
    samples
        .iter()
        .map(|(xi, state)| {
            let mut row = vec![Cell::Value(*xi)];
            row.extend(state.iter().map(|v| Cell::Value(*v)));
            row
        })
        .collect()
}

fn cmd_traveling_wave(
    cfg: &LoadedConfig,
    p: &TravelingWaveParams,
    stamp: &RunStamp,
) -> Result<(), CliError> {
    let entry = cfg.require_model()?;
    let (xi0, xi1) = p.xi_span;
    if !(xi0.is_finite() && xi1.is_finite() && xi1 > xi0) {
        return Err(CliError::Config(format!("params: bad xi_span [{xi0}, {xi1}]")));
    }
    if !(p.rtol.is_finite() && p.rtol > 0.0) {
        return Err(CliError::Config(format!("params: rtol must be > 0, got {}", p.rtol)));
    }
    if p.start.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config("params: start must be finite".into()));
    }
    let w = p.wave_speed;
    let step = match p.output_step {
        Some(s) if s.is_finite() && s > 0.0 => s,
        Some(s) => {
            return Err(CliError::Config(format!("params: output_step must be > 0, got {s}")))
        }
        None => (xi1 - xi0) / 512.0,
    };

    let (traj, header, summary_extra): (OdeTrajectory, Vec<&str>, serde_json::Value) =
        match p.kind.as_str() {
            "viscous" => {
                if entry.name != ModelName::ColdPlasma {
                    return Err(CliError::Config(
                        "the viscous profile equation is defined for the cold_plasma model"
                            .into(),
                    ));
                }
                let nu = entry.params.get("nu").copied().unwrap_or(0.0);
                if nu <= 0.0 {
                    return Err(CliError::Config(
                        "viscous analysis needs model parameter nu > 0; for nu = 0 use \
                         kind \"inviscid\""
                            .into(),
                    ));
                }
                if p.start.len() != 3 {
                    return Err(CliError::Config(format!(
                        "params: viscous start needs (value, slope, curvature); got {} entries",
                        p.start.len()
                    )));
                }
                let traj = tw_viscous_coldplasma(
                    nu,
                    w,
                    (p.start[0], p.start[1], p.start[2]),
                    p.xi_span,
                    p.rtol,
                )
                .map_err(numeric)?;
                let class = linearized_tw_roots(TwModel::ColdPlasmaViscous { nu }, w)
                    .map_err(numeric)?;
                (traj, vec!["xi", "v", "dv", "d2v"], json!({"classification": class_json(&class)}))
            }
            "inviscid" => {
                let sys = inviscid_part(entry)?;
                let n = sys.n;
                if p.start.len() != n {
                    return Err(CliError::Config(format!(
                        "params: start needs {n} components for model {}",
                        entry.name
                    )));
                }
                let problem = TravelingWaveProblem::new(sys, w).map_err(numeric)?;
                let traj = tw_inviscid(&problem, &p.start, p.xi_span, p.rtol).map_err(numeric)?;
                let header = match n {
                    2 => vec!["xi", "v1", "v2"],
                    3 => vec!["xi", "v1", "v2", "v3"],
                    _ => vec!["xi"],
                };
                (traj, header, json!({"classification": null}))
            }
            "blood_flow" => {
                if entry.name != ModelName::BloodFlow {
                    return Err(CliError::Config(
                        "kind \"blood_flow\" needs the blood_flow model".into(),
                    ));
                }
                let mu = entry.params["mu"];
                let s0 = entry.params["s0"];
                if p.start.len() != 2 {
                    return Err(CliError::Config(format!(
                        "params: blood_flow start needs (E, V); got {} entries",
                        p.start.len()
                    )));
                }
                let start = PhasePoint { e: p.start[0], v: p.start[1] };
                let class = bloodflow_classify(mu, s0, w).map_err(numeric)?;
                let psi_start = bloodflow_psi(mu, s0, w, start).map_err(numeric)?;

                let pole_ball = POLE_GUARD_RTOL * w.abs().max(1.0);
                let rhs = |_xi: f64, y: &[f64], dy: &mut [f64]| {
                    let d = y[1] - w;
                    dy[0] = -s0 * y[1] / d;
                    dy[1] = y[0] * d * d / (d * d * d + mu * w * s0);
                };
                let guard = |y: &[f64]| (y[1] - w).abs() <= pole_ball;
                let traj =
                    integrate_ode(rhs, p.xi_span, &[start.e, start.v], p.rtol, WAVE_ATOL, Some(&guard))
                        .map_err(numeric)?;

                let last = traj.last_state().to_vec();
                let psi_end =
                    bloodflow_psi(mu, s0, w, PhasePoint { e: last[0], v: last[1] }).ok();
                let (period, period_note) = match bloodflow_period(mu, s0, w, start) {
                    Ok(l) => (Some(l), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                let extra = json!({
                    "classification": class_json(&class),
                    "psi_start": psi_start,
                    "psi_end": psi_end,
                    "psi_drift": psi_end.map(|pe| (pe - psi_start).abs()),
                    "period": period,
                    "period_note": period_note,
                });
                (traj, vec!["xi", "e", "v"], extra)
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown kind {other:?}; expected viscous, inviscid, or blood_flow"
                )))
            }
        };

    let samples = resample(&traj, step);
    write_csv(cfg.output.data.as_deref(), stamp, &header, &orbit_rows(&samples))?;

    let mut doc = json!({
        "command": "traveling_wave",
        "kind": p.kind,
        "model": entry.name.as_str(),
        "wave_speed": w,
        "termination": termination_str(traj.termination),
        "xi_start": traj.params[0],
        "xi_end": traj.last_param(),
        "run": stamp_json(stamp),
    });
    if let (serde_json::Value::Object(doc), serde_json::Value::Object(extra)) =
        (&mut doc, summary_extra)
    {
        doc.extend(extra);
    }
    write_json(cfg.output.report.as_deref(), &doc)?;

    if p.require_full_span && traj.termination != Termination::ReachedEnd {
        return Err(CliError::Numeric(format!(
            "orbit ended at xi = {} with termination {:?} before covering the requested span",
            traj.last_param(),
            termination_str(traj.termination)
        )));
    }
    Ok(())
}

fn cmd_monte_carlo(
    cfg: &LoadedConfig,
    p: &MonteCarloParams,
    stamp: &RunStamp,
) -> Result<(), CliError> {
    let entry = cfg.require_model()?;
    let prof = cfg.require_profile()?;
    let grid = cfg.require_grid()?;
    if entry.spec.n != prof.n() {
        return Err(CliError::Config(format!(
            "model {} has {} components but the profile supplies {}",
            entry.name,
            entry.spec.n,
            prof.n()
        )));
    }
    if p.n_particles == 0 {
        return Err(CliError::Config("params: n_particles must be at least 1".into()));
    }
    if p.sigma_list.is_empty() {
        return Err(CliError::Config("params: sigma_list must not be empty".into()));
    }
    if p.sigma_list.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(CliError::Config("params: every sigma must be finite and >= 0".into()));
    }
    if !(p.t_end.is_finite() && p.t_end > 0.0) {
        return Err(CliError::Config(format!("params: t_end must be > 0, got {}", p.t_end)));
    }
    if !(p.dt.is_finite() && p.dt > 0.0) {
        return Err(CliError::Config(format!("params: dt must be > 0, got {}", p.dt)));
    }
    if let Some(h) = p.bandwidth {
        if !(h.is_finite() && h > 0.0) {
            return Err(CliError::Config(format!("params: bandwidth must be > 0, got {h}")));
        }
    }
    let x_grid = evaluation_grid(grid, prof)?;
    let sys = inviscid_part(entry)?;

    let rows = convergence_study(
        &sys,
        prof,
        &p.sigma_list,
        p.n_particles,
        p.t_end,
        p.dt,
        &x_grid,
        p.bandwidth,
        p.seed,
    )
    .map_err(numeric)?;

    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| vec![Cell::Value(r.sigma), Cell::Value(r.sup_error)])
        .collect();
    write_csv(cfg.output.data.as_deref(), stamp, &["sigma", "sup_error"], &table)?;

    // Optional per-sigma field dumps for plotting.
    if let Some(dir) = &cfg.output.directory {
        for (k, &sigma) in p.sigma_list.iter().enumerate() {
            let ens = evolve_ensemble(
                &sys,
                prof,
                InitialDistribution::Uniform,
                sigma,
                p.n_particles,
                p.t_end,
                p.dt,
                p.seed,
            )
            .map_err(numeric)?;
            let est = estimate_fields(&ens, &x_grid, p.bandwidth).map_err(numeric)?;
            let n = prof.n();
            let comp_headers: Vec<String> = (1..=n).map(|c| format!("v{c}")).collect();
            let mut header: Vec<&str> = vec!["x", "rho"];
            header.extend(comp_headers.iter().map(String::as_str));
            let mut rows = Vec::with_capacity(x_grid.len());
            for (j, &x) in x_grid.iter().enumerate() {
                let mut row = vec![Cell::Value(x), Cell::Value(est.rho[j])];
                match &est.v_hat[j] {
                    Some(v) => row.extend(v.iter().map(|c| Cell::Value(*c))),
                    None => row.extend((0..n).map(|_| Cell::Missing)),
                }
                rows.push(row);
            }
            let path = crate::io::in_directory(dir, &format!("fields_sigma_{k}.csv"));
            write_csv(Some(&path), stamp, &header, &rows)?;
        }
    }
    Ok(())
}

fn cmd_models(cfg: &LoadedConfig) -> Result<(), CliError> {
    let listing: Vec<serde_json::Value> = catalog()
        .iter()
        .map(|e| {
            json!({
                "name": e.name.as_str(),
                "components": e.components,
                "notes": e.notes,
                "params": e.params.iter().map(|p| json!({
                    "key": p.key,
                    "required": p.required,
                    "default": p.default,
                    "constraint": p.constraint,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    write_json(cfg.output.report.as_deref(), &json!({ "models": listing }))
}
