//! One pipeline per subcommand: validate the config against the owning
//! module's preconditions, run, and emit CSV / plot-data artifacts.

use std::path::Path;

use dampwave::analysis::{
    check_gn, check_hls, fit_decay_rate, sweep_criticality, weak_functional, xt_norm,
    CriticalParams, Outcome, SweepConfig, TestFunctionPair, XtNorm,
};
use dampwave::besov::{
    besov_norm, block_energies, heat_characterization_norm, lp_partition, make_besov_data,
    BesovSpec,
};
use dampwave::data::{gaussian, random_trig_field};
use dampwave::evolution::{
    fractional_heat_solve, linear_trajectory, semilinear_solve, Forcing, SolverConfig,
};
use dampwave::field::RealField;
use dampwave::grid::{make_grid, Grid};
use dampwave::multipliers::{linspace, logspace, verify_multiplier_bounds, Zone};
use dampwave::riesz::RieszParams;

use crate::config::ExperimentConfig;
use crate::manifest::RunWriter;

/// Failure classes mapping to the process exit codes 2 and 3.
pub enum RunError {
    Config(String),
    Runtime(String),
}

impl From<crate::config::ConfigError> for RunError {
    fn from(e: crate::config::ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Runtime(format!("i/o: {e}"))
    }
}

type RunResult<T> = Result<T, RunError>;

/// Parameter validation errors become config errors; the same core error
/// after computation has started is a runtime failure.
fn cfg_err(e: dampwave::Error) -> RunError {
    RunError::Config(e.to_string())
}

fn run_err(e: dampwave::Error) -> RunError {
    RunError::Runtime(e.to_string())
}

fn parse_grid(config: &ExperimentConfig) -> RunResult<Grid> {
    let dims = config.get_usize("grid.dims")?;
    let points = config.get_usize("grid.points")?;
    let half_length = config.get_f64("grid.half_length")?;
    make_grid(dims, points, half_length).map_err(cfg_err)
}

fn build_profile(
    config: &ExperimentConfig,
    grid: Grid,
    beta: f64,
    amplitude: f64,
) -> RunResult<RealField> {
    match config.opt_str("data.profile").unwrap_or("besov") {
        "besov" => make_besov_data(grid, beta, amplitude).map_err(cfg_err),
        "gaussian" => gaussian(grid, 1.0).map(|f| f.scale(amplitude)).map_err(cfg_err),
        "zero" => Ok(RealField::zeros(grid)),
        other => Err(RunError::Config(format!("unknown data.profile {other}"))),
    }
}

fn velocity_data(config: &ExperimentConfig, u0: &RealField) -> RunResult<RealField> {
    match config.opt_str("data.velocity").unwrap_or("same") {
        "same" => Ok(u0.clone()),
        "zero" => Ok(RealField::zeros(u0.grid)),
        other => Err(RunError::Config(format!("unknown data.velocity {other}"))),
    }
}

pub fn run_config(config: &ExperimentConfig, out_dir: &Path, seed: u64) -> RunResult<Vec<String>> {
    let command = config.command()?;
    config.validate_schema(&command)?;
    let mut writer = RunWriter::new(out_dir, &command, config.hash())?;
    match command.as_str() {
        "linear-decay" => linear_decay(config, &mut writer)?,
        "heat-decay" => heat_decay(config, &mut writer)?,
        "semilinear" => semilinear(config, &mut writer)?,
        "sweep" => sweep(config, &mut writer)?,
        "besov-norm" => besov_norm_cmd(config, &mut writer)?,
        "bounds-scan" => bounds_scan(config, &mut writer)?,
        "inequalities" => inequalities(config, &mut writer, seed)?,
        "weak-functional" => weak_functional_cmd(config, &mut writer)?,
        other => return Err(RunError::Config(format!("unknown command {other}"))),
    }
    writer.finish().map_err(RunError::from)
}

fn linear_decay(config: &ExperimentConfig, w: &mut RunWriter) -> RunResult<()> {
    let grid = parse_grid(config)?;
    let beta = config.get_f64("physics.beta")?;
    let alpha = config.opt_f64("physics.alpha", 1.0)?;
    let t_lo = config.get_f64("physics.t_lo")?;
    let t_hi = config.get_f64("physics.t_hi")?;
    let samples = config.opt_usize("physics.samples", 48)?;
    let slack = config.opt_f64("tolerances.slope_slack", 0.1)?;
    let dt_slack = config.opt_f64("tolerances.dt_slope_slack", 0.15)?;
    // wrap-around guard: beyond 0.8 L the periodic images pollute the rates
    let guard = 0.8 * grid.half_length;
    if t_hi > guard {
        return Err(RunError::Config(format!(
            "physics.t_hi = {t_hi} exceeds the wrap guard 0.8 L = {guard}"
        )));
    }
    if !(t_lo > 0.0 && t_hi > t_lo) || samples < 8 {
        return Err(RunError::Config("need 0 < t_lo < t_hi and samples >= 8".into()));
    }
    let amplitude = config.opt_f64("data.amplitude", 1.0)?;
    let u0 = build_profile(config, grid, beta, amplitude)?;
    let u1 = velocity_data(config, &u0)?;

    let times = logspace(t_lo.min(1.0), t_hi, samples);
    let traj = linear_trajectory(&u0, &u1, &times, alpha).map_err(run_err)?;

    w.write_plot("decay_l2.dat", &traj.series(|r| r.l2))?;
    w.write_plot("decay_hdot.dat", &traj.series(|r| r.hdot_alpha))?;
    w.write_plot("decay_dt.dat", &traj.series(|r| r.dt_l2))?;
    let rows: Vec<String> = traj
        .records
        .iter()
        .map(|r| format!("{:.10e},{:.10e},{:.10e},{:.10e},false", r.t, r.l2, r.hdot_alpha, r.dt_l2))
        .collect();
    w.write_csv("trajectory.csv", "t,l2,hdot_alpha,dt_l2,blown_up", &rows)?;

    let mut fit_rows = Vec::new();
    type Series = Vec<(f64, f64)>;
    let quantities: [(&str, Series, f64, f64); 3] = [
        ("l2", traj.series(|r| r.l2), -0.5 * beta, slack),
        ("hdot_alpha", traj.series(|r| r.hdot_alpha), -0.5 * (beta + alpha), slack),
        ("dt_l2", traj.series(|r| r.dt_l2), -0.5 * beta - 1.0, dt_slack),
    ];
    for (name, series, bound, s) in quantities {
        let (slope, stderr) = fit_decay_rate(&series, (t_lo, t_hi)).map_err(run_err)?;
        let pass = slope <= bound + s;
        fit_rows.push(format!("{name},{slope:.6},{stderr:.3e},{bound:.6},{s},{pass}"));
    }
    w.write_csv("decay_fit.csv", "quantity,slope,stderr,bound,slack,pass", &fit_rows)?;
    Ok(())
}

fn heat_decay(config: &ExperimentConfig, w: &mut RunWriter) -> RunResult<()> {
    let grid = parse_grid(config)?;
    let alpha = config.get_f64("physics.alpha")?;
    let delta = config.get_f64("physics.delta")?;
    let t_lo = config.get_f64("physics.t_lo")?;
    let t_hi = config.get_f64("physics.t_hi")?;
    let samples = config.opt_usize("physics.samples", 25)?;
    if !(alpha >= 1.0) {
        return Err(RunError::Config(format!("physics.alpha must be >= 1, got {alpha}")));
    }
    if !(t_lo > 0.0 && t_hi > t_lo) || samples < 8 {
        return Err(RunError::Config("need 0 < t_lo < t_hi and samples >= 8".into()));
    }
    let amplitude = config.opt_f64("data.amplitude", 1.0)?;
    let profile = config.opt_str("data.profile").unwrap_or("gaussian");
    let u0 = match profile {
        "gaussian" => gaussian(grid, 1.0).map(|f| f.scale(amplitude)).map_err(cfg_err)?,
        other => return Err(RunError::Config(format!("heat-decay wants gaussian data, got {other}"))),
    };
    let fam = lp_partition(grid).map_err(cfg_err)?;
    let spec = BesovSpec::new(0.0, 2.0, 2.0).map_err(cfg_err)?;

    let times = logspace(t_lo, t_hi, samples);
    let mut series = Vec::with_capacity(times.len());
    let mut rows = Vec::with_capacity(times.len());
    let mut check_rows = Vec::new();
    for &t in &times {
        let ut = fractional_heat_solve(&u0, alpha, t).map_err(run_err)?;
        let b = besov_norm(&ut, &spec, &fam).map_err(run_err)?;
        let l2 = ut.lp_norm(2.0).map_err(run_err)?;
        series.push((t, b));
        rows.push(format!("{t:.10e},{b:.10e},{l2:.10e}"));
        if alpha == 1.0 {
            // closed-form Gaussian check for the classical heat flow
            let expect =
                amplitude.abs() * (std::f64::consts::PI / (1.0 + 2.0 * t)).powf(0.25);
            let rel = (l2 - expect).abs() / expect;
            check_rows.push(format!("{t:.10e},{expect:.12e},{l2:.12e},{rel:.3e}"));
        }
    }
    w.write_csv("heat_decay.csv", "t,besov022,l2", &rows)?;
    w.write_plot("heat_decay.dat", &series)?;
    if !check_rows.is_empty() {
        w.write_csv("gaussian_check.csv", "t,expected,got,rel_err", &check_rows)?;
    }
    let (slope, stderr) = fit_decay_rate(&series, (t_lo, t_hi)).map_err(run_err)?;
    let theory = -delta / (2.0 * alpha);
    let row = format!("{slope:.6},{stderr:.3e},{theory:.6},{:.6}", slope - theory);
    w.write_csv("heat_fit.csv", "slope,stderr,theory,deviation", &[row])?;
    Ok(())
}

fn semilinear(config: &ExperimentConfig, w: &mut RunWriter) -> RunResult<()> {
    let grid = parse_grid(config)?;
    let beta = config.get_f64("physics.beta")?;
    let gamma = config.get_f64("physics.gamma")?;
    let alpha = config.opt_f64("physics.alpha", 1.0)?;
    let p1 = config.get_f64("physics.p1")?;
    let p2 = config.get_f64("physics.p2")?;
    let t_end = config.get_f64("physics.t_end")?;
    let dt = config.get_f64("physics.dt")?;
    let riesz = RieszParams::new(gamma, grid.dims).map_err(cfg_err)?;
    if !(p1 > 0.0 && p2 > 0.0) {
        return Err(RunError::Config(format!("powers must be positive: p1={p1}, p2={p2}")));
    }
    let amplitude = config.opt_f64("data.amplitude", 1.0)?;
    let u0 = build_profile(config, grid, beta, amplitude)?;
    let u1 = velocity_data(config, &u0)?;
    let mut solver = SolverConfig::new(t_end, dt);
    solver.alpha = alpha;
    solver.record_every = config.opt_usize("solver.record_every", 1)?;
    if let Some(th) = config.opt_str("solver.blowup_threshold") {
        let v = th
            .parse::<f64>()
            .map_err(|_| RunError::Config(format!("bad solver.blowup_threshold {th}")))?;
        solver.blowup_threshold = Some(v);
    }
    if let Some(every) = config.opt_str("solver.snapshot_every") {
        let v = every
            .parse::<usize>()
            .map_err(|_| RunError::Config(format!("bad solver.snapshot_every {every}")))?;
        solver.snapshot_every = Some(v);
    }
    // the config is fully validated before this solve starts
    let forcing = Forcing::Hartree { p1, p2, riesz };
    let traj = semilinear_solve(&u0, &u1, &forcing, &solver).map_err(run_err)?;

    let rows: Vec<String> = traj
        .records
        .iter()
        .map(|r| {
            format!(
                "{:.10e},{:.10e},{:.10e},{:.10e},{}",
                r.t, r.l2, r.hdot_alpha, r.dt_l2, traj.blown_up
            )
        })
        .collect();
    w.write_csv("trajectory.csv", "t,l2,hdot_alpha,dt_l2,blown_up", &rows)?;
    w.write_plot("decay_l2.dat", &traj.series(|r| r.l2))?;
    for (t, field) in &traj.snapshots {
        let name = format!("snapshot_t{t:.4}.bin");
        let mut buf = Vec::new();
        field.write_binary(&mut buf).map_err(run_err)?;
        w.write_raw(&name, &buf)?;
    }
    let xt = xt_norm(&traj, beta, alpha).map_err(run_err)?;
    let (xt_str, detect) = match xt {
        XtNorm::Finite(v) => (format!("{v:.6e}"), String::new()),
        XtNorm::Infinite { detect_time } => {
            ("inf".to_string(), detect_time.map(|t| format!("{t:.6}")).unwrap_or_default())
        }
    };
    let summary = format!(
        "{},{},{},{:.6e}",
        xt_str,
        traj.blown_up,
        detect,
        traj.final_l2()
    );
    w.write_csv("summary.csv", "xt_norm,blown_up,detect_time,final_l2", &[summary])?;
    Ok(())
}

fn sweep(config: &ExperimentConfig, w: &mut RunWriter) -> RunResult<()> {
    let grid = parse_grid(config)?;
    let beta = config.get_f64("physics.beta")?;
    let gamma = config.get_f64("physics.gamma")?;
    let alpha = config.opt_f64("physics.alpha", 1.0)?;
    let params = CriticalParams::new(grid.dims, beta, gamma).map_err(cfg_err)?;
    let p1_list = config.get_f64_list("sweep.p1_list")?;
    let p2_list = config.get_f64_list("sweep.p2_list")?;
    let sweep_cfg = SweepConfig {
        grid,
        amplitude: config.opt_f64("data.amplitude", 1.0)?,
        t_end: config.get_f64("physics.t_end")?,
        dt: config.get_f64("physics.dt")?,
        alpha,
        record_every: config.opt_usize("solver.record_every", 10)?,
    };
    let p_grid: Vec<(f64, f64)> = p1_list
        .iter()
        .flat_map(|&a| p2_list.iter().map(move |&b| (a, b)))
        .collect();
    let report = sweep_criticality(&params, &p_grid, &sweep_cfg).map_err(run_err)?;

    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            let dt = r.detect_time.map(|t| format!("{t:.6}")).unwrap_or_default();
            format!(
                "{:.6},{:.6},{:.6},{:.6},{},{},{:.6e},{:.6e},\"{}\"",
                r.p1,
                r.p2,
                r.p1 + r.p2,
                report.params.p_fuji,
                r.outcome.as_str(),
                dt,
                r.final_l2,
                r.xt_norm,
                r.note
            )
        })
        .collect();
    w.write_csv(
        "sweep.csv",
        "p1,p2,p_sum,p_fuji,outcome,detect_time,final_l2,xt_norm,note",
        &rows,
    )?;
    // gnuplot heat map: p1 p2 outcome-code
    let heat: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            let code = match r.outcome {
                Outcome::Decayed => 0,
                Outcome::Grew => 1,
                Outcome::BlownUp => 2,
                Outcome::Failed => 3,
            };
            format!("{:.6} {:.6} {code}", r.p1, r.p2)
        })
        .collect();
    w.write_raw("sweep_heatmap.dat", (heat.join("\n") + "\n").as_bytes())?;
    Ok(())
}

fn besov_norm_cmd(config: &ExperimentConfig, w: &mut RunWriter) -> RunResult<()> {
    let grid = parse_grid(config)?;
    let s = config.get_f64("physics.s")?;
    let p = config.opt_f64("physics.p", 2.0)?;
    let q = match config.opt_str("physics.q").unwrap_or("inf") {
        "inf" => f64::INFINITY,
        other => other
            .parse::<f64>()
            .map_err(|_| RunError::Config(format!("bad physics.q {other}")))?,
    };
    let delta = config.opt_f64("physics.delta", -s)?;
    let spec = BesovSpec::new(s, p, q).map_err(cfg_err)?;
    let beta = config.opt_f64("data.beta", 0.25)?;
    let amplitude = config.opt_f64("data.amplitude", 1.0)?;
    let u0 = build_profile(config, grid, beta, amplitude)?;
    let fam = lp_partition(grid).map_err(cfg_err)?;

    let blocks = block_energies(&u0, &spec, &fam).map_err(run_err)?;
    let rows: Vec<String> =
        blocks.iter().map(|(j, e)| format!("{j},{e:.10e}")).collect();
    w.write_csv("block_energies.csv", "j,energy", &rows)?;

    let b = besov_norm(&u0, &spec, &fam).map_err(run_err)?;
    let summary = if delta > 0.0 {
        let t_grid = logspace(1e-2, 1e2, 33);
        let h = heat_characterization_norm(&u0, delta, &t_grid).map_err(run_err)?;
        format!("{b:.10e},{h:.10e},{:.6}", b / h)
    } else {
        format!("{b:.10e},,")
    };
    w.write_csv("summary.csv", "besov_norm,heat_characterization,ratio", &[summary])?;
    Ok(())
}

fn bounds_scan(config: &ExperimentConfig, w: &mut RunWriter) -> RunResult<()> {
    let zone = match config.get_str("scan.zone")? {
        "low" => Zone::low(),
        "mid" => Zone::mid(),
        "high" => Zone::High,
        other => return Err(RunError::Config(format!("unknown scan.zone {other}"))),
    };
    let t_grid = linspace(
        config.get_f64("scan.t_lo")?,
        config.get_f64("scan.t_hi")?,
        config.opt_usize("scan.t_samples", 200)?,
    );
    let xi_grid = linspace(
        config.get_f64("scan.xi_lo")?,
        config.get_f64("scan.xi_hi")?,
        config.opt_usize("scan.xi_samples", 100)?,
    );
    let reports = verify_multiplier_bounds(zone, &t_grid, &xi_grid).map_err(cfg_err)?;
    let rows: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{:.6e},{:.6},{:.6}",
                r.zone, r.bound_id, r.scanned_points, r.worst_ratio, r.argmax_t, r.argmax_xi
            )
        })
        .collect();
    w.write_csv(
        "bounds.csv",
        "zone,bound_id,scanned_points,worst_ratio,argmax_t,argmax_xi",
        &rows,
    )?;
    Ok(())
}

fn inequalities(config: &ExperimentConfig, w: &mut RunWriter, seed: u64) -> RunResult<()> {
    let grid = parse_grid(config)?;
    let n_samples = config.opt_usize("data.samples", 50)?;
    let band = (config.opt_f64("data.band_lo", 0.3)?, config.opt_f64("data.band_hi", 6.0)?);
    let modes = config.opt_usize("data.modes", 10)?;
    let samples: Vec<RealField> = (0..n_samples)
        .map(|i| random_trig_field(grid, grid.freq_step, band, modes, seed + i as u64))
        .collect::<dampwave::Result<_>>()
        .map_err(run_err)?;

    let gamma = config.get_f64("hls.gamma")?;
    let m2 = config.get_f64("hls.m2")?;
    let hls = check_hls(&samples, gamma, m2).map_err(cfg_err)?;
    let rows: Vec<String> =
        hls.ratios.iter().map(|(i, r)| format!("{i},{r:.10e}")).collect();
    w.write_csv("hls.csv", "sample_id,ratio", &rows)?;

    let theta = config.get_f64("gn.theta")?;
    let a = config.get_f64("gn.a")?;
    let p = config.get_f64("gn.p")?;
    let p0 = config.get_f64("gn.p0")?;
    let p1 = config.get_f64("gn.p1")?;
    let gn = check_gn(&samples, theta, a, p, p0, p1).map_err(cfg_err)?;
    let rows: Vec<String> =
        gn.report.ratios.iter().map(|(i, r)| format!("{i},{r:.10e}")).collect();
    w.write_csv("gn.csv", "sample_id,ratio", &rows)?;

    let summary = vec![
        format!("hls,{:.10e},{}", hls.max_ratio, hls.all_finite()),
        format!("gn,{:.10e},{}", gn.report.max_ratio, gn.report.all_finite()),
    ];
    w.write_csv("summary.csv", "check,max_ratio,finite", &summary)?;
    Ok(())
}

fn weak_functional_cmd(config: &ExperimentConfig, w: &mut RunWriter) -> RunResult<()> {
    let grid = parse_grid(config)?;
    let beta = config.get_f64("physics.beta")?;
    let gamma = config.get_f64("physics.gamma")?;
    let p1 = config.get_f64("physics.p1")?;
    let p2 = config.get_f64("physics.p2")?;
    let dt = config.get_f64("physics.dt")?;
    let r_list = config.get_f64_list("physics.r_list")?;
    let riesz = RieszParams::new(gamma, grid.dims).map_err(cfg_err)?;
    let r_max = r_list.iter().cloned().fold(0.0f64, f64::max);
    let r_min = r_list.iter().cloned().fold(f64::MAX, f64::min);
    if r_list.is_empty() || r_min <= 0.0 {
        return Err(RunError::Config("physics.r_list needs positive entries".into()));
    }
    if r_max > 0.8 * grid.half_length {
        return Err(RunError::Config(format!(
            "largest R = {r_max} exceeds 0.8 L = {}",
            0.8 * grid.half_length
        )));
    }
    // test pairs validated (p_tilde > 1 and finite profile bounds) before
    // the solve starts
    let pairs: Vec<TestFunctionPair> = r_list
        .iter()
        .map(|&r| TestFunctionPair::new(p1, p2, r, grid.dims))
        .collect::<dampwave::Result<_>>()
        .map_err(cfg_err)?;
    let amplitude = config.opt_f64("data.amplitude", 0.01)?;
    let u0 = make_besov_data(grid, beta, amplitude).map_err(cfg_err)?;
    let u1 = u0.clone();

    let t_end = r_max * r_max;
    let snapshot_every = config.opt_usize(
        "solver.snapshot_every",
        ((r_min * r_min / dt) / 64.0).floor().max(1.0) as usize,
    )?;
    let mut solver = SolverConfig::new(t_end, dt);
    solver.record_every = (t_end / dt / 400.0).ceil().max(1.0) as usize;
    solver.snapshot_every = Some(snapshot_every);
    let forcing = Forcing::Hartree { p1, p2, riesz };
    let traj = semilinear_solve(&u0, &u1, &forcing, &solver).map_err(run_err)?;
    if traj.blown_up {
        return Err(RunError::Runtime(format!(
            "trajectory blew up at t = {}; weak functional needs a completed solve",
            traj.detect_time.unwrap_or(f64::NAN)
        )));
    }

    let mut rows = Vec::new();
    let mut boundary_pts = Vec::new();
    for tf in &pairs {
        let rep = weak_functional(&traj.snapshots, &u0, &u1, tf, Some((p1, p2, &riesz)))
            .map_err(run_err)?;
        let frac = rep.residual.abs() / rep.dominant.max(1e-300);
        rows.push(format!(
            "{:.4},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.4e}",
            tf.r_scale, rep.k_r, rep.m_r, rep.boundary, rep.residual, rep.dominant, frac
        ));
        boundary_pts.push((tf.r_scale, rep.boundary));
    }
    w.write_csv(
        "weak.csv",
        "R,k_r,m_r,boundary,residual,dominant,residual_frac",
        &rows,
    )?;
    w.write_plot("boundary_growth.dat", &boundary_pts)?;

    if boundary_pts.len() >= 3 {
        let lx: Vec<f64> = boundary_pts.iter().map(|(r, _)| r.ln()).collect();
        let ly: Vec<f64> = boundary_pts.iter().map(|(_, b)| b.ln()).collect();
        let m = lx.len() as f64;
        let mx = lx.iter().sum::<f64>() / m;
        let my = ly.iter().sum::<f64>() / m;
        let slope: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / lx.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        let theory = grid.dims as f64 / 2.0 - beta;
        let row = format!("{slope:.6},{theory:.6},{:.6}", slope - theory);
        w.write_csv("boundary_fit.csv", "slope,theory,deviation", &[row])?;
    }
    Ok(())
}
