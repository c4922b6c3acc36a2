use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use quenchlab::free_fermion::{dispersion, gge_correlator, polarized_occupations, thermal_occupations, MomentumGrid};
use quenchlab::groundstate::{binder_crossing, binder_curve};
use quenchlab::io::{fmt_f64, write_binder_curves, write_correlator_series, write_derivative_curves, write_json};
use quenchlab::meanfield::predict_critical_points;
use quenchlab::numeric::grid;
use quenchlab::scaling::{
    collapse_fit, derivative_curves, derivative_curves_exact, find_crossing, statevector_sweep, CriticalPointEstimate,
    DerivativeCurveSet,
};
use quenchlab::statevector::{write_checkpoint, MemoryBudget, Quench};
use quenchlab::{Error, HamiltonianSpec, QuenchConfig, Result};
use serde_json::{json, Value};

use crate::manifest::RunManifest;
use crate::{Cli, Command, Family, FieldGrid, ModelArgs};

pub const CURVES_FILE: &str = "curves.csv";
pub const ESTIMATE_FILE: &str = "estimate.json";

/// What a command produced: resolved configuration, written files, and an
/// error to report after the manifest is on disk.
struct Report {
    config: Value,
    outputs: Vec<String>,
    deferred: Option<Error>,
}

impl Report {
    fn new(config: Value) -> Self {
        Self {
            config,
            outputs: Vec::new(),
            deferred: None,
        }
    }
}

pub fn run(cli: &Cli, args: &[String]) -> Result<()> {
    if let Command::Replay(r) = &cli.command {
        let manifest = RunManifest::read(&r.manifest)?;
        let argv = std::iter::once("quenchlab".to_string()).chain(manifest.args.iter().cloned());
        let mut recorded = Cli::try_parse_from(argv)
            .map_err(|e| Error::InvalidConfig(format!("manifest arguments do not parse: {e}")))?;
        if matches!(recorded.command, Command::Replay(_)) {
            return Err(Error::InvalidConfig("a manifest cannot record a replay".into()));
        }
        recorded.out_dir = cli.out_dir.clone();
        return run(&recorded, &manifest.args);
    }

    fs::create_dir_all(&cli.out_dir)?;
    let dir = cli.out_dir.as_path();
    let start = Instant::now();
    let (name, report) = match &cli.command {
        Command::ExactSweep(a) => ("exact-sweep", exact_sweep(a, dir)?),
        Command::SvSweep(a) => ("sv-sweep", sv_sweep(a, dir)?),
        Command::Binder(a) => ("binder", binder(a, dir)?),
        Command::Meanfield(a) => ("meanfield", meanfield(a, dir)?),
        Command::Dispersion(a) => ("dispersion", dispersion_table(a, dir)?),
        Command::Gge(a) => ("gge", gge(a, dir)?),
        Command::Quench(a) => ("quench", quench(a, dir)?),
        Command::Replay(_) => unreachable!("handled above"),
    };
    let manifest = RunManifest {
        command: name.to_string(),
        args: args.to_vec(),
        config: report.config,
        version: env!("CARGO_PKG_VERSION").to_string(),
        threads: rayon::current_num_threads(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        outputs: report.outputs,
    };
    manifest.write(dir)?;
    match report.deferred {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn field_grid(g: &FieldGrid) -> Result<Vec<f64>> {
    grid(g.b_min, g.b_max, g.b_step)
}

fn template(model: &ModelArgs, sites: usize) -> HamiltonianSpec {
    match model.family {
        Family::Nn => HamiltonianSpec::nearest_neighbor(sites, 0.0),
        Family::Nnn => HamiltonianSpec::next_nearest_neighbor(sites, model.delta, 0.0),
        Family::Lr => HamiltonianSpec::long_range(sites, model.alpha, 0.0),
    }
}

fn require_two_times(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "at least two times are needed for a crossing, got {}",
            times.len()
        )));
    }
    Ok(())
}

/// Crossing estimate, plus a collapse fit over the grid when there are
/// enough times for one. The first failure is returned separately.
fn estimate_curves(curves: &DerivativeCurveSet) -> (Vec<CriticalPointEstimate>, Option<Error>) {
    let mut out = Vec::new();
    let mut failure = None;
    match find_crossing(curves) {
        Ok(e) => out.push(e),
        Err(e) => failure = Some(e),
    }
    if curves.times.len() >= 3 {
        let interval = (curves.b_grid[0], curves.b_grid[curves.b_grid.len() - 1]);
        match collapse_fit(curves, interval) {
            Ok(e) => out.push(e),
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    (out, failure)
}

fn write_curve_outputs(dir: &Path, curves: &DerivativeCurveSet, report: &mut Report) -> Result<()> {
    write_derivative_curves(curves, create(dir, CURVES_FILE)?)?;
    report.outputs.push(CURVES_FILE.into());
    let (estimates, failure) = estimate_curves(curves);
    write_json(&estimates, create(dir, ESTIMATE_FILE)?)?;
    report.outputs.push(ESTIMATE_FILE.into());
    report.deferred = failure;
    Ok(())
}

fn exact_sweep(a: &crate::ExactSweepArgs, dir: &Path) -> Result<Report> {
    require_two_times(&a.times)?;
    let b_grid = field_grid(&a.grid)?;
    let curves = derivative_curves_exact(a.sites, &a.times, &b_grid)?;
    let mut report = Report::new(json!({
        "spec": HamiltonianSpec::nearest_neighbor(a.sites, 0.0),
        "b_grid": b_grid,
        "times": a.times,
    }));
    write_curve_outputs(dir, &curves, &mut report)?;
    Ok(report)
}

fn sv_sweep(a: &crate::SvSweepArgs, dir: &Path) -> Result<Report> {
    require_two_times(&a.times)?;
    let b_grid = field_grid(&a.grid)?;
    let spec = template(&a.model, a.sites);
    spec.validate()?;
    let t_max = a.t_max.unwrap_or_else(|| a.times.iter().copied().fold(0.0, f64::max));
    let config = QuenchConfig {
        sample_stride: a.stride,
        b_grid: b_grid.clone(),
        ..QuenchConfig::new(t_max, a.dt)
    };
    let sweep = statevector_sweep(&spec, &config, &a.times, &b_grid, a.delta_b, MemoryBudget::from_env())?;
    let curves = derivative_curves(&sweep)?;
    let mut report = Report::new(json!({
        "spec": spec,
        "quench": config,
        "times": a.times,
        "delta_b": a.delta_b,
    }));
    write_curve_outputs(dir, &curves, &mut report)?;
    Ok(report)
}

fn binder(a: &crate::BinderArgs, dir: &Path) -> Result<Report> {
    if a.sizes.len() < 2 {
        return Err(Error::InvalidConfig(
            "at least two sizes are needed for a crossing".into(),
        ));
    }
    let b_grid = field_grid(&a.grid)?;
    if b_grid.len() < 2 {
        return Err(Error::GridTooCoarse {
            points: b_grid.len(),
            required: 2,
        });
    }
    let specs: Vec<HamiltonianSpec> = a.sizes.iter().map(|&l| template(&a.model, l)).collect();
    for s in &specs {
        s.validate()?;
        MemoryBudget::from_env().check(s.sites)?;
    }
    let curves = specs
        .iter()
        .map(|s| binder_curve(s, &b_grid))
        .collect::<Result<Vec<_>>>()?;
    write_binder_curves(&curves, create(dir, CURVES_FILE)?)?;
    let mut report = Report::new(json!({ "specs": specs, "b_grid": b_grid }));
    report.outputs.push(CURVES_FILE.into());
    match binder_crossing(&curves) {
        Ok(e) => {
            write_json(&[e], create(dir, ESTIMATE_FILE)?)?;
            report.outputs.push(ESTIMATE_FILE.into());
        }
        Err(e) => report.deferred = Some(e),
    }
    Ok(report)
}

fn meanfield(a: &crate::MeanfieldArgs, dir: &Path) -> Result<Report> {
    let p = predict_critical_points(a.delta)?;
    write_json(&p, create(dir, ESTIMATE_FILE)?)?;
    println!("{}", serde_json::to_string(&p)?);
    if p.validity_warning {
        eprintln!(
            "warning: Delta = {} is beyond the range where first-order mean field is trusted",
            a.delta
        );
    }
    let mut report = Report::new(json!({ "delta": a.delta }));
    report.outputs.push(ESTIMATE_FILE.into());
    Ok(report)
}

fn dispersion_table(a: &crate::DispersionArgs, dir: &Path) -> Result<Report> {
    if a.field.is_nan() || a.field < 0.0 {
        return Err(Error::InvalidSpec(format!("B = {} must be non-negative", a.field)));
    }
    let momenta: Vec<f64> = match a.sites {
        Some(l) => MomentumGrid::antiperiodic(l)?.full_zone(),
        None => {
            if a.points < 2 {
                return Err(Error::GridTooCoarse {
                    points: a.points,
                    required: 2,
                });
            }
            (0..a.points)
                .map(|k| std::f64::consts::PI * k as f64 / (a.points - 1) as f64)
                .collect()
        }
    };
    let mut w = csv_writer(dir, &["q", "omega_over_J"])?;
    for q in &momenta {
        w.write_record([fmt_f64(*q), fmt_f64(dispersion(a.field, 1.0, *q))])?;
    }
    w.flush()?;
    let mut report = Report::new(json!({ "B": a.field, "L": a.sites, "points": momenta.len() }));
    report.outputs.push(CURVES_FILE.into());
    Ok(report)
}

fn csv_writer(dir: &Path, header: &[&str]) -> Result<csv::Writer<BufWriter<File>>> {
    let mut w = csv::Writer::from_writer(create(dir, CURVES_FILE)?);
    w.write_record(header)?;
    Ok(w)
}

/// Kink diagnostic: step used for the second difference at `B = J`.
const KINK_STEP: f64 = 1e-4;

fn second_difference(sites: usize, occupations: &dyn Fn(f64, &MomentumGrid) -> Vec<f64>) -> Result<f64> {
    let g = MomentumGrid::antiperiodic(sites)?;
    let at = |b: f64| gge_correlator(b, 1.0, &g, &occupations(b, &g));
    let h = KINK_STEP;
    Ok((at(1.0 + h)? - 2.0 * at(1.0)? + at(1.0 - h)?) / (h * h))
}

fn gge(a: &crate::GgeArgs, dir: &Path) -> Result<Report> {
    let b_grid = field_grid(&a.grid)?;
    let grid_l = MomentumGrid::antiperiodic(a.sites)?;
    let beta = a.beta;
    let thermal = move |b: f64, g: &MomentumGrid| thermal_occupations(b, 1.0, beta, g);
    let polarized = |b: f64, g: &MomentumGrid| polarized_occupations(b, 1.0, g);
    let (label, values, kink) = if let Some(occ) = &a.occupations {
        let v = b_grid
            .iter()
            .map(|&b| gge_correlator(b, 1.0, &grid_l, occ))
            .collect::<Result<Vec<_>>>()?;
        ("custom", v, Value::Null)
    } else {
        let occ: &dyn Fn(f64, &MomentumGrid) -> Vec<f64> = if a.thermal { &thermal } else { &polarized };
        let v = b_grid
            .iter()
            .map(|&b| gge_correlator(b, 1.0, &grid_l, &occ(b, &grid_l)))
            .collect::<Result<Vec<_>>>()?;
        // A kink at B = J shows up as a second difference that keeps growing
        // with L once the step resolves the finite-size rounding.
        let d2_l = second_difference(a.sites, occ)?;
        let d2_2l = second_difference(2 * a.sites, occ)?;
        let ratio = d2_2l.abs() / d2_l.abs();
        let kink = json!({
            "step": KINK_STEP,
            "d2_at_L": d2_l,
            "d2_at_2L": d2_2l,
            "ratio": ratio,
            "kink": ratio > 1.5,
        });
        (if a.thermal { "thermal" } else { "polarized" }, v, kink)
    };
    let mut w = csv_writer(dir, &["B_over_J", "G_gge"])?;
    for (b, v) in b_grid.iter().zip(&values) {
        w.write_record([fmt_f64(*b), fmt_f64(*v)])?;
    }
    w.flush()?;
    let mut report = Report::new(json!({
        "L": a.sites,
        "b_grid": b_grid,
        "occupations": label,
        "beta": a.thermal.then_some(a.beta),
    }));
    report.outputs.push(CURVES_FILE.into());
    if !kink.is_null() {
        write_json(&kink, create(dir, ESTIMATE_FILE)?)?;
        report.outputs.push(ESTIMATE_FILE.into());
    }
    Ok(report)
}

fn quench(a: &crate::QuenchArgs, dir: &Path) -> Result<Report> {
    let spec = template(&a.model, a.sites).with_field(a.field);
    let config = QuenchConfig {
        sample_stride: a.stride,
        ..QuenchConfig::new(a.t_max, a.dt)
    };
    let record = Quench::new(&spec, &config)?.run()?;
    write_correlator_series(&record.series, create(dir, CURVES_FILE)?)?;
    let mut report = Report::new(json!({ "spec": spec, "quench": config }));
    report.outputs.push(CURVES_FILE.into());
    if let Some(path) = &a.checkpoint {
        write_checkpoint(&record.final_state, BufWriter::new(File::create(path)?))?;
        report.outputs.push(path.display().to_string());
    }
    Ok(report)
}
