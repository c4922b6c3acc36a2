//! Acceptance checks, one line per criterion. Runs as a plain binary so the
//! report is always printed; exits non-zero if any criterion fails.
//!
//! Criteria 5 and 6 run L = 20 state-vector sweeps and take several
//! minutes on a single core.

mod common;

use std::time::Instant;

use common::{max_amplitude_error, DenseEvolution};
use quenchlab::free_fermion::{
    g_av_exact, g_inf, gge_correlator, polarized_occupations, thermal_occupations, MomentumGrid,
};
use quenchlab::groundstate::{binder_crossing, binder_curve};
use quenchlab::meanfield::predict_critical_points;
use quenchlab::numeric::grid;
use quenchlab::scaling::{
    collapse_fit_with, crossing_analysis, derivative_curves, derivative_curves_exact, statevector_sweep,
    CollapseOptions, DerivativeCurveSet, DEFAULT_DELTA_B,
};
use quenchlab::statevector::{prepare_polarized_x, run_quench, MemoryBudget, Propagator, TrotterPlan};
use quenchlab::{HamiltonianSpec, QuenchConfig, Result};

type Check = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn stationary_values() -> Result<Outcome> {
    let fields = [0.0, 0.5, 1.0, 2.0];
    let want = [1.0, 0.875, 0.5, 0.5];
    let exact = fields.iter().zip(&want).all(|(&b, &w)| g_inf(b, 1.0) == w);
    let mut worst: f64 = 0.0;
    for (&b, &w) in fields.iter().zip(&want) {
        worst = worst.max((g_av_exact(b, 1.0, 1000, 1e3)? - w).abs());
    }
    outcome(
        exact && worst <= 5e-3,
        format!("g_inf exact: {exact}; max |G_av(L=1000, Jt=1e3) - g_inf| = {worst:.2e} (tol 5e-3)"),
    )
}

fn exact_crossing_and_collapse() -> Result<Outcome> {
    let b = grid(0.8, 1.2, 0.01)?;
    let curves = derivative_curves_exact(100, &[4.0, 6.0, 8.0, 10.0], &b)?;
    let cross = crossing_analysis(&curves)?;
    let value = cross.crossing_value();
    let fit = collapse_fit_with(&curves, (0.9, 1.1), &CollapseOptions::default())?;
    let (slope, intercept) = fit.master_line(0.2);
    let checks = [
        (cross.estimate.b_c - 1.0).abs() <= 0.02,
        (value + 0.5).abs() <= 0.05,
        (slope - 1.0).abs() <= 0.1,
        (intercept + 0.5).abs() <= 0.02,
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "crossing b_c = {:.4} +- {:.4} [{}]; crossing value = {value:.4} [{}]; collapse b_c = {:.4} +- {:.4}, master slope = {slope:.3} [{}], intercept = {intercept:.4} [{}]",
            cross.estimate.b_c,
            cross.estimate.uncertainty,
            ok(checks[0]),
            ok(checks[1]),
            fit.estimate.b_c,
            fit.estimate.uncertainty,
            ok(checks[2]),
            ok(checks[3]),
        ),
    )
}

fn ok(c: bool) -> &'static str {
    if c {
        "ok"
    } else {
        "out of tolerance"
    }
}

fn backend_equivalence() -> Result<Outcome> {
    let residual = |l: usize, b: f64, dt: f64| -> Result<f64> {
        let series = run_quench(&HamiltonianSpec::nearest_neighbor(l, b), &QuenchConfig::new(5.0, dt))?;
        let mut worst: f64 = 0.0;
        for (t, g) in series.times.iter().zip(&series.g_av) {
            worst = worst.max((g - g_av_exact(b, 1.0, l, *t)?).abs());
        }
        Ok(worst)
    };
    let mut worst: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    for l in [6, 8, 10] {
        for b in [0.5, 1.0, 1.5] {
            let coarse = residual(l, b, 0.01)?;
            let fine = residual(l, b, 0.005)?;
            worst = worst.max(coarse);
            min_ratio = min_ratio.min(coarse / fine);
        }
    }
    outcome(
        worst <= 1e-5 && min_ratio >= 12.0,
        format!("max |G_av sv - exact| at dt=0.01 = {worst:.2e} (tol 1e-5); min reduction on halving dt = {min_ratio:.1}x (need 12x)"),
    )
}

fn dense_oracle() -> Result<Outcome> {
    let spec = HamiltonianSpec::next_nearest_neighbor(6, 0.1, 1.1);
    let dense = DenseEvolution::new(&spec);
    let prop = Propagator::new(&spec, TrotterPlan::fourth_order(0.01))?;
    let start = prepare_polarized_x(6);
    let mut state = start.clone();
    let mut worst: f64 = 0.0;
    for k in 1..=5 {
        prop.steps(&mut state, 100)?;
        worst = worst.max(max_amplitude_error(&state, &dense.evolve(&start, k as f64)));
    }
    outcome(
        worst <= 1e-6,
        format!("L=6, Delta=0.1, dt=0.01, Jt<=5: max amplitude error = {worst:.2e} (tol 1e-6)"),
    )
}

fn sweep(spec: &HamiltonianSpec, b_grid: &[f64]) -> Result<DerivativeCurveSet> {
    let times = [5.0, 7.0, 9.0];
    let sweep = statevector_sweep(
        spec,
        &QuenchConfig::new(9.0, 0.05),
        &times,
        b_grid,
        DEFAULT_DELTA_B,
        MemoryBudget::from_env(),
    )?;
    derivative_curves(&sweep)
}

fn describe_crossings(curves: &DerivativeCurveSet, target: f64) -> Result<Outcome> {
    match crossing_analysis(curves) {
        Ok(a) => {
            let pairs: Vec<String> = a
                .pairs
                .iter()
                .map(|p| format!("({},{})->{:.4}", p.first, p.second, p.b))
                .collect();
            outcome(
                (a.estimate.b_c - target).abs() <= 0.05,
                format!(
                    "b_c = {:.4} +- {:.4} (target {target} +- 0.05); pairs {}",
                    a.estimate.b_c,
                    a.estimate.uncertainty,
                    pairs.join(" ")
                ),
            )
        }
        Err(e) => {
            let collapse = collapse_fit_with(
                curves,
                (curves.b_grid[0], curves.b_grid[curves.b_grid.len() - 1]),
                &CollapseOptions::default(),
            )
            .map(|f| format!("{:.4} +- {:.4}", f.estimate.b_c, f.estimate.uncertainty))
            .unwrap_or_else(|e| e.to_string());
            outcome(false, format!("{e}; collapse fit on the same curves gives {collapse}"))
        }
    }
}

fn nnn_dynamical_point() -> Result<Outcome> {
    let b = grid(1.05, 1.25, 0.025)?;
    let curves = sweep(&HamiltonianSpec::next_nearest_neighbor(20, 0.1, 0.0), &b)?;
    describe_crossings(&curves, 1.15)
}

fn long_range_dynamical_point() -> Result<Outcome> {
    let b = grid(0.93, 1.13, 0.025)?;
    let curves = sweep(&HamiltonianSpec::long_range(20, 6.0, 0.0), &b)?;
    describe_crossings(&curves, 1.03)
}

fn binder_crossings() -> Result<Outcome> {
    let nn_grid = grid(0.8, 1.2, 0.02)?;
    let nn = [8, 10, 12, 14]
        .iter()
        .map(|&l| binder_curve(&HamiltonianSpec::nearest_neighbor(l, 0.0), &nn_grid))
        .collect::<Result<Vec<_>>>()?;
    let nn = binder_crossing(&nn)?;
    let nnn_grid = grid(1.0, 1.3, 0.02)?;
    let nnn = [10, 12, 14, 16]
        .iter()
        .map(|&l| binder_curve(&HamiltonianSpec::next_nearest_neighbor(l, 0.1, 0.0), &nnn_grid))
        .collect::<Result<Vec<_>>>()?;
    let nnn = binder_crossing(&nnn)?;
    outcome(
        (nn.b_c - 1.0).abs() <= 0.05 && (nnn.b_c - 1.168).abs() <= 0.05,
        format!(
            "NN L=8..14: b_c = {:.4} +- {:.4} (target 1.00 +- 0.05); NNN Delta=0.1 L=10..16: b_c = {:.4} +- {:.4} (target 1.168 +- 0.05)",
            nn.b_c, nn.uncertainty, nnn.b_c, nnn.uncertainty
        ),
    )
}

fn mean_field() -> Result<Outcome> {
    let p = predict_critical_points(0.1)?;
    let dy = format!("{:.2}", p.b_c_dy_over_j);
    let gs = format!("{:.3}", p.b_c_gs_over_j);
    outcome(
        dy == "1.15" && (p.b_c_gs_over_j - 1.1698).abs() < 5e-5 && (p.b_c_gs_over_j - 1.168).abs() < 5e-3,
        format!(
            "b_c_dy = {} ({dy} vs quoted 1.15); b_c_gs = {:.6} ({gs} vs quoted 1.168, formula value 1.1698)",
            p.b_c_dy_over_j, p.b_c_gs_over_j
        ),
    )
}

fn thermal_analyticity() -> Result<Outcome> {
    const H: f64 = 1e-4;
    let d2 = |l: usize, thermal: bool| -> Result<f64> {
        let g = MomentumGrid::antiperiodic(l)?;
        let at = |b: f64| {
            let occ = if thermal {
                thermal_occupations(b, 1.0, 1.0, &g)
            } else {
                polarized_occupations(b, 1.0, &g)
            };
            gge_correlator(b, 1.0, &g, &occ)
        };
        Ok((at(1.0 + H)? - 2.0 * at(1.0)? + at(1.0 - H)?) / (H * H))
    };
    let (t500, t1000) = (d2(500, true)?, d2(1000, true)?);
    let (p500, p1000) = (d2(500, false)?, d2(1000, false)?);
    let thermal_change = ((t1000 - t500) / t500).abs();
    let polarized_growth = p1000.abs() / p500.abs() - 1.0;
    outcome(
        thermal_change < 0.2 && polarized_growth > 0.5,
        format!(
            "d2G/dB2 at B=J, step {H:e}: thermal beta=1 {t500:.4} -> {t1000:.4} ({:.1}% change, need <20%); polarized {p500:.1} -> {p1000:.1} ({:.0}% growth, need >50%)",
            100.0 * thermal_change,
            100.0 * polarized_growth
        ),
    )
}

fn substitutions() -> Result<Outcome> {
    let l25 = MemoryBudget::required_bytes(25);
    let l20 = MemoryBudget::required_bytes(20);
    outcome(
        true,
        format!(
            "DMRG at L=30-140 replaced by Lanczos ED at L<=16 (criterion 7); L=25 state vectors ({:.2} GiB working set, ~40x the L=20 cost per step) replaced by L=20 ({:.0} MiB) with +-0.05 tolerances (criteria 5-6)",
            l25 as f64 / (1u64 << 30) as f64,
            l20 as f64 / (1u64 << 20) as f64
        ),
    )
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("stationary values", stationary_values),
        ("exact crossing and collapse, L=100", exact_crossing_and_collapse),
        ("state-vector vs free-fermion G_av", backend_equivalence),
        ("dense-oracle equivalence", dense_oracle),
        ("NNN Delta=0.1 dynamical point, L=20", nnn_dynamical_point),
        ("long-range alpha=6 dynamical point, L=20", long_range_dynamical_point),
        ("Binder crossings", binder_crossings),
        ("mean-field predictions", mean_field),
        ("thermal analyticity vs polarized kink", thermal_analyticity),
        ("desk-scale substitutions", substitutions),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} | {name} | {} | {:.1}s",
            k + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
