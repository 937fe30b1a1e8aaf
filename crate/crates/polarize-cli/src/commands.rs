//! One function per subcommand. Each returns `Ok(true)` when every
//! checked property passed (or the command is purely informational),
//! `Ok(false)` when a checked property failed, and `Err` for usage or
//! input problems; `main` maps these onto exit codes 0 / 1 / 2.

use std::path::Path;

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;
use serde::Serialize;

use polarize::proof_check::{
    self, breakpoints, global_minimum_scan, minimum_at_breakpoint, quasiconcavity, table_row,
    TableRow,
};
use polarize::seeding::derive_seed;
use polarize::sign_search::{
    lambda_map, longest_sum_exhaustive, longest_sum_local, LongestSumResult, SearchMethod,
    EXHAUSTIVE_LIMIT,
};
use polarize::slice_min::{closed_form_minimum, minimum_value, CubeSliceProblem};
use polarize::sphere_opt::{
    equality_case_check, maximize_product_with_stats, witness_from_result, OptimizerConfig,
    OptimizerStats, WitnessReport, WitnessSource,
};
use polarize::vectors::{generate, Generator, UnitVectorSet};

use crate::io::load_vectors;
use crate::render::{csv_f, emit_json, join, kv, signs_csv, signs_text, text_f, Format};
use crate::{KindArg, MethodArg};

pub fn mu(n: usize, s: f64, format: Format) -> Result<bool> {
    let problem = CubeSliceProblem::new(n, s)?;
    let cert = closed_form_minimum(problem);

    #[derive(Serialize)]
    struct MuOut<'a> {
        n: usize,
        s: f64,
        pin_threshold: usize,
        residual_sum: f64,
        minimizer: &'a [f64],
        value: f64,
    }
    let out = MuOut {
        n,
        s: problem.s(),
        pin_threshold: cert.pin_threshold(),
        residual_sum: cert.residual_sum(),
        minimizer: cert.minimizer().coords(),
        value: cert.value(),
    };
    match format {
        Format::Text => {
            kv("n", out.n.to_string());
            kv("s", text_f(out.s));
            kv("pin threshold", out.pin_threshold.to_string());
            kv("residual sum", text_f(out.residual_sum));
            kv("minimizer", join(out.minimizer, text_f, " "));
            kv("value", text_f(out.value));
        }
        Format::Json => emit_json(&out)?,
        Format::Csv => {
            println!("n,s,pin_threshold,residual_sum,value,minimizer");
            println!(
                "{},{},{},{},{},{}",
                out.n,
                csv_f(out.s),
                out.pin_threshold,
                csv_f(out.residual_sum),
                csv_f(out.value),
                join(out.minimizer, csv_f, ";"),
            );
        }
    }
    Ok(true)
}

pub fn breakpoints_cmd(n: usize, format: Format) -> Result<bool> {
    let table = breakpoints(n)?;

    #[derive(Serialize)]
    struct BreakpointRow {
        j: usize,
        level: f64,
        minimum: f64,
    }
    let mut rows = Vec::with_capacity(n + 1);
    for (j, &level) in table.levels().iter().enumerate() {
        let minimum = minimum_value(CubeSliceProblem::new(n, level)?);
        rows.push(BreakpointRow { j, level, minimum });
    }

    #[derive(Serialize)]
    struct BreakpointsOut {
        n: usize,
        rows: Vec<BreakpointRow>,
    }
    let out = BreakpointsOut { n, rows };
    match format {
        Format::Text => {
            println!("{:<4} {:<22} minimum", "j", "level");
            for row in &out.rows {
                println!(
                    "{:<4} {:<22} {}",
                    row.j,
                    text_f(row.level),
                    text_f(row.minimum)
                );
            }
        }
        Format::Json => emit_json(&out)?,
        Format::Csv => {
            println!("j,level,minimum");
            for row in &out.rows {
                println!("{},{},{}", row.j, csv_f(row.level), csv_f(row.minimum));
            }
        }
    }
    Ok(true)
}

pub fn table(n_min: usize, n_max: usize, format: Format) -> Result<bool> {
    if n_min < 3 || n_max > 16 || n_min > n_max {
        bail!("table range must satisfy 3 <= n-min <= n-max <= 16 (got {n_min}..={n_max})");
    }
    let rows = (n_min..=n_max)
        .map(table_row)
        .collect::<polarize::Result<Vec<TableRow>>>()?;

    #[derive(Serialize)]
    struct TableOut {
        rows: Vec<TableRow>,
    }
    let out = TableOut { rows };
    match format {
        Format::Text => {
            println!(
                "{:<4} {:<8} {:<22} {:<22} bound_holds",
                "n", "column2", "s_(n-1)^(n-1)", "sqrt(n^n)"
            );
            for row in &out.rows {
                println!(
                    "{:<4} {:<8} {:<22} {:<22} {}",
                    row.n,
                    format!("{:.3}", row.column2),
                    text_f(row.s_nm1_pow),
                    text_f(row.sqrt_n_pow_n),
                    row.bound_holds
                );
            }
        }
        Format::Json => emit_json(&out)?,
        Format::Csv => {
            println!("n,column2,s_nm1_pow,sqrt_n_pow_n,bound_holds");
            for row in &out.rows {
                println!(
                    "{},{},{},{},{}",
                    row.n,
                    csv_f(row.column2),
                    csv_f(row.s_nm1_pow),
                    csv_f(row.sqrt_n_pow_n),
                    row.bound_holds
                );
            }
        }
    }
    Ok(true)
}

pub fn scan(n: usize, grid: usize, format: Format) -> Result<bool> {
    let report = global_minimum_scan(n, grid)?;
    match format {
        Format::Text => {
            kv("n", report.n.to_string());
            kv("grid", report.grid.to_string());
            kv("grid step", text_f(report.grid_step));
            kv("min value", text_f(report.min_value));
            kv("argmin", text_f(report.argmin));
            kv("sqrt(n)", text_f((report.n as f64).sqrt()));
            kv("bound", text_f(report.bound));
            kv("strict off minimum", report.strict_off_minimum.to_string());
            kv("bound holds", report.bound_holds.to_string());
        }
        Format::Json => emit_json(&report)?,
        Format::Csv => {
            println!("n,grid,grid_step,min_value,argmin,bound,strict_off_minimum,bound_holds");
            println!(
                "{},{},{},{},{},{},{},{}",
                report.n,
                report.grid,
                csv_f(report.grid_step),
                csv_f(report.min_value),
                csv_f(report.argmin),
                csv_f(report.bound),
                report.strict_off_minimum,
                report.bound_holds
            );
        }
    }
    Ok(report.bound_holds)
}

fn longest(
    set: &UnitVectorSet,
    method: MethodArg,
    seed: Option<u64>,
    restarts: usize,
) -> Result<LongestSumResult> {
    match method {
        MethodArg::Exhaustive => {
            if set.n() > EXHAUSTIVE_LIMIT {
                bail!(
                    "n = {} exceeds the exhaustive limit {EXHAUSTIVE_LIMIT}; \
                     use --method local --seed <seed>",
                    set.n()
                );
            }
            Ok(longest_sum_exhaustive(set)?)
        }
        MethodArg::Local => {
            let seed =
                seed.ok_or_else(|| anyhow!("--seed is required with --method local"))?;
            if restarts == 0 {
                bail!("--restarts must be at least 1");
            }
            Ok(longest_sum_local(set, seed, restarts)?)
        }
    }
}

fn method_name(method: SearchMethod) -> &'static str {
    match method {
        SearchMethod::Exhaustive => "exhaustive",
        SearchMethod::LocalSearch => "local_search",
    }
}

fn source_name(source: WitnessSource) -> &'static str {
    match source {
        WitnessSource::LongestSum => "longest_sum",
        WitnessSource::Optimizer => "optimizer",
        WitnessSource::Provided => "provided",
    }
}

#[derive(Serialize)]
struct WitnessOut {
    n: usize,
    method: SearchMethod,
    is_global: bool,
    signs: Vec<i8>,
    norm: f64,
    report: WitnessReport,
}

fn render_witness(out: &WitnessOut, format: Format) -> Result<()> {
    match format {
        Format::Text => {
            kv("n", out.n.to_string());
            kv("method", method_name(out.method));
            kv("is_global", out.is_global.to_string());
            kv("signs", signs_text(&out.signs));
            kv("norm", text_f(out.norm));
            kv("x", join(&out.report.x, text_f, " "));
            kv("log_product", text_f(out.report.log_product));
            kv("product", text_f(out.report.product));
            kv("bound", text_f(out.report.bound));
            kv("passes", out.report.passes.to_string());
            kv("source", source_name(out.report.source));
        }
        Format::Json => emit_json(out)?,
        Format::Csv => {
            println!("n,method,is_global,norm,log_product,product,bound,passes,source,signs,x");
            println!(
                "{},{},{},{},{},{},{},{},{},{},{}",
                out.n,
                method_name(out.method),
                out.is_global,
                csv_f(out.norm),
                csv_f(out.report.log_product),
                csv_f(out.report.product),
                csv_f(out.report.bound),
                out.report.passes,
                source_name(out.report.source),
                signs_csv(&out.signs),
                join(&out.report.x, csv_f, ";"),
            );
        }
    }
    Ok(())
}

pub fn witness(
    input: &Path,
    method: MethodArg,
    seed: Option<u64>,
    restarts: usize,
    format: Format,
) -> Result<bool> {
    let set = load_vectors(input)?;
    let result = longest(&set, method, seed, restarts)?;
    let report = witness_from_result(&set, &result)?;
    let out = WitnessOut {
        n: set.n(),
        method: result.method,
        is_global: result.is_global,
        signs: result.signs.eps().to_vec(),
        norm: result.norm,
        report,
    };
    render_witness(&out, format)?;
    Ok(out.report.passes)
}

#[allow(clippy::too_many_arguments)]
pub fn maximize(
    input: &Path,
    seed: u64,
    starts: Option<usize>,
    max_iters: Option<usize>,
    grad_tol: Option<f64>,
    check_equality: bool,
    format: Format,
) -> Result<bool> {
    let set = load_vectors(input)?;
    let mut config = OptimizerConfig::for_dimension(set.n(), seed);
    if let Some(k) = starts {
        config.starts = k;
    }
    if let Some(m) = max_iters {
        config.max_iters = m;
    }
    if let Some(g) = grad_tol {
        config.grad_tol = g;
    }
    let (report, stats) = maximize_product_with_stats(&set, &config)?;
    let equality = if check_equality {
        Some(equality_case_check(&set, &config)?)
    } else {
        None
    };

    #[derive(Serialize)]
    struct MaximizeOut {
        n: usize,
        config: OptimizerConfig,
        stats: OptimizerStats,
        #[serde(skip_serializing_if = "Option::is_none")]
        equality: Option<bool>,
        report: WitnessReport,
    }
    let out = MaximizeOut {
        n: set.n(),
        config,
        stats,
        equality,
        report,
    };
    match format {
        Format::Text => {
            kv("n", out.n.to_string());
            kv("starts", out.config.starts.to_string());
            kv("max_iters", out.config.max_iters.to_string());
            kv("grad_tol", text_f(out.config.grad_tol));
            kv("seed", out.config.seed.to_string());
            kv("x", join(&out.report.x, text_f, " "));
            kv("log_product", text_f(out.report.log_product));
            kv("product", text_f(out.report.product));
            kv("bound", text_f(out.report.bound));
            kv("passes", out.report.passes.to_string());
            kv("source", source_name(out.report.source));
            kv("total_iterations", out.stats.total_iterations.to_string());
            kv("converged_starts", out.stats.converged_starts.to_string());
            kv("degenerate_starts", out.stats.degenerate_starts.to_string());
            if let Some(eq) = out.equality {
                kv("equality_case", eq.to_string());
            }
        }
        Format::Json => emit_json(&out)?,
        Format::Csv => {
            println!(
                "n,starts,seed,log_product,product,bound,passes,source,total_iterations,\
                 converged_starts,degenerate_starts,equality_case,x"
            );
            println!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                out.n,
                out.config.starts,
                out.config.seed,
                csv_f(out.report.log_product),
                csv_f(out.report.product),
                csv_f(out.report.bound),
                out.report.passes,
                source_name(out.report.source),
                out.stats.total_iterations,
                out.stats.converged_starts,
                out.stats.degenerate_starts,
                out.equality.map(|e| e.to_string()).unwrap_or_default(),
                join(&out.report.x, csv_f, ";"),
            );
        }
    }
    Ok(out.report.passes)
}

pub fn lambda(
    input: &Path,
    method: MethodArg,
    seed: Option<u64>,
    restarts: usize,
    format: Format,
) -> Result<bool> {
    let set = load_vectors(input)?;
    let result = longest(&set, method, seed, restarts)?;
    let point = lambda_map(&set, &result)?;
    let problem = point.problem();

    #[derive(Serialize)]
    struct LambdaOut<'a> {
        n: usize,
        s: f64,
        method: SearchMethod,
        is_global: bool,
        signs: Vec<i8>,
        coords: &'a [f64],
        point_product: f64,
        slice_minimum: f64,
    }
    let out = LambdaOut {
        n: set.n(),
        s: problem.s(),
        method: result.method,
        is_global: result.is_global,
        signs: result.signs.eps().to_vec(),
        coords: point.coords(),
        point_product: point.product_value(),
        slice_minimum: minimum_value(problem),
    };
    match format {
        Format::Text => {
            kv("n", out.n.to_string());
            kv("s", text_f(out.s));
            kv("method", method_name(out.method));
            kv("is_global", out.is_global.to_string());
            kv("signs", signs_text(&out.signs));
            kv("coords", join(out.coords, text_f, " "));
            kv("point product", text_f(out.point_product));
            kv("slice minimum", text_f(out.slice_minimum));
        }
        Format::Json => emit_json(&out)?,
        Format::Csv => {
            println!("n,s,method,is_global,point_product,slice_minimum,signs,coords");
            println!(
                "{},{},{},{},{},{},{},{}",
                out.n,
                csv_f(out.s),
                method_name(out.method),
                out.is_global,
                csv_f(out.point_product),
                csv_f(out.slice_minimum),
                signs_csv(&out.signs),
                join(out.coords, csv_f, ";"),
            );
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

fn render_checks(header: &[(&str, String)], checks: &[Check], format: Format) -> Result<bool> {
    let all_passed = checks.iter().all(|c| c.passed);
    match format {
        Format::Text => {
            for check in checks {
                let mark = if check.passed { "[PASS]" } else { "[FAIL]" };
                println!("{mark} {} — {}", check.name, check.detail);
            }
            let passed = checks.iter().filter(|c| c.passed).count();
            println!(
                "{} of {} checks passed: {}",
                passed,
                checks.len(),
                if all_passed { "OK" } else { "FAILED" }
            );
        }
        Format::Json => {
            #[derive(Serialize)]
            struct ChecksOut<'a> {
                params: Vec<(&'a str, &'a str)>,
                checks: &'a [Check],
                all_passed: bool,
            }
            emit_json(&ChecksOut {
                params: header.iter().map(|(k, v)| (*k, v.as_str())).collect(),
                checks,
                all_passed,
            })?;
        }
        Format::Csv => {
            println!("name,passed");
            for check in checks {
                println!("{},{}", check.name, check.passed);
            }
        }
    }
    Ok(all_passed)
}

fn trial_generator(kind: KindArg, index: usize, noise: f64, radius: f64) -> Generator {
    match kind {
        KindArg::Uniform => Generator::RandomUniform,
        KindArg::Perturbed => Generator::PerturbedOrthonormal { noise },
        KindArg::Clustered => Generator::Clustered {
            angular_radius: radius,
        },
        KindArg::Mixed => match index % 3 {
            0 => Generator::RandomUniform,
            1 => Generator::PerturbedOrthonormal {
                noise: 0.02 + 0.3 * ((index % 7) as f64) / 7.0,
            },
            _ => Generator::Clustered {
                angular_radius: 0.05 + 1.4 * ((index % 5) as f64) / 5.0,
            },
        },
    }
}

fn witness_trial(n: usize, generator: Generator, seed: u64) -> Result<WitnessReport> {
    let set = generate(generator, n, seed)?;
    let result = longest_sum_exhaustive(&set)?;
    Ok(witness_from_result(&set, &result)?)
}

pub fn verify(n_max: usize, trials: usize, seed: u64, grid: usize, format: Format) -> Result<bool> {
    if !(2..=14).contains(&n_max) {
        bail!("--n-max must be in [2, 14] (got {n_max}); the bound itself fails from n = 15 on");
    }
    if grid < 100 {
        bail!("--grid must be at least 100 (got {grid})");
    }
    let mut checks = Vec::new();

    // Reference table, all rows including the n = 15, 16 failure rows.
    let mut bad_rows = Vec::new();
    for reference in proof_check::reference::TABLE.iter() {
        let row = table_row(reference.n)?;
        let ok = (row.column2 - reference.column2).abs() <= 5e-3 * reference.column2.abs()
            && reference.s_nm1_pow.matches(row.s_nm1_pow)
            && reference.sqrt_n_pow_n.matches(row.sqrt_n_pow_n)
            && row.bound_holds == reference.bound_holds;
        if !ok {
            bad_rows.push(reference.n);
        }
    }
    checks.push(Check::new(
        "table-reference",
        bad_rows.is_empty(),
        if bad_rows.is_empty() {
            format!("{} rows match (n = 3..=16)", proof_check::reference::TABLE.len())
        } else {
            format!("mismatched rows at n = {bad_rows:?}")
        },
    ));

    for n in 2..=n_max {
        let table = breakpoints(n)?;
        let mut worst = 0.0f64;
        for j in 1..=n {
            let mu = minimum_at_breakpoint(n, j)?;
            let expected = table.level(j).powi(-(j as i32));
            worst = worst.max(((mu - expected) / expected).abs());
        }
        checks.push(Check::new(
            format!("breakpoint-identity n={n}"),
            worst <= 1e-11,
            format!("max rel err {worst:.2e} over j = 1..={n}"),
        ));

        let mut concave_branches = 0;
        for j in 1..=n {
            if quasiconcavity(n, j, grid)?.quasi_concave {
                concave_branches += 1;
            }
        }
        checks.push(Check::new(
            format!("quasi-concavity n={n}"),
            concave_branches == n,
            format!("{concave_branches} of {n} branches unimodal at grid {grid}"),
        ));

        let scan = global_minimum_scan(n, grid)?;
        checks.push(Check::new(
            format!("global-scan n={n}"),
            scan.bound_holds,
            format!(
                "min {} at s = {} vs bound {}",
                text_f(scan.min_value),
                text_f(scan.argmin),
                text_f(scan.bound)
            ),
        ));

        if trials > 0 {
            let results: Vec<bool> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let trial_seed = derive_seed(seed, ((n as u64) << 32) | t as u64);
                    let generator = trial_generator(KindArg::Mixed, t, 0.1, 0.3);
                    witness_trial(n, generator, trial_seed).map(|report| report.passes)
                })
                .collect::<Result<_>>()?;
            let failures = results.iter().filter(|&&passed| !passed).count();
            checks.push(Check::new(
                format!("witness-trials n={n}"),
                failures == 0,
                format!("{failures} of {trials} random sets missed the bound"),
            ));
        }
    }

    render_checks(
        &[
            ("n_max", n_max.to_string()),
            ("trials", trials.to_string()),
            ("seed", seed.to_string()),
            ("grid", grid.to_string()),
        ],
        &checks,
        format,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn random_trials(
    n: usize,
    trials: usize,
    seed: u64,
    kind: KindArg,
    noise: f64,
    radius: f64,
    method: MethodArg,
    restarts: usize,
    format: Format,
) -> Result<bool> {
    if method == MethodArg::Exhaustive && n > EXHAUSTIVE_LIMIT {
        bail!(
            "n = {n} exceeds the exhaustive limit {EXHAUSTIVE_LIMIT}; \
             use --method local"
        );
    }
    if method == MethodArg::Local && restarts == 0 {
        bail!("--restarts must be at least 1");
    }

    #[derive(Serialize)]
    struct Trial {
        index: usize,
        passed: bool,
        product: f64,
        bound: f64,
    }
    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let trial_seed = derive_seed(seed, index as u64);
            let generator = trial_generator(kind, index, noise, radius);
            let set = generate(generator, n, trial_seed)?;
            let result = match method {
                MethodArg::Exhaustive => longest_sum_exhaustive(&set)?,
                MethodArg::Local => {
                    longest_sum_local(&set, derive_seed(trial_seed, 1), restarts)?
                }
            };
            let report = witness_from_result(&set, &result)?;
            Ok(Trial {
                index,
                passed: report.passes,
                product: report.product,
                bound: report.bound,
            })
        })
        .collect::<Result<_>>()?;

    let failed: Vec<usize> = outcomes
        .iter()
        .filter(|t| !t.passed)
        .map(|t| t.index)
        .collect();
    let min_ratio = outcomes
        .iter()
        .map(|t| t.product / t.bound)
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.min(r)))
        });

    #[derive(Serialize)]
    struct TrialsOut {
        n: usize,
        kind: KindArg,
        trials: usize,
        failures: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        min_product_over_bound: Option<f64>,
        failed_trials: Vec<usize>,
    }
    let out = TrialsOut {
        n,
        kind,
        trials,
        failures: failed.len(),
        min_product_over_bound: min_ratio,
        failed_trials: failed,
    };
    match format {
        Format::Text => {
            kv("n", out.n.to_string());
            kv("kind", format!("{:?}", out.kind).to_lowercase());
            kv("trials", out.trials.to_string());
            kv("failures", out.failures.to_string());
            if let Some(ratio) = out.min_product_over_bound {
                kv("min product/bound", text_f(ratio));
            }
            for trial in outcomes.iter().filter(|t| !t.passed) {
                println!(
                    "trial {}: product {} < bound {}",
                    trial.index,
                    text_f(trial.product),
                    text_f(trial.bound)
                );
            }
        }
        Format::Json => emit_json(&out)?,
        Format::Csv => {
            println!("index,passed,product,bound");
            for trial in &outcomes {
                println!(
                    "{},{},{},{}",
                    trial.index,
                    trial.passed,
                    csv_f(trial.product),
                    csv_f(trial.bound)
                );
            }
        }
    }
    Ok(out.failures == 0)
}
