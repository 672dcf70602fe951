use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use nehari_core::minimizer::{minimize_problem, verify_ground_state, GroundStateReport, MinimizerConfig, Problem, VerificationReport, VerifyTolerances};
use nehari_core::thresholds::{best_trial_energy, constant_c, constant_d, threshold_report};
use nehari_core::verify::{run_verification, VerifyOptions};
use nehari_core::{ProblemParams, RadialGrid};

use crate::config::{describe, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{cell, ensure_dir, json, num, profile_csv, write_file, Table};

#[derive(Serialize)]
struct SolveReport<'a> {
    #[serde(flatten)]
    report: &'a GroundStateReport,
    r_max: f64,
    num_points: usize,
    verification: &'a VerificationReport,
}

pub fn solve(cfg: &RunConfig, out_dir: &Path) -> CliResult<()> {
    let grid = cfg.grid()?;
    let problem = Problem::new(&cfg.params, grid.clone())?;
    let report = minimize_problem(&problem, &cfg.minimizer)?;
    let verification = verify_ground_state(&problem.energy, &report, Some(&problem.u0), &VerifyTolerances::default())?;

    ensure_dir(out_dir)?;
    let mut written = Vec::new();
    if cfg.output.profile {
        written.push(write_file(out_dir.join("profile.csv"), &profile_csv(&report))?);
    }
    if cfg.output.report {
        let doc = SolveReport {
            report: &report,
            r_max: grid.r_max(),
            num_points: grid.num_points(),
            verification: &verification,
        };
        written.push(write_file(out_dir.join("report.json"), &json(&doc))?);
    }
    println!(
        "{}: m = {}, classification = {}, el_residual = {:.3e}, converged = {}",
        describe(&cfg.params),
        num(report.m),
        report.classification,
        report.el_residual,
        report.converged
    );
    for path in written {
        println!("wrote {}", path.display());
    }
    if !report.converged {
        return Err(CliError::Failed(format!(
            "minimization did not converge (el_residual {:.3e})",
            report.el_residual
        )));
    }
    Ok(())
}

const SWEEP_HEADER: [&str; 11] = ["value", "m", "u_norm", "v_norm", "classification", "I_u0", "I_v0", "C", "D", "trial_bound", "status"];

/// One lattice point of a sweep; failures are recorded in `status`.
pub struct SweepRow {
    pub cells: Vec<String>,
    pub ok: bool,
}

fn sweep_row(value: f64, p: &ProblemParams, grid_size: (f64, usize), cfg: &MinimizerConfig) -> SweepRow {
    let c = num(constant_c(p));
    let d = if p.n == 1 {
        constant_d(p.q, p.omega).map(num).unwrap_or_else(|_| "n/a".into())
    } else {
        "n/a".into()
    };
    let run = || -> nehari_core::Result<(GroundStateReport, f64)> {
        let grid = std::sync::Arc::new(RadialGrid::new(p.n, grid_size.0, grid_size.1)?);
        let problem = Problem::new(p, grid)?;
        let report = minimize_problem(&problem, cfg)?;
        let trial = best_trial_energy(&problem.energy, &problem.u0.profile, &problem.v0)?;
        Ok((report, trial.value))
    };
    match run() {
        Ok((r, trial)) => SweepRow {
            cells: vec![
                num(value),
                num(r.m),
                num(r.u_norm),
                num(r.v_norm),
                r.classification.to_string(),
                num(r.semitrivial_u),
                num(r.semitrivial_v),
                c,
                d,
                num(trial),
                if r.converged { "ok" } else { "not_converged" }.into(),
            ],
            ok: r.converged,
        },
        Err(e) => {
            let mut cells = vec![num(value)];
            cells.extend(std::iter::repeat_n(String::new(), 6));
            cells.extend([c, d, String::new(), cell(&format!("error: {e}"))]);
            SweepRow { cells, ok: false }
        }
    }
}

pub fn sweep(cfg: &RunConfig, out_dir: &Path) -> CliResult<()> {
    let spec = cfg
        .sweep
        .ok_or_else(|| CliError::InvalidConfig("the sweep command needs a \"sweep\" section".into()))?;
    let grid = cfg.grid()?;
    let grid_size = (grid.r_max(), grid.num_points());
    let values = spec.values();
    // Rows are computed concurrently and collected in axis order.
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&v| sweep_row(v, &spec.variable.apply(&cfg.params, v), grid_size, &cfg.minimizer))
        .collect();

    let mut table = Table::new(SWEEP_HEADER.to_vec());
    let failures = rows.iter().filter(|r| !r.ok).count();
    for row in rows {
        table.push(row.cells);
    }
    ensure_dir(out_dir)?;
    let path = write_file(out_dir.join("sweep.csv"), &table.to_csv())?;
    println!("swept {} over {} points; wrote {}", spec.variable.name(), values.len(), path.display());
    if failures > 0 {
        return Err(CliError::Failed(format!("{failures} of {} sweep points failed", values.len())));
    }
    Ok(())
}

const THRESHOLD_HEADER: [&str; 8] = ["n", "q", "omega", "C", "D", "eps_opt", "b_opt", "notes"];

pub fn thresholds(qs: &[f64], omegas: &[f64], ns: &[usize], out_dir: Option<&Path>) -> CliResult<()> {
    let mut table = Table::new(THRESHOLD_HEADER.to_vec());
    let short = |x: f64| format!("{x:.6}");
    let mut csv = Table::new(THRESHOLD_HEADER.to_vec());
    for &n in ns {
        for &q in qs {
            for &omega in omegas {
                let head = vec![n.to_string(), q.to_string(), omega.to_string()];
                match threshold_report(q, omega, n) {
                    Ok(r) => {
                        let d = |f: &dyn Fn(f64) -> String| r.d_const.map(f).unwrap_or_else(|| "n/a".into());
                        let notes = cell(&r.notes.join("; "));
                        table.push([head.clone(), vec![short(r.c_const), d(&short), short(r.eps_opt), short(r.b_opt), notes.clone()]].concat());
                        csv.push([head, vec![num(r.c_const), d(&num), num(r.eps_opt), num(r.b_opt), notes]].concat());
                    }
                    Err(e) => {
                        let na = vec!["n/a".to_string(); 4];
                        let note = cell(&e.to_string());
                        table.push([head.clone(), na.clone(), vec![note.clone()]].concat());
                        csv.push([head, na, vec![note]].concat());
                    }
                }
            }
        }
    }
    print!("{}", table.to_text());
    if let Some(dir) = out_dir {
        ensure_dir(dir)?;
        let path = write_file(dir.join("thresholds.csv"), &csv.to_csv())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn verify(opts: &VerifyOptions, out_dir: Option<&Path>) -> CliResult<()> {
    let outcomes = run_verification(opts);
    for o in &outcomes {
        println!("{o}");
    }
    if let Some(dir) = out_dir {
        ensure_dir(dir)?;
        let path: PathBuf = write_file(dir.join("verify.json"), &json(&outcomes))?;
        println!("wrote {}", path.display());
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.as_str()).collect();
    if failed.is_empty() {
        println!("all {} checks passed", outcomes.len());
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} of {} checks failed: {}", failed.len(), outcomes.len(), failed.join(", "))))
    }
}
