//! Experiment dispatch: one config + one subcommand in, CSV/SVG/manifest
//! out. Worker count never changes results; it only sizes the rayon pool.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Result};

use cocycle_lab::{
    almost_invariance_check, circle_grid, empirical_stationary, estimate_l1_samples,
    estimate_spectrum, furstenberg_functional_chain, positivity_hypotheses_report,
    stationarity_residual, sweep_energy, uniform_convergence_report, ProjChainState, ProjPoint,
    TorusPoint, Verdict,
};

use crate::config::{self, RunConfig};
use crate::output::{fmt_f64, svg_curve, CsvWriter, Metric, OutputSet};

const CSV_HEADER: [&str; 7] = ["model", "E", "L1", "stderr", "n", "n_samples", "seed"];

pub struct RunOptions {
    pub seed_override: Option<u64>,
    pub svg: bool,
    pub jsonl: bool,
}

fn estimate_row(
    csv: &mut CsvWriter,
    model: &str,
    energy: f64,
    est: &cocycle_lab::LyapunovEstimate,
) {
    csv.row(&[
        model.to_string(),
        fmt_f64(energy),
        fmt_f64(est.value),
        fmt_f64(est.stderr),
        est.n_steps.to_string(),
        est.n_samples.to_string(),
        est.seed.to_string(),
    ]);
}

pub fn run(cfg: &RunConfig, out_dir: &Path, opts: &RunOptions) -> Result<()> {
    let started = Instant::now();
    let mut cfg = cfg.clone();
    if let Some(seed) = opts.seed_override {
        cfg.estimator.seed = seed;
    }
    let e = cfg.estimator.clone();
    let label = config::model_label(&cfg);
    let theta0 = TorusPoint::circle(e.theta0);
    let mut outputs = OutputSet::new(out_dir)?;
    let mut metrics: Vec<Metric> = Vec::new();
    let mut verdict: Option<String> = None;

    match cfg.experiment.as_str() {
        "estimate" => {
            let nu = config::driving_measure(&cfg)?;
            let (est, samples) =
                estimate_l1_samples(&nu, &theta0, e.n, e.n_samples, e.seed)?;
            let mut csv = CsvWriter::new(&CSV_HEADER);
            estimate_row(&mut csv, &label, cfg.model.energy.unwrap_or(0.0), &est);
            outputs.write("results.csv", &csv.into_string())?;
            if opts.jsonl {
                let mut lines = String::new();
                for (i, v) in samples.iter().enumerate() {
                    lines.push_str(&format!("{{\"sample\":{i},\"value\":{v}}}\n"));
                }
                outputs.write("samples.jsonl", &lines)?;
            }
            metrics.push(Metric {
                name: "L1".into(),
                value: est.value,
            });
        }
        "spectrum" => {
            let nu = config::driving_measure(&cfg)?;
            let spec = estimate_spectrum(&nu, &theta0, e.n, e.n_samples, e.k, e.seed)?;
            let mut csv = CsvWriter::new(&CSV_HEADER);
            for (i, est) in spec.iter().enumerate() {
                estimate_row(
                    &mut csv,
                    &format!("{label}#{}", i + 1),
                    cfg.model.energy.unwrap_or(0.0),
                    est,
                );
            }
            outputs.write("results.csv", &csv.into_string())?;
            metrics.push(Metric {
                name: "exponent_sum".into(),
                value: spec.iter().map(|s| s.value).sum(),
            });
        }
        "sweep" => {
            let model = config::schrodinger_model(&cfg)?
                .ok_or_else(|| anyhow::anyhow!("sweep needs an op1/op2/op3 model"))?;
            let energies = e.energies.clone().unwrap();
            let curve = sweep_energy(&model, &energies, e.n, e.n_samples, e.seed)?;
            let mut csv = CsvWriter::new(&CSV_HEADER);
            for (energy, est) in &curve.rows {
                estimate_row(&mut csv, &label, *energy, est);
            }
            outputs.write("results.csv", &csv.into_string())?;
            if opts.svg {
                let pts: Vec<(f64, f64, f64)> = curve
                    .rows
                    .iter()
                    .map(|(energy, est)| (*energy, est.value, est.stderr))
                    .collect();
                outputs.write(
                    "curve.svg",
                    &svg_curve(&format!("top exponent vs energy ({label})"), "E", &pts)?,
                )?;
            }
        }
        "stationary" => {
            let nu = config::driving_measure(&cfg)?;
            let start = ProjChainState::new(theta0.clone(), ProjPoint::from_angle(0.3));
            let hist = empirical_stationary(
                &nu,
                &start,
                e.burn_in,
                e.n_keep,
                e.theta_bins,
                e.angle_bins,
                e.seed,
            )?;
            let residual = stationarity_residual(&nu, &hist, e.n_mc, e.seed)?;
            let functional = furstenberg_functional_chain(&nu, &start, e.burn_in, e.n_mc, e.seed)?;
            let tm = hist.theta_marginal();
            let am = hist.angle_marginal();
            let mut csv = CsvWriter::new(&["bin", "theta_marginal", "angle_marginal"]);
            for i in 0..tm.len().max(am.len()) {
                csv.row(&[
                    i.to_string(),
                    tm.get(i).map_or(String::new(), |v| fmt_f64(*v)),
                    am.get(i).map_or(String::new(), |v| fmt_f64(*v)),
                ]);
            }
            outputs.write("stationary.csv", &csv.into_string())?;
            metrics.push(Metric {
                name: "theta_marginal_tv_uniform".into(),
                value: hist.tv_theta_uniform(),
            });
            metrics.push(Metric {
                name: "stationarity_residual".into(),
                value: residual,
            });
            metrics.push(Metric {
                name: "furstenberg_functional".into(),
                value: functional.value,
            });
            metrics.push(Metric {
                name: "furstenberg_stderr".into(),
                value: functional.stderr,
            });
        }
        "converge" => {
            let nu = config::driving_measure(&cfg)?;
            let grid = circle_grid(e.theta_grid);
            let table =
                uniform_convergence_report(&nu, &grid, &e.n_list, e.n_samples, e.seed)?;
            let ai = almost_invariance_check(&nu, e.theta_grid, &e.n_list, e.n_samples, e.seed)?;
            let mut csv =
                CsvWriter::new(&["n", "sup_gap", "mean_gap", "ai_sup_gap", "ai_n_times_sup"]);
            for (row, arow) in table.rows.iter().zip(&ai) {
                csv.row(&[
                    row.n.to_string(),
                    fmt_f64(row.sup_gap),
                    fmt_f64(row.mean_gap),
                    fmt_f64(arow.sup_gap),
                    fmt_f64(arow.n_times_sup),
                ]);
            }
            outputs.write("converge.csv", &csv.into_string())?;
            if opts.svg {
                let pts: Vec<(f64, f64, f64)> = table
                    .rows
                    .iter()
                    .map(|r| (r.n as f64, r.sup_gap, 0.0))
                    .collect();
                outputs.write(
                    "curve.svg",
                    &svg_curve("sup gap to reference vs n", "n", &pts)?,
                )?;
            }
            metrics.push(Metric {
                name: "reference_L1".into(),
                value: table.reference,
            });
        }
        "criteria" => {
            let model = config::schrodinger_model(&cfg)?
                .ok_or_else(|| anyhow::anyhow!("criteria needs an op1/op2/op3 model"))?;
            let report = positivity_hypotheses_report(&model, e.order, e.tol)?;
            let verdict_str = match report.verdict {
                Verdict::PositivityPredicted => "positivity-predicted",
                Verdict::Inconclusive => "inconclusive",
            };
            let mut text = String::new();
            text.push_str(&format!("model = {label}\n"));
            text.push_str(&format!(
                "ergodicity: passed = {} (order {}, tol {}, {} failing frequency vectors, interval support = {})\n",
                report.ergodicity.passed(),
                report.ergodicity.order,
                report.ergodicity.tol,
                report.ergodicity.failures.len(),
                report.ergodicity.interval_support,
            ));
            text.push_str(&format!(
                "non-compactness: {} (witness trace {})\n",
                report.noncompact,
                fmt_f64(report.noncompact_witness_trace)
            ));
            text.push_str(&format!(
                "strong irreducibility: {} ({})\n",
                report.strong_irreducibility, report.irreducibility_witness
            ));
            text.push_str(&format!("verdict = {verdict_str}\n"));
            outputs.write("criteria.txt", &text)?;
            verdict = Some(verdict_str.to_string());
        }
        other => bail!("unknown experiment {other:?}"),
    }

    outputs.finish(&cfg, cfg.estimator.seed, started.elapsed(), verdict, metrics)
}
