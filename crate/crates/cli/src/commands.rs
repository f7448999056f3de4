use std::collections::BTreeSet;
use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;
use waring_core::circle::{
    build_f_b, decompose_arcs, pseudorandomness_eta, restriction_constant, v_q, vinogradov_count,
    PowerSet,
};
use waring_core::harness::{
    coverage_experiment, render, run_suite, ExperimentConfig, ExperimentReport, OutputFormat,
};
use waring_core::local::{
    downset_transform, minimal_s, sum_of_blocks, waring_pair_exhaustive, waring_pair_random,
};
use waring_core::transference::{transference_demo, TransferenceParams};
use waring_core::zk::{reference_value, zk_estimate, zk_estimate_with, UnitCount};
use waring_core::{build_k_context, factorize, Error, ResidueSet, WContext};

use crate::{Cli, Command, DownsetCommand, ExperimentArgs, LocalCommand};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(
                Error::Overflow(_)
                | Error::PrecisionUnreached { .. }
                | Error::RepresentationFailed(_)
                | Error::Io { .. },
            ) => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub text: String,
    pub holds: bool,
}

fn json_out(value: Value, holds: bool) -> Outcome {
    let mut text = serde_json::to_string_pretty(&value).expect("json values serialize");
    text.push('\n');
    Outcome { text, holds }
}

fn report_out(report: &ExperimentReport, format: OutputFormat) -> Result<Outcome> {
    Ok(Outcome {
        text: render(report, format)?,
        holds: report.all_hold(),
    })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn grid_for(n: usize, grid: usize) -> usize {
    if grid == 0 {
        (4 * n).next_power_of_two()
    } else {
        grid
    }
}

fn read_lines(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Blocks of decimal integers, one per line, separated by blank lines.
fn parse_blocks(path: &Path) -> Result<Vec<Vec<u64>>> {
    let text = read_lines(path)?;
    let mut blocks = vec![Vec::new()];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            if !blocks.last().unwrap().is_empty() {
                blocks.push(Vec::new());
            }
            continue;
        }
        let x = line.parse().map_err(|_| CliError::Input {
            path: path.display().to_string(),
            message: format!("line {}: '{line}' is not a non-negative integer", i + 1),
        })?;
        blocks.last_mut().unwrap().push(x);
    }
    blocks.retain(|b| !b.is_empty());
    Ok(blocks)
}

fn power_set(spec: Option<&str>) -> Result<PowerSet> {
    match spec {
        None | Some("all-powers") => Ok(PowerSet::All),
        Some(path) => {
            let members: BTreeSet<u64> = parse_blocks(Path::new(path))?
                .into_iter()
                .flatten()
                .collect();
            Ok(PowerSet::Explicit(members))
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let format = cli.format.unwrap_or_default();
    match &cli.command {
        Command::Zk { k, precision } => {
            let est = zk_estimate(*k, *precision)?;
            let exact = zk_estimate_with(*k, *precision, UnitCount::Exact)?;
            let reference = reference_value(*k);
            let agrees = reference.map_or(true, |v| est.lower - 0.01 <= v && v <= est.upper + 0.01);
            let mut out = json!({
                "k": k,
                "lower": est.lower,
                "upper": est.upper,
                "truncation_prime": est.truncation_prime,
                "agrees": agrees,
                "exact_count_lower": exact.lower,
                "exact_count_upper": exact.upper,
            });
            if let Some(v) = reference {
                out["paper_value"] = json!(v);
            }
            Ok(json_out(out, agrees))
        }
        Command::Local(LocalCommand::Check {
            k,
            q,
            s,
            exhaustive: _,
            trials,
        }) => {
            let ctx = build_k_context(*k)?;
            let m = factorize(*q)?;
            let r = match trials {
                Some(t) => waring_pair_random(&m, *s, &ctx, *t, cli.seed.unwrap_or(0))?,
                None => waring_pair_exhaustive(&m, *s, &ctx)?,
            };
            Ok(json_out(to_value(&r), r.holds))
        }
        Command::Local(LocalCommand::MinimalS { k, q, s_max }) => {
            let ctx = build_k_context(*k)?;
            let found = minimal_s(&factorize(*q)?, &ctx, *s_max)?;
            let holds = found.is_some();
            let value = match found {
                Some(m) => to_value(&m),
                None => json!({ "s": null, "searched_up_to": s_max }),
            };
            Ok(json_out(value, holds))
        }
        Command::Downset(DownsetCommand::Demo { q, sets }) => {
            let m = factorize(*q)?;
            let blocks: Vec<ResidueSet> = parse_blocks(sets)?
                .into_iter()
                .map(|b| ResidueSet::from_residues(&m, b))
                .collect::<std::result::Result<_, _>>()?;
            let after = downset_transform(&blocks)?;
            let (before_sum, after_sum) =
                (sum_of_blocks(&blocks)?.len(), sum_of_blocks(&after)?.len());
            let out = json!({
                "q": q,
                "before": blocks.iter().map(ResidueSet::to_vec).collect::<Vec<_>>(),
                "after": after.iter().map(ResidueSet::to_vec).collect::<Vec<_>>(),
                "sumset_size_before": before_sum,
                "sumset_size_after": after_sum,
            });
            Ok(json_out(out, after_sum <= before_sum))
        }
        Command::Pseudo { w, n, grid, rho } => {
            let ctx = WContext::new(w.k, w.w)?;
            let m = grid_for(*n, *grid);
            let r = pseudorandomness_eta(&ctx, w.b, *n, m)?;
            let arcs = decompose_arcs(*n as u64, *rho)?;
            let class = arcs.classify_grid(r.argmax_index as u64, m as u64);
            let out = json!({
                "eta": r.eta,
                "argmax_frequency": r.argmax_frequency,
                "arc_class": class.to_string(),
                "N": n,
                "grid": m,
            });
            Ok(json_out(out, true))
        }
        Command::Restrict {
            w,
            qexp,
            n,
            set,
            grid,
        } => {
            let ctx = WContext::new(w.k, w.w)?;
            let f = build_f_b(&power_set(Some(set))?, *n, &ctx, w.b)?;
            let k_hat = restriction_constant(&f, *qexp, grid_for(*n, *grid))?;
            Ok(json_out(json!({ "K_hat": k_hat }), true))
        }
        Command::Vq { w, qmax } => {
            let ctx = WContext::new(w.k, w.w)?;
            let mut text = String::from("q,a,abs_vq\n");
            for q in 1..=*qmax {
                for a in (0..q).filter(|&a| waring_core::arith::gcd(a, q) == 1) {
                    text.push_str(&format!(
                        "{q},{a},{}\n",
                        v_q(a as i64, w.b, q, &ctx)?.norm()
                    ));
                }
            }
            Ok(Outcome { text, holds: true })
        }
        Command::Jcount { t, k, x } => Ok(Outcome {
            text: format!("{}\n", vinogradov_count(*t, *k, *x)?),
            holds: true,
        }),
        Command::Transfer {
            w,
            n,
            s,
            eps,
            delta,
            grid,
            set,
        } => {
            let ctx = WContext::new(w.k, w.w)?;
            let powers = power_set(set.as_ref().and_then(|p| p.to_str()))?;
            let f = build_f_b(&powers, *n, &ctx, w.b)?;
            let r = transference_demo(
                &vec![f; *s],
                &TransferenceParams::new(*eps, *delta, grid_for(*n, *grid)),
            )?;
            Ok(json_out(to_value(&r), r.holds))
        }
        Command::Experiment(args) => {
            let cfg = experiment_config(args, cli)?;
            let report = coverage_experiment(&cfg)?;
            report_out(&report, cli.format.unwrap_or(cfg.output_format))
        }
        Command::Report { criteria } => report_out(&run_suite(criteria), format),
    }
}

fn experiment_config(args: &ExperimentArgs, cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::parse_text(&read_lines(path)?)?,
        None => ExperimentConfig::default(),
    };
    let overrides: [(&str, Option<String>); 12] = [
        ("k", args.k.map(|v| v.to_string())),
        ("w", args.w.map(|v| v.to_string())),
        ("n", args.n.map(|v| v.to_string())),
        ("n_min", args.n_min.map(|v| v.to_string())),
        ("s", args.s.map(|v| v.to_string())),
        ("density", args.density.map(|v| v.to_string())),
        ("rho", args.rho.map(|v| v.to_string())),
        ("grid", args.grid.map(|v| v.to_string())),
        ("subset_mode", args.subset_mode.clone()),
        (
            "congruence_filter",
            args.congruence_filter.map(|v| v.to_string()),
        ),
        (
            "coverage_threshold",
            args.coverage_threshold.map(|v| v.to_string()),
        ),
        ("seed", cli.seed.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    if let Some(f) = cli.format {
        cfg.output_format = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_split_on_blank_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.txt");
        std::fs::write(&path, "\n1\n 2 \n\n\n3\n").unwrap();
        assert_eq!(parse_blocks(&path).unwrap(), vec![vec![1, 2], vec![3]]);
        std::fs::write(&path, "-1\n").unwrap();
        assert!(matches!(parse_blocks(&path), Err(CliError::Input { .. })));
        assert!(parse_blocks(&dir.path().join("missing")).is_err());
    }

    #[test]
    fn grid_defaults_to_four_n() {
        assert_eq!(grid_for(1000, 0), 4096);
        assert_eq!(grid_for(1024, 0), 4096);
        assert_eq!(grid_for(1024, 8192), 8192);
    }
}
