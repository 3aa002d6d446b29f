use std::fs;
use std::path::Path;

use cptwb::channels::{self, complement, is_extreme, perturb_to_extreme, validate_cpt, ChoiMatrix};
use cptwb::decompose::{self, BlockMatrix};
use cptwb::numerics::{max_dist, psd_spectrum};
use cptwb::optimize::{self, MultReport, OptimizerConfig};
use cptwb::{sample, KrausChannel};
use serde_json::{json, Value};

use crate::args::{ChannelArgs, Command, Mode, OptimizerArgs, OutputArgs, SecondChannelArgs};
use crate::error::{CliError, CliResult};
use crate::report::{Report, Table, Tolerances};
use crate::source::{self, Target};

const SCAN_HEADERS: [&str; 6] = ["p", "nu_a", "nu_b", "nu_ab_lb", "gap", "violated"];

fn optimizer(opt: &OptimizerArgs, p: f64, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        p,
        max_iters: opt.max_iters,
        restarts: opt.restarts,
        seed,
        tensor_restarts: opt.tensor_restarts,
        tensor_cap: opt.tensor_cap,
        ..OptimizerConfig::default()
    }
}

fn dump(path: &Path, ch: &KrausChannel) -> CliResult<()> {
    fs::write(path, ch.to_json()).map_err(|e| CliError::io(path, e))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn scan_row(r: &MultReport) -> Vec<Value> {
    vec![json!(r.p), json!(r.nu_a), json!(r.nu_b), json!(r.nu_product_lb), json!(r.gap), json!(r.violated)]
}

fn pair(
    channel: &ChannelArgs,
    second: &SecondChannelArgs,
    seed: u64,
) -> CliResult<(KrausChannel, KrausChannel, Value)> {
    let (a, src_a) = source::channel(channel, seed)?;
    let (b, src_b) = match source::second(second, channel, seed)? {
        Some(x) => x,
        None => (a.clone(), src_a.clone()),
    };
    Ok((a, b, json!({"channel_a": src_a, "channel_b": src_b})))
}

fn channel_summary(ch: &KrausChannel) -> CliResult<Value> {
    let validation = validate_cpt(ch)?;
    let extremality = if validation.is_valid() { Some(is_extreme(ch)?) } else { None };
    let choi_rank = channels::choi_rank(ch);
    Ok(json!({
        "d_in": ch.d_in,
        "d_out": ch.d_out,
        "kraus_count": ch.len(),
        "choi_rank": choi_rank,
        "validation": validation,
        "extremality": extremality,
        "generalized_extreme": choi_rank <= ch.d_in,
    }))
}

fn base_config(src: Value, out: &OutputArgs) -> Value {
    let mut v = src;
    v["format"] = to_value(&out.format);
    v["bits"] = json!(out.bits);
    v
}

pub fn run(command: &Command, out: &OutputArgs) -> CliResult<Report> {
    let seed = out.seed;
    let name = command.name();
    let default_tol = Tolerances::with_value_tol(OptimizerConfig::default().value_tol);
    match command {
        Command::Info { channel, dump_kraus } => {
            let (ch, src) = source::channel(channel, seed)?;
            let result = channel_summary(&ch)?;
            if let Some(path) = dump_kraus {
                dump(path, &ch)?;
            }
            let config = base_config(json!({"channel": src, "dump_kraus": dump_kraus}), out);
            Ok(Report::new(name, seed, config, default_tol, result))
        }
        Command::Numax { channel, opt, p } => {
            let (ch, src) = source::channel(channel, seed)?;
            let cfg = optimizer(opt, *p, seed);
            let rep = optimize::estimate_nu_p(&ch, &cfg)?;
            let config = base_config(json!({"channel": src, "optimizer": cfg}), out);
            Ok(Report::new(name, seed, config, Tolerances::with_value_tol(cfg.value_tol), to_value(&rep)))
        }
        Command::Smin { channel, opt, p } => {
            let (ch, src) = source::channel(channel, seed)?;
            let cfg = optimizer(opt, *p, seed);
            let rep = optimize::estimate_smin_p(&ch, *p, &cfg)?;
            let mut result = to_value(&rep);
            let unit = if out.bits { std::f64::consts::LN_2 } else { 1.0 };
            result["smin"] = json!(rep.smin / unit);
            if let Some(e) = rep.extrapolated {
                result["extrapolated"] = json!(e / unit);
            }
            result["units"] = json!(if out.bits { "bits" } else { "nats" });
            let config = base_config(json!({"channel": src, "optimizer": cfg}), out);
            Ok(Report::new(name, seed, config, Tolerances::with_value_tol(cfg.value_tol), result))
        }
        Command::Multcheck { channel, second, opt, p } => {
            let (a, b, src) = pair(channel, second, seed)?;
            let cfg = optimizer(opt, *p, seed);
            let rep = optimize::mult_check(&a, &b, *p, &cfg)?;
            let table = Table { field: None, headers: SCAN_HEADERS.to_vec(), rows: vec![scan_row(&rep)] };
            let mut config = base_config(src, out);
            config["optimizer"] = to_value(&cfg);
            Ok(Report::new(name, seed, config, Tolerances::with_value_tol(cfg.value_tol), to_value(&rep)).with_table(table))
        }
        Command::Multscan { channel, second, opt, p_grid } => {
            let grid = optimize::parse_grid(p_grid).map_err(|e| CliError::Usage(format!("--p-grid: {e}")))?;
            let (a, b, src) = pair(channel, second, seed)?;
            let cfg = optimizer(opt, grid.first().copied().unwrap_or(2.0), seed);
            let rep = optimize::mult_scan(&a, &b, &grid, &cfg)?;
            let table = Table { field: Some("reports"), headers: SCAN_HEADERS.to_vec(), rows: rep.reports.iter().map(scan_row).collect() };
            let mut config = base_config(src, out);
            config["p_grid"] = json!(p_grid);
            config["optimizer"] = to_value(&cfg);
            Ok(Report::new(name, seed, config, Tolerances::with_value_tol(cfg.value_tol), to_value(&rep)).with_table(table))
        }
        Command::Decompose { channel, mode } => {
            let (target, src) = source::target(channel, seed)?;
            let result = decompose_target(target, *mode)?;
            let mut config = base_config(json!({"channel": src}), out);
            config["mode"] = to_value(mode);
            Ok(Report::new(name, seed, config, default_tol, result))
        }
        Command::Extremality { channel, perturb, dump_kraus } => {
            let (ch, src) = source::channel(channel, seed)?;
            let mut result = channel_summary(&ch)?;
            if let Some(eps) = perturb {
                let outcome = perturb_to_extreme(&ch, *eps, seed)?;
                let after = is_extreme(&outcome.channel)?;
                result["perturbation"] = json!({
                    "epsilon": outcome.epsilon,
                    "already_extreme": outcome.already_extreme,
                    "tried": outcome.tried,
                    "choi_distance": outcome.choi_distance,
                    "extreme_after": after.extreme,
                    "choi_rank_after": channels::choi_rank(&outcome.channel),
                });
                if let Some(path) = dump_kraus {
                    dump(path, &outcome.channel)?;
                }
            } else if let Some(path) = dump_kraus {
                dump(path, &ch)?;
            }
            let mut config = base_config(json!({"channel": src}), out);
            config["perturb"] = json!(perturb);
            Ok(Report::new(name, seed, config, default_tol, result))
        }
        Command::Complement { channel, probes, dump_kraus } => {
            let (ch, src) = source::channel(channel, seed)?;
            let comp = complement(&ch);
            let mut rng = sample::stream(seed, 0);
            let mut mismatch: f64 = 0.0;
            for _ in 0..*probes {
                let psi = sample::pure_state(&mut rng, ch.d_in);
                mismatch = mismatch.max(spectrum_gap(&ch.apply_pure(&psi), &comp.apply_pure(&psi))?);
            }
            if let Some(path) = dump_kraus {
                dump(path, &comp)?;
            }
            let result = json!({
                "channel": channel_summary(&ch)?,
                "complement": channel_summary(&comp)?,
                "probes": probes,
                "spectrum_mismatch": mismatch,
            });
            let mut config = base_config(json!({"channel": src}), out);
            config["probes"] = json!(probes);
            Ok(Report::new(name, seed, config, default_tol, result))
        }
    }
}

/// Largest difference between the nonzero parts of two output spectra.
fn spectrum_gap(x: &cptwb::ComplexMatrix, y: &cptwb::ComplexMatrix) -> CliResult<f64> {
    let nz = |m| -> CliResult<Vec<f64>> { Ok(psd_spectrum(m)?.into_iter().filter(|&l| l > 1e-12).collect()) };
    let (a, b) = (nz(x)?, nz(y)?);
    let n = a.len().max(b.len());
    Ok((0..n).map(|i| (a.get(i).unwrap_or(&0.0) - b.get(i).unwrap_or(&0.0)).abs()).fold(0.0, f64::max))
}

fn decompose_target(target: Target, mode: Mode) -> CliResult<Value> {
    let choi = |t: Target| -> CliResult<ChoiMatrix> {
        match t {
            Target::Channel(ch) => Ok(ch.choi()),
            Target::Choi(c) => Ok(c),
            Target::Block { .. } => unreachable!("handled by caller"),
        }
    };
    match (mode, target) {
        (Mode::Horn, Target::Block { matrix, .. }) => horn(&matrix),
        (Mode::Horn, t) => horn(&choi(t)?.matrix),
        (Mode::Szarek, Target::Block { matrix, d1 }) => {
            let n = matrix.nrows();
            let d1 = d1.unwrap_or(n / 2);
            let block = BlockMatrix::new(matrix, d1)?;
            let dec = decompose::szarek_split(&block)?;
            let ar4 = decompose::verify_ar4(&block, &decompose::szarek_candidates(&block)?, block.d1)?;
            Ok(json!({"decomposition": dec, "ar4": ar4}))
        }
        (Mode::Szarek, t) => {
            let c = choi(t)?;
            let split = decompose::split_choi(&c)?;
            let block = BlockMatrix::from_choi(&c)?;
            let ar4 = decompose::verify_ar4(&block, &decompose::szarek_candidates(&block)?, block.d1)?;
            let ranks = [split.first.rank(), split.second.rank()];
            let midpoint = max_dist(&(&split.first.matrix + &split.second.matrix).scale(0.5), &c.matrix);
            Ok(json!({
                "decomposition": split.decomposition,
                "ar4": ar4,
                "channels": {
                    "first": split.first,
                    "second": split.second,
                    "choi_ranks": ranks,
                    "midpoint_residual": midpoint,
                },
            }))
        }
    }
}

fn horn(a: &cptwb::ComplexMatrix) -> CliResult<Value> {
    let dec = decompose::horn_decomposition(a)?;
    let (block, cands) = decompose::horn_candidates(a)?;
    let ar4 = decompose::verify_ar4(&block, &cands, 1)?;
    let norms: Vec<f64> = cands.iter().map(|x| x.norm()).collect();
    Ok(json!({"decomposition": dec, "ar4": ar4, "vector_norms": norms}))
}
