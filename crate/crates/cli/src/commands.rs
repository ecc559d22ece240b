use rayon::prelude::*;
use serde_json::json;

use corrconv_core::measures::correlation_report;
use corrconv_core::protocol::{batch_repeater, prepare_pipeline, verify_claims};
use corrconv_core::qudit::{qudit_report, QuditConfig};
use corrconv_core::states::{bell_diagonal_state, BellDiagonalParams, InputSpec};

use crate::args::{Cli, Command, Common, Format, ProtocolArgs, QuditArgs, SweepArgs, VerifyArgs};
use crate::config::FileConfig;
use crate::output::{csv_bytes, destination, emit, fmt_num, json_bytes, json_num};
use crate::{CliError, CliResult};

const SLACK: f64 = 1e-12;
const FAMILY_TOL: f64 = 1e-9;

pub const SWEEP_COLUMNS: [&str; 8] =
    ["p", "e_closed", "e_oracle", "mutual_info", "classical", "discord", "coherent_info", "p0"];

const CITATIONS: &[(&str, &str)] = &[
    ("e_closed", "closed-form relative entropy (1 - p) times the input corner gap"),
    ("e_oracle", "numeric relative entropy minimized over separable states"),
    ("mutual_info", "quantum mutual information of the AB output"),
    ("classical", "classical correlation from the larger of the three candidate functions"),
    ("discord", "mutual information minus classical correlation"),
    ("coherent_info", "S(B) - S(AB) of the AB output"),
    ("p0", "weight of the entangled branch in the output decomposition"),
];

pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Sweep(a) => sweep(a, &cfg),
        Command::Verify(a) => verify(a, &cfg),
        Command::Protocol(a) => protocol(a, &cfg),
        Command::Qudit(a) => qudit(a, &cfg),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn real(flag: Option<f64>, cfg: &FileConfig, key: &str, default: f64) -> CliResult<f64> {
    Ok(match flag {
        Some(v) => v,
        None => cfg.real(key)?.unwrap_or(default),
    })
}

fn opt_real(flag: Option<f64>, cfg: &FileConfig, key: &str) -> CliResult<Option<f64>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.real(key),
    }
}

fn format_of(common: &Common, cfg: &FileConfig, default: Format, allowed: &[Format]) -> CliResult<Format> {
    let f = match common.format {
        Some(f) => f,
        None => match cfg.string("format")? {
            Some(s) => Format::parse(&s).ok_or_else(|| usage(format!("unknown format `{s}`")))?,
            None => default,
        },
    };
    if !allowed.contains(&f) {
        return Err(usage(format!("format `{}` is not available here", f.extension())));
    }
    Ok(f)
}

fn out_of(common: &Common, cfg: &FileConfig) -> CliResult<Option<std::path::PathBuf>> {
    match &common.out {
        Some(p) => Ok(Some(p.clone())),
        None => cfg.path("out"),
    }
}

fn input_spec(delta: f64) -> CliResult<InputSpec> {
    if !(delta > 0.0 && delta <= 1.0 / 3.0 + SLACK) {
        return Err(usage(format!("delta-in = {delta} outside (0, 1/3]")));
    }
    InputSpec::new(delta.min(1.0 / 3.0)).map_err(|e| usage(e.to_string()))
}

/// Ascending grid from `lo` to `hi`; `hi` is appended when the step skips it.
pub fn p_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0u64;
    loop {
        let p = lo + k as f64 * step;
        if p > hi + SLACK {
            break;
        }
        grid.push(p.min(hi));
        k += 1;
    }
    if grid.last().is_none_or(|&last| (hi - last).abs() > SLACK) {
        grid.push(hi);
    }
    grid
}

fn sweep(a: SweepArgs, cfg: &FileConfig) -> CliResult<()> {
    let p_min = real(a.p_min, cfg, "p_min", 1.0 / 3.0)?;
    let p_max = real(a.p_max, cfg, "p_max", 1.0)?;
    let p_step = real(a.p_step, cfg, "p_step", 0.01)?;
    let c1 = opt_real(a.c1, cfg, "c1")?;
    let c2 = opt_real(a.c2, cfg, "c2")?;
    let c3 = opt_real(a.c3, cfg, "c3")?;
    let delta = opt_real(a.delta_in, cfg, "delta_in")?.or(c1).unwrap_or(1.0 / 3.0);
    let format = format_of(&a.common, cfg, Format::Csv, &[Format::Csv, Format::Json])?;
    let out = out_of(&a.common, cfg)?;

    if !(p_min >= 1.0 / 3.0 - SLACK && p_min <= p_max && p_max <= 1.0 + SLACK) {
        return Err(usage(format!("need 1/3 <= p-min <= p-max <= 1, got [{p_min}, {p_max}]")));
    }
    if p_step.is_nan() || p_step <= 0.0 {
        return Err(usage(format!("p-step = {p_step} must be positive")));
    }
    let any_c = c1.is_some() || c2.is_some() || c3.is_some();
    let fallback = BellDiagonalParams::from_gap(delta.clamp(f64::MIN_POSITIVE, 1.0 / 3.0))?;
    let given = (c1.unwrap_or(fallback.c1), c2.unwrap_or(fallback.c2), c3.unwrap_or(fallback.c3));
    if any_c {
        let params = BellDiagonalParams::bell_diagonal(given.0, given.1, given.2)?;
        bell_diagonal_state(&params)?;
    }
    let spec = input_spec(delta)?;
    let family = spec.bell_params();
    if any_c {
        let off = (given.0 - family.c1).abs().max((given.1 - family.c2).abs()).max((given.2 - family.c3).abs());
        if off > FAMILY_TOL {
            return Err(usage(format!(
                "correlations ({}, {}, {}) are not of the form (d, -d, 1 - 2d) with d = {delta}",
                given.0, given.1, given.2
            )));
        }
    }
    let p_min = p_min.max(1.0 / 3.0);
    let p_max = p_max.min(1.0);
    let grid = p_grid(p_min, p_max, p_step);

    let rows: Vec<[f64; 8]> = grid
        .par_iter()
        .map(|&p| {
            let r = correlation_report(&spec, p)?;
            let p0 = prepare_pipeline(&spec, p)?.decomposition.p0;
            Ok([p, r.e_closed, r.e_oracle, r.mutual_info, r.classical, r.discord, r.coherent_info, p0])
        })
        .collect::<CliResult<_>>()?;

    let body = match format {
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|row| {
                    let obj: serde_json::Map<_, _> =
                        SWEEP_COLUMNS.iter().zip(row).map(|(k, v)| (k.to_string(), json_num(*v))).collect();
                    serde_json::Value::Object(obj)
                })
                .collect();
            let citations: serde_json::Map<_, _> =
                CITATIONS.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            json_bytes(&json!({
                "metadata": {
                    "version": env!("CARGO_PKG_VERSION"),
                    "inputs": {
                        "p_min": json_num(p_min),
                        "p_max": json_num(p_max),
                        "p_step": json_num(p_step),
                        "delta_in": json_num(spec.delta_in),
                        "c1": json_num(family.c1),
                        "c2": json_num(family.c2),
                        "c3": json_num(family.c3),
                    },
                    "citations": citations,
                },
                "rows": rows,
            }))
        }
        _ => {
            let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| fmt_num(*v)).collect()).collect();
            csv_bytes(&SWEEP_COLUMNS, &text)?
        }
    };
    emit(&destination(out, "sweep", format), &body)
}

fn verify(a: VerifyArgs, cfg: &FileConfig) -> CliResult<()> {
    let p = real(a.p, cfg, "p", 1.0 / 3.0)?;
    let delta = real(a.delta_in, cfg, "delta_in", 1.0 / 3.0)?;
    let format = format_of(&a.common, cfg, Format::Json, &[Format::Json, Format::Csv, Format::Text])?;
    let out = out_of(&a.common, cfg)?;
    if !(1.0 / 3.0 - SLACK..=1.0).contains(&p) {
        return Err(usage(format!("p = {p} outside [1/3, 1]")));
    }
    let spec = input_spec(delta)?;
    let claims = verify_claims(&spec, p.max(1.0 / 3.0))?;

    let body = match format {
        Format::Json => json_bytes(&json!({
            "metadata": {
                "version": env!("CARGO_PKG_VERSION"),
                "inputs": { "p": json_num(p), "delta_in": json_num(spec.delta_in) },
            },
            "claims": claims,
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = claims
                .iter()
                .map(|c| {
                    vec![
                        c.id.to_string(),
                        c.citation.to_string(),
                        c.paper_value.to_string(),
                        c.computed_value.to_string(),
                        c.verdict.to_string(),
                        c.note.clone(),
                    ]
                })
                .collect();
            csv_bytes(&["id", "citation", "paper_value", "computed_value", "verdict", "note"], &rows)?
        }
        Format::Text => claims
            .iter()
            .map(|c| format!("{}: {} (paper {}, computed {})\n", c.id, c.verdict, c.paper_value, c.computed_value))
            .collect::<String>()
            .into_bytes(),
    };
    emit(&destination(out, "verify", format), &body)
}

fn protocol(a: ProtocolArgs, cfg: &FileConfig) -> CliResult<()> {
    let n = match a.n {
        Some(n) => n as u64,
        None => cfg.uint("n")?.unwrap_or(100_000),
    };
    let p = real(a.p, cfg, "p", 1.0 / 3.0)?;
    let delta = real(a.delta_in, cfg, "delta_in", 1.0 / 3.0)?;
    let seed = match a.seed {
        Some(s) => s,
        None => cfg.uint("seed")?.unwrap_or(7),
    };
    let format = format_of(&a.common, cfg, Format::Text, &[Format::Text, Format::Json])?;
    let out = out_of(&a.common, cfg)?;
    if n == 0 {
        return Err(usage("n must be at least 1"));
    }
    let n = usize::try_from(n).map_err(|_| usage(format!("n = {n} is too large")))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(usage(format!("p = {p} outside [0, 1]")));
    }
    let spec = input_spec(delta)?;
    let b = batch_repeater(n, &spec, p, seed)?;
    let flag0 = b.entangled_indices.len();

    let body = match format {
        Format::Json => json_bytes(&json!({
            "metadata": {
                "version": env!("CARGO_PKG_VERSION"),
                "inputs": { "n": n, "p": json_num(p), "delta_in": json_num(spec.delta_in), "seed": seed },
            },
            "n": n,
            "flag0_count": flag0,
            "empirical_rate": json_num(b.empirical_rate),
            "paper_predicted": b.paper_predicted,
            "model_predicted": json_num(b.model_predicted),
            "p0": json_num(b.p0),
            "flag_zero_probability": json_num(b.flag_zero_probability),
        })),
        _ => format!(
            "n = {n}\nflag0_count = {flag0}\nempirical_rate = {}\npaper_predicted = {}\nmodel_predicted = {}\np0 = {}\n",
            fmt_num(b.empirical_rate),
            b.paper_predicted,
            fmt_num(b.model_predicted),
            fmt_num(b.p0),
        )
        .into_bytes(),
    };
    emit(&destination(out, "protocol", format), &body)
}

/// Comma list of nonnegative reals, rescaled to unit Euclidean norm.
pub fn parse_schmidt(s: &str) -> CliResult<Vec<f64>> {
    let raw: Vec<f64> = s
        .split(',')
        .map(|t| crate::args::parse_real(t).map_err(CliError::Usage))
        .collect::<CliResult<_>>()?;
    if raw.iter().any(|x| *x < 0.0) {
        return Err(usage("Schmidt coefficients must be nonnegative"));
    }
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(usage("Schmidt coefficients are all zero"));
    }
    Ok(raw.iter().map(|x| x / norm).collect())
}

fn qudit(a: QuditArgs, cfg: &FileConfig) -> CliResult<()> {
    let d = match a.d {
        Some(d) => d as u64,
        None => cfg.uint("d")?.unwrap_or(2),
    };
    let d = usize::try_from(d).map_err(|_| usage(format!("d = {d} is too large")))?;
    if d < 2 {
        return Err(usage(format!("d = {d} must be at least 2")));
    }
    let schmidt = match a.schmidt.or(cfg.string("schmidt")?) {
        Some(s) => parse_schmidt(&s)?,
        None => vec![1.0 / (d as f64).sqrt(); d],
    };
    let p = real(a.p, cfg, "p", 1.0 / 3.0)?;
    let m = opt_real(a.m, cfg, "m")?;
    let a1 = opt_real(a.a1, cfg, "a1")?;
    let a2 = opt_real(a.a2, cfg, "a2")?;
    let c1 = opt_real(a.c1, cfg, "c1")?;
    let c2 = opt_real(a.c2, cfg, "c2")?;
    let format = format_of(&a.common, cfg, Format::Text, &[Format::Text, Format::Json])?;
    let out = out_of(&a.common, cfg)?;

    let bad = |e: corrconv_core::Error| usage(e.to_string());
    let mut config = QuditConfig::new(d, schmidt, p).map_err(bad)?;
    if a1.is_some() || a2.is_some() {
        let (d1, d2) = config.schmidt_a;
        config = config.with_schmidt_a(a1.unwrap_or(d1), a2.unwrap_or(d2)).map_err(bad)?;
    }
    if c1.is_some() || c2.is_some() {
        config = config.with_flag_c(c1.unwrap_or(0.0), c2.unwrap_or(0.0)).map_err(bad)?;
    }
    if let Some(m) = m {
        config = config.with_m(m).map_err(bad)?;
    }
    let r = qudit_report(&config);

    let body = match format {
        Format::Json => json_bytes(&json!({
            "metadata": {
                "version": env!("CARGO_PKG_VERSION"),
                "inputs": {
                    "d": d,
                    "schmidt": config.schmidt_b.iter().map(|x| json_num(*x)).collect::<Vec<_>>(),
                    "m": json_num(config.m()),
                    "p": json_num(p),
                },
            },
            "tau": json_num(r.tau),
            "gamma_tau": json_num(r.gamma_tau),
            "threshold": json_num(r.threshold),
            "entangled": r.entangled,
            "premise_holds": r.premise_holds,
        })),
        _ => format!(
            "tau = {}\ngamma_tau = {}\nthreshold = {}\nentangled = {}\npremise_holds = {}\n",
            fmt_num(r.tau),
            fmt_num(r.gamma_tau),
            fmt_num(r.threshold),
            r.entangled,
            r.premise_holds,
        )
        .into_bytes(),
    };
    emit(&destination(out, "qudit", format), &body)
}
