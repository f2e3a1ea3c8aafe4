use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::SweepConfig;
use crate::channel::{modulate_bpsk, snr_db_to_sigma, transmit, SoftVector};
use crate::mlref::ml_decode;
use crate::polar::PolarCode;
use crate::qgated::{decode, DecoderConfig};
use crate::qsim::NoiseModel;
use crate::rng::stream;
use crate::{Error, Result};

const STREAM_CHANNEL: u64 = 0;
const STREAM_DECODE: u64 = 1;

pub const CSV_HEADER: [&str; 13] = [
    "snr_db",
    "p_bitflip",
    "problems",
    "shots",
    "bit_errors",
    "block_errors",
    "ber",
    "bler",
    "ml_bit_errors",
    "ml_block_errors",
    "ml_ber",
    "ml_bler",
    "wall_seconds",
];

/// Aggregate for one `(snr, p_bitflip)` grid point. BER counts message bits.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub snr_db: f64,
    pub p_bitflip: f64,
    pub problems: u64,
    pub shots: u64,
    pub bit_errors: u64,
    pub block_errors: u64,
    pub ber: f64,
    pub bler: f64,
    pub ml_bit_errors: u64,
    pub ml_block_errors: u64,
    pub ml_ber: f64,
    pub ml_bler: f64,
    pub wall_seconds: f64,
}

/// Per-problem outcome, written with `--log-problems`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemLog {
    pub snr_db: f64,
    pub p_bitflip: f64,
    pub problem: u64,
    pub message: Vec<u8>,
    pub decision: usize,
    pub ml_decision: usize,
    pub bit_errors: u64,
    pub block_error: bool,
    pub ml_bit_errors: u64,
    pub ml_block_error: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutput {
    pub records: Vec<EvalRecord>,
    pub logs: Vec<ProblemLog>,
}

/// Message and received block for problem `index` at `snr_db`. Depends only
/// on `(seed, snr_db, index)`, so every noise level sees the same problems.
pub fn problem_instance(
    code: &PolarCode,
    snr_db: f64,
    seed: u64,
    index: u64,
) -> Result<(Vec<u8>, SoftVector<f64>)> {
    let mut rng = stream(seed, &[snr_db.to_bits(), index, STREAM_CHANNEL]);
    let m: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2u8)).collect();
    let (_, x) = code.encode(&m)?;
    let y = transmit(&modulate_bpsk::<f64>(&x), snr_db_to_sigma(snr_db), &mut rng)?;
    Ok((m, y))
}

fn bit_errors(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

struct MlOutcome {
    decision: usize,
    bit_errors: u64,
    block_error: bool,
}

fn rate(num: u64, den: u64) -> f64 {
    num as f64 / den as f64
}

/// Runs every grid point, then writes the CSV (and per-problem log) when
/// paths are configured. Output is identical for any worker count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let code = PolarCode::new(cfg.n, cfg.k)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let keep_logs = cfg.log_problems.is_some();
    let mut out = SweepOutput::default();

    for &snr in &cfg.snr_db {
        let ml: Vec<MlOutcome> = pool.install(|| {
            (0..cfg.problems)
                .into_par_iter()
                .map(|i| {
                    let (m, y) = problem_instance(&code, snr, cfg.seed, i)?;
                    let d = ml_decode(&code, &y)?;
                    let errs = bit_errors(&d.m_hat, &m);
                    Ok(MlOutcome { decision: code.basis_index_of_message(d.message_index), bit_errors: errs, block_error: errs > 0 })
                })
                .collect::<Result<_>>()
        })?;
        let ml_bits: u64 = ml.iter().map(|o| o.bit_errors).sum();
        let ml_blocks = ml.iter().filter(|o| o.block_error).count() as u64;

        for &p in &cfg.noise_p {
            let dcfg = DecoderConfig { noise: NoiseModel::new(p)?, ..cfg.decoder.clone() };
            let started = Instant::now();
            let logs: Vec<ProblemLog> = pool.install(|| {
                (0..cfg.problems)
                    .into_par_iter()
                    .map(|i| {
                        let (m, y) = problem_instance(&code, snr, cfg.seed, i)?;
                        let mut rng = stream(cfg.seed, &[snr.to_bits(), i, STREAM_DECODE, p.to_bits()]);
                        let r = decode(&code, &y, &dcfg, &mut rng)?;
                        let errs = bit_errors(&r.m_hat, &m);
                        let frozen_ok = code.is_valid_input(&r.u_hat);
                        let mlo = &ml[i as usize];
                        Ok(ProblemLog {
                            snr_db: snr,
                            p_bitflip: p,
                            problem: i,
                            message: m,
                            decision: r.decision,
                            ml_decision: mlo.decision,
                            bit_errors: errs,
                            block_error: errs > 0 || !frozen_ok,
                            ml_bit_errors: mlo.bit_errors,
                            ml_block_error: mlo.block_error,
                        })
                    })
                    .collect::<Result<_>>()
            })?;
            let wall = started.elapsed().as_secs_f64();
            let bits: u64 = logs.iter().map(|l| l.bit_errors).sum();
            let blocks = logs.iter().filter(|l| l.block_error).count() as u64;
            let total_bits = cfg.problems * cfg.k as u64;
            out.records.push(EvalRecord {
                snr_db: snr,
                p_bitflip: p,
                problems: cfg.problems,
                shots: dcfg.shots,
                bit_errors: bits,
                block_errors: blocks,
                ber: rate(bits, total_bits),
                bler: rate(blocks, cfg.problems),
                ml_bit_errors: ml_bits,
                ml_block_errors: ml_blocks,
                ml_ber: rate(ml_bits, total_bits),
                ml_bler: rate(ml_blocks, cfg.problems),
                wall_seconds: if cfg.timing { wall } else { 0.0 },
            });
            if keep_logs {
                out.logs.extend(logs);
            }
        }
    }

    if let Some(path) = &cfg.out {
        std::fs::write(path, render_csv(cfg, &out.records)?)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &cfg.log_problems {
        std::fs::write(path, render_problem_log(&out.logs)?)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(out)
}

/// Metadata comment lines, then one row per grid point.
pub fn render_csv(cfg: &SweepConfig, records: &[EvalRecord]) -> Result<String> {
    let mut text = String::new();
    writeln!(text, "# snr_convention=Es/N0").unwrap();
    writeln!(text, "# seed={}", cfg.seed).unwrap();
    writeln!(text, "# ber_bits=message").unwrap();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.snr_db.to_string(),
            r.p_bitflip.to_string(),
            r.problems.to_string(),
            r.shots.to_string(),
            r.bit_errors.to_string(),
            r.block_errors.to_string(),
            r.ber.to_string(),
            r.bler.to_string(),
            r.ml_bit_errors.to_string(),
            r.ml_block_errors.to_string(),
            r.ml_ber.to_string(),
            r.ml_bler.to_string(),
            format!("{:.3}", r.wall_seconds),
        ])?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    text.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(text)
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

fn render_problem_log(logs: &[ProblemLog]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "snr_db",
        "p_bitflip",
        "problem",
        "message",
        "decision",
        "ml_decision",
        "bit_errors",
        "block_error",
        "ml_bit_errors",
        "ml_block_error",
    ])?;
    for l in logs {
        w.write_record([
            l.snr_db.to_string(),
            l.p_bitflip.to_string(),
            l.problem.to_string(),
            bit_string(&l.message),
            l.decision.to_string(),
            l.ml_decision.to_string(),
            l.bit_errors.to_string(),
            (l.block_error as u8).to_string(),
            l.ml_bit_errors.to_string(),
            (l.ml_block_error as u8).to_string(),
        ])?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(body).expect("csv output is utf-8"))
}
