use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::parse_list;
use super::sweep::problem_instance;
use super::{render_csv, run_sweep, SweepConfig};
use crate::channel::{modulate_bpsk, snr_db_to_sigma, transmit, ProbVector, SoftVector};
use crate::circuit::export_text;
use crate::mlref::{ml_decode, posterior_over_valid};
use crate::polar::{bits_to_index, index_to_bits, PolarCode};
use crate::qgated::{decode, decode_probabilities, prepare, DecodeResult};
use crate::qsim::NoiseModel;
use crate::rng::stream;
use crate::{Error, Result};

const STREAM_CLI: u64 = 0x636c69;

#[derive(Parser, Debug)]
#[command(name = "qgated-polar", version, about = "Quantum-gate ML polar decoder simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte-Carlo BER/BLER sweep, written as CSV.
    Sweep(Common),
    /// Decode one block with the quantum decoder.
    Decode(Common),
    /// Print the decoder circuit in text form.
    ExportCircuit(Common),
    /// Exhaustive ML decision for one block.
    Ml(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated list; single-problem commands use the first value.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Comma-separated bit-flip probabilities.
    #[arg(long)]
    noise_p: Option<String>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    problems: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_fbs_blocks: Option<usize>,
    /// Angle step in radians, 0 to disable.
    #[arg(long)]
    angle_quantum: Option<f64>,
    #[arg(long)]
    ideal: bool,
    #[arg(long)]
    optimize: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-problem CSV log (sweep only).
    #[arg(long)]
    log_problems: Option<PathBuf>,
    /// Record measured wall time in the CSV.
    #[arg(long)]
    timing: bool,
    /// Received soft values, comma-separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "p")]
    y: Option<String>,
    /// Per-bit probabilities P(bit = 1), comma-separated.
    #[arg(long)]
    p: Option<String>,
    /// Message bits, e.g. 1011 (m_0 first).
    #[arg(long)]
    message: Option<String>,
}

/// Failure class, mapped to the process exit code.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn list(flag: &str, s: &str) -> std::result::Result<Vec<f64>, Failure> {
    parse_list(s).map_err(|_| Failure::Usage(format!("--{flag}: cannot parse `{s}`")))
}

impl Common {
    fn config(&self) -> std::result::Result<SweepConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => SweepConfig::from_file(path).map_err(usage)?,
            None => SweepConfig::default(),
        };
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(s) = &self.snr_db {
            cfg.snr_db = list("snr-db", s)?;
        }
        if let Some(s) = &self.noise_p {
            cfg.noise_p = list("noise-p", s)?;
        }
        if let Some(v) = self.shots {
            cfg.decoder.shots = v;
        }
        if let Some(v) = self.problems {
            cfg.problems = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.max_fbs_blocks {
            cfg.decoder.max_fbs_blocks = v;
        }
        if let Some(v) = self.angle_quantum {
            cfg.decoder.angle_quantum = v;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.log_problems.is_some() {
            cfg.log_problems = self.log_problems.clone();
        }
        cfg.decoder.ideal_mode |= self.ideal;
        cfg.decoder.optimize_circuit |= self.optimize;
        cfg.timing |= self.timing;
        cfg.validate().map_err(usage)?;
        Ok(cfg)
    }
}

/// What a single-problem command operates on.
enum Input {
    Soft { y: SoftVector<f64>, message: Option<Vec<u8>> },
    Probs(ProbVector<f64>),
}

fn parse_bits(s: &str) -> std::result::Result<Vec<u8>, Failure> {
    s.chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Failure::Usage(format!("--message: bad bit `{c}`"))),
        })
        .collect()
}

fn single_input(args: &Common, cfg: &SweepConfig, code: &PolarCode) -> std::result::Result<Input, Failure> {
    let snr = cfg.snr_db[0];
    let check_len = |len: usize| {
        if len == code.n() {
            Ok(())
        } else {
            Err(usage(Error::LengthMismatch { expected: code.n(), actual: len }))
        }
    };
    if let Some(s) = &args.p {
        let p = list("p", s)?;
        check_len(p.len())?;
        return Ok(Input::Probs(ProbVector::new(p).map_err(usage)?));
    }
    if let Some(s) = &args.y {
        let y = list("y", s)?;
        check_len(y.len())?;
        let y = SoftVector::new(y, snr_db_to_sigma(snr)).map_err(usage)?;
        return Ok(Input::Soft { y, message: None });
    }
    if let Some(s) = &args.message {
        let m = parse_bits(s)?;
        let (_, x) = code.encode(&m).map_err(usage)?;
        let mut rng = stream(cfg.seed, &[STREAM_CLI, snr.to_bits()]);
        let y = transmit(&modulate_bpsk::<f64>(&x), snr_db_to_sigma(snr), &mut rng)?;
        return Ok(Input::Soft { y, message: Some(m) });
    }
    let (m, y) = problem_instance(code, snr, cfg.seed, 0)?;
    Ok(Input::Soft { y, message: Some(m) })
}

fn bits(b: &[u8]) -> String {
    b.iter().map(|&x| if x == 1 { '1' } else { '0' }).collect()
}

fn print_input(input: &Input) {
    match input {
        Input::Soft { y, message } => {
            if let Some(m) = message {
                println!("message={}", bits(m));
            }
            let ys: Vec<String> = y.values().iter().map(|v| format!("{v:.6}")).collect();
            println!("sigma={:.6}", y.sigma());
            println!("y={}", ys.join(","));
        }
        Input::Probs(p) => {
            let ps: Vec<String> = p.p_one().iter().map(|v| format!("{v:.6}")).collect();
            println!("p={}", ps.join(","));
        }
    }
}

fn print_decode(r: &DecodeResult<f64>, n: usize) {
    println!("theta_rt={:.12}", r.theta_rt);
    println!("valid_probability={:.12e}", r.valid_probability);
    println!("m={}", r.m_iterations);
    match r.lambdas {
        Some((l1, l2)) => {
            println!("lambda1={l1:.12}");
            println!("lambda2={l2:.12}");
        }
        None => {
            println!("lambda1=none");
            println!("lambda2=none");
        }
    }
    if r.phase_adjusted {
        println!("note=slow rotation uses one fewer full iteration");
    }
    if r.phase_fallback {
        println!("note=block cap reached, slow rotation replaced by a full iteration");
    }
    println!("valid_mass_final={:.12}", r.valid_mass_final);
    println!("gates={}", r.gate_count);
    println!("decision={} u={} m_hat={}", r.decision, bits(&r.u_hat), bits(&r.m_hat));
    println!("histogram:");
    let mut rows: Vec<(usize, u64)> = r.histogram.iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    for (i, c) in rows {
        println!("  {i:>6} {} {c}", bits(&index_to_bits(i, n)));
    }
}

fn decoder_for(cfg: &SweepConfig) -> Result<crate::qgated::DecoderConfig> {
    let mut d = cfg.decoder.clone();
    d.noise = NoiseModel::new(cfg.noise_p[0])?;
    Ok(d)
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = args.config()?;
            let out = run_sweep(&cfg)?;
            if cfg.out.is_none() {
                print!("{}", render_csv(&cfg, &out.records)?);
            }
        }
        Command::Decode(args) => {
            let cfg = args.config()?;
            let code = PolarCode::new(cfg.n, cfg.k).map_err(usage)?;
            let input = single_input(&args, &cfg, &code)?;
            let dcfg = decoder_for(&cfg)?;
            let mut rng = stream(cfg.seed, &[STREAM_CLI, 1]);
            print_input(&input);
            let r = match &input {
                Input::Soft { y, .. } => decode(&code, y, &dcfg, &mut rng)?,
                Input::Probs(p) => decode_probabilities(&code, p, &dcfg, &mut rng)?,
            };
            print_decode(&r, code.n());
        }
        Command::ExportCircuit(args) => {
            let cfg = args.config()?;
            let code = PolarCode::new(cfg.n, cfg.k).map_err(usage)?;
            let p = match single_input(&args, &cfg, &code)? {
                Input::Soft { y, .. } => ProbVector::from_soft(&y),
                Input::Probs(p) => p,
            };
            let prepared = prepare(&code, &p, &cfg.decoder)?;
            let text = export_text(&prepared.circuit);
            match &cfg.out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
        }
        Command::Ml(args) => {
            let cfg = args.config()?;
            let code = PolarCode::new(cfg.n, cfg.k).map_err(usage)?;
            let input = single_input(&args, &cfg, &code)?;
            print_input(&input);
            match &input {
                Input::Soft { y, .. } => {
                    let d = ml_decode(&code, y)?;
                    println!(
                        "decision={} u={} m_hat={}",
                        bits_to_index(&d.u_hat),
                        bits(&d.u_hat),
                        bits(&d.m_hat)
                    );
                    println!("log_likelihood={:.12}", d.log_likelihood);
                    println!("runner_up_gap={:.12}", d.runner_up_gap);
                }
                Input::Probs(p) => {
                    let post = posterior_over_valid(&code, p)?;
                    let best = post
                        .iter()
                        .enumerate()
                        .fold(0, |b, (i, &v)| if v > post[b] { i } else { b });
                    let m = code.message_from_index(best);
                    let (u, _) = code.encode(&m)?;
                    println!(
                        "decision={} u={} m_hat={}",
                        code.basis_index_of_message(best),
                        bits(&u),
                        bits(&m)
                    );
                    println!("posterior={:.12}", post[best]);
                }
            }
        }
    }
    Ok(())
}

/// Runs the command line; returns 0 on success, 1 on usage or configuration
/// errors and 2 on runtime failures.
pub fn cli_main<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
