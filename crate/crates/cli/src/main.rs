use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use guessdec::decoders::{
    gcd_soft_output, gcd_with, grand_outcome_soft_output, grand_with, DecoderConfig, SoftOutput, TauSource,
};
use guessdec::harness::{
    emit_report, run_analysis, run_rcu, run_simulation, write_report, AnalysisConfig, ChannelGrid, CodeSource,
    DecoderKind, Record, ReportFormat, SimConfig, StopSpec,
};
use guessdec::analysis::rcu_snr_for_target;
use guessdec::{PatternOrder, ReceivedWord};

#[derive(Parser)]
#[command(name = "guessdec", version, about = "GRAND/GCD decoding simulations and complexity analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo FER and query statistics over an operating-point grid
    Simulate(SimulateArgs),
    /// Saddle-point query estimates, budgets and operation counts versus rate
    Analyze(AnalyzeArgs),
    /// Random-coding union bound over an Eb/N0 grid
    Rcu(RcuArgs),
    /// Decode a single LLR vector
    Decode(DecodeArgs),
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: csv or json
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

impl Output {
    fn emit<T: Record>(&self, rows: &[T]) -> Result<()> {
        match &self.out {
            Some(p) => emit_report(rows, self.format, p).with_context(|| format!("writing {}", p.display()))?,
            None => write_report(rows, self.format, io::stdout().lock())?,
        }
        Ok(())
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Code: parity-check file (.alist or dense text), random:n,k,seed, or hamming74
    #[arg(long)]
    code: CodeSource,
    /// awgn:<ebn0_db>,...,<rate|code> or bsc:<p>,...
    #[arg(long)]
    channel: ChannelGrid,
    /// grand or gcd
    #[arg(long, default_value = "grand")]
    decoder: DecoderKind,
    /// hamming, soft or orb
    #[arg(long, default_value = "soft")]
    order: PatternOrder,
    /// membership, trivial, dai, dai:<tau> or budget [default: membership for grand, trivial for gcd]
    #[arg(long)]
    stop: Option<StopSpec>,
    /// Query budget per frame
    #[arg(long, default_value_t = 5_000_000)]
    lmax: u64,
    /// Stop a point after this many frame errors
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    /// Stop a point after this many frames
    #[arg(long, default_value_t = 1_000_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Blocklength
    #[arg(long, default_value_t = 128)]
    n: usize,
    /// Comma-separated code rates
    #[arg(long, value_delimiter = ',', default_value = "0.75,0.875")]
    rates: Vec<f64>,
    /// Fixed Eb/N0 in dB; when omitted it is solved from the RCU target
    #[arg(long)]
    ebn0: Option<f64>,
    /// Target error probability for the RCU bound and the budget criterion
    #[arg(long, default_value_t = 1e-5)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Channel draws for query-count samples
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Channel draws per RCU evaluation
    #[arg(long, default_value_t = 20_000)]
    rcu_samples: usize,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    snr_lo: f64,
    #[arg(long, default_value_t = 12.0)]
    snr_hi: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RcuArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Comma-separated Eb/N0 values in dB
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,1,2,3,4")]
    ebn0: Vec<f64>,
    /// Instead of a grid, solve for the Eb/N0 where the bound equals this value
    #[arg(long)]
    target: Option<f64>,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    snr_lo: f64,
    #[arg(long, default_value_t = 12.0)]
    snr_hi: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    code: CodeSource,
    /// Comma-separated channel LLRs (positive favours bit 0)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    llrs: Vec<f64>,
    #[arg(long, default_value = "grand")]
    decoder: DecoderKind,
    #[arg(long, default_value = "soft")]
    order: PatternOrder,
    /// membership, trivial, dai, dai:<tau> or budget [default: membership for grand, trivial for gcd]
    #[arg(long)]
    stop: Option<StopSpec>,
    #[arg(long, default_value_t = 5_000_000)]
    lmax: u64,
    /// Report block posteriors and bit LLRs. GRAND collects this many codewords;
    /// GCD uses at most this many visited information patterns (with `--stop budget
    /// --lmax L` it visits exactly L)
    #[arg(long)]
    soft_output: Option<usize>,
}

fn load(source: &CodeSource) -> Result<guessdec::LinearCode> {
    source.load().with_context(|| format!("loading code {source:?}"))
}

fn simulate(a: SimulateArgs) -> Result<()> {
    load(&a.code)?;
    let mut cfg = SimConfig::new(a.code, a.channel, a.decoder);
    cfg.order = a.order;
    cfg.stop = a.stop.unwrap_or_else(|| StopSpec::default_for(a.decoder));
    cfg.l_max = a.lmax;
    cfg.min_errors = a.min_errors;
    cfg.max_frames = a.max_frames;
    cfg.seed = a.seed;
    cfg.workers = a.workers;
    let rows = run_simulation(&cfg)?;
    a.output.emit(&rows)
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let mut cfg = AnalysisConfig::new(a.n, a.rates);
    cfg.ebn0_db = a.ebn0;
    cfg.epsilon_target = a.epsilon;
    cfg.alpha = a.alpha;
    cfg.samples = a.samples;
    cfg.rcu_samples = a.rcu_samples;
    cfg.snr_bracket = (a.snr_lo, a.snr_hi);
    cfg.seed = a.seed;
    cfg.workers = a.workers;
    let rows = run_analysis(&cfg)?;
    a.output.emit(&rows)
}

fn rcu(a: RcuArgs) -> Result<()> {
    if a.k == 0 || a.k >= a.n {
        bail!("need 0 < k < n");
    }
    let grid = match a.target {
        Some(t) => vec![rcu_snr_for_target(a.n, a.k, t, a.samples, a.seed, a.snr_lo, a.snr_hi)?],
        None => a.ebn0,
    };
    let rows = run_rcu(a.n, a.k, &grid, a.samples, a.seed)?;
    a.output.emit(&rows)
}

fn soft_json(s: &SoftOutput) -> serde_json::Value {
    json!({
        "block_posteriors": s.block_posteriors.iter()
            .map(|(c, p)| json!({"codeword": c.to_string(), "posterior": p}))
            .collect::<Vec<_>>(),
        "bit_llrs": s.bit_llrs,
        "residual": s.residual,
    })
}

fn decode(a: DecodeArgs) -> Result<()> {
    let code = load(&a.code)?;
    if a.llrs.len() != code.n() {
        bail!("expected {} LLRs, got {}", code.n(), a.llrs.len());
    }
    let rx = ReceivedWord::from_llrs(a.llrs);
    let stop = a.stop.unwrap_or_else(|| StopSpec::default_for(a.decoder));
    let mut cfg = DecoderConfig::gcd(a.order, a.lmax, stop.rule);
    if stop.per_word_tau {
        cfg.tau_source = TauSource::PerWord;
    }
    let (out, soft) = match a.decoder {
        DecoderKind::Grand => {
            cfg.list_size = a.soft_output.unwrap_or(1).max(1);
            let out = grand_with(&code, &rx, &cfg)?;
            let soft = match a.soft_output {
                Some(_) if out.found => Some(grand_outcome_soft_output(&out, code.n(), code.k())?),
                _ => None,
            };
            (out, soft)
        }
        DecoderKind::Gcd => {
            cfg.record_visited = a.soft_output.is_some();
            let out = gcd_with(&code, &rx, &cfg)?;
            let soft = match (&out.visited_list, a.soft_output) {
                (Some(v), Some(limit)) => {
                    let pats: Vec<_> = v.iter().take(limit.max(1)).map(|(p, _)| p.clone()).collect();
                    Some(gcd_soft_output(&code, &rx, &pats)?)
                }
                _ => None,
            };
            (out, soft)
        }
    };
    let report = json!({
        "codeword": out.codeword_hat.to_string(),
        "queries_used": out.queries_used,
        "found": out.found,
        "budget_exhausted": out.budget_exhausted,
        "tep_soft_weight": out.tep_soft_weight,
        "ml_certified": out.ml_certified,
        "soft_output": soft.as_ref().map(soft_json),
    });
    let mut stdout = io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, &report)?;
    writeln!(stdout)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => analyze(a),
        Command::Rcu(a) => rcu(a),
        Command::Decode(a) => decode(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
