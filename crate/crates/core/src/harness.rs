//! Monte-Carlo simulation and analysis sweeps with CSV/JSON reports.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    estimate_query_count, grand_query_lower_bound, mean_estimate, min_required_budget, ops_model,
    rcu_bound, rcu_snr_for_target, OpsDecoder, QueryMode, QuerySample,
};
use crate::bits::BitVec;
use crate::channel::{simulate_transmission, true_tep, ChannelSpec};
use crate::decoders::{gcd_with, grand_with, DecodeOutcome, DecoderConfig, StopRule, TauSource};
use crate::error::{Error, Result};
use crate::gf2::{hamming_7_4, load_code, random_linear_code, CodeFormat, LinearCode};
use crate::patterns::PatternOrder;

/// Where the code comes from: a file, `random:n,k,seed`, or `hamming74`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CodeSource {
    File(PathBuf),
    Random { n: usize, k: usize, seed: u64 },
    Hamming74,
}

impl CodeSource {
    pub fn load(&self) -> Result<LinearCode> {
        match self {
            CodeSource::File(p) => load_code(p, CodeFormat::from_path(p)),
            CodeSource::Random { n, k, seed } => random_linear_code(*n, *k, *seed),
            CodeSource::Hamming74 => Ok(hamming_7_4()),
        }
    }
}

impl FromStr for CodeSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "hamming74" {
            return Ok(CodeSource::Hamming74);
        }
        if let Some(rest) = s.strip_prefix("random:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            let bad = || Error::InvalidInput(format!("expected random:n,k,seed, got {s:?}"));
            if parts.len() != 3 {
                return Err(bad());
            }
            return Ok(CodeSource::Random {
                n: parts[0].parse().map_err(|_| bad())?,
                k: parts[1].parse().map_err(|_| bad())?,
                seed: parts[2].parse().map_err(|_| bad())?,
            });
        }
        Ok(CodeSource::File(PathBuf::from(s)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Grand,
    Gcd,
}

impl DecoderKind {
    pub fn ops(self) -> OpsDecoder {
        match self {
            DecoderKind::Grand => OpsDecoder::Grand,
            DecoderKind::Gcd => OpsDecoder::Gcd,
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::Grand => "grand",
            DecoderKind::Gcd => "gcd",
        })
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grand" => Ok(DecoderKind::Grand),
            "gcd" => Ok(DecoderKind::Gcd),
            other => Err(Error::InvalidInput(format!("unknown decoder {other:?}"))),
        }
    }
}

/// Stop rule as given on the command line. `dai` recomputes the offset per
/// received word; `dai:<tau>` fixes it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopSpec {
    pub rule: StopRule,
    pub per_word_tau: bool,
}

impl StopSpec {
    pub fn new(rule: StopRule) -> Self {
        Self {
            rule,
            per_word_tau: matches!(rule, StopRule::Dai { .. }),
        }
    }

    pub fn default_for(decoder: DecoderKind) -> Self {
        match decoder {
            DecoderKind::Grand => Self::new(StopRule::Membership),
            DecoderKind::Gcd => Self::new(StopRule::Trivial),
        }
    }
}

impl FromStr for StopSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(tau) = s.strip_prefix("dai:") {
            let tau: f64 = tau
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad DAI offset in {s:?}")))?;
            return Ok(Self {
                rule: StopRule::dai(tau)?,
                per_word_tau: false,
            });
        }
        Ok(Self::new(s.parse()?))
    }
}

/// Channel family plus its operating points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChannelGrid {
    /// Eb/N0 points in dB; `rate = None` uses the code rate.
    Awgn { ebn0_db: Vec<f64>, rate: Option<f64> },
    Bsc { p: Vec<f64> },
}

impl ChannelGrid {
    pub fn points(&self) -> &[f64] {
        match self {
            ChannelGrid::Awgn { ebn0_db, .. } => ebn0_db,
            ChannelGrid::Bsc { p } => p,
        }
    }

    pub fn specs(&self, code_rate: f64) -> Result<Vec<ChannelSpec>> {
        match self {
            ChannelGrid::Awgn { ebn0_db, rate } => ebn0_db
                .iter()
                .map(|&db| ChannelSpec::awgn(db, rate.unwrap_or(code_rate)))
                .collect(),
            ChannelGrid::Bsc { p } => p.iter().map(|&p| ChannelSpec::bsc(p)).collect(),
        }
    }
}

/// Parses `awgn:<db>,...,<rate|code>` or `bsc:<p>,...`.
impl FromStr for ChannelGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidInput(format!("channel {s:?}: {msg}"));
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad("expected numbers"));
        if let Some(rest) = s.strip_prefix("awgn:") {
            let mut parts: Vec<&str> = rest.split(',').collect();
            if parts.len() < 2 {
                return Err(bad("need at least one Eb/N0 value followed by a rate or `code`"));
            }
            let last = parts.pop().expect("nonempty").trim();
            let rate = if last == "code" { None } else { Some(num(last)?) };
            let ebn0_db = parts.into_iter().map(num).collect::<Result<Vec<_>>>()?;
            Ok(ChannelGrid::Awgn { ebn0_db, rate })
        } else if let Some(rest) = s.strip_prefix("bsc:") {
            let p = rest.split(',').map(num).collect::<Result<Vec<_>>>()?;
            if p.is_empty() {
                return Err(bad("empty grid"));
            }
            Ok(ChannelGrid::Bsc { p })
        } else {
            Err(bad("expected awgn:... or bsc:..."))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub code: CodeSource,
    pub channel: ChannelGrid,
    pub decoder: DecoderKind,
    pub order: PatternOrder,
    pub stop: StopSpec,
    pub l_max: u64,
    pub min_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    pub workers: usize,
    /// Frames decoded per parallel batch.
    pub batch: usize,
}

impl SimConfig {
    pub fn new(code: CodeSource, channel: ChannelGrid, decoder: DecoderKind) -> Self {
        Self {
            code,
            channel,
            decoder,
            order: PatternOrder::Soft,
            stop: StopSpec::default_for(decoder),
            l_max: 5_000_000,
            min_errors: 100,
            max_frames: 1_000_000,
            seed: 1,
            workers: 1,
            batch: 256,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_errors == 0 {
            return Err(Error::InvalidInput("min frame-error count must be at least 1".into()));
        }
        if self.max_frames == 0 || self.l_max == 0 || self.workers == 0 || self.batch == 0 {
            return Err(Error::InvalidInput(
                "max frames, l_max, workers and batch must be positive".into(),
            ));
        }
        if self.channel.points().is_empty() {
            return Err(Error::InvalidInput("operating-point grid is empty".into()));
        }
        let ok = match self.decoder {
            DecoderKind::Grand => matches!(self.stop.rule, StopRule::Membership | StopRule::Budget),
            DecoderKind::Gcd => !matches!(self.stop.rule, StopRule::Membership),
        };
        if !ok {
            return Err(Error::Unsupported(format!(
                "{} decoder with {} stop",
                self.decoder, self.stop.rule
            )));
        }
        Ok(())
    }

    fn decoder_config(&self) -> DecoderConfig {
        let mut cfg = DecoderConfig::gcd(self.order, self.l_max, self.stop.rule);
        if self.stop.per_word_tau {
            cfg.tau_source = TauSource::PerWord;
        }
        cfg
    }
}

/// One operating point of a simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub point: f64,
    pub frames: u64,
    pub frame_errors: u64,
    /// Frame errors where the budget ran out before the stop rule fired.
    pub budget_exhausted: u64,
    pub fer: f64,
    pub avg_queries: f64,
    pub q50: u64,
    pub q90: u64,
    pub q99: u64,
    pub avg_ops: f64,
    pub seconds: f64,
}

pub const REPORT_HEADER: [&str; 11] = [
    "point",
    "frames",
    "frame_errors",
    "budget_exhausted",
    "fer",
    "avg_queries",
    "q50",
    "q90",
    "q99",
    "avg_ops",
    "seconds",
];

impl ReportRow {
    /// Equality of every column except wall time.
    pub fn same_statistics(&self, other: &Self) -> bool {
        Self {
            seconds: 0.0,
            ..self.clone()
        } == Self {
            seconds: 0.0,
            ..other.clone()
        }
    }
}

/// Rows with a fixed column list, for CSV output.
pub trait Record: Serialize {
    fn header() -> Vec<&'static str>;
}

impl Record for ReportRow {
    fn header() -> Vec<&'static str> {
        REPORT_HEADER.to_vec()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct TrialResult {
    error: bool,
    exhausted: bool,
    queries: u64,
}

fn trial_rng(seed: u64, point: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 40) | trial);
    rng
}

fn decode(code: &LinearCode, kind: DecoderKind, cfg: &DecoderConfig, rx: &crate::ReceivedWord) -> Result<DecodeOutcome> {
    match kind {
        DecoderKind::Grand => grand_with(code, rx, cfg),
        DecoderKind::Gcd => gcd_with(code, rx, cfg),
    }
}

fn run_trial(
    code: &LinearCode,
    spec: &ChannelSpec,
    kind: DecoderKind,
    cfg: &DecoderConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrialResult> {
    let msg = BitVec::from_bools(&(0..code.k()).map(|_| rng.random()).collect::<Vec<bool>>());
    let cw = code.encode(&msg)?;
    let rx = simulate_transmission(spec, &cw, rng)?;
    let out = decode(code, kind, cfg, &rx)?;
    let error = !out.found || out.codeword_hat != cw;
    Ok(TrialResult {
        error,
        exhausted: error && out.budget_exhausted,
        queries: out.queries_used,
    })
}

/// Nearest-rank percentile of an ascending slice.
pub fn percentile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Runs every operating point until `min_errors` frame errors or
/// `max_frames` frames. Frames are decoded in parallel batches but tallied
/// in trial order, so the rows do not depend on the worker count.
pub fn run_simulation(config: &SimConfig) -> Result<Vec<ReportRow>> {
    config.validate()?;
    let code = config.code.load()?;
    let specs = config.channel.specs(code.rate())?;
    let dcfg = config.decoder_config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;

    let mut rows = Vec::with_capacity(specs.len());
    for (pi, spec) in specs.iter().enumerate() {
        let start = Instant::now();
        let mut frames = 0u64;
        let mut errors = 0u64;
        let mut exhausted = 0u64;
        let mut queries: Vec<u64> = Vec::new();
        'point: while frames < config.max_frames && errors < config.min_errors {
            let len = (config.batch as u64).min(config.max_frames - frames);
            let first = frames;
            let batch: Vec<Result<TrialResult>> = pool.install(|| {
                (first..first + len)
                    .into_par_iter()
                    .map(|t| run_trial(&code, spec, config.decoder, &dcfg, &mut trial_rng(config.seed, pi, t)))
                    .collect()
            });
            for r in batch {
                let r = r?;
                frames += 1;
                queries.push(r.queries);
                errors += r.error as u64;
                exhausted += r.exhausted as u64;
                if errors >= config.min_errors {
                    break 'point;
                }
            }
        }
        let avg_queries = queries.iter().map(|&q| q as f64).sum::<f64>() / frames.max(1) as f64;
        queries.sort_unstable();
        rows.push(ReportRow {
            point: spec.point(),
            frames,
            frame_errors: errors,
            budget_exhausted: exhausted,
            fer: errors as f64 / frames.max(1) as f64,
            avg_queries,
            q50: percentile(&queries, 0.5),
            q90: percentile(&queries, 0.9),
            q99: percentile(&queries, 0.99),
            avg_ops: ops_model(config.decoder.ops(), avg_queries, code.n(), code.k()),
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

/// Rate sweep of saddle-point query statistics over BPSK-AWGN.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub n: usize,
    pub rates: Vec<f64>,
    /// Fixed Eb/N0; when `None` the SNR meeting `epsilon_target` under the
    /// RCU bound is solved for each rate.
    pub ebn0_db: Option<f64>,
    pub epsilon_target: f64,
    pub alpha: f64,
    /// Channel draws for the query-count samples.
    pub samples: usize,
    /// Channel draws per RCU evaluation.
    pub rcu_samples: usize,
    pub snr_bracket: (f64, f64),
    pub seed: u64,
    pub workers: usize,
}

impl AnalysisConfig {
    pub fn new(n: usize, rates: Vec<f64>) -> Self {
        Self {
            n,
            rates,
            ebn0_db: None,
            epsilon_target: 1e-5,
            alpha: 1.0,
            samples: 100_000,
            rcu_samples: 20_000,
            snr_bracket: (-2.0, 12.0),
            seed: 1,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub rate: f64,
    pub n: usize,
    pub k: usize,
    pub ebn0_db: f64,
    pub epsilon_rcu: f64,
    pub avg_queries_grand: f64,
    pub avg_queries_gcd: f64,
    pub lower_bound: f64,
    pub l_max_grand: u64,
    pub l_max_gcd: u64,
    pub ops_grand: f64,
    pub ops_gcd: f64,
    pub ops_grand_bound: f64,
}

impl Record for AnalysisRow {
    fn header() -> Vec<&'static str> {
        vec![
            "rate",
            "n",
            "k",
            "ebn0_db",
            "epsilon_rcu",
            "avg_queries_grand",
            "avg_queries_gcd",
            "lower_bound",
            "l_max_grand",
            "l_max_gcd",
            "ops_grand",
            "ops_gcd",
            "ops_grand_bound",
        ]
    }
}

/// Saddle-point query samples for the all-zero codeword over AWGN; the
/// first `k` positions play the information set (positions are exchangeable
/// for a random code with i.i.d. reliabilities).
pub fn sample_query_counts(
    mode: QueryMode,
    n: usize,
    k: usize,
    spec: &ChannelSpec,
    samples: usize,
    seed: u64,
) -> Result<Vec<QuerySample>> {
    let zero = BitVec::zeros(n);
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let rx = simulate_transmission(spec, &zero, &mut rng)?;
            let e = true_tep(&zero, &rx)?;
            estimate_query_count(mode, rx.lambda(), &e, n, k, i as u64)
        })
        .collect()
}

pub fn run_analysis(config: &AnalysisConfig) -> Result<Vec<AnalysisRow>> {
    if config.rates.is_empty() {
        return Err(Error::InvalidInput("rate grid is empty".into()));
    }
    if config.samples == 0 || config.rcu_samples == 0 || config.workers == 0 {
        return Err(Error::InvalidInput("sample counts and workers must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| {
        config
            .rates
            .iter()
            .map(|&rate| analysis_row(config, rate))
            .collect()
    })
}

fn analysis_row(config: &AnalysisConfig, rate: f64) -> Result<AnalysisRow> {
    let n = config.n;
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidInput(format!("rate {rate} outside (0, 1)")));
    }
    let k = ((rate * n as f64).round() as usize).clamp(1, n - 1);
    let ebn0_db = match config.ebn0_db {
        Some(db) => db,
        None => rcu_snr_for_target(
            n,
            k,
            config.epsilon_target,
            config.rcu_samples,
            config.seed,
            config.snr_bracket.0,
            config.snr_bracket.1,
        )?,
    };
    let spec = ChannelSpec::awgn(ebn0_db, k as f64 / n as f64)?;
    let epsilon_rcu = rcu_bound(n, k, &spec, config.rcu_samples, config.seed)?;
    let grand = sample_query_counts(QueryMode::Grand, n, k, &spec, config.samples, config.seed)?;
    let gcd = sample_query_counts(QueryMode::GcdTrivial, n, k, &spec, config.samples, config.seed)?;
    let avg_grand = mean_estimate(&grand);
    let avg_gcd = mean_estimate(&gcd);
    // With a solved SNR the bound is evaluated at the target itself.
    let eps_for_bound = if config.ebn0_db.is_some() { epsilon_rcu } else { config.epsilon_target };
    let lower_bound = grand_query_lower_bound(n, k, eps_for_bound)?;
    Ok(AnalysisRow {
        rate,
        n,
        k,
        ebn0_db,
        epsilon_rcu,
        avg_queries_grand: avg_grand,
        avg_queries_gcd: avg_gcd,
        lower_bound,
        l_max_grand: min_required_budget(&grand, config.alpha, config.epsilon_target)?.l_tilde_max,
        l_max_gcd: min_required_budget(&gcd, config.alpha, config.epsilon_target)?.l_tilde_max,
        ops_grand: ops_model(OpsDecoder::Grand, avg_grand, n, k),
        ops_gcd: ops_model(OpsDecoder::Gcd, avg_gcd, n, k),
        ops_grand_bound: ops_model(OpsDecoder::Grand, lower_bound, n, k),
    })
}

/// RCU bound over an Eb/N0 grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RcuRow {
    pub n: usize,
    pub k: usize,
    pub ebn0_db: f64,
    pub epsilon_rcu: f64,
    pub lower_bound: f64,
}

impl Record for RcuRow {
    fn header() -> Vec<&'static str> {
        vec!["n", "k", "ebn0_db", "epsilon_rcu", "lower_bound"]
    }
}

pub fn run_rcu(n: usize, k: usize, ebn0_db: &[f64], samples: usize, seed: u64) -> Result<Vec<RcuRow>> {
    ebn0_db
        .iter()
        .map(|&db| {
            let spec = ChannelSpec::awgn(db, k as f64 / n as f64)?;
            let eps = rcu_bound(n, k, &spec, samples, seed)?;
            Ok(RcuRow {
                n,
                k,
                ebn0_db: db,
                epsilon_rcu: eps,
                lower_bound: grand_query_lower_bound(n, k, eps)?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidInput(format!("unknown report format {other:?}"))),
        }
    }
}

/// Writes rows to `writer` as CSV (fixed header, written even with no rows)
/// or as a JSON array.
pub fn write_report<T: Record, W: Write>(rows: &[T], format: ReportFormat, writer: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
            w.write_record(T::header())?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, rows)?;
            writeln!(writer)?;
        }
    }
    Ok(())
}

pub fn emit_report<T: Record>(rows: &[T], format: ReportFormat, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write_report(rows, format, &mut w)?;
    w.flush()?;
    Ok(())
}
