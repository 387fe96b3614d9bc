//! GRAND and GCD decoders plus block/bit soft output.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::channel::ReceivedWord;
use crate::error::{Error, Result};
use crate::gf2::{syndrome, LinearCode};
use crate::patterns::{PatternOrder, PatternStream, DEFAULT_FRONTIER_CAP};

pub const UNLIMITED: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StopRule {
    /// GRAND: stop at the first pattern whose syndrome matches.
    Membership,
    /// GCD: stop once the best full weight is at most the current info weight.
    Trivial,
    /// GCD: trivial rule relaxed by `tau`.
    Dai { tau: f64 },
    /// Run until the budget or the pattern stream is exhausted.
    Budget,
}

impl StopRule {
    pub fn dai(tau: f64) -> Result<Self> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::InvalidInput(format!("DAI offset {tau} must be finite and >= 0")));
        }
        Ok(StopRule::Dai { tau })
    }

    pub fn name(&self) -> &'static str {
        match self {
            StopRule::Membership => "membership",
            StopRule::Trivial => "trivial",
            StopRule::Dai { .. } => "dai",
            StopRule::Budget => "budget",
        }
    }
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `membership`, `trivial`, `budget` or `dai`. A bare `dai` carries
/// `tau = 0`; the GCD decoder replaces it with the per-word expected parity
/// weight when constructed through [`DecoderConfig::gcd_dai`].
impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "membership" => Ok(StopRule::Membership),
            "trivial" => Ok(StopRule::Trivial),
            "dai" => Ok(StopRule::Dai { tau: 0.0 }),
            "budget" => Ok(StopRule::Budget),
            other => Err(Error::InvalidInput(format!("unknown stop rule {other:?}"))),
        }
    }
}

/// Expected soft weight of the parity part: `sum |l| / (1 + e^|l|)`.
pub fn dai_tau(parity_reliabilities: &[f64]) -> f64 {
    parity_reliabilities
        .iter()
        .map(|l| {
            let a = l.abs();
            if a > 700.0 {
                0.0
            } else {
                a / (1.0 + a.exp())
            }
        })
        .sum()
}

/// Per-word DAI offset computed from the parity positions of `received`
/// under the code's systematic permutation.
pub fn dai_tau_for(code: &LinearCode, received: &ReceivedWord) -> f64 {
    let rel = received.reliabilities();
    let parity: Vec<f64> = code.col_perm()[code.k()..].iter().map(|&i| rel[i]).collect();
    dai_tau(&parity)
}

/// How the DAI offset is obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauSource {
    Fixed,
    /// Recompute from each received word's parity reliabilities.
    PerWord,
}

#[derive(Clone, Debug)]
pub struct DecoderConfig {
    pub order: PatternOrder,
    pub l_max: u64,
    pub stop: StopRule,
    pub tau_source: TauSource,
    /// GRAND only: number of membership hits to collect before stopping.
    pub list_size: usize,
    pub record_visited: bool,
    pub frontier_cap: usize,
}

impl DecoderConfig {
    pub fn grand(order: PatternOrder, l_max: u64) -> Self {
        Self {
            order,
            l_max,
            stop: StopRule::Membership,
            tau_source: TauSource::Fixed,
            list_size: 1,
            record_visited: false,
            frontier_cap: DEFAULT_FRONTIER_CAP,
        }
    }

    pub fn gcd(order: PatternOrder, l_max: u64, stop: StopRule) -> Self {
        Self {
            stop,
            ..Self::grand(order, l_max)
        }
    }

    /// GCD with the DAI offset recomputed for every received word.
    pub fn gcd_dai(order: PatternOrder, l_max: u64) -> Self {
        Self {
            stop: StopRule::Dai { tau: 0.0 },
            tau_source: TauSource::PerWord,
            ..Self::grand(order, l_max)
        }
    }
}

/// A membership hit (GRAND) or re-encoded candidate (GCD).
#[derive(Clone, Debug, PartialEq)]
pub struct ListEntry {
    /// Zero-based query index at which the entry was produced.
    pub query: u64,
    pub codeword: BitVec,
    pub tep_soft_weight: f64,
    /// `P(e | y)` of the full pattern.
    pub probability: f64,
}

#[derive(Clone, Debug)]
pub struct DecodeOutcome {
    pub codeword_hat: BitVec,
    pub queries_used: u64,
    pub found: bool,
    pub budget_exhausted: bool,
    pub tep_soft_weight: f64,
    pub ml_certified: bool,
    /// GRAND: all membership hits. GCD: empty unless visited patterns are recorded.
    pub list: Vec<ListEntry>,
    /// Sum of `P(e | y)` over every tested GRAND pattern. For GCD, the sum of
    /// the information-part marginals of every tested information pattern.
    pub tested_mass: f64,
    /// GRAND: every tested pattern (original coordinates) with `P(e | y)`.
    /// GCD: every tested information pattern (length k, systematic
    /// coordinates) with its information-part marginal.
    pub visited_list: Option<Vec<(BitVec, f64)>>,
}

/// Normalizer `c = -sum ln(1 + e^{-|l_i|})`, so that `ln P(e|y) = c - Gamma_S(e)`.
fn log_norm(reliabilities: impl Iterator<Item = f64>) -> f64 {
    -reliabilities.map(|a| (-a.abs()).exp().ln_1p()).sum::<f64>()
}

/// `P(e | y)` of a pattern with the given soft weight.
pub fn pattern_probability(reliabilities: &[f64], soft_weight: f64) -> f64 {
    (log_norm(reliabilities.iter().copied()) - soft_weight).exp()
}

fn check_rx(code: &LinearCode, received: &ReceivedWord) -> Result<()> {
    if code.n() != received.len() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            got: received.len(),
        });
    }
    Ok(())
}

fn check_budget(l_max: u64) -> Result<()> {
    if l_max == 0 {
        return Err(Error::InvalidInput("l_max must be at least 1".into()));
    }
    Ok(())
}

/// GRAND with membership stop and no list.
pub fn grand(
    code: &LinearCode,
    received: &ReceivedWord,
    order: PatternOrder,
    l_max: u64,
) -> Result<DecodeOutcome> {
    grand_with(code, received, &DecoderConfig::grand(order, l_max))
}

pub fn grand_with(code: &LinearCode, received: &ReceivedWord, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    check_rx(code, received)?;
    check_budget(cfg.l_max)?;
    if !matches!(cfg.stop, StopRule::Membership | StopRule::Budget) {
        return Err(Error::Unsupported(format!("GRAND with {} stop", cfg.stop)));
    }
    if cfg.list_size == 0 {
        return Err(Error::InvalidInput("list size must be at least 1".into()));
    }
    let n = code.n();
    let z = received.hard_decisions();
    let rel = received.reliabilities();
    let s = syndrome(code, z, false)?;
    let target = s.words();
    let cols = code.h_columns();
    let lnorm = log_norm(rel.iter().copied());

    let mut stream = PatternStream::with_frontier_cap(cfg.order, rel, cfg.frontier_cap);
    let mut acc = vec![0u64; target.len()];
    let mut list = Vec::new();
    let mut visited = cfg.record_visited.then(Vec::new);
    let mut tested_mass = 0.0;
    let mut queries = 0u64;
    let mut stopped = false;
    let mut drained = false;

    while queries < cfg.l_max {
        let Some(tep) = stream.next_pattern()? else {
            drained = true;
            break;
        };
        queries += 1;
        let prob = (lnorm - tep.gamma_s).exp();
        tested_mass += prob;
        acc.iter_mut().for_each(|w| *w = 0);
        for &i in tep.support() {
            for (a, c) in acc.iter_mut().zip(cols[i].words()) {
                *a ^= c;
            }
        }
        if let Some(v) = visited.as_mut() {
            v.push((tep.bits(), prob));
        }
        if acc == target {
            let mut cw = z.clone();
            for &i in tep.support() {
                cw.flip(i);
            }
            list.push(ListEntry {
                query: queries - 1,
                codeword: cw,
                tep_soft_weight: tep.gamma_s,
                probability: prob,
            });
            if cfg.stop == StopRule::Membership && list.len() >= cfg.list_size {
                stopped = true;
                break;
            }
        }
    }
    if !stopped && !drained && queries == cfg.l_max {
        // A stream that ends exactly at the budget is still exhaustive.
        drained = stream.next_pattern()?.is_none();
    }

    let best = list
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.tep_soft_weight.total_cmp(&b.1.tep_soft_weight).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i);
    let (codeword_hat, tep_soft_weight) = match best {
        Some(i) => (list[i].codeword.clone(), list[i].tep_soft_weight),
        None => (z.clone(), 0.0),
    };
    let found = best.is_some();
    let ml_certified = found && ((cfg.order == PatternOrder::Soft && !list.is_empty()) || drained);
    debug_assert_eq!(codeword_hat.len(), n);
    Ok(DecodeOutcome {
        codeword_hat,
        queries_used: queries,
        found,
        budget_exhausted: !stopped && !drained,
        tep_soft_weight,
        ml_certified,
        list,
        tested_mass,
        visited_list: visited,
    })
}

/// GCD over the information positions of the systematic form.
pub fn gcd(
    code: &LinearCode,
    received: &ReceivedWord,
    order: PatternOrder,
    l_max: u64,
    stop: StopRule,
) -> Result<DecodeOutcome> {
    gcd_with(code, received, &DecoderConfig::gcd(order, l_max, stop))
}

pub fn gcd_with(code: &LinearCode, received: &ReceivedWord, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    check_rx(code, received)?;
    check_budget(cfg.l_max)?;
    let k = code.k();
    let n = code.n();
    let tau = match cfg.stop {
        StopRule::Trivial => Some(0.0),
        StopRule::Dai { tau } => Some(match cfg.tau_source {
            TauSource::Fixed => tau,
            TauSource::PerWord => dai_tau_for(code, received),
        }),
        StopRule::Budget => None,
        StopRule::Membership => {
            return Err(Error::Unsupported("GCD with membership stop".into()));
        }
    };
    let rx = received.permuted(code.col_perm());
    let z = rx.hard_decisions();
    let rel = rx.reliabilities();
    let s = syndrome(code, z, true)?;
    let target = s.words();
    let p_cols = code.p_columns();
    let lnorm = log_norm(rel.iter().copied());
    let lnorm_info = log_norm(rel[..k].iter().copied());
    let parity_rel = &rel[k..];

    let mut stream = PatternStream::with_frontier_cap(cfg.order, &rel[..k], cfg.frontier_cap);
    let mut acc = vec![0u64; target.len()];
    let mut best: Option<(f64, Vec<usize>, Vec<u64>)> = None;
    let mut list = Vec::new();
    let mut visited = cfg.record_visited.then(Vec::new);
    let mut tested_mass = 0.0;
    let mut queries = 0u64;
    let mut stopped = false;
    let mut drained = false;

    while queries < cfg.l_max {
        let Some(tep) = stream.next_pattern()? else {
            drained = true;
            break;
        };
        queries += 1;
        acc.copy_from_slice(target);
        for &i in tep.support() {
            for (a, c) in acc.iter_mut().zip(p_cols[i].words()) {
                *a ^= c;
            }
        }
        let parity_weight: f64 = ones_of(&acc, n - k).map(|j| parity_rel[j]).sum();
        let weight = tep.gamma_s + parity_weight;
        tested_mass += (lnorm_info - tep.gamma_s).exp();
        if let Some(v) = visited.as_mut() {
            v.push((tep.bits(), (lnorm_info - tep.gamma_s).exp()));
            list.push(ListEntry {
                query: queries - 1,
                codeword: candidate(code, z, tep.support(), &acc),
                tep_soft_weight: weight,
                probability: (lnorm - weight).exp(),
            });
        }
        if best.as_ref().is_none_or(|b| weight < b.0) {
            best = Some((weight, tep.support().to_vec(), acc.clone()));
        }
        if let (Some(t), Some(b)) = (tau, best.as_ref()) {
            if b.0 <= tep.gamma_s + t {
                stopped = true;
                break;
            }
        }
    }
    if !stopped && !drained && queries == cfg.l_max {
        drained = stream.next_pattern()?.is_none();
    }

    let (weight, info, parity) = best.expect("at least one query");
    let codeword_hat = candidate(code, z, &info, &parity);
    let ml_certified =
        drained || (stopped && cfg.order == PatternOrder::Soft && cfg.stop == StopRule::Trivial);
    Ok(DecodeOutcome {
        codeword_hat,
        queries_used: queries,
        found: true,
        budget_exhausted: !stopped && !drained,
        tep_soft_weight: weight,
        ml_certified,
        list,
        tested_mass,
        visited_list: visited,
    })
}

/// `z + (e_I, e_P)` mapped back to original coordinates.
fn candidate(code: &LinearCode, z_perm: &BitVec, info: &[usize], parity: &[u64]) -> BitVec {
    let mut c = z_perm.clone();
    for &i in info {
        c.flip(i);
    }
    for j in ones_of(parity, code.redundancy()) {
        c.flip(code.k() + j);
    }
    code.from_permuted(&c)
}

fn ones_of(words: &[u64], len: usize) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(move |(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let tz = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * 64 + tz)
        })
        .filter(move |&i| i < len)
    })
}

/// Block posteriors of a candidate list and per-bit LLRs.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftOutput {
    pub block_posteriors: Vec<(BitVec, f64)>,
    pub bit_llrs: Vec<f64>,
    /// Probability mass attributed to codewords outside the list.
    pub residual: f64,
}

/// `(2^k - 1) / (2^n - 1)`.
fn unlisted_ratio(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    (k - n).exp2() * (1.0 - (-k).exp2()) / (1.0 - (-n).exp2())
}

/// Assembles block posteriors `p_j / (sum p + uncovered * (2^k-1)/(2^n-1))`
/// and bit LLRs, splitting the residual mass evenly between the two bit values.
pub fn list_soft_output(
    codewords: Vec<BitVec>,
    numerators: &[f64],
    uncovered_mass: f64,
    n: usize,
    k: usize,
) -> Result<SoftOutput> {
    if codewords.is_empty() {
        return Err(Error::InvalidInput("soft output needs a nonempty list".into()));
    }
    if codewords.len() != numerators.len() {
        return Err(Error::LengthMismatch {
            expected: codewords.len(),
            got: numerators.len(),
        });
    }
    if let Some(c) = codewords.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: c.len(),
        });
    }
    let complete = k < 64 && codewords.len() as u64 == 1u64 << k;
    let residual_term = if complete {
        0.0
    } else {
        uncovered_mass.max(0.0) * unlisted_ratio(n, k)
    };
    let denom: f64 = numerators.iter().sum::<f64>() + residual_term;
    let residual = if denom > 0.0 { residual_term / denom } else { 1.0 };
    let block_posteriors: Vec<(BitVec, f64)> = codewords
        .into_iter()
        .zip(numerators)
        .map(|(c, &p)| (c, if denom > 0.0 { p / denom } else { 0.0 }))
        .collect();
    let mut p1 = vec![residual / 2.0; n];
    let mut p0 = vec![residual / 2.0; n];
    for (c, post) in &block_posteriors {
        for (j, (a, b)) in p0.iter_mut().zip(p1.iter_mut()).enumerate() {
            if c.get(j) {
                *b += post;
            } else {
                *a += post;
            }
        }
    }
    let bit_llrs = p0.iter().zip(&p1).map(|(a, b)| a.ln() - b.ln()).collect();
    Ok(SoftOutput {
        block_posteriors,
        bit_llrs,
        residual,
    })
}

/// GRAND soft output from the tested-pattern sequence and the (zero-based,
/// ascending) indices of its membership hits. Candidate codewords are
/// `hard_decisions + pattern`.
pub fn grand_soft_output(
    visited: &[(BitVec, f64)],
    hits: &[usize],
    hard_decisions: &BitVec,
    n: usize,
    k: usize,
) -> Result<SoftOutput> {
    let Some(&last) = hits.last() else {
        return Err(Error::InvalidInput("GRAND soft output needs at least one hit".into()));
    };
    if last >= visited.len() || hits.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("hit indices must be ascending and in range".into()));
    }
    let covered: f64 = visited[..=last].iter().map(|v| v.1).sum();
    let codewords = hits.iter().map(|&q| hard_decisions.xor(&visited[q].0)).collect();
    let probs: Vec<f64> = hits.iter().map(|&q| visited[q].1).collect();
    list_soft_output(codewords, &probs, 1.0 - covered, n, k)
}

/// GRAND soft output straight from a decode outcome (no visited list needed).
pub fn grand_outcome_soft_output(outcome: &DecodeOutcome, n: usize, k: usize) -> Result<SoftOutput> {
    let last = outcome
        .list
        .last()
        .ok_or_else(|| Error::InvalidInput("GRAND soft output needs at least one hit".into()))?;
    // Mass tested up to and including the last hit; the decoder stops there
    // under membership stopping.
    let covered = if last.query + 1 == outcome.queries_used {
        outcome.tested_mass
    } else {
        return Err(Error::Unsupported(
            "tested mass beyond the last hit; use grand_soft_output with a visited list".into(),
        ));
    };
    let codewords = outcome.list.iter().map(|e| e.codeword.clone()).collect();
    let probs: Vec<f64> = outcome.list.iter().map(|e| e.probability).collect();
    list_soft_output(codewords, &probs, 1.0 - covered, n, k)
}

/// GCD soft output for the first `info_patterns.len()` information patterns
/// (length k, systematic coordinates). Each pattern is re-encoded; the list
/// weight of a candidate is the full-pattern probability `P(e | y)` and the
/// uncovered mass is one minus the sum of the information-part marginals.
pub fn gcd_soft_output(
    code: &LinearCode,
    received: &ReceivedWord,
    info_patterns: &[BitVec],
) -> Result<SoftOutput> {
    check_rx(code, received)?;
    if info_patterns.is_empty() {
        return Err(Error::InvalidInput("GCD soft output needs at least one pattern".into()));
    }
    let k = code.k();
    let n = code.n();
    let rx = received.permuted(code.col_perm());
    let z = rx.hard_decisions();
    let rel = rx.reliabilities();
    let s = syndrome(code, z, true)?;
    let lnorm = log_norm(rel.iter().copied());
    let lnorm_info = log_norm(rel[..k].iter().copied());
    let mut codewords = Vec::with_capacity(info_patterns.len());
    let mut probs = Vec::with_capacity(info_patterns.len());
    let mut info_mass = 0.0;
    for e_i in info_patterns {
        if e_i.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                got: e_i.len(),
            });
        }
        let support = e_i.support();
        let mut acc = s.words().to_vec();
        for &i in &support {
            for (a, c) in acc.iter_mut().zip(code.p_columns()[i].words()) {
                *a ^= c;
            }
        }
        let w_info: f64 = support.iter().map(|&i| rel[i]).sum();
        let w_par: f64 = ones_of(&acc, n - k).map(|j| rel[k + j]).sum();
        info_mass += (lnorm_info - w_info).exp();
        probs.push((lnorm - w_info - w_par).exp());
        codewords.push(candidate(code, z, &support, &acc));
    }
    list_soft_output(codewords, &probs, 1.0 - info_mass, n, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{simulate_transmission, ChannelSpec};
    use crate::gf2::{brute_force_mld, hamming_7_4, random_linear_code};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn awgn_word(code: &LinearCode, db: f64, rng: &mut ChaCha8Rng) -> (BitVec, ReceivedWord) {
        let msg = BitVec::from_bools(&(0..code.k()).map(|_| rng.random()).collect::<Vec<bool>>());
        let cw = code.encode(&msg).unwrap();
        let spec = ChannelSpec::awgn(db, code.rate()).unwrap();
        let rx = simulate_transmission(&spec, &cw, rng).unwrap();
        (cw, rx)
    }

    #[test]
    fn dai_tau_examples() {
        assert_eq!(dai_tau(&[0.0, 0.0]), 0.0);
        assert!((dai_tau(&[3f64.ln()]) - 3f64.ln() / 4.0).abs() < 1e-15);
        assert!((dai_tau(&[3f64.ln()]) - 0.27465).abs() < 1e-5);
        assert!(dai_tau(&[1e6, 800.0, 60.0]) < 1e-20);
    }

    #[test]
    fn zero_syndrome_is_one_query() {
        let code = hamming_7_4();
        let z_cw = code.encode(&BitVec::from_str01("1010").unwrap()).unwrap();
        let lambda: Vec<f64> = (0..7).map(|i| if z_cw.get(i) { -1.0 - i as f64 } else { 1.0 + i as f64 }).collect();
        let rx = ReceivedWord::from_llrs(lambda);
        let out = grand(&code, &rx, PatternOrder::Soft, UNLIMITED).unwrap();
        assert_eq!(out.queries_used, 1);
        assert_eq!(out.codeword_hat, z_cw);
        assert!(out.ml_certified);
        let out = gcd(&code, &rx, PatternOrder::Soft, UNLIMITED, StopRule::Trivial).unwrap();
        assert_eq!(out.queries_used, 1);
        assert_eq!(out.codeword_hat, z_cw);
        assert_eq!(out.tep_soft_weight, 0.0);
    }

    #[test]
    fn grand_budget_exhaustion_returns_hard_decision() {
        let code = random_linear_code(24, 12, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let (_, rx) = awgn_word(&code, -2.0, &mut rng);
            let out = grand(&code, &rx, PatternOrder::Soft, 1).unwrap();
            assert_eq!(out.queries_used, 1);
            if !out.found {
                assert!(out.budget_exhausted);
                assert_eq!(&out.codeword_hat, rx.hard_decisions());
            }
        }
    }

    #[test]
    fn hamming_code_matches_brute_force() {
        let code = hamming_7_4();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for t in 0..2000 {
            let db = [0.0, 3.0, 6.0][t % 3];
            let (_, rx) = awgn_word(&code, db, &mut rng);
            let (_, w) = brute_force_mld(&code, rx.lambda()).unwrap();
            for order in [PatternOrder::Soft, PatternOrder::Hamming, PatternOrder::Orb] {
                let g = grand_with(
                    &code,
                    &rx,
                    &DecoderConfig {
                        stop: StopRule::Budget,
                        ..DecoderConfig::grand(order, UNLIMITED)
                    },
                )
                .unwrap();
                assert!((g.tep_soft_weight - w).abs() < 1e-9);
                assert!(g.ml_certified);
            }
            let g = grand(&code, &rx, PatternOrder::Soft, UNLIMITED).unwrap();
            assert!(g.found && code.is_codeword(&g.codeword_hat));
            assert!((g.tep_soft_weight - w).abs() < 1e-9, "trial {t}");
            let c = gcd(&code, &rx, PatternOrder::Soft, UNLIMITED, StopRule::Trivial).unwrap();
            assert!(code.is_codeword(&c.codeword_hat));
            assert!((c.tep_soft_weight - w).abs() < 1e-9, "trial {t}");
            assert!(c.ml_certified);
        }
    }

    #[test]
    fn gcd_candidates_are_codewords_and_dai_is_no_slower() {
        let code = random_linear_code(20, 8, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let (_, rx) = awgn_word(&code, 2.0, &mut rng);
            let mut cfg = DecoderConfig::gcd(PatternOrder::Soft, 500, StopRule::Trivial);
            cfg.record_visited = true;
            let triv = gcd_with(&code, &rx, &cfg).unwrap();
            assert!(triv.list.iter().all(|e| code.is_codeword(&e.codeword)));
            let dai = gcd_with(&code, &rx, &DecoderConfig::gcd_dai(PatternOrder::Soft, 500)).unwrap();
            assert!(dai.queries_used <= triv.queries_used);
            assert!(!dai.ml_certified || dai.queries_used == 256);
        }
    }

    #[test]
    fn membership_with_gcd_is_rejected() {
        let code = hamming_7_4();
        let rx = ReceivedWord::from_llrs(vec![1.0; 7]);
        assert!(gcd(&code, &rx, PatternOrder::Soft, 10, StopRule::Membership).is_err());
        assert!(grand_with(&code, &rx, &DecoderConfig::gcd(PatternOrder::Soft, 10, StopRule::Trivial)).is_err());
        assert!(grand(&code, &rx, PatternOrder::Soft, 0).is_err());
    }

    #[test]
    fn soft_output_single_hit_formula() {
        let p = 0.3;
        let visited = vec![(BitVec::from_str01("0000000").unwrap(), p)];
        let z = BitVec::zeros(7);
        let out = grand_soft_output(&visited, &[0], &z, 7, 4).unwrap();
        let r = 15.0 / 127.0;
        assert!((out.block_posteriors[0].1 - p / (p + (1.0 - p) * r)).abs() < 1e-15);
        assert!((out.block_posteriors[0].1 + out.residual - 1.0).abs() < 1e-12);
        assert!(grand_soft_output(&visited, &[], &z, 7, 4).is_err());
    }

    #[test]
    fn soft_output_two_equal_hits() {
        let visited = vec![
            (BitVec::from_str01("10").unwrap(), 0.5),
            (BitVec::from_str01("01").unwrap(), 0.5),
        ];
        let out = grand_soft_output(&visited, &[0, 1], &BitVec::zeros(2), 2, 1).unwrap();
        assert_eq!(out.residual, 0.0);
        assert!((out.block_posteriors[0].1 - 0.5).abs() < 1e-15);
        assert!((out.block_posteriors[1].1 - 0.5).abs() < 1e-15);
        assert!(out.bit_llrs[0].abs() < 1e-12);
    }

    #[test]
    fn unlisted_ratio_values() {
        assert!((unlisted_ratio(7, 4) - 15.0 / 127.0).abs() < 1e-15);
        assert!((unlisted_ratio(128, 106) - 2f64.powi(-22)).abs() < 1e-20);
    }

    #[test]
    fn pattern_probabilities_sum_to_one() {
        let rel = [0.4, 1.3, 2.0];
        let total: f64 = (0..8u32)
            .map(|m| {
                let w: f64 = (0..3).filter(|i| m >> i & 1 == 1).map(|i| rel[i]).sum();
                pattern_probability(&rel, w)
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
