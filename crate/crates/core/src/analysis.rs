//! Query-count estimation, finite-length bounds, budget and complexity models.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::bits::BitVec;
use crate::channel::{simulate_transmission, ChannelSpec};
use crate::decoders::dai_tau;
use crate::error::{Error, Result};

const ROOT_TOL: f64 = 1e-10;
const LATTICE_TOL: f64 = 1e-9;
// Spans finer than max_weight / MAX_LATTICE_STEPS are treated as continuous.
const MAX_LATTICE_STEPS: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailQuery {
    pub weights: Vec<f64>,
    pub threshold: f64,
}

impl TailQuery {
    pub fn new(weights: Vec<f64>, threshold: f64) -> Self {
        Self { weights, threshold }
    }

    pub fn span(&self) -> usize {
        self.weights.len()
    }
}

/// `P[sum_i f_i w_i <= t]` for i.i.d. uniform bits `f_i`.
pub fn saddlepoint_tail(q: &TailQuery) -> f64 {
    ln_saddlepoint_tail(&q.weights, q.threshold).exp()
}

/// Natural log of [`saddlepoint_tail`], accurate far below `f64` underflow of
/// the probability itself.
///
/// The tilted exponent `kappa(s) - s t` is evaluated at the root of
/// `kappa'(s) = t`. When the weights are continuous the tail is
/// `1/2 exp(kappa(s) - s t + s^2 kappa''/2) erfc(-s sqrt(kappa''/2))`.
/// When all weights are integer multiples of a span `h`, the sum lives on
/// `h Z` and the tilted mass is summed over the lattice points at or below
/// `t` instead of integrated.
pub fn ln_saddlepoint_tail(weights: &[f64], t: f64) -> f64 {
    if t.is_nan() || t < 0.0 {
        return f64::NEG_INFINITY;
    }
    let w: Vec<f64> = weights.iter().map(|x| x.abs()).filter(|&x| x > 0.0).collect();
    if w.is_empty() {
        return 0.0;
    }
    let total: f64 = w.iter().sum();
    if t >= total {
        return 0.0;
    }
    let span = lattice_span(&w);
    let t = match span {
        Some(h) => (t / h + LATTICE_TOL).floor() * h,
        None => t,
    };
    let mean = total / 2.0;
    if t <= mean {
        ln_lower_tail(&w, t, span)
    } else {
        // S and total - S have the same law.
        let mirrored = match span {
            Some(h) => total - t - h,
            None => total - t,
        };
        let upper = ln_lower_tail(&w, mirrored, span).exp();
        (-upper).ln_1p()
    }
}

fn ln_lower_tail(w: &[f64], t: f64, span: Option<f64>) -> f64 {
    if t < 0.0 {
        return f64::NEG_INFINITY;
    }
    let w_min = w.iter().copied().fold(f64::INFINITY, f64::min);
    if t < w_min * (1.0 - LATTICE_TOL) {
        // Only the empty pattern qualifies.
        return -(w.len() as f64) * LN_2;
    }
    let s = solve_saddle(w, t);
    let (k0, _, k2) = cgf(w, s);
    let exponent = k0 - s * t;
    match span {
        Some(h) => {
            let sd = k2.sqrt();
            let steps = (t / h + LATTICE_TOL).floor() as u64;
            let mut acc = 0.0;
            for j in 0..=steps {
                let x = j as f64 * h;
                let term = h * (s * x - 0.5 * (x / sd).powi(2)).exp() / (sd * (2.0 * PI).sqrt());
                acc += term;
                if term < acc * 1e-17 {
                    break;
                }
            }
            exponent + acc.ln()
        }
        None => exponent + (0.5 * erfcx(-s * (k2 / 2.0).sqrt())).ln(),
    }
}

/// CGF of `sum f_i w_i` and its first two derivatives at `s <= 0`.
fn cgf(w: &[f64], s: f64) -> (f64, f64, f64) {
    let mut k0 = 0.0;
    let mut k1 = 0.0;
    let mut k2 = 0.0;
    for &wi in w {
        let e = (s * wi).exp();
        k0 += e.ln_1p() - LN_2;
        let p = e / (1.0 + e);
        k1 += wi * p;
        k2 += wi * wi * p * (1.0 - p);
    }
    (k0, k1, k2)
}

/// Root of `kappa'(s) = t` on `s <= 0` by bisection. The bracket starts at
/// `[-50, 0]` and is widened until `kappa'` drops below `t`.
fn solve_saddle(w: &[f64], t: f64) -> f64 {
    let mut lo = -50.0;
    while cgf(w, lo).1 > t && lo > -1e12 {
        lo *= 2.0;
    }
    let mut hi = 0.0;
    if cgf(w, hi).1 <= t {
        return 0.0;
    }
    let tol = ROOT_TOL * lo.abs().max(1.0) / 50.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if cgf(w, mid).1 > t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Common span `h` of positive weights, if every weight is an integer
/// multiple of it (relative tolerance 1e-9).
fn lattice_span(w: &[f64]) -> Option<f64> {
    let max = w.iter().copied().fold(0.0, f64::max);
    let tol = max * LATTICE_TOL;
    let mut h = w[0];
    for &x in &w[1..] {
        let (mut a, mut b) = (h.max(x), h.min(x));
        while b > tol {
            let r = a % b;
            a = b;
            b = if r > b - tol { 0.0 } else { r };
        }
        h = a;
        if h <= tol || max / h > MAX_LATTICE_STEPS {
            return None;
        }
    }
    let on_lattice = w.iter().all(|&x| {
        let q = x / h;
        (q - q.round()).abs() <= LATTICE_TOL * q.max(1.0) * 10.0
    });
    on_lattice.then_some(h)
}

/// Scaled complementary error function `e^{x^2} erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x < 25.0 {
        (x * x).exp() * erfc(x)
    } else {
        let x2 = x * x;
        let series = 1.0 - 0.5 / x2 + 0.75 / (x2 * x2) - 1.875 / (x2 * x2 * x2);
        series / (x * PI.sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryMode {
    Grand,
    GcdTrivial,
    GcdDai,
    GrandRank,
    GcdRank,
}

impl fmt::Display for QueryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryMode::Grand => "grand",
            QueryMode::GcdTrivial => "gcd_trivial",
            QueryMode::GcdDai => "gcd_dai",
            QueryMode::GrandRank => "grand_rank",
            QueryMode::GcdRank => "gcd_rank",
        })
    }
}

impl FromStr for QueryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grand" => Ok(QueryMode::Grand),
            "gcd_trivial" | "gcd" => Ok(QueryMode::GcdTrivial),
            "gcd_dai" => Ok(QueryMode::GcdDai),
            "grand_rank" => Ok(QueryMode::GrandRank),
            "gcd_rank" => Ok(QueryMode::GcdRank),
            other => Err(Error::InvalidInput(format!("unknown query mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuerySample {
    pub lambda_id: u64,
    pub estimate: f64,
    pub log_estimate: f64,
}

impl QuerySample {
    pub fn from_estimate(lambda_id: u64, estimate: f64) -> Self {
        Self {
            lambda_id,
            estimate,
            log_estimate: estimate.ln(),
        }
    }

    pub fn from_log(lambda_id: u64, log_estimate: f64) -> Self {
        Self {
            lambda_id,
            estimate: log_estimate.exp(),
            log_estimate,
        }
    }
}

/// Saddle-point estimate of the number of queries for one channel realization.
///
/// `lambda` and `true_tep` are in systematic coordinates: the first `k`
/// entries are the information positions searched by GCD.
pub fn estimate_query_count(
    mode: QueryMode,
    lambda: &[f64],
    true_tep: &BitVec,
    n: usize,
    k: usize,
    lambda_id: u64,
) -> Result<QuerySample> {
    if lambda.len() != n || true_tep.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: if lambda.len() != n { lambda.len() } else { true_tep.len() },
        });
    }
    if k > n {
        return Err(Error::InvalidInput(format!("k = {k} exceeds n = {n}")));
    }
    let rel: Vec<f64> = lambda.iter().map(|l| l.abs()).collect();
    let gamma: f64 = true_tep.ones().map(|i| rel[i]).sum();
    let gamma_info: f64 = true_tep.ones().filter(|&i| i < k).map(|i| rel[i]).sum();
    let (span, t) = match mode {
        QueryMode::Grand | QueryMode::GrandRank => (n, gamma),
        QueryMode::GcdTrivial => (k, gamma),
        QueryMode::GcdDai => (k, gamma - dai_tau(&rel[k..])),
        QueryMode::GcdRank => (k, gamma_info),
    };
    let ln_p = ln_saddlepoint_tail(&rel[..span], t);
    Ok(QuerySample::from_log(lambda_id, span as f64 * LN_2 + ln_p))
}

/// Exact query counts for equal reliabilities and a true error of weight `w`:
/// `(sum_{j<=w} C(n, j), sum_{j<=w} C(k, j))`.
pub fn bsc_exact_counts(n: usize, k: usize, w: usize) -> Result<(BigUint, BigUint)> {
    if w > n {
        return Err(Error::InvalidInput(format!("weight {w} exceeds n = {n}")));
    }
    if k > n {
        return Err(Error::InvalidInput(format!("k = {k} exceeds n = {n}")));
    }
    Ok((partial_binomial_sum(n, w), partial_binomial_sum(k, w)))
}

fn partial_binomial_sum(n: usize, w: usize) -> BigUint {
    let mut term = BigUint::from(1u32);
    let mut sum = term.clone();
    for j in 1..=w.min(n) {
        term = term * BigUint::from(n - j + 1) / BigUint::from(j);
        sum += &term;
    }
    sum
}

/// Monte-Carlo RCU bound with `samples` channel draws (all-zero codeword):
/// the average of `min(1, (2^k - 1) P[Gamma_S(f) <= Gamma_S(e) | lambda])`.
/// Sample `i` uses its own ChaCha stream, so results are reproducible and
/// draws are shared across operating points (common random numbers).
pub fn rcu_bound(n: usize, k: usize, spec: &ChannelSpec, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidInput("RCU bound needs at least one sample".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("invalid dimensions n = {n}, k = {k}")));
    }
    spec.validate()?;
    let zero = BitVec::zeros(n);
    let ln_m = ((k as f64) * LN_2).min(f64::MAX.ln()) + (-(-(k as f64)).exp2()).ln_1p();
    let terms: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let rx = simulate_transmission(spec, &zero, &mut rng).expect("validated");
            let gamma: f64 = rx.hard_decisions().ones().map(|j| rx.reliabilities()[j]).sum();
            let ln_term = ln_m + ln_saddlepoint_tail(rx.reliabilities(), gamma);
            ln_term.min(0.0).exp()
        })
        .collect();
    Ok(terms.iter().sum::<f64>() / samples as f64)
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Eb/N0 (dB) at which the AWGN RCU bound reaches `target`, by bisection on
/// `[lo_db, hi_db]` with common random numbers.
pub fn rcu_snr_for_target(
    n: usize,
    k: usize,
    target: f64,
    samples: usize,
    seed: u64,
    lo_db: f64,
    hi_db: f64,
) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidInput(format!("target {target} outside (0, 1)")));
    }
    let rate = k as f64 / n as f64;
    let at = |db: f64| -> Result<f64> { rcu_bound(n, k, &ChannelSpec::awgn(db, rate)?, samples, seed) };
    let (mut lo, mut hi) = (lo_db, hi_db);
    if at(lo)? < target || at(hi)? > target {
        return Err(Error::InvalidInput(format!(
            "target {target} not bracketed by [{lo_db}, {hi_db}] dB"
        )));
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lower bound `2^{n-k} eps` on the average GRAND query count.
pub fn grand_query_lower_bound(n: usize, k: usize, epsilon_rcu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon_rcu) {
        return Err(Error::InvalidInput(format!("epsilon {epsilon_rcu} outside [0, 1]")));
    }
    if k > n {
        return Err(Error::InvalidInput(format!("k = {k} exceeds n = {n}")));
    }
    Ok(((n - k) as f64).exp2() * epsilon_rcu)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpsDecoder {
    Grand,
    Gcd,
}

/// Average binary operations per decode.
///
/// GRAND: one full syndrome `(n-k)(2n-1)` plus about two row checks of cost
/// `2n-1` per further query. GCD: a parity re-encode `(n-k)(2k-1)` per query.
pub fn ops_model(decoder: OpsDecoder, avg_queries: f64, n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    match decoder {
        OpsDecoder::Grand => (avg_queries - 1.0) * 2.0 * (2.0 * n - 1.0) + (n - k) * (2.0 * n - 1.0),
        OpsDecoder::Gcd => avg_queries * (n - k) * (2.0 * k - 1.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub l_tilde_max: u64,
    pub alpha: f64,
    pub epsilon_target: f64,
    pub tail_at_budget: f64,
}

/// Fraction of samples whose estimate exceeds `budget`.
pub fn empirical_tail(samples: &[QuerySample], budget: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|s| s.estimate > budget).count() as f64 / samples.len() as f64
}

/// Smallest budget whose empirical exceedance is at most `alpha * epsilon_target`.
pub fn min_required_budget(samples: &[QuerySample], alpha: f64, epsilon_target: f64) -> Result<BudgetReport> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!("alpha {alpha} outside (0, 1]")));
    }
    if !(0.0..=1.0).contains(&epsilon_target) {
        return Err(Error::InvalidInput(format!("epsilon {epsilon_target} outside [0, 1]")));
    }
    let target = alpha * epsilon_target;
    let n = samples.len();
    if target * (n as f64) < 1.0 - 1e-9 {
        return Err(Error::InsufficientResolution {
            target,
            samples: n,
            min_samples: (1.0 / target).ceil().min(u64::MAX as f64) as u64,
        });
    }
    let allowed = ((target * n as f64 + 1e-9).floor() as usize).min(n);
    let mut est: Vec<f64> = samples.iter().map(|s| s.estimate).collect();
    est.sort_by(f64::total_cmp);
    let idx = n.saturating_sub(allowed + 1);
    let l = est[idx].ceil().clamp(1.0, u64::MAX as f64) as u64;
    Ok(BudgetReport {
        l_tilde_max: l,
        alpha,
        epsilon_target,
        tail_at_budget: empirical_tail(samples, l as f64),
    })
}

/// Upper bound on `FER - eps_ML`: the probability that the true pattern is
/// not reached within the budget.
pub fn fer_gap_bound(tail_probability: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tail_probability) {
        return Err(Error::InvalidInput(format!(
            "tail probability {tail_probability} outside [0, 1]"
        )));
    }
    Ok(tail_probability)
}

pub fn mean_estimate(samples: &[QuerySample]) -> f64 {
    samples.iter().map(|s| s.estimate).sum::<f64>() / samples.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn exact_equal_weight(m: usize, w: usize) -> f64 {
        partial_binomial_sum(m, w).to_f64().unwrap() / (m as f64).exp2()
    }

    fn brute_tail(w: &[f64], t: f64) -> f64 {
        let m = w.len();
        let hits = (0u32..1 << m)
            .filter(|mask| (0..m).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).sum::<f64>() <= t)
            .count();
        hits as f64 / (m as f64).exp2()
    }

    #[test]
    fn equal_weights_match_binomial() {
        let p = saddlepoint_tail(&TailQuery::new(vec![1.0; 128], 2.5));
        let exact = exact_equal_weight(128, 2);
        assert!((p / exact - 1.0).abs() < 0.08, "{p} vs {exact}");
    }

    #[test]
    fn table_two_relative_errors() {
        let grand = [(1, 7.8), (2, 3.9), (4, 1.7), (8, 0.7)];
        let gcd = [(1, 7.6), (2, 3.8), (4, 1.6), (8, 0.6)];
        for (m, rows) in [(128usize, grand), (105, gcd)] {
            for (w, expected) in rows {
                let p = ln_saddlepoint_tail(&vec![1.0; m], w as f64);
                let exact = partial_binomial_sum(m, w).to_f64().unwrap().ln() - m as f64 * LN_2;
                let err = ((p - exact).exp() - 1.0) * 100.0;
                assert!((err - expected).abs() <= 1.0, "m={m} w={w}: {err:.2}% vs {expected}%");
            }
        }
    }

    #[test]
    fn threshold_zero_is_empty_pattern() {
        let w = [0.3, 1.2, 2.2, 0.9];
        let p = saddlepoint_tail(&TailQuery::new(w.to_vec(), 0.0));
        assert!((p * 16.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(saddlepoint_tail(&TailQuery::new(vec![0.0; 5], 1.0)), 1.0);
        assert_eq!(saddlepoint_tail(&TailQuery::new(vec![1.0, 2.0], -0.1)), 0.0);
        assert_eq!(saddlepoint_tail(&TailQuery::new(vec![1.0, 2.0], 3.0)), 1.0);
    }

    #[test]
    fn continuous_weights_are_close_to_brute_force() {
        let w: Vec<f64> = (0..16).map(|i| 0.37 + 0.611 * i as f64 + 0.05 * ((i * i) % 7) as f64).collect();
        let total: f64 = w.iter().sum();
        for frac in [0.1, 0.2, 0.3, 0.45, 0.6, 0.8] {
            let t = frac * total;
            let p = saddlepoint_tail(&TailQuery::new(w.clone(), t));
            let exact = brute_tail(&w, t);
            assert!((p / exact - 1.0).abs() < 0.35, "t={t}: {p} vs {exact}");
        }
    }

    #[test]
    fn tail_is_monotone_in_threshold() {
        let w: Vec<f64> = (0..40).map(|i| 0.1 + (i as f64 * 0.731) % 3.0).collect();
        let total: f64 = w.iter().sum();
        let mut prev = 0.0;
        for i in 0..=200 {
            let p = saddlepoint_tail(&TailQuery::new(w.clone(), total * i as f64 / 200.0));
            assert!(p + 1e-12 >= prev, "i={i}");
            prev = p;
        }
    }

    #[test]
    fn erfcx_matches_reference_values() {
        assert!((erfcx(0.0) - 1.0).abs() < 1e-15);
        assert!((erfcx(1.0) / 0.427_583_576_155_807 - 1.0).abs() < 1e-9);
        assert!((erfcx(30.0) - 0.018_795_888_861_416_75).abs() < 1e-12);
    }

    #[test]
    fn grand_estimate_is_one_for_zero_tep() {
        let lambda: Vec<f64> = (0..32).map(|i| 0.5 + i as f64 * 0.1).collect();
        let s = estimate_query_count(QueryMode::Grand, &lambda, &BitVec::zeros(32), 32, 16, 0).unwrap();
        assert!((s.estimate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_two_query_estimates() {
        let lambda = vec![1.0; 128];
        let tep = BitVec::from_support(128, &[127]);
        let s = estimate_query_count(QueryMode::Grand, &lambda, &tep, 128, 105, 0).unwrap();
        assert!((s.estimate / 1.39e2 - 1.0).abs() < 0.01, "{}", s.estimate);
        let tep = BitVec::from_support(128, &[0, 1, 2, 3]);
        let s = estimate_query_count(QueryMode::GcdTrivial, &lambda, &tep, 128, 105, 0).unwrap();
        assert!((s.estimate / 5.06e6 - 1.0).abs() < 0.01, "{}", s.estimate);
    }

    #[test]
    fn dai_never_exceeds_trivial() {
        let lambda: Vec<f64> = (0..24).map(|i| ((i * 37) % 11) as f64 * 0.3 - 1.4).collect();
        let tep = BitVec::from_support(24, &[1, 5, 13, 20]);
        let a = estimate_query_count(QueryMode::GcdTrivial, &lambda, &tep, 24, 12, 0).unwrap();
        let b = estimate_query_count(QueryMode::GcdDai, &lambda, &tep, 24, 12, 0).unwrap();
        assert!(b.estimate <= a.estimate);
        assert!(estimate_query_count(QueryMode::Grand, &lambda, &tep, 25, 12, 0).is_err());
    }

    #[test]
    fn exact_counts() {
        let c = |n, k, w| {
            let (a, b) = bsc_exact_counts(n, k, w).unwrap();
            (a.to_u64().unwrap(), b.to_u64().unwrap())
        };
        assert_eq!(c(128, 105, 1), (129, 106));
        assert_eq!(c(128, 105, 2), (8257, 5566));
        assert_eq!(c(128, 105, 0), (1, 1));
        assert!(bsc_exact_counts(4, 2, 5).is_err());
    }

    #[test]
    fn lower_bound_points() {
        assert!((grand_query_lower_bound(128, 112, 1e-5).unwrap() - 0.65536).abs() < 1e-12);
        assert!((grand_query_lower_bound(128, 96, 1e-5).unwrap() - 42949.67296).abs() < 1e-6);
        assert_eq!(grand_query_lower_bound(128, 96, 0.0).unwrap(), 0.0);
        assert!(grand_query_lower_bound(128, 96, 1.5).is_err());
    }

    #[test]
    fn ops_points() {
        assert_eq!(ops_model(OpsDecoder::Grand, 1.0, 128, 106), 5610.0);
        assert_eq!(ops_model(OpsDecoder::Gcd, 1.0, 128, 106), 4642.0);
        let lb = grand_query_lower_bound(128, 112, 1e-5).unwrap();
        assert!((ops_model(OpsDecoder::Grand, lb, 128, 112) - 3904.2336).abs() < 1e-6);
    }

    fn samples(values: &[f64]) -> Vec<QuerySample> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| QuerySample::from_estimate(i as u64, v))
            .collect()
    }

    #[test]
    fn budget_examples() {
        let r = min_required_budget(&samples(&[10.0; 8]), 1.0, 0.5).unwrap();
        assert_eq!(r.l_tilde_max, 10);
        let vals: Vec<f64> = (1..=100).map(f64::from).collect();
        let r = min_required_budget(&samples(&vals), 0.5, 0.1).unwrap();
        assert_eq!(r.l_tilde_max, 95);
        assert!(r.tail_at_budget <= 0.05 + 1e-12);
        match min_required_budget(&samples(&vals), 1.0, 1e-5) {
            Err(Error::InsufficientResolution { min_samples, .. }) => assert_eq!(min_samples, 100_000),
            other => panic!("{other:?}"),
        }
        let r = min_required_budget(&samples(&[7.5, 3.2, 9.0]), 1.0, 1.0).unwrap();
        assert_eq!(r.l_tilde_max, 4);
    }

    #[test]
    fn gap_bound_identity() {
        assert_eq!(fer_gap_bound(0.0).unwrap(), 0.0);
        assert_eq!(fer_gap_bound(1e-3).unwrap(), 1e-3);
        assert!(fer_gap_bound(1.5).is_err());
    }

    #[test]
    fn rcu_reaches_tie_floor_at_high_snr() {
        // With error-free hard decisions only f = 0 ties, so each term is
        // (2^k - 1) 2^-n.
        let spec = ChannelSpec::awgn(20.0, 0.5).unwrap();
        let floor = (65535.0f64) / 2f64.powi(32);
        let b = rcu_bound(32, 16, &spec, 200, 1).unwrap();
        assert!((b / floor - 1.0).abs() < 1e-9, "{b}");
        let b = rcu_bound(64, 16, &ChannelSpec::awgn(20.0, 0.25).unwrap(), 200, 1).unwrap();
        assert!(b < 1e-6);
    }

    #[test]
    fn rcu_is_monotone_in_snr() {
        let mut prev = 1.0;
        for db in [0.0, 1.0, 2.0, 3.0, 4.0] {
            let spec = ChannelSpec::awgn(db, 0.5).unwrap();
            let b = rcu_bound(32, 16, &spec, 400, 9).unwrap();
            assert!(b <= prev, "{db} dB: {b} > {prev}");
            prev = b;
        }
    }
}
