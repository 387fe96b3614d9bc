//! BPSK-AWGN and BSC channel models producing LLRs and hard decisions.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelSpec {
    /// BPSK over AWGN at `ebn0_db` for a code of rate `rate`.
    Awgn { ebn0_db: f64, rate: f64 },
    /// Binary symmetric channel with crossover probability `p`.
    Bsc { p: f64 },
}

impl ChannelSpec {
    pub fn awgn(ebn0_db: f64, rate: f64) -> Result<Self> {
        let spec = ChannelSpec::Awgn { ebn0_db, rate };
        spec.validate()?;
        Ok(spec)
    }

    pub fn bsc(p: f64) -> Result<Self> {
        let spec = ChannelSpec::Bsc { p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelSpec::Awgn { ebn0_db, rate } => {
                if !(rate > 0.0 && rate < 1.0) {
                    return Err(Error::InvalidInput(format!("rate {rate} outside (0, 1)")));
                }
                if !ebn0_db.is_finite() {
                    return Err(Error::InvalidInput("Eb/N0 must be finite".into()));
                }
            }
            ChannelSpec::Bsc { p } => {
                if !(p > 0.0 && p < 0.5) {
                    return Err(Error::InvalidInput(format!(
                        "crossover probability {p} outside (0, 0.5)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Noise variance `1 / (2 r 10^(Eb/N0 / 10))` for AWGN; `None` for BSC.
    pub fn noise_variance(&self) -> Option<f64> {
        match *self {
            ChannelSpec::Awgn { ebn0_db, rate } => {
                Some(1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0)))
            }
            ChannelSpec::Bsc { .. } => None,
        }
    }

    /// The operating-point value reported for this channel (Eb/N0 in dB or `p`).
    pub fn point(&self) -> f64 {
        match *self {
            ChannelSpec::Awgn { ebn0_db, .. } => ebn0_db,
            ChannelSpec::Bsc { p } => p,
        }
    }
}

/// Channel output: LLRs, hard decisions and reliabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedWord {
    lambda: Vec<f64>,
    z: BitVec,
    reliabilities: Vec<f64>,
}

impl ReceivedWord {
    /// Builds a received word from LLRs. `z_i = 0` exactly when `lambda_i >= 0`.
    pub fn from_llrs(lambda: Vec<f64>) -> Self {
        let z = BitVec::from_bools(&lambda.iter().map(|&l| l < 0.0).collect::<Vec<_>>());
        let reliabilities = lambda.iter().map(|l| l.abs()).collect();
        Self {
            lambda,
            z,
            reliabilities,
        }
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn hard_decisions(&self) -> &BitVec {
        &self.z
    }

    pub fn reliabilities(&self) -> &[f64] {
        &self.reliabilities
    }

    /// Re-indexes the word: entry `j` of the result is entry `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> ReceivedWord {
        ReceivedWord::from_llrs(perm.iter().map(|&i| self.lambda[i]).collect())
    }
}

/// Sends `codeword` through the channel.
///
/// AWGN maps bit 0 to +1 and bit 1 to -1, adds `N(0, sigma^2)` noise drawn
/// with the ziggurat sampler of `rand_distr::StandardNormal`, and returns
/// `lambda_i = 2 y_i / sigma^2`. BSC flips each bit with probability `p` and
/// returns `+-ln((1-p)/p)`.
pub fn simulate_transmission<R: Rng + ?Sized>(
    spec: &ChannelSpec,
    codeword: &BitVec,
    rng: &mut R,
) -> Result<ReceivedWord> {
    spec.validate()?;
    let lambda = match *spec {
        ChannelSpec::Awgn { .. } => {
            let var = spec.noise_variance().expect("awgn");
            awgn_llrs(codeword, var, rng)
        }
        ChannelSpec::Bsc { p } => {
            let mag = ((1.0 - p) / p).ln();
            (0..codeword.len())
                .map(|i| {
                    let flipped = rng.random::<f64>() < p;
                    if codeword.get(i) ^ flipped {
                        -mag
                    } else {
                        mag
                    }
                })
                .collect()
        }
    };
    Ok(ReceivedWord::from_llrs(lambda))
}

/// AWGN LLRs for an explicit noise variance.
pub fn awgn_llrs<R: Rng + ?Sized>(codeword: &BitVec, variance: f64, rng: &mut R) -> Vec<f64> {
    let sigma = variance.sqrt();
    (0..codeword.len())
        .map(|i| {
            let x = if codeword.get(i) { -1.0 } else { 1.0 };
            let noise: f64 = StandardNormal.sample(rng);
            2.0 * (x + sigma * noise) / variance
        })
        .collect()
}

/// The true test error pattern `z + c`.
pub fn true_tep(codeword: &BitVec, received: &ReceivedWord) -> Result<BitVec> {
    if codeword.len() != received.len() {
        return Err(Error::LengthMismatch {
            expected: received.len(),
            got: codeword.len(),
        });
    }
    Ok(received.hard_decisions().xor(codeword))
}
