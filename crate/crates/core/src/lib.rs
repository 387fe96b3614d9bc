//! Guessing decoders (GRAND and GCD) for short binary linear block codes,
//! with saddle-point query-count analysis and a Monte-Carlo harness.

pub mod analysis;
pub mod bits;
pub mod channel;
pub mod decoders;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod patterns;

pub use bits::BitVec;
pub use channel::{ChannelSpec, ReceivedWord};
pub use decoders::{gcd, grand, DecodeOutcome, SoftOutput, StopRule};
pub use error::{Error, Result};
pub use gf2::{BinMatrix, LinearCode};
pub use patterns::{PatternOrder, PatternStream, Tep};
