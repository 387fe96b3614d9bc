use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use guessdec::channel::{simulate_transmission, ChannelSpec};
use guessdec::decoders::{gcd, gcd_with, grand, DecoderConfig, StopRule, UNLIMITED};
use guessdec::gf2::random_linear_code;
use guessdec::{BitVec, LinearCode, PatternOrder, ReceivedWord};

fn received(code: &LinearCode, db: f64, seed: u64) -> ReceivedWord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = ChannelSpec::awgn(db, code.rate()).unwrap();
    simulate_transmission(&spec, &BitVec::zeros(code.n()), &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grand_budget_truncates_the_unlimited_search(seed in any::<u64>(), budget in 1u64..64) {
        let code = random_linear_code(16, 10, 3).unwrap();
        let rx = received(&code, 1.0, seed);
        let full = grand(&code, &rx, PatternOrder::Soft, UNLIMITED).unwrap();
        let cut = grand(&code, &rx, PatternOrder::Soft, budget).unwrap();
        if full.queries_used <= budget {
            prop_assert_eq!(&cut.codeword_hat, &full.codeword_hat);
            prop_assert_eq!(cut.queries_used, full.queries_used);
            prop_assert!(cut.found);
        } else {
            prop_assert!(!cut.found);
            prop_assert!(cut.budget_exhausted);
            prop_assert_eq!(cut.queries_used, budget);
        }
    }

    #[test]
    fn gcd_always_returns_a_codeword(seed in any::<u64>(), budget in 1u64..300) {
        let code = random_linear_code(20, 8, 5).unwrap();
        let rx = received(&code, 0.0, seed);
        for stop in [StopRule::Trivial, StopRule::Budget] {
            let out = gcd(&code, &rx, PatternOrder::Soft, budget, stop).unwrap();
            prop_assert!(code.is_codeword(&out.codeword_hat));
            prop_assert!(out.queries_used <= budget);
        }
    }

    #[test]
    fn dai_never_needs_more_queries_than_trivial(seed in any::<u64>()) {
        let code = random_linear_code(24, 10, 9).unwrap();
        let rx = received(&code, 2.0, seed);
        let trivial = gcd(&code, &rx, PatternOrder::Soft, UNLIMITED, StopRule::Trivial).unwrap();
        let dai = gcd_with(&code, &rx, &DecoderConfig::gcd_dai(PatternOrder::Soft, UNLIMITED)).unwrap();
        prop_assert!(dai.queries_used <= trivial.queries_used);
    }

    #[test]
    fn larger_budget_never_hurts_gcd_weight(seed in any::<u64>(), small in 1u64..40, extra in 0u64..200) {
        let code = random_linear_code(20, 8, 11).unwrap();
        let rx = received(&code, 1.0, seed);
        let w = |l| {
            let out = gcd(&code, &rx, PatternOrder::Soft, l, StopRule::Budget).unwrap();
            out.tep_soft_weight
        };
        prop_assert!(w(small + extra) <= w(small) + 1e-12);
    }
}

#[test]
fn hamming_order_grand_finds_a_codeword_on_a_zero_llr_word() {
    let code = random_linear_code(12, 6, 1).unwrap();
    let rx = ReceivedWord::from_llrs(vec![0.0; 12]);
    let out = grand(&code, &rx, PatternOrder::Hamming, UNLIMITED).unwrap();
    assert!(out.found && code.is_codeword(&out.codeword_hat));
}
