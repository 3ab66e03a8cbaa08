mod common;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config() -> Config {
    Config { cases: 200, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

fn ok(c: common::Check) -> Result<(), TestCaseError> {
    c.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn edge_normalization(seed in any::<u64>()) {
        ok(common::edge_normalization(seed))?;
    }

    #[test]
    fn graph_complement(seed in any::<u64>()) {
        ok(common::graph_complement(seed))?;
    }

    #[test]
    fn classical_no_signaling(seed in any::<u64>()) {
        ok(common::classical_no_signaling(seed))?;
    }

    #[test]
    fn hierarchy_oracles(seed in any::<u64>()) {
        ok(common::hierarchy_oracles(seed))?;
    }

    #[test]
    fn sandwich(seed in any::<u64>()) {
        ok(common::sandwich(seed))?;
    }

    #[test]
    fn abl_normalization(seed in any::<u64>()) {
        ok(common::abl_normalization(seed))?;
    }
}

#[test]
fn corpus() {
    common::corpus_models().unwrap();
    common::corpus_hierarchy().unwrap();
    common::corpus_sandwich().unwrap();
    common::corpus_abl().unwrap();
}
