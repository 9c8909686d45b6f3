//! Property checks for the argument grammar and the reproducibility
//! contract: identical invocations must render byte-identical output.

use clap::Parser;
use proptest::prelude::*;
use spectra_cli::args::Cli;
use spectra_cli::commands::{dispatch, parse_word};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn word_grammars_agree(digits in proptest::collection::vec(1u64..=9, 1..12)) {
        let strings: Vec<String> = digits.iter().map(u64::to_string).collect();
        let commas = strings.join(",");
        let contiguous = strings.concat();
        prop_assert_eq!(parse_word(&commas).unwrap(), digits.clone());
        prop_assert_eq!(parse_word(&contiguous).unwrap(), digits);
    }

    #[test]
    fn identical_invocations_render_identical_bytes(
        digits in proptest::collection::vec(1u64..=4, 1..6),
        csv in any::<bool>(),
    ) {
        let word = digits
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        let format = if csv { "csv" } else { "json" };
        let args = [
            "spectra",
            "--tol",
            "1e-6",
            "--format",
            format,
            "markov-word",
            &word,
        ];
        let first = dispatch(&Cli::try_parse_from(args).unwrap()).unwrap();
        let second = dispatch(&Cli::try_parse_from(args).unwrap()).unwrap();
        prop_assert_eq!(first.text.clone(), second.text);
        prop_assert_eq!(first.exit, 0);
        if csv {
            prop_assert!(first.text.starts_with("# tol=1/1000000 "));
        } else {
            let v: serde_json::Value = serde_json::from_str(&first.text).unwrap();
            prop_assert_eq!(v["command"].as_str(), Some("markov-word"));
            prop_assert_eq!(v["config"]["tol"].as_str(), Some("1/1000000"));
        }
    }
}
