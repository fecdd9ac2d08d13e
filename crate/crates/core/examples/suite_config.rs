//! Builds the canonical suite configuration, round-trips it through JSON and
//! prints it. `cargo run --example suite_config > suites/paper_full.json`
//! regenerates the shipped file.

use pdo_lab::suite::{canonical_suite, parse_config};

fn main() {
    let cfg = canonical_suite();
    let text = serde_json::to_string_pretty(&cfg).expect("serializable");
    assert_eq!(parse_config(&text).expect("valid config"), cfg);
    println!("{text}");
}
