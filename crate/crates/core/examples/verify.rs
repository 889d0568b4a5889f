//! Runs the self-check against the reference scenario, or against the
//! scenario file given as the first argument.

use assettax::scenario::{parse_scenario, reference_scenario};
use assettax::verify::{verify, DEFAULT_SEED};

fn main() {
    let scenario = match std::env::args().nth(1) {
        Some(path) => parse_scenario(&path).unwrap_or_else(|e| {
            eprintln!("{e}");
            std::process::exit(2);
        }),
        None => reference_scenario(),
    };
    let list = verify(&scenario, DEFAULT_SEED);
    print!("{}", list.to_text());
    if !list.all_passed() {
        std::process::exit(3);
    }
}
