// Loads a scenario file, runs it and prints the JSONL trace, the same output
// as `qss run --scenario <path>`.
//
//     cargo run --example scenario_trace -- scenarios/honest.json

use std::path::PathBuf;

use qss::cli::{write_trace, Exit, Scenario};
use qss::protocol::run_protocol;

fn main() {
    let path = std::env::args()
        .nth(1)
        .filter(|a| a.ends_with(".json"))
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            [env!("CARGO_MANIFEST_DIR"), "scenarios", "example.json"]
                .iter()
                .collect()
        });
    let scenario = Scenario::from_path(&path).unwrap();
    let loaded = scenario.load().unwrap();
    let (transcript, result) =
        run_protocol(&loaded.config, &loaded.chosen_set, &loaded.options, scenario.seed).unwrap();
    let mut trace = Vec::new();
    write_trace(&transcript, &mut trace).unwrap();
    print!("{}", String::from_utf8(trace).unwrap());
    eprintln!("exit code would be {}", Exit::from_result(&result).code());
}
