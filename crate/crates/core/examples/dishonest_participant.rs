// A participant substitutes one of its share components. The recovered
// triple moves and the hash commitments catch it.
//
//     cargo run --example dishonest_participant

use qss::fixture;
use qss::protocol::{run_protocol, RunOptions, Tamper};

fn main() {
    let cfg = fixture::dealer_config();
    let set = fixture::authorized_set();
    for spec in ["P2.s=+1", "P3.t=-2", "P1.lambda=0", "P4.s=+3"] {
        let tamper: Tamper = spec.parse().unwrap();
        let opts = RunOptions {
            forced: fixture::forced_randomness(),
            tamper: Some(tamper),
            ..RunOptions::default()
        };
        let (_, r) = run_protocol(&cfg, &set, &opts, 0).unwrap();
        let [a, b, c] = r.recovered.unwrap();
        println!(
            "{spec:<12} recovered ({a},{b},{c}) checks {:?} accepted {}",
            r.verified,
            r.accepted()
        );
    }
    // P4's recombination coefficient is 0 for the full set, so its s and t
    // never touch the state; tampering with them changes nothing.
}
