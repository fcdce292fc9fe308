// Shares two secrets with the example span program, reconstructs them with
// recombination vectors, and audits every maximal unauthorized set.
//
//     cargo run --example span_program

use qss::fixture;
use qss::msp::{
    build_shares, privacy_audit, random_masking_vector, recombination_vector, reconstruct, validate_msp,
    DEFAULT_ENUMERATION_BOUND,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let msp = fixture::msp();
    let gamma = fixture::access_structure();
    let d = msp.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let report = validate_msp(&msp, &gamma).expect("same participants");
    println!("{report}\n");

    let secret = d.element(5);
    let rho = random_masking_vector(secret, msp.cols(), &mut rng).expect("non-empty");
    println!("masking vector {}", rho.as_vector());
    for set in gamma.authorized_sets() {
        let shares = build_shares(&msp, set, &rho).expect("authorized");
        let lambda = recombination_vector(&msp, set).expect("authorized");
        let got = reconstruct(&shares, &lambda).expect("same length");
        println!(
            "{:<16} shares {shares:<12} lambda {lambda:<12} -> {got}",
            qss::msp::fmt_set(set)
        );
    }

    println!();
    for set in gamma.maximal_unauthorized() {
        let sweep = msp
            .sweeping_vector(&set)
            .expect("known participants")
            .expect("unauthorized");
        let private = privacy_audit(&msp, &set, DEFAULT_ENUMERATION_BOUND).expect("small field");
        println!(
            "{:<10} sweeping {}  share distribution independent of secret: {private}",
            qss::msp::fmt_set(&set),
            sweep.h
        );
    }
}
