// Sends decoy-wrapped particles past the three eavesdropper models and shows
// the measured error rates and what they do to full protocol runs.
//
//     cargo run --example eavesdropping

use qss::decoy::{check, insert_decoys, transmit, EveModel, DEFAULT_THRESHOLD};
use qss::field::PrimeModulus;
use qss::fixture;
use qss::protocol::{run_batch, RunOptions};
use qss::qudit::Particle;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let d = PrimeModulus::new(7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for eve in [EveModel::None, EveModel::InterceptResend, EveModel::EntangleMeasure] {
        let (seq, records) = insert_decoys(d, &[Particle::Q1], 10_000, &mut rng).unwrap();
        let sent = transmit(seq, eve, &mut rng);
        let outcome = check(&sent.sequence, &records, DEFAULT_THRESHOLD, &mut rng).unwrap();
        println!(
            "{eve:?}: {} errors in {} decoys, rate {:.4}",
            outcome.errors, outcome.tested, outcome.error_rate
        );
    }
    println!(
        "closed form for intercept-resend: (1/2)(1 - 1/d) = {:.4}",
        0.5 * (1.0 - 1.0 / 7.0)
    );

    let cfg = fixture::dealer_config();
    for eve in [EveModel::InterceptResend, EveModel::EntangleMeasure] {
        let opts = RunOptions {
            eve,
            ..RunOptions::default()
        };
        let runs = run_batch(&cfg, &fixture::authorized_set(), &opts, 11, 1000).unwrap();
        let aborted = runs.iter().filter(|(_, r)| r.aborted_at.is_some()).count();
        println!(
            "{eve:?}: {aborted} of 1000 runs aborted with {} decoys per hop",
            cfg.decoy_count
        );
    }
}
