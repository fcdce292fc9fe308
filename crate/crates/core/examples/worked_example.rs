// Walks the worked example over F_7 one step at a time with the protocol's
// step functions, printing each GHZ label.
//
//     cargo run --example worked_example

use qss::fixture;
use qss::protocol::{dealer_correction, final_step, participant_step, prepare, verify, ParticipantState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = fixture::dealer_config();
    let set = fixture::authorized_set();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let prep = prepare(&cfg, &set, &fixture::forced_randomness(), &mut rng).expect("example is authorized");

    println!("shares s      {}", prep.shares_s);
    println!("shares t      {}", prep.shares_t);
    println!("lambda        {}", prep.lambda);
    println!("commitments   {:?}", prep.commitments.as_array().map(|h| h.value()));

    let q1 = cfg.modulus().element(fixture::Q1);
    let members: Vec<ParticipantState> = prep
        .bundles(&set)
        .into_iter()
        .enumerate()
        .map(|(j, bundle)| ParticipantState {
            bundle,
            q1: (j == 0).then_some(q1),
        })
        .collect();

    let mut label = prep.initial;
    println!("dealer prepares   {label}");
    for m in &members {
        label = participant_step(label, m);
        println!("{} applies {}  {label}", m.bundle.participant, m.forward_op());
    }
    label = dealer_correction(label, prep.initial, cfg.secrets[1], cfg.secrets[2]);
    println!("dealer corrects   {label}");
    label = final_step(label, &members[0]);
    println!("P1 unmasks        {label}");

    let result = verify(label, &prep.commitments);
    println!("recovered {label}, hash checks {:?}", result.verified);
    assert!(result.accepted());
}
