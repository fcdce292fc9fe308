// Everyone except the recovering participant pools their bundles. Without
// the missing contribution their guess is no better than chance.
//
//     cargo run --example collusion

use qss::fixture;
use qss::protocol::{collusion_attack, prepare, ForcedRandomness};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = fixture::dealer_config();
    let set = fixture::authorized_set();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trials = 10_000;
    let mut hits = 0;
    for i in 0..trials {
        let prep = prepare(&cfg, &set, &ForcedRandomness::default(), &mut rng).unwrap();
        let o = collusion_attack(&prep.bundles(&set), cfg.secrets[0], cfg.secrets[1]);
        if i < 3 {
            let pair = |(a, b)| format!("({a},{b})");
            println!(
                "guess {} truth {} missing {}",
                pair(o.guess),
                pair(o.truth),
                pair(o.missing)
            );
        }
        hits += usize::from(o.recovered_both());
    }
    println!(
        "coalition recovered (s1, s2) in {hits} of {trials} runs; chance is 1/49 = {:.4}",
        1.0 / 49.0
    );
}
