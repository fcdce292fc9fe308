// Applies generalized Pauli operators to GHZ states as dense d^3 vectors and
// compares with the label-shift rule.
//
//     cargo run --example ghz_pauli

use qss::field::PrimeModulus;
use qss::qudit::{
    apply_on_particle, ghz_state, identify_label, label_apply, pauli_sweep_exhaustive, phase_deviation, GhzLabel,
    Particle, PauliOp,
};

fn main() {
    let d = PrimeModulus::new(5).unwrap();
    let label = GhzLabel::from_values(d, [1, 2, 3]);
    let op = PauliOp::from_values(d, 2, 4);
    let state = ghz_state(label);

    for particle in Particle::ALL {
        let dense = apply_on_particle(&state, particle, op).unwrap();
        let predicted = label_apply(label, particle, op);
        println!(
            "{op} on {particle:?}: {label} -> {predicted}, dense state is GHZ {}, deviation {:.1e}",
            identify_label(&dense, 1e-9).map_or("<none>".to_string(), |l| l.to_string()),
            phase_deviation(&ghz_state(predicted), &dense)
        );
    }

    for p in [3, 5, 7] {
        let r = pauli_sweep_exhaustive(PrimeModulus::new(p).unwrap());
        println!("d={p}: {} cases, max deviation {:.1e}", r.cases, r.max_deviation);
    }
}
