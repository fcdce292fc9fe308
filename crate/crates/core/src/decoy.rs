//! Decoy-wrapped particle transmission and the eavesdropping check.
//!
//! A sender hides payload particles among randomly prepared Z/X decoys, an
//! optional eavesdropper acts on the sequence in transit, and the sender then
//! has the receiver measure each decoy in its preparation basis and compares
//! outcomes with what was prepared.
//!
//! Decoys are stored together with whatever ancillas an eavesdropper has
//! entangled with them, so measurement statistics include the decoherence an
//! entangling attack causes.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};
use crate::field::{FieldElement, PrimeModulus};
use crate::qudit::{single_prepare, Basis, Particle, SingleQuditState};

/// Default number of decoys per hop.
pub const DEFAULT_DECOY_COUNT: usize = 20;
/// Default error-rate threshold for accepting a hop.
pub const DEFAULT_THRESHOLD: f64 = 0.11;

/// Where a decoy sits and how it was prepared. Kept by the sender only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DecoyRecord {
    pub position: usize,
    pub basis: Basis,
    pub prepared_index: FieldElement,
}

/// A decoy qudit, possibly entangled with eavesdropper ancillas.
///
/// Amplitudes are indexed `i * ancilla_dim + a` with `i` the decoy level.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoyQudit {
    modulus: PrimeModulus,
    ancilla_dim: usize,
    amplitudes: Vec<Complex64>,
}

impl DecoyQudit {
    pub fn from_state(state: &SingleQuditState) -> Self {
        Self {
            modulus: state.modulus(),
            ancilla_dim: 1,
            amplitudes: state.amplitudes().to_vec(),
        }
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    /// Outcome probabilities for measuring the decoy in `basis`, tracing out
    /// the ancillas.
    pub fn probabilities(&self, basis: Basis) -> Vec<f64> {
        let d = self.modulus.get();
        (0..d)
            .map(|k| {
                let bra = basis.vector(self.modulus, k);
                (0..self.ancilla_dim)
                    .map(|a| {
                        bra.iter()
                            .enumerate()
                            .map(|(i, b)| b.conj() * self.amplitudes[i * self.ancilla_dim + a])
                            .sum::<Complex64>()
                            .norm_sqr()
                    })
                    .sum()
            })
            .collect()
    }

    /// Measures in `basis`, collapsing the decoy and its ancillas.
    pub fn measure<R: Rng + ?Sized>(&mut self, basis: Basis, rng: &mut R) -> FieldElement {
        let probs = self.probabilities(basis);
        let total: f64 = probs.iter().sum();
        let mut x = rng.random::<f64>() * total;
        let mut outcome = probs.len() - 1;
        for (k, &p) in probs.iter().enumerate() {
            if x < p {
                outcome = k;
                break;
            }
            x -= p;
        }
        let bra = basis.vector(self.modulus, outcome as u64);
        let scale = 1.0 / probs[outcome].sqrt();
        let ancilla: Vec<Complex64> = (0..self.ancilla_dim)
            .map(|a| {
                bra.iter()
                    .enumerate()
                    .map(|(i, b)| b.conj() * self.amplitudes[i * self.ancilla_dim + a])
                    .sum::<Complex64>()
                    * scale
            })
            .collect();
        for (i, ket) in bra.iter().enumerate() {
            for (a, anc) in ancilla.iter().enumerate() {
                self.amplitudes[i * self.ancilla_dim + a] = ket * anc;
            }
        }
        self.modulus.element(outcome as u64)
    }

    /// Measures in `basis` and re-prepares the observed basis state, dropping
    /// any ancillas.
    pub fn measure_and_resend<R: Rng + ?Sized>(&mut self, basis: Basis, rng: &mut R) -> FieldElement {
        let k = self.measure(basis, rng);
        *self = Self::from_state(&single_prepare(basis, k));
        k
    }

    /// Couples a fresh ancilla `|0>` through `|i>|e> -> |i>|e + i mod d>`.
    pub fn sum_couple(&mut self) {
        let d = self.modulus.get() as usize;
        let new_dim = self.ancilla_dim * d;
        let mut out = vec![Complex64::new(0.0, 0.0); d * new_dim];
        for i in 0..d {
            for a in 0..self.ancilla_dim {
                out[i * new_dim + a * d + i] = self.amplitudes[i * self.ancilla_dim + a];
            }
        }
        self.ancilla_dim = new_dim;
        self.amplitudes = out;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Slot {
    /// Placeholder for a particle of the protocol's joint state.
    Payload(Particle),
    Decoy(DecoyQudit),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSequence {
    modulus: PrimeModulus,
    slots: Vec<Slot>,
}

impl ChannelSequence {
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn payload_count(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Payload(_))).count()
    }

    pub fn payloads(&self) -> Vec<Particle> {
        self.slots
            .iter()
            .filter_map(|s| match s {
                Slot::Payload(p) => Some(*p),
                Slot::Decoy(_) => None,
            })
            .collect()
    }
}

/// Eavesdropper acting on every slot of a sequence in transit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveModel {
    #[default]
    None,
    /// Measure every slot in a uniformly random basis and resend the result.
    InterceptResend,
    /// Entangle each decoy with a fresh ancilla through the SUM coupling.
    #[serde(alias = "entangle")]
    EntangleMeasure,
}

impl std::str::FromStr for EveModel {
    type Err = QssError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(EveModel::None),
            "intercept_resend" => Ok(EveModel::InterceptResend),
            "entangle" | "entangle_measure" => Ok(EveModel::EntangleMeasure),
            other => Err(QssError::Scenario(format!("unknown eve model {other:?}"))),
        }
    }
}

/// A payload particle the eavesdropper measured, with the basis used.
/// The protocol applies the measurement to its joint state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PayloadInterception {
    pub particle: Particle,
    pub basis: Basis,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transmission {
    pub sequence: ChannelSequence,
    pub payload_interceptions: Vec<PayloadInterception>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub tested: usize,
    pub errors: usize,
    pub error_rate: f64,
    pub passed: bool,
}

/// Interleaves `payload` with `decoy_count` random Z/X decoys at random
/// positions. Payload particles keep their relative order.
pub fn insert_decoys<R: Rng + ?Sized>(
    modulus: PrimeModulus,
    payload: &[Particle],
    decoy_count: usize,
    rng: &mut R,
) -> Result<(ChannelSequence, Vec<DecoyRecord>)> {
    if decoy_count == 0 {
        return Err(QssError::NoDecoys);
    }
    let mut is_decoy: Vec<bool> = std::iter::repeat_n(false, payload.len())
        .chain(std::iter::repeat_n(true, decoy_count))
        .collect();
    is_decoy.shuffle(rng);
    let mut payload_iter = payload.iter();
    let mut slots = Vec::with_capacity(is_decoy.len());
    let mut records = Vec::with_capacity(decoy_count);
    for (position, decoy) in is_decoy.into_iter().enumerate() {
        if decoy {
            let basis = Basis::random(rng);
            let prepared_index = modulus.element(rng.random_range(0..modulus.get()));
            slots.push(Slot::Decoy(DecoyQudit::from_state(&single_prepare(
                basis,
                prepared_index,
            ))));
            records.push(DecoyRecord {
                position,
                basis,
                prepared_index,
            });
        } else {
            slots.push(Slot::Payload(*payload_iter.next().expect("payload count")));
        }
    }
    Ok((ChannelSequence { modulus, slots }, records))
}

/// Passes a sequence through the channel under the given eavesdropper.
pub fn transmit<R: Rng + ?Sized>(mut seq: ChannelSequence, eve: EveModel, rng: &mut R) -> Transmission {
    let mut payload_interceptions = Vec::new();
    match eve {
        EveModel::None => {}
        EveModel::InterceptResend => {
            for slot in &mut seq.slots {
                let basis = Basis::random(rng);
                match slot {
                    Slot::Decoy(q) => {
                        q.measure_and_resend(basis, rng);
                    }
                    Slot::Payload(particle) => payload_interceptions.push(PayloadInterception {
                        particle: *particle,
                        basis,
                    }),
                }
            }
        }
        EveModel::EntangleMeasure => {
            for slot in &mut seq.slots {
                if let Slot::Decoy(q) = slot {
                    q.sum_couple();
                }
            }
        }
    }
    Transmission {
        sequence: seq,
        payload_interceptions,
    }
}

/// Measures each recorded decoy in its preparation basis and compares with
/// the prepared index. Passes when the error rate is at most `threshold`.
pub fn check<R: Rng + ?Sized>(
    received: &ChannelSequence,
    records: &[DecoyRecord],
    threshold: f64,
    rng: &mut R,
) -> Result<CheckOutcome> {
    let decoys = received.slots.iter().filter(|s| matches!(s, Slot::Decoy(_))).count();
    if decoys != records.len() {
        return Err(QssError::RecordMismatch(format!(
            "{} records for {} decoy slots",
            records.len(),
            decoys
        )));
    }
    let mut errors = 0;
    for r in records {
        let Some(Slot::Decoy(q)) = received.slots.get(r.position) else {
            return Err(QssError::RecordMismatch(format!("no decoy at position {}", r.position)));
        };
        let mut q = q.clone();
        if q.measure(r.basis, rng) != r.prepared_index {
            errors += 1;
        }
    }
    let tested = records.len();
    let error_rate = if tested == 0 {
        0.0
    } else {
        errors as f64 / tested as f64
    };
    Ok(CheckOutcome {
        tested,
        errors,
        error_rate,
        passed: error_rate <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pm(d: u64) -> PrimeModulus {
        PrimeModulus::new(d).unwrap()
    }

    fn one_decoy(basis: Basis, index: u64, d: u64) -> (ChannelSequence, Vec<DecoyRecord>) {
        let m = pm(d);
        let q = DecoyQudit::from_state(&single_prepare(basis, m.element(index)));
        (
            ChannelSequence {
                modulus: m,
                slots: vec![Slot::Decoy(q)],
            },
            vec![DecoyRecord {
                position: 0,
                basis,
                prepared_index: m.element(index),
            }],
        )
    }

    #[test]
    fn insert_is_deterministic_under_seed() {
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            insert_decoys(pm(7), &[Particle::Q1], 4, &mut rng).unwrap()
        };
        let (seq, records) = run();
        assert_eq!(seq.len(), 5);
        assert_eq!(records.len(), 4);
        assert_eq!(seq.payloads(), vec![Particle::Q1]);
        assert_eq!(run(), (seq, records.clone()));
        let positions: std::collections::BTreeSet<_> = records.iter().map(|r| r.position).collect();
        assert_eq!(positions.len(), 4);
        assert!(positions.iter().all(|&p| p < 5));
    }

    #[test]
    fn zero_decoys_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            insert_decoys(pm(7), &[Particle::Q1], 0, &mut rng),
            Err(QssError::NoDecoys)
        );
    }

    #[test]
    fn basis_choice_is_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let runs = 10_000;
        let z = (0..runs)
            .filter(|_| {
                let (_, r) = insert_decoys(pm(7), &[], 1, &mut rng).unwrap();
                r[0].basis == Basis::Z
            })
            .count();
        assert!((z as f64 / runs as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn no_eavesdropper_leaves_sequence_untouched() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (seq, records) = insert_decoys(pm(7), &[Particle::Q2, Particle::Q3], 100, &mut rng).unwrap();
        let t = transmit(seq.clone(), EveModel::None, &mut rng);
        assert_eq!(t.sequence, seq);
        assert!(t.payload_interceptions.is_empty());
        let outcome = check(&t.sequence, &records, DEFAULT_THRESHOLD, &mut rng).unwrap();
        assert_eq!((outcome.tested, outcome.errors), (100, 0));
        assert!(outcome.passed);
    }

    #[test]
    fn matching_basis_intercept_is_invisible() {
        let (seq, _) = one_decoy(Basis::Z, 2, 7);
        let Slot::Decoy(mut q) = seq.slots[0].clone() else {
            unreachable!()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(q.measure_and_resend(Basis::Z, &mut rng).value(), 2);
        assert_eq!(Slot::Decoy(q), seq.slots[0]);
    }

    #[test]
    fn mismatched_intercept_error_probability() {
        // X decoy measured in Z by Eve: the X check then errs with 1 - 1/d.
        let d = 7;
        let (seq, _) = one_decoy(Basis::X, 4, d);
        let Slot::Decoy(orig) = &seq.slots[0] else {
            unreachable!()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10_000;
        let mut errors = 0;
        for _ in 0..n {
            let mut q = orig.clone();
            q.measure_and_resend(Basis::Z, &mut rng);
            if q.measure(Basis::X, &mut rng).value() != 4 {
                errors += 1;
            }
        }
        let rate = errors as f64 / n as f64;
        assert!((rate - (1.0 - 1.0 / d as f64)).abs() < 0.02, "rate {rate}");
        // the exact probabilities after a Z collapse are uniform in X
        let mut q = orig.clone();
        q.measure_and_resend(Basis::Z, &mut rng);
        for p in q.probabilities(Basis::X) {
            assert!((p - 1.0 / d as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn sum_coupling_dephases_x_but_not_z() {
        let m = pm(5);
        for k in 0..5 {
            let mut z = DecoyQudit::from_state(&single_prepare(Basis::Z, m.element(k)));
            z.sum_couple();
            assert_eq!(z.ancilla_dim(), 5);
            assert!((z.probabilities(Basis::Z)[k as usize] - 1.0).abs() < 1e-12);
            let mut x = DecoyQudit::from_state(&single_prepare(Basis::X, m.element(k)));
            x.sum_couple();
            for p in x.probabilities(Basis::X) {
                assert!((p - 0.2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn check_rejects_mismatched_records() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (seq, mut records) = insert_decoys(pm(5), &[Particle::Q1], 3, &mut rng).unwrap();
        records.pop();
        assert!(matches!(
            check(&seq, &records, 0.11, &mut rng),
            Err(QssError::RecordMismatch(_))
        ));
        let (seq, mut records) = insert_decoys(pm(5), &[Particle::Q1], 3, &mut rng).unwrap();
        let payload_pos = seq.slots().iter().position(|s| matches!(s, Slot::Payload(_))).unwrap();
        records[0].position = payload_pos;
        assert!(matches!(
            check(&seq, &records, 0.11, &mut rng),
            Err(QssError::RecordMismatch(_))
        ));
    }

    #[test]
    fn intercept_resend_reports_payload_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (seq, _) = insert_decoys(pm(7), &[Particle::Q2, Particle::Q3], 5, &mut rng).unwrap();
        let t = transmit(seq, EveModel::InterceptResend, &mut rng);
        let hit: Vec<_> = t.payload_interceptions.iter().map(|p| p.particle).collect();
        assert_eq!(hit, vec![Particle::Q2, Particle::Q3]);
    }

    #[test]
    fn eve_model_parsing() {
        assert_eq!("none".parse::<EveModel>().unwrap(), EveModel::None);
        assert_eq!(
            "intercept_resend".parse::<EveModel>().unwrap(),
            EveModel::InterceptResend
        );
        assert_eq!("entangle".parse::<EveModel>().unwrap(), EveModel::EntangleMeasure);
        assert!("bogus".parse::<EveModel>().is_err());
    }
}
