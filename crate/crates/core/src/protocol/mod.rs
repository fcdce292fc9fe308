//! The dealer/participant scheme.
//!
//! The dealer encodes `s1` and `s2` with the span program, sends each member
//! of the chosen authorized set its `(lambda_j, s_j, t_j)` bundle, and starts
//! a GHZ state. Particle `Q1` then travels through the members, each applying
//! `U(lambda_j s_j, lambda_j t_j)` (the first member masks with a random
//! `U(q1, q1)` instead). The dealer strips its initial label from `Q2`/`Q3`
//! and writes `s3` into the third slot, and the first member removes its mask
//! while adding its own share. The final GHZ label is `(s1, s2, s3)`, checked
//! against the published hash commitments.

mod attack;
mod hash;
mod run;
mod transcript;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};
use crate::field::{FieldElement, FieldVector, PrimeModulus};
use crate::msp::{
    build_shares, fmt_set, masking_vector_with_tail, random_masking_vector, recombination_vector, validate_msp,
    AccessStructure, MaskingVector, Msp, ParticipantId, ShareBundle,
};
use crate::qudit::{label_apply, GhzLabel, Particle, PauliOp};

pub use attack::{collusion_attack, Adjust, CollusionOutcome, ShareComponent, Tamper};
pub use hash::{hash_fe, secret_context};
pub use run::{derive_seed, run_batch, run_protocol, Backend, JointState, RunOptions};
pub use transcript::{Event, Hop, Transcript};

/// Everything the dealer fixes before a run.
#[derive(Clone, Debug)]
pub struct DealerConfig {
    pub secrets: [FieldElement; 3],
    pub msp: Msp,
    pub gamma: AccessStructure,
    pub decoy_count: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl DealerConfig {
    /// Validates that the secrets live in the program's field and that the
    /// program realizes `gamma`.
    pub fn new(
        secrets: [FieldElement; 3],
        msp: Msp,
        gamma: AccessStructure,
        decoy_count: usize,
        threshold: f64,
        seed: u64,
    ) -> Result<Self> {
        let d = msp.modulus();
        if let Some(s) = secrets.iter().find(|s| s.modulus() != d) {
            return Err(QssError::ModulusMismatch {
                left: d.get(),
                right: s.modulus().get(),
            });
        }
        if decoy_count == 0 {
            return Err(QssError::NoDecoys);
        }
        if !(0.0..=1.0).contains(&threshold) {
            return Err(QssError::Scenario(format!("threshold {threshold} outside [0, 1]")));
        }
        let report = validate_msp(&msp, &gamma)?;
        if !report.is_valid() {
            return Err(QssError::InvalidMsp(format!(
                "span program does not realize the access structure\n{report}"
            )));
        }
        Ok(Self {
            secrets,
            msp,
            gamma,
            decoy_count,
            threshold,
            seed,
        })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.msp.modulus()
    }
}

/// Randomness the caller may pin instead of drawing it from the rng.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcedRandomness {
    #[serde(default)]
    pub initial_label: Option<[u64; 3]>,
    /// Full masking vector for `s1`; its first entry must equal `s1`.
    #[serde(default)]
    pub rho1: Option<Vec<u64>>,
    #[serde(default)]
    pub rho2: Option<Vec<u64>>,
    #[serde(default)]
    pub q1: Option<u64>,
}

/// `H(s1), H(s2), H(s3)` as published by the dealer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HashCommitments {
    pub h1: FieldElement,
    pub h2: FieldElement,
    pub h3: FieldElement,
}

impl HashCommitments {
    pub fn commit(secrets: &[FieldElement; 3]) -> Self {
        Self {
            h1: hash_fe(secrets[0], &secret_context(1)),
            h2: hash_fe(secrets[1], &secret_context(2)),
            h3: hash_fe(secrets[2], &secret_context(3)),
        }
    }

    pub fn as_array(&self) -> [FieldElement; 3] {
        [self.h1, self.h2, self.h3]
    }
}

/// The dealer's output of the preparation phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preparation {
    pub initial: GhzLabel,
    pub rho1: MaskingVector,
    pub rho2: MaskingVector,
    pub shares_s: FieldVector,
    pub shares_t: FieldVector,
    pub lambda: FieldVector,
    pub commitments: HashCommitments,
}

impl Preparation {
    /// One bundle per member of the authorized set, in set order.
    pub fn bundles(&self, set: &[ParticipantId]) -> Vec<ShareBundle> {
        set.iter()
            .enumerate()
            .map(|(j, p)| ShareBundle {
                participant: p.clone(),
                s_component: self.shares_s.get(j),
                t_component: self.shares_t.get(j),
                lambda_component: self.lambda.get(j),
            })
            .collect()
    }
}

fn forced_masking(secret: FieldElement, len: usize, forced: &[u64], which: &str) -> Result<MaskingVector> {
    if forced.len() != len || forced.first() != Some(&secret.value()) {
        return Err(QssError::Scenario(format!(
            "forced {which} must have length {len} and start with the secret {secret}"
        )));
    }
    masking_vector_with_tail(secret, &forced[1..])
}

/// Dealer preparation for the authorized set `set`, whose order fixes who
/// plays the first participant.
pub fn prepare<R: Rng + ?Sized>(
    cfg: &DealerConfig,
    set: &[ParticipantId],
    forced: &ForcedRandomness,
    rng: &mut R,
) -> Result<Preparation> {
    let d = cfg.modulus();
    if set.is_empty() || !cfg.gamma.is_authorized(set) {
        return Err(QssError::NotAuthorized(fmt_set(set)));
    }
    let rows = cfg.msp.rows_for(set)?;
    if rows.len() != set.len() {
        return Err(QssError::InvalidMsp(
            "each member of the chosen set must own exactly one row".into(),
        ));
    }
    let initial = match forced.initial_label {
        Some(v) => {
            if v.iter().any(|&x| x >= d.get()) {
                return Err(QssError::Scenario(format!("forced initial label {v:?} outside F_{d}")));
            }
            GhzLabel::from_values(d, v)
        }
        None => GhzLabel::from_values(d, [0; 3].map(|_| rng.random_range(0..d.get()))),
    };
    let l = cfg.msp.cols();
    let rho1 = match &forced.rho1 {
        Some(v) => forced_masking(cfg.secrets[0], l, v, "rho1")?,
        None => random_masking_vector(cfg.secrets[0], l, rng)?,
    };
    let rho2 = match &forced.rho2 {
        Some(v) => forced_masking(cfg.secrets[1], l, v, "rho2")?,
        None => random_masking_vector(cfg.secrets[1], l, rng)?,
    };
    Ok(Preparation {
        initial,
        shares_s: build_shares(&cfg.msp, set, &rho1)?,
        shares_t: build_shares(&cfg.msp, set, &rho2)?,
        lambda: recombination_vector(&cfg.msp, set)?,
        rho1,
        rho2,
        commitments: HashCommitments::commit(&cfg.secrets),
    })
}

/// A participant's private view during recovery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParticipantState {
    pub bundle: ShareBundle,
    /// Only the first participant holds a mask.
    pub q1: Option<FieldElement>,
}

impl ParticipantState {
    /// Operator this participant applies to `Q1` on its forward pass.
    pub fn forward_op(&self) -> PauliOp {
        let b = &self.bundle;
        match self.q1 {
            Some(q) => PauliOp { alpha: q, beta: q },
            None => PauliOp {
                alpha: b.lambda_component * b.s_component,
                beta: b.lambda_component * b.t_component,
            },
        }
    }

    /// Operator the first participant applies when `Q1` returns:
    /// `U(lambda_1 s_1 - q1, lambda_1 t_1 - q1)`.
    pub fn final_op(&self) -> PauliOp {
        let b = &self.bundle;
        let q = self.q1.unwrap_or_else(|| b.s_component.modulus().zero());
        PauliOp {
            alpha: b.lambda_component * b.s_component - q,
            beta: b.lambda_component * b.t_component - q,
        }
    }
}

pub fn participant_step(label: GhzLabel, p: &ParticipantState) -> GhzLabel {
    label_apply(label, Particle::Q1, p.forward_op())
}

/// The dealer's two corrections: `U(-u1, u2)` on `Q2`, then
/// `U(0, u3 + s2 - s3)` on `Q3`.
pub fn dealer_ops(initial: GhzLabel, s2: FieldElement, s3: FieldElement) -> [(Particle, PauliOp); 2] {
    let zero = initial.modulus().zero();
    [
        (
            Particle::Q2,
            PauliOp {
                alpha: -initial.u1,
                beta: initial.u2,
            },
        ),
        (
            Particle::Q3,
            PauliOp {
                alpha: zero,
                beta: initial.u3 + s2 - s3,
            },
        ),
    ]
}

pub fn dealer_correction(label: GhzLabel, initial: GhzLabel, s2: FieldElement, s3: FieldElement) -> GhzLabel {
    dealer_ops(initial, s2, s3)
        .into_iter()
        .fold(label, |l, (particle, op)| label_apply(l, particle, op))
}

pub fn final_step(label: GhzLabel, first: &ParticipantState) -> GhzLabel {
    label_apply(label, Particle::Q1, first.final_op())
}

/// Outcome of the recovery phase as seen by the first participant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoveryResult {
    /// `None` when the run aborted before measurement.
    pub recovered: Option<[FieldElement; 3]>,
    pub verified: [bool; 3],
    pub aborted_at: Option<String>,
}

impl RecoveryResult {
    pub fn accepted(&self) -> bool {
        self.aborted_at.is_none() && self.verified.iter().all(|&v| v)
    }

    pub fn aborted(hop: String) -> Self {
        Self {
            recovered: None,
            verified: [false; 3],
            aborted_at: Some(hop),
        }
    }
}

/// Compares `H(u_i')` with the published commitments.
pub fn verify(label: GhzLabel, commitments: &HashCommitments) -> RecoveryResult {
    let recovered = [label.u1, label.u2, label.u3];
    let published = commitments.as_array();
    let verified = std::array::from_fn(|i| hash_fe(recovered[i], &secret_context(i + 1)) == published[i]);
    RecoveryResult {
        recovered: Some(recovered),
        verified,
        aborted_at: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::qudit::{apply_on_particle, ghz_state, phase_deviation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l7(v: [u64; 3]) -> GhzLabel {
        GhzLabel::from_values(fixture::modulus(), v)
    }

    fn member(id: &str, lambda: u64, s: u64, t: u64, q1: Option<u64>) -> ParticipantState {
        let m = fixture::modulus();
        ParticipantState {
            bundle: ShareBundle {
                participant: ParticipantId::from(id),
                s_component: m.element(s),
                t_component: m.element(t),
                lambda_component: m.element(lambda),
            },
            q1: q1.map(|q| m.element(q)),
        }
    }

    #[test]
    fn example_preparation() {
        let cfg = fixture::dealer_config();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let prep = prepare(
            &cfg,
            &fixture::authorized_set(),
            &fixture::forced_randomness(),
            &mut rng,
        )
        .unwrap();
        let v = |x: &FieldVector| x.as_slice().to_vec();
        assert_eq!(prep.initial, l7([6, 1, 3]));
        assert_eq!(v(prep.rho1.as_vector()), vec![2, 1, 0, 5]);
        assert_eq!(v(prep.rho2.as_vector()), vec![4, 3, 5, 1]);
        assert_eq!(v(&prep.shares_s), vec![5, 3, 5, 5]);
        assert_eq!(v(&prep.shares_t), vec![6, 2, 2, 5]);
        assert_eq!(v(&prep.lambda), vec![3, 3, 4, 0]);
        let m = fixture::modulus();
        assert_eq!(
            prep.commitments,
            HashCommitments {
                h1: hash_fe(m.element(2), "s1"),
                h2: hash_fe(m.element(4), "s2"),
                h3: hash_fe(m.element(6), "s3"),
            }
        );
    }

    #[test]
    fn zero_secrets_are_allowed() {
        let m = fixture::modulus();
        let base = fixture::dealer_config();
        let cfg = DealerConfig::new([m.zero(); 3], base.msp, base.gamma, 20, 0.11, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let prep = prepare(&cfg, &fixture::authorized_set(), &ForcedRandomness::default(), &mut rng).unwrap();
        assert_eq!(prep.rho1.secret(), m.zero());
    }

    #[test]
    fn unauthorized_set_is_rejected() {
        let cfg = fixture::dealer_config();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let set = vec![ParticipantId::from("P2"), ParticipantId::from("P4")];
        assert!(matches!(
            prepare(&cfg, &set, &ForcedRandomness::default(), &mut rng),
            Err(QssError::NotAuthorized(_))
        ));
    }

    #[test]
    fn participant_step_examples() {
        assert_eq!(
            participant_step(l7([6, 1, 3]), &member("P1", 3, 5, 6, Some(5))),
            l7([4, 6, 1])
        );
        assert_eq!(
            participant_step(l7([4, 6, 1]), &member("P2", 3, 3, 2, None)),
            l7([6, 5, 0])
        );
        assert_eq!(
            participant_step(l7([5, 6, 1]), &member("P4", 0, 5, 5, None)),
            l7([5, 6, 1])
        );
    }

    #[test]
    fn dealer_correction_examples() {
        let m = fixture::modulus();
        assert_eq!(
            dealer_correction(l7([5, 6, 1]), l7([6, 1, 3]), m.element(4), m.element(6)),
            l7([6, 5, 0])
        );
        let l = l7([3, 2, 5]);
        assert_eq!(dealer_correction(l, l7([0, 0, 0]), m.element(4), m.element(4)), l);
    }

    #[test]
    fn dealer_correction_third_slot_rule_matches_dense() {
        let m = crate::field::PrimeModulus::new(3).unwrap();
        for label in GhzLabel::all(m) {
            for initial in GhzLabel::all(m) {
                for (s2, s3) in [(0, 1), (2, 2), (1, 0)] {
                    let (s2, s3) = (m.element(s2), m.element(s3));
                    let out = dealer_correction(label, initial, s2, s3);
                    assert_eq!(out.u3, label.u3 - initial.u3 - s2 + s3);
                    let mut dense = ghz_state(label);
                    for (particle, op) in dealer_ops(initial, s2, s3) {
                        dense = apply_on_particle(&dense, particle, op).unwrap();
                    }
                    assert!(phase_deviation(&ghz_state(out), &dense) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn final_step_examples() {
        assert_eq!(
            final_step(l7([6, 5, 0]), &member("P1", 3, 5, 6, Some(5))),
            l7([2, 4, 6])
        );
        let l = l7([1, 2, 3]);
        assert_eq!(final_step(l, &member("P1", 0, 0, 0, Some(0))), l);
    }

    #[test]
    fn verify_examples() {
        let m = fixture::modulus();
        let good = HashCommitments::commit(&[m.element(2), m.element(4), m.element(6)]);
        let r = verify(l7([2, 4, 6]), &good);
        assert_eq!(r.verified, [true; 3]);
        assert!(r.accepted());
        // commitments to (3,5,0): H_s1(3)=6 != 2, H_s2(5)=5 != 3, H_s3(0)=6 != 0
        let wrong = HashCommitments::commit(&[m.element(3), m.element(5), m.element(0)]);
        assert_eq!(verify(l7([2, 4, 6]), &wrong).verified, [false; 3]);
    }
}
