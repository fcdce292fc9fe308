use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::attack::Tamper;
use super::transcript::{Event, Hop, Transcript};
use super::{dealer_ops, prepare, verify, DealerConfig, ForcedRandomness, ParticipantState, RecoveryResult};
use crate::decoy::{check, insert_decoys, transmit, EveModel};
use crate::error::{QssError, Result};
use crate::msp::ParticipantId;
use crate::qudit::{
    apply_on_particle, ghz_joint_measure, ghz_state, identify_label, label_apply, measure_particle, Basis, DenseState,
    GhzLabel, Particle, PauliOp,
};

const LABEL_TOLERANCE: f64 = 1e-9;

/// How the joint three-qudit state is tracked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// GHZ labels only, falling back to amplitudes after an interception.
    #[default]
    Symbolic,
    /// Full `d^3` amplitudes throughout.
    Dense,
}

#[derive(Clone, Debug, PartialEq)]
pub enum JointState {
    Label(GhzLabel),
    Dense(DenseState),
}

impl JointState {
    pub fn new(initial: GhzLabel, backend: Backend) -> Self {
        match backend {
            Backend::Symbolic => JointState::Label(initial),
            Backend::Dense => JointState::Dense(ghz_state(initial)),
        }
    }

    pub fn apply(&mut self, particle: Particle, op: PauliOp) {
        match self {
            JointState::Label(l) => *l = label_apply(*l, particle, op),
            JointState::Dense(s) => *s = apply_on_particle(s, particle, op).expect("same modulus"),
        }
    }

    pub fn label(&self) -> Option<GhzLabel> {
        match self {
            JointState::Label(l) => Some(*l),
            JointState::Dense(s) => identify_label(s, LABEL_TOLERANCE),
        }
    }

    /// An eavesdropper measures one particle and forwards the collapsed state.
    pub fn intercept<R: Rng + ?Sized>(&mut self, particle: Particle, basis: Basis, rng: &mut R) {
        let dense = match self {
            JointState::Label(l) => ghz_state(*l),
            JointState::Dense(s) => s.clone(),
        };
        let (_, collapsed) = measure_particle(&dense, particle, basis, rng);
        *self = JointState::Dense(collapsed);
    }

    /// GHZ-basis joint measurement.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> (GhzLabel, f64) {
        match self {
            JointState::Label(l) => (*l, 1.0),
            JointState::Dense(s) => ghz_joint_measure(s, rng),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub eve: EveModel,
    pub tamper: Option<Tamper>,
    pub forced: ForcedRandomness,
    pub backend: Backend,
}

struct Run<'a> {
    cfg: &'a DealerConfig,
    eve: EveModel,
    rng: ChaCha8Rng,
    state: JointState,
    transcript: Transcript,
    hops: usize,
}

impl Run<'_> {
    fn record_label(&mut self, actor: &str, step: &str) {
        let label = self.state.label();
        debug!(
            "{actor} {step}: {}",
            label.map_or("<not a GHZ state>".into(), |l| l.to_string())
        );
        self.transcript.push(Event::LabelAfterStep {
            actor: actor.to_owned(),
            step: step.to_owned(),
            label,
        });
    }

    /// Sends `carries` from `from` to `to` wrapped in fresh decoys. Returns
    /// the hop id if the check failed.
    fn hop(&mut self, from: &str, to: &str, carries: &[Particle]) -> Result<Option<String>> {
        self.hops += 1;
        let hop = Hop {
            index: self.hops,
            from: from.to_owned(),
            to: to.to_owned(),
            carries: carries.to_vec(),
        };
        let d = self.cfg.modulus();
        let (seq, records) = insert_decoys(d, carries, self.cfg.decoy_count, &mut self.rng)?;
        let sent = transmit(seq, self.eve, &mut self.rng);
        for hit in &sent.payload_interceptions {
            self.state.intercept(hit.particle, hit.basis, &mut self.rng);
        }
        let outcome = check(&sent.sequence, &records, self.cfg.threshold, &mut self.rng)?;
        debug!("hop {}: {} errors of {}", hop.id(), outcome.errors, outcome.tested);
        let failed = (!outcome.passed).then(|| hop.id());
        self.transcript.push(Event::DecoyCheck { hop, outcome });
        Ok(failed)
    }
}

/// Executes one full run of the scheme for the authorized set `set` (its
/// first member plays the role of the recovering participant).
///
/// Order: preparation, hop dealer->P1, P1 masks, hops P1->P2->..->Pm with
/// each member's operator, dealer corrections on Q2/Q3, hop dealer->P1 with
/// Q2/Q3, hop Pm->P1 with Q1, P1's final operator, GHZ measurement and hash
/// verification. The run stops at the first failed decoy check.
pub fn run_protocol(
    cfg: &DealerConfig,
    set: &[ParticipantId],
    opts: &RunOptions,
    seed: u64,
) -> Result<(Transcript, RecoveryResult)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prep = prepare(cfg, set, &opts.forced, &mut rng)?;
    let mut bundles = prep.bundles(set);
    if let Some(t) = &opts.tamper {
        let b = bundles
            .iter_mut()
            .find(|b| b.participant == t.participant)
            .ok_or_else(|| QssError::UnknownParticipant(t.participant.to_string()))?;
        t.apply(b);
    }
    let d = cfg.modulus();
    let q1 = match opts.forced.q1 {
        Some(q) if q >= d.get() => {
            return Err(QssError::Scenario(format!("forced q1 {q} outside F_{d}")));
        }
        Some(q) => d.element(q),
        None => d.element(rng.random_range(0..d.get())),
    };
    let members: Vec<ParticipantState> = bundles
        .into_iter()
        .enumerate()
        .map(|(j, bundle)| ParticipantState {
            bundle,
            q1: (j == 0).then_some(q1),
        })
        .collect();
    let names: Vec<&str> = set.iter().map(ParticipantId::as_str).collect();
    let first = names[0];
    let last = names[names.len() - 1];

    let mut run = Run {
        cfg,
        eve: opts.eve,
        rng,
        state: JointState::new(prep.initial, opts.backend),
        transcript: Transcript::default(),
        hops: 0,
    };
    run.record_label("alice", "prepare");

    macro_rules! hop_or_abort {
        ($from:expr, $to:expr, $carries:expr) => {
            if let Some(hop) = run.hop($from, $to, $carries)? {
                info!("aborted at hop {hop}");
                return Ok((run.transcript, RecoveryResult::aborted(hop)));
            }
        };
    }

    hop_or_abort!("alice", first, &[Particle::Q1]);
    run.state.apply(Particle::Q1, members[0].forward_op());
    run.record_label(first, "mask");
    for j in 1..members.len() {
        hop_or_abort!(names[j - 1], names[j], &[Particle::Q1]);
        run.state.apply(Particle::Q1, members[j].forward_op());
        run.record_label(names[j], "embed");
    }
    for (particle, op) in dealer_ops(prep.initial, cfg.secrets[1], cfg.secrets[2]) {
        run.state.apply(particle, op);
    }
    run.record_label("alice", "correct");
    hop_or_abort!("alice", first, &[Particle::Q2, Particle::Q3]);
    if members.len() > 1 {
        hop_or_abort!(last, first, &[Particle::Q1]);
    }
    run.state.apply(Particle::Q1, members[0].final_op());
    run.record_label(first, "unmask");

    let (label, probability) = run.state.measure(&mut run.rng);
    debug!("measured {label} with probability {probability:.6}");
    run.transcript.push(Event::Measurement {
        actor: first.to_owned(),
        label,
    });
    let result = verify(label, &prep.commitments);
    run.transcript.push(Event::Verification {
        actor: first.to_owned(),
        recovered: result.recovered.expect("measured"),
        verified: result.verified,
        accepted: result.accepted(),
    });
    info!("recovered {label}, verified {:?}", result.verified);
    Ok((run.transcript, result))
}

/// SplitMix64 step, used to derive independent per-trial seeds.
pub fn derive_seed(base: u64, trial: u64) -> u64 {
    let mut z = base.wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `trials` independent runs with derived seeds, in parallel. Results
/// come back in trial order.
pub fn run_batch(
    cfg: &DealerConfig,
    set: &[ParticipantId],
    opts: &RunOptions,
    base_seed: u64,
    trials: usize,
) -> Result<Vec<(u64, RecoveryResult)>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(base_seed, t);
            run_protocol(cfg, set, opts, seed).map(|(_, r)| (seed, r))
        })
        .collect()
}
