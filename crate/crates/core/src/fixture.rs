//! The worked example over `F_7`: four participants, a 4x4 span program,
//! secrets `(2, 4, 6)` and pinned randomness that reproduces a known label
//! chain.
//!
//! The matrix lets every three participants reconstruct, so the access
//! structure used here lists all of them. [`listed_access_structure`] keeps
//! just the three sets named with the example; against that list the matrix
//! also authorizes `{P1,P2,P4}` and `{P2,P3,P4}`.

use rand::Rng;

use crate::field::{FieldElement, FieldMatrix, PrimeModulus};
use crate::msp::{validate_msp, AccessStructure, Msp, ParticipantId};
use crate::protocol::{DealerConfig, ForcedRandomness};

pub const MATRIX: [[u64; 4]; 4] = [[0, 0, 1, 1], [0, 1, 0, 6], [2, 1, 1, 0], [3, 1, 2, 1]];
pub const SECRETS: [u64; 3] = [2, 4, 6];
pub const INITIAL_LABEL: [u64; 3] = [6, 1, 3];
pub const RHO1: [u64; 4] = [2, 1, 0, 5];
pub const RHO2: [u64; 4] = [4, 3, 5, 1];
pub const Q1: u64 = 5;

/// Labels after: preparation, P1, P2, P3, P4, dealer corrections, P1 final.
pub const GOLDEN_CHAIN: [[u64; 3]; 7] = [
    [6, 1, 3],
    [4, 6, 1],
    [6, 5, 0],
    [5, 6, 1],
    [5, 6, 1],
    [6, 5, 0],
    [2, 4, 6],
];

pub fn modulus() -> PrimeModulus {
    PrimeModulus::new(7).expect("7 is prime")
}

pub fn participants() -> Vec<ParticipantId> {
    ["P1", "P2", "P3", "P4"].into_iter().map(ParticipantId::from).collect()
}

fn set(names: &[&str]) -> Vec<ParticipantId> {
    names.iter().map(|&n| ParticipantId::from(n)).collect()
}

/// The three authorized sets named with the example.
pub fn listed_access_structure() -> AccessStructure {
    AccessStructure::new(
        participants(),
        vec![
            set(&["P1", "P2", "P3", "P4"]),
            set(&["P1", "P2", "P3"]),
            set(&["P1", "P3", "P4"]),
        ],
    )
    .expect("static structure")
}

/// The access structure the example matrix realizes: the listed sets first,
/// then the two further three-member sets.
pub fn access_structure() -> AccessStructure {
    AccessStructure::new(
        participants(),
        vec![
            set(&["P1", "P2", "P3", "P4"]),
            set(&["P1", "P2", "P3"]),
            set(&["P1", "P3", "P4"]),
            set(&["P1", "P2", "P4"]),
            set(&["P2", "P3", "P4"]),
        ],
    )
    .expect("static structure")
}

pub fn msp() -> Msp {
    let rows: Vec<Vec<u64>> = MATRIX.iter().map(|r| r.to_vec()).collect();
    Msp::new(
        FieldMatrix::new(modulus(), &rows).expect("static matrix"),
        participants(),
    )
    .expect("one owner per row")
}

pub fn secrets() -> [FieldElement; 3] {
    SECRETS.map(|s| modulus().element(s))
}

/// The set used for the run; P1 recovers.
pub fn authorized_set() -> Vec<ParticipantId> {
    participants()
}

pub fn forced_randomness() -> ForcedRandomness {
    ForcedRandomness {
        initial_label: Some(INITIAL_LABEL),
        rho1: Some(RHO1.to_vec()),
        rho2: Some(RHO2.to_vec()),
        q1: Some(Q1),
    }
}

pub fn dealer_config() -> DealerConfig {
    DealerConfig::new(
        secrets(),
        msp(),
        access_structure(),
        crate::decoy::DEFAULT_DECOY_COUNT,
        crate::decoy::DEFAULT_THRESHOLD,
        0,
    )
    .expect("example configuration is valid")
}

/// Draws uniformly random 4x4 matrices over `F_d` until one realizes
/// [`access_structure`] exactly.
pub fn random_valid_msp<R: Rng + ?Sized>(modulus: PrimeModulus, rng: &mut R) -> Msp {
    let gamma = access_structure();
    loop {
        let rows: Vec<Vec<u64>> = (0..4)
            .map(|_| (0..4).map(|_| rng.random_range(0..modulus.get())).collect())
            .collect();
        let msp = Msp::new(FieldMatrix::new(modulus, &rows).expect("4x4"), participants()).expect("4 owners");
        if validate_msp(&msp, &gamma).map(|r| r.is_valid()).unwrap_or(false) {
            return msp;
        }
    }
}
