//! Verifiable multi-secret quantum secret sharing over monotone span programs.
//!
//! The crate simulates a dealer who splits two secrets with a linear secret
//! sharing scheme, embeds them (plus a third secret) into a three-qudit GHZ
//! state through generalized Pauli operators applied by each participant, and
//! lets one participant recover all three secrets with a single GHZ-basis
//! measurement checked against published hash commitments. Particle transfers
//! are wrapped in decoy qudits so eavesdroppers can be detected.
//!
//! Modules:
//!
//! * [`field`]: arithmetic and elimination over `F_d`.
//! * [`msp`]: span programs, share dealing, recombination, privacy audit.
//! * [`qudit`]: GHZ labels, dense statevectors, Pauli operators, Z/X bases.
//! * [`decoy`]: decoy insertion, eavesdropper models, error-rate checks.
//! * [`protocol`]: the full run, hash verification, attack models.
//! * [`cli`]: scenario files, trace output and the `qss` subcommands.
//! * [`fixture`]: the worked example over `F_7`.

pub mod cli;
pub mod decoy;
pub mod error;
pub mod field;
pub mod fixture;
pub mod msp;
pub mod protocol;
pub mod qudit;

pub use error::{QssError, Result};
pub use field::{FieldElement, FieldMatrix, FieldVector, PrimeModulus};
pub use msp::{AccessStructure, Msp, ParticipantId};
pub use qudit::{GhzLabel, Particle, PauliOp};
