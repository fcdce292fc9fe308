use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decoy::{EveModel, DEFAULT_DECOY_COUNT, DEFAULT_THRESHOLD};
use crate::error::{QssError, Result};
use crate::field::{FieldMatrix, PrimeModulus};
use crate::fixture;
use crate::msp::{AccessStructure, Msp, ParticipantId};
use crate::protocol::{Backend, DealerConfig, ForcedRandomness, RunOptions, Tamper};

fn default_decoy_count() -> usize {
    DEFAULT_DECOY_COUNT
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

/// A run description loaded from JSON.
///
/// `participants` may be omitted, in which case it is taken from
/// `row_owner` in order of first appearance. `chosen_set` order decides who
/// recovers (its first member).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub d: u64,
    pub secrets: [u64; 3],
    #[serde(default)]
    pub participants: Option<Vec<String>>,
    pub matrix: Vec<Vec<u64>>,
    pub row_owner: Vec<String>,
    pub authorized_sets: Vec<Vec<String>>,
    pub chosen_set: Vec<String>,
    #[serde(default = "default_decoy_count")]
    pub decoy_count: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub eve: EveModel,
    #[serde(default)]
    pub tamper: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub forced: Option<ForcedRandomness>,
    #[serde(default)]
    pub backend: Backend,
}

/// A scenario turned into library values.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub config: DealerConfig,
    pub chosen_set: Vec<ParticipantId>,
    pub options: RunOptions,
}

fn ids(names: &[String]) -> Vec<ParticipantId> {
    names.iter().map(|n| ParticipantId::new(n.as_str())).collect()
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QssError::Scenario(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QssError::Scenario(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The worked example with pinned randomness.
    pub fn example() -> Self {
        let names = |set: &[ParticipantId]| set.iter().map(|p| p.to_string()).collect::<Vec<_>>();
        Scenario {
            d: 7,
            secrets: fixture::SECRETS,
            participants: None,
            matrix: fixture::MATRIX.iter().map(|r| r.to_vec()).collect(),
            row_owner: names(&fixture::participants()),
            authorized_sets: fixture::access_structure()
                .authorized_sets()
                .iter()
                .map(|s| names(s))
                .collect(),
            chosen_set: names(&fixture::authorized_set()),
            decoy_count: DEFAULT_DECOY_COUNT,
            threshold: DEFAULT_THRESHOLD,
            eve: EveModel::None,
            tamper: None,
            seed: 0,
            forced: Some(fixture::forced_randomness()),
            backend: Backend::Symbolic,
        }
    }

    pub fn modulus(&self) -> Result<PrimeModulus> {
        PrimeModulus::new(self.d)
    }

    fn participant_ids(&self) -> Vec<ParticipantId> {
        match &self.participants {
            Some(p) => ids(p),
            None => {
                let mut seen: Vec<ParticipantId> = Vec::new();
                for p in ids(&self.row_owner) {
                    if !seen.contains(&p) {
                        seen.push(p);
                    }
                }
                seen
            }
        }
    }

    /// The span program and access structure only; enough for an audit.
    pub fn msp_and_gamma(&self) -> Result<(Msp, AccessStructure)> {
        let d = self.modulus()?;
        if let Some(&v) = self.matrix.iter().flatten().find(|&&v| v >= d.get()) {
            return Err(QssError::OutOfRange {
                value: v,
                modulus: d.get(),
            });
        }
        let participants = self.participant_ids();
        let owners = ids(&self.row_owner);
        if let Some(p) = owners.iter().find(|p| !participants.contains(p)) {
            return Err(QssError::UnknownParticipant(p.to_string()));
        }
        let msp = Msp::new(FieldMatrix::new(d, &self.matrix)?, owners)?;
        let gamma = AccessStructure::new(participants, self.authorized_sets.iter().map(|s| ids(s)).collect())?;
        Ok((msp, gamma))
    }

    /// Validates everything and builds the dealer configuration.
    pub fn load(&self) -> Result<LoadedScenario> {
        let d = self.modulus()?;
        if let Some(&v) = self.secrets.iter().find(|&&v| v >= d.get()) {
            return Err(QssError::OutOfRange {
                value: v,
                modulus: d.get(),
            });
        }
        let (msp, gamma) = self.msp_and_gamma()?;
        let config = DealerConfig::new(
            self.secrets.map(|s| d.element(s)),
            msp,
            gamma,
            self.decoy_count,
            self.threshold,
            self.seed,
        )?;
        let chosen_set = ids(&self.chosen_set);
        if let Some(p) = chosen_set.iter().find(|p| !config.gamma.participants().contains(p)) {
            return Err(QssError::UnknownParticipant(p.to_string()));
        }
        if !config.gamma.is_authorized(&chosen_set) {
            return Err(QssError::NotAuthorized(crate::msp::fmt_set(&chosen_set)));
        }
        let tamper = self.tamper.as_deref().map(str::parse::<Tamper>).transpose()?;
        if let Some(t) = &tamper {
            if !chosen_set.contains(&t.participant) {
                return Err(QssError::UnknownParticipant(format!(
                    "{} (tamper target not in chosen set)",
                    t.participant
                )));
            }
        }
        Ok(LoadedScenario {
            config,
            chosen_set,
            options: RunOptions {
                eve: self.eve,
                tamper,
                forced: self.forced.clone().unwrap_or_default(),
                backend: self.backend,
            },
        })
    }
}
