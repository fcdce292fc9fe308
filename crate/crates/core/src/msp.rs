//! Monotone span programs and the linear secret sharing built on them.
//!
//! A span program assigns rows of a matrix `M` over `F_d` to participants.
//! A set of participants is authorized when the target vector
//! `xi = (1, 0, .., 0)` lies in the span of the rows they own; the secret is
//! the first coordinate of a masking vector `rho` and each row's share is that
//! row times `rho`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};
use crate::field::{FieldElement, FieldMatrix, FieldVector, PrimeModulus};

/// Default cap on `d^(l-1)`, the number of masking completions the privacy
/// audit enumerates per secret.
pub const DEFAULT_ENUMERATION_BOUND: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParticipantId(pub String);

impl ParticipantId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ParticipantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ParticipantId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Renders a participant set as `{P1,P2}`.
pub fn fmt_set(set: &[ParticipantId]) -> String {
    let names: Vec<&str> = set.iter().map(ParticipantId::as_str).collect();
    format!("{{{}}}", names.join(","))
}

/// Participants plus the listed authorized sets. Queries honour monotone
/// closure: any superset of a listed set is authorized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessStructure {
    participants: Vec<ParticipantId>,
    authorized: Vec<Vec<ParticipantId>>,
}

impl AccessStructure {
    pub fn new(participants: Vec<ParticipantId>, authorized: Vec<Vec<ParticipantId>>) -> Result<Self> {
        let unique: BTreeSet<_> = participants.iter().collect();
        if unique.len() != participants.len() || participants.is_empty() {
            return Err(QssError::ParticipantMismatch(
                "participant list must be nonempty and free of duplicates".into(),
            ));
        }
        if participants.len() > 24 {
            return Err(QssError::ParticipantMismatch(
                "at most 24 participants are supported".into(),
            ));
        }
        for set in &authorized {
            if set.is_empty() {
                return Err(QssError::ParticipantMismatch("authorized sets must be nonempty".into()));
            }
            if let Some(p) = set.iter().find(|p| !unique.contains(p)) {
                return Err(QssError::UnknownParticipant(p.to_string()));
            }
        }
        Ok(Self {
            participants,
            authorized,
        })
    }

    pub fn participants(&self) -> &[ParticipantId] {
        &self.participants
    }

    pub fn authorized_sets(&self) -> &[Vec<ParticipantId>] {
        &self.authorized
    }

    pub fn is_authorized(&self, set: &[ParticipantId]) -> bool {
        self.authorized.iter().any(|a| a.iter().all(|p| set.contains(p)))
    }

    fn mask_to_set(&self, mask: u32) -> Vec<ParticipantId> {
        self.participants
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p.clone())
            .collect()
    }

    /// Unauthorized sets that become authorized when any missing participant
    /// is added. Ordered by the bitmask of participant positions.
    pub fn maximal_unauthorized(&self) -> Vec<Vec<ParticipantId>> {
        let n = self.participants.len();
        let auth_masks: Vec<u32> = self
            .authorized
            .iter()
            .map(|set| {
                set.iter()
                    .map(|p| 1u32 << self.participants.iter().position(|q| q == p).expect("validated"))
                    .fold(0, |a, b| a | b)
            })
            .collect();
        let authorized = |mask: u32| auth_masks.iter().any(|&a| a & !mask == 0);
        (0u32..(1 << n))
            .filter(|&mask| !authorized(mask) && (0..n).all(|i| mask & (1 << i) != 0 || authorized(mask | (1 << i))))
            .map(|mask| self.mask_to_set(mask))
            .collect()
    }
}

/// The four-tuple `(F_d, M, f, xi)` with `f` given as a row-owner list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Msp {
    matrix: FieldMatrix,
    row_owner: Vec<ParticipantId>,
}

impl Msp {
    pub fn new(matrix: FieldMatrix, row_owner: Vec<ParticipantId>) -> Result<Self> {
        if row_owner.len() != matrix.rows() {
            return Err(QssError::DimensionMismatch {
                expected: matrix.rows(),
                actual: row_owner.len(),
            });
        }
        Ok(Self { matrix, row_owner })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.matrix.modulus()
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    pub fn row_owner(&self) -> &[ParticipantId] {
        &self.row_owner
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// `xi = (1, 0, .., 0)`.
    pub fn target(&self) -> FieldVector {
        FieldVector::unit(self.modulus(), self.cols(), 0)
    }

    /// Participants owning at least one row, in order of first appearance.
    pub fn participants(&self) -> Vec<ParticipantId> {
        let mut seen = Vec::new();
        for p in &self.row_owner {
            if !seen.contains(p) {
                seen.push(p.clone());
            }
        }
        seen
    }

    /// Row indices owned by `set`, grouped by the set's member order.
    pub fn rows_for(&self, set: &[ParticipantId]) -> Result<Vec<usize>> {
        let mut rows = Vec::new();
        for p in set {
            let owned: Vec<usize> = self
                .row_owner
                .iter()
                .enumerate()
                .filter(|(_, q)| *q == p)
                .map(|(i, _)| i)
                .collect();
            if owned.is_empty() {
                return Err(QssError::UnknownParticipant(p.to_string()));
            }
            rows.extend(owned);
        }
        Ok(rows)
    }

    /// `M_A`: the rows owned by `set`.
    pub fn submatrix(&self, set: &[ParticipantId]) -> Result<FieldMatrix> {
        Ok(self.matrix.select_rows(&self.rows_for(set)?))
    }

    /// Whether `xi` lies in the row span of `M_A`.
    pub fn reconstructs(&self, set: &[ParticipantId]) -> Result<bool> {
        self.submatrix(set)?.row_span_contains(&self.target())
    }

    /// A sweeping vector for `set`: `h` with `h[0] = 1` and `M_B h = 0`.
    /// Found by solving `M_B[:, 1..] h' = -M_B[:, 0]`.
    pub fn sweeping_vector(&self, set: &[ParticipantId]) -> Result<Option<SweepingVector>> {
        let sub = self.submatrix(set)?;
        let p = self.modulus();
        if sub.rows() == 0 {
            return Ok(Some(SweepingVector {
                h: FieldVector::unit(p, self.cols(), 0),
            }));
        }
        let neg_first: Vec<FieldElement> = (0..sub.rows()).map(|r| -sub.get(r, 0)).collect();
        let rhs = FieldVector::from_elements(p, &neg_first)?;
        if self.cols() == 1 {
            return Ok(rhs.is_zero().then(|| SweepingVector {
                h: FieldVector::unit(p, 1, 0),
            }));
        }
        let rest: Vec<usize> = (1..self.cols()).collect();
        Ok(sub.select_cols(&rest).solve(&rhs)?.map(|tail| {
            let mut values = vec![1];
            values.extend_from_slice(tail.as_slice());
            SweepingVector {
                h: FieldVector::new(p, values).expect("reduced values"),
            }
        }))
    }
}

/// `rho` with the secret in its first coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskingVector {
    rho: FieldVector,
}

impl MaskingVector {
    pub fn new(rho: FieldVector) -> Result<Self> {
        if rho.is_empty() {
            return Err(QssError::DimensionMismatch { expected: 1, actual: 0 });
        }
        Ok(Self { rho })
    }

    pub fn secret(&self) -> FieldElement {
        self.rho.get(0)
    }

    pub fn as_vector(&self) -> &FieldVector {
        &self.rho
    }
}

/// The three values a participant receives from the dealer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShareBundle {
    pub participant: ParticipantId,
    pub s_component: FieldElement,
    pub t_component: FieldElement,
    pub lambda_component: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepingVector {
    pub h: FieldVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthorizedCheck {
    pub set: Vec<ParticipantId>,
    pub recombination: Option<FieldVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnauthorizedCheck {
    pub set: Vec<ParticipantId>,
    /// `xi` lies in the span of the set's rows (the set can reconstruct).
    pub reconstructs: bool,
    pub sweeping: Option<SweepingVector>,
}

impl UnauthorizedCheck {
    pub fn passed(&self) -> bool {
        !self.reconstructs && self.sweeping.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub authorized: Vec<AuthorizedCheck>,
    pub unauthorized: Vec<UnauthorizedCheck>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.authorized.iter().all(|a| a.recombination.is_some())
            && self.unauthorized.iter().all(UnauthorizedCheck::passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.authorized {
            match &a.recombination {
                Some(l) => writeln!(f, "authorized   {:<16} ok   lambda={l}", fmt_set(&a.set))?,
                None => writeln!(f, "authorized   {:<16} FAIL cannot reach target", fmt_set(&a.set))?,
            }
        }
        for u in &self.unauthorized {
            match (&u.sweeping, u.reconstructs) {
                (Some(s), false) => writeln!(f, "unauthorized {:<16} ok   sweeping={}", fmt_set(&u.set), s.h)?,
                _ => writeln!(f, "unauthorized {:<16} FAIL target in row span", fmt_set(&u.set))?,
            }
        }
        write!(f, "valid: {}", self.is_valid())
    }
}

/// Checks that every listed authorized set reaches `xi` and that every
/// maximal unauthorized set of `gamma` neither reaches `xi` nor lacks a
/// sweeping vector.
pub fn validate_msp(msp: &Msp, gamma: &AccessStructure) -> Result<ValidationReport> {
    let mut ours = msp.participants();
    let mut theirs = gamma.participants().to_vec();
    ours.sort();
    theirs.sort();
    if ours != theirs {
        return Err(QssError::ParticipantMismatch(format!(
            "span program owns rows for {} but access structure lists {}",
            fmt_set(&ours),
            fmt_set(&theirs)
        )));
    }
    let authorized = gamma
        .authorized_sets()
        .iter()
        .map(|set| {
            Ok(AuthorizedCheck {
                set: set.clone(),
                recombination: solve_recombination(msp, set)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let unauthorized = gamma
        .maximal_unauthorized()
        .into_iter()
        .map(|set| {
            Ok(UnauthorizedCheck {
                reconstructs: msp.reconstructs(&set)?,
                sweeping: msp.sweeping_vector(&set)?,
                set,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport {
        authorized,
        unauthorized,
    })
}

fn solve_recombination(msp: &Msp, set: &[ParticipantId]) -> Result<Option<FieldVector>> {
    msp.submatrix(set)?.transpose().solve(&msp.target())
}

fn check_masking(msp: &Msp, rho: &MaskingVector) -> Result<()> {
    if rho.as_vector().len() != msp.cols() {
        return Err(QssError::DimensionMismatch {
            expected: msp.cols(),
            actual: rho.as_vector().len(),
        });
    }
    Ok(())
}

/// `M_A * rho`, row order following the member order of `set`.
pub fn build_shares(msp: &Msp, set: &[ParticipantId], rho: &MaskingVector) -> Result<FieldVector> {
    check_masking(msp, rho)?;
    if !msp.reconstructs(set)? {
        return Err(QssError::NotAuthorized(fmt_set(set)));
    }
    msp.submatrix(set)?.mul_vec(rho.as_vector())
}

/// `lambda_A` with `M_A^T lambda_A = xi`.
pub fn recombination_vector(msp: &Msp, set: &[ParticipantId]) -> Result<FieldVector> {
    solve_recombination(msp, set)?.ok_or_else(|| QssError::NotAuthorized(fmt_set(set)))
}

/// `sum_j lambda_j * share_j`.
pub fn reconstruct(shares: &FieldVector, lambda: &FieldVector) -> Result<FieldElement> {
    lambda.dot(shares)
}

/// `(secret, a_2, .., a_l)` with the tail drawn uniformly from `rng`.
pub fn random_masking_vector<R: Rng + ?Sized>(secret: FieldElement, len: usize, rng: &mut R) -> Result<MaskingVector> {
    if len == 0 {
        return Err(QssError::DimensionMismatch { expected: 1, actual: 0 });
    }
    let p = secret.modulus();
    let mut values = vec![secret.value()];
    values.extend((1..len).map(|_| rng.random_range(0..p.get())));
    MaskingVector::new(FieldVector::new(p, values)?)
}

/// Masking vector with an explicit tail.
pub fn masking_vector_with_tail(secret: FieldElement, tail: &[u64]) -> Result<MaskingVector> {
    let mut values = vec![secret.value()];
    values.extend_from_slice(tail);
    MaskingVector::new(FieldVector::new(secret.modulus(), values)?)
}

/// Perfect-privacy audit by enumeration: for every secret, tabulates the
/// multiset of share tuples `set` sees over all `d^(l-1)` masking
/// completions, and reports whether all secrets produce the same multiset.
pub fn privacy_audit(msp: &Msp, set: &[ParticipantId], bound: u128) -> Result<bool> {
    if msp.reconstructs(set)? {
        return Err(QssError::Authorized(fmt_set(set)));
    }
    if set.is_empty() {
        return Ok(true);
    }
    let p = msp.modulus();
    let d = p.get();
    let tail_len = msp.cols() - 1;
    let needed = (d as u128).checked_pow(tail_len as u32).unwrap_or(u128::MAX);
    if needed > bound {
        return Err(QssError::EnumerationBound { needed, bound });
    }
    let sub = msp.submatrix(set)?;
    let view = |secret: u64| -> Result<HashMap<Vec<u64>, u64>> {
        let mut counts = HashMap::new();
        let mut rho = vec![0u64; msp.cols()];
        rho[0] = secret;
        for code in 0..needed as u64 {
            let mut c = code;
            for slot in rho.iter_mut().skip(1) {
                *slot = c % d;
                c /= d;
            }
            let shares = sub.mul_vec(&FieldVector::new(p, rho.clone())?)?;
            *counts.entry(shares.as_slice().to_vec()).or_insert(0) += 1;
        }
        Ok(counts)
    };
    let reference = view(0)?;
    for secret in 1..d {
        if view(secret)? != reference {
            return Ok(false);
        }
    }
    Ok(true)
}
