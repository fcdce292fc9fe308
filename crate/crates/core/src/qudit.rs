//! Three-qudit statevector simulation in dimension `d`.
//!
//! Two representations of the labeled GHZ family are provided:
//!
//! * [`GhzLabel`] with [`label_apply`]: the symbolic path, where a generalized
//!   Pauli operator on one particle just shifts the label.
//! * [`DenseState`] with [`apply_on_particle`]: the full `d^3` amplitude
//!   vector, used as an oracle and whenever a measurement breaks the GHZ form.
//!
//! The GHZ state with label `(u1, u2, u3)` is
//! `d^-1/2 * sum_j w^(j*u1) |j, j+u2, j+u3>` with `w = exp(2 pi i / d)`, and
//! the operator `U(a, b) = sum_j w^(j*a) |j><j+b|`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};
use crate::field::{FieldElement, PrimeModulus};

/// Normalization tolerance for stored states.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// `w^k` for `w = exp(2 pi i / d)`.
pub fn omega_pow(modulus: PrimeModulus, k: u64) -> Complex64 {
    let d = modulus.get();
    Complex64::from_polar(1.0, 2.0 * PI * (k % d) as f64 / d as f64)
}

/// Which of the three GHZ particles an operation targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Particle {
    Q1,
    Q2,
    Q3,
}

impl Particle {
    pub const ALL: [Particle; 3] = [Particle::Q1, Particle::Q2, Particle::Q3];

    pub fn index(self) -> usize {
        match self {
            Particle::Q1 => 0,
            Particle::Q2 => 1,
            Particle::Q3 => 2,
        }
    }
}

impl TryFrom<u8> for Particle {
    type Error = QssError;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Particle::Q1),
            2 => Ok(Particle::Q2),
            3 => Ok(Particle::Q3),
            other => Err(QssError::InvalidParticle(other)),
        }
    }
}

impl fmt::Display for Particle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}", self.index() + 1)
    }
}

/// Label `(u1, u2, u3)` of a three-qudit GHZ basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GhzLabel {
    pub u1: FieldElement,
    pub u2: FieldElement,
    pub u3: FieldElement,
}

impl GhzLabel {
    pub fn new(u1: FieldElement, u2: FieldElement, u3: FieldElement) -> Result<Self> {
        let d = u1.modulus();
        for u in [u2, u3] {
            if u.modulus() != d {
                return Err(QssError::ModulusMismatch {
                    left: d.get(),
                    right: u.modulus().get(),
                });
            }
        }
        Ok(Self { u1, u2, u3 })
    }

    /// Label from raw integers, reduced mod `d`.
    pub fn from_values(modulus: PrimeModulus, values: [u64; 3]) -> Self {
        Self {
            u1: modulus.element(values[0]),
            u2: modulus.element(values[1]),
            u3: modulus.element(values[2]),
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.u1.modulus()
    }

    pub fn values(&self) -> [u64; 3] {
        [self.u1.value(), self.u2.value(), self.u3.value()]
    }

    /// All `d^3` labels in lexicographic order.
    pub fn all(modulus: PrimeModulus) -> impl Iterator<Item = GhzLabel> {
        let d = modulus.get();
        (0..d * d * d).map(move |i| Self::from_values(modulus, [i / (d * d), (i / d) % d, i % d]))
    }
}

impl fmt::Display for GhzLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.u1, self.u2, self.u3)
    }
}

impl Serialize for GhzLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.values().serialize(serializer)
    }
}

/// Generalized Pauli operator `U(alpha, beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliOp {
    pub alpha: FieldElement,
    pub beta: FieldElement,
}

impl PauliOp {
    pub fn new(alpha: FieldElement, beta: FieldElement) -> Result<Self> {
        if alpha.modulus() != beta.modulus() {
            return Err(QssError::ModulusMismatch {
                left: alpha.modulus().get(),
                right: beta.modulus().get(),
            });
        }
        Ok(Self { alpha, beta })
    }

    pub fn from_values(modulus: PrimeModulus, alpha: u64, beta: u64) -> Self {
        Self {
            alpha: modulus.element(alpha),
            beta: modulus.element(beta),
        }
    }

    pub fn identity(modulus: PrimeModulus) -> Self {
        Self::from_values(modulus, 0, 0)
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.alpha.modulus()
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U({},{})", self.alpha, self.beta)
    }
}

/// Row-major `d x d` matrix of `U(alpha, beta)`: entry `(j, j+beta)` is
/// `w^(j*alpha)`, everything else zero.
pub fn pauli_matrix(op: PauliOp) -> Vec<Vec<Complex64>> {
    let modulus = op.modulus();
    let d = modulus.get();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); d as usize]; d as usize];
    for j in 0..d {
        m[j as usize][((j + op.beta.value()) % d) as usize] = omega_pow(modulus, j * op.alpha.value());
    }
    m
}

/// Symbolic action of `U(alpha, beta)` on one particle of a GHZ label.
pub fn label_apply(label: GhzLabel, particle: Particle, op: PauliOp) -> GhzLabel {
    let (a, b) = (op.alpha, op.beta);
    match particle {
        Particle::Q1 => GhzLabel {
            u1: label.u1 + a,
            u2: label.u2 + b,
            u3: label.u3 + b,
        },
        Particle::Q2 => GhzLabel {
            u1: label.u1 + a,
            u2: label.u2 - b,
            u3: label.u3,
        },
        Particle::Q3 => GhzLabel {
            u1: label.u1 + a,
            u2: label.u2,
            u3: label.u3 - b,
        },
    }
}

/// Full amplitude vector of three qudits, indexed `(j1 * d + j2) * d + j3`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    modulus: PrimeModulus,
    amplitudes: Vec<Complex64>,
}

impl DenseState {
    pub fn from_amplitudes(modulus: PrimeModulus, amplitudes: Vec<Complex64>) -> Result<Self> {
        let d = modulus.get() as usize;
        if amplitudes.len() != d * d * d {
            return Err(QssError::DimensionMismatch {
                expected: d * d * d,
                actual: amplitudes.len(),
            });
        }
        Ok(Self { modulus, amplitudes })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < NORM_TOLERANCE
    }

    fn idx(&self, j1: u64, j2: u64, j3: u64) -> usize {
        let d = self.modulus.get();
        ((j1 * d + j2) * d + j3) as usize
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `<Psi_label | self>`.
    pub fn ghz_overlap(&self, label: GhzLabel) -> Complex64 {
        let d = self.modulus.get();
        let [u1, u2, u3] = label.values();
        let sum: Complex64 = (0..d)
            .map(|j| {
                omega_pow(self.modulus, d - (j * u1) % d) * self.amplitudes[self.idx(j, (j + u2) % d, (j + u3) % d)]
            })
            .sum();
        sum / (d as f64).sqrt()
    }

    /// Born probabilities over the GHZ basis, indexed like [`GhzLabel::all`].
    pub fn ghz_distribution(&self) -> Vec<f64> {
        GhzLabel::all(self.modulus)
            .map(|l| self.ghz_overlap(l).norm_sqr())
            .collect()
    }
}

pub fn ghz_state(label: GhzLabel) -> DenseState {
    let modulus = label.modulus();
    let d = modulus.get();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); (d * d * d) as usize];
    let scale = 1.0 / (d as f64).sqrt();
    let [u1, u2, u3] = label.values();
    for j in 0..d {
        amplitudes[((j * d + (j + u2) % d) * d + (j + u3) % d) as usize] = omega_pow(modulus, j * u1) * scale;
    }
    DenseState { modulus, amplitudes }
}

/// Applies the `d x d` matrix of `op` to one tensor factor.
pub fn apply_on_particle(state: &DenseState, particle: Particle, op: PauliOp) -> Result<DenseState> {
    if op.modulus() != state.modulus {
        return Err(QssError::ModulusMismatch {
            left: state.modulus.get(),
            right: op.modulus().get(),
        });
    }
    Ok(apply_matrix(state, particle, &pauli_matrix(op)))
}

fn apply_matrix(state: &DenseState, particle: Particle, m: &[Vec<Complex64>]) -> DenseState {
    let d = state.modulus.get();
    let mut out = vec![Complex64::new(0.0, 0.0); state.amplitudes.len()];
    for j1 in 0..d {
        for j2 in 0..d {
            for j3 in 0..d {
                let mut idx = [j1, j2, j3];
                let row = idx[particle.index()];
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    let coeff = m[row as usize][k as usize];
                    if coeff.norm_sqr() == 0.0 {
                        continue;
                    }
                    idx[particle.index()] = k;
                    acc += coeff * state.amplitudes[state.idx(idx[0], idx[1], idx[2])];
                }
                out[state.idx(j1, j2, j3)] = acc;
            }
        }
    }
    DenseState {
        modulus: state.modulus,
        amplitudes: out,
    }
}

/// Deviation between two states modulo a global phase.
///
/// The phase is fixed by the first amplitude of `a` with modulus above
/// `1e-12`; the result is the largest `|b_i - c * a_i|` over all indices.
pub fn phase_deviation(a: &DenseState, b: &DenseState) -> f64 {
    if a.amplitudes.len() != b.amplitudes.len() {
        return f64::INFINITY;
    }
    let Some(k) = a.amplitudes.iter().position(|x| x.norm() > 1e-12) else {
        return b.amplitudes.iter().map(|x| x.norm()).fold(0.0, f64::max);
    };
    let phase = b.amplitudes[k] / a.amplitudes[k];
    a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| (y - phase * x).norm())
        .fold(0.0, f64::max)
}

/// If `state` is a GHZ basis state up to phase (probability above
/// `1 - tol`), returns its label.
pub fn identify_label(state: &DenseState, tol: f64) -> Option<GhzLabel> {
    GhzLabel::all(state.modulus).find(|&l| state.ghz_overlap(l).norm_sqr() > 1.0 - tol)
}

/// Projective measurement in the GHZ basis. Returns the sampled label and
/// its Born probability.
pub fn ghz_joint_measure<R: Rng + ?Sized>(state: &DenseState, rng: &mut R) -> (GhzLabel, f64) {
    let probs = state.ghz_distribution();
    let k = sample_index(&probs, rng);
    (GhzLabel::all(state.modulus).nth(k).expect("index in range"), probs[k])
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        if x < p {
            return i;
        }
        x -= p;
    }
    // rounding: fall back to the last outcome with nonzero weight
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Single-qudit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random::<bool>() {
            Basis::Z
        } else {
            Basis::X
        }
    }

    /// Amplitudes of basis vector `index`: `|i>` for Z and the Fourier state
    /// `|J_j> = d^-1/2 * sum_k w^(k*j) |k>` for X.
    pub fn vector(self, modulus: PrimeModulus, index: u64) -> Vec<Complex64> {
        let d = modulus.get();
        match self {
            Basis::Z => (0..d)
                .map(|k| {
                    if k == index {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect(),
            Basis::X => {
                let s = 1.0 / (d as f64).sqrt();
                (0..d).map(|k| omega_pow(modulus, k * index) * s).collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleQuditState {
    modulus: PrimeModulus,
    amplitudes: Vec<Complex64>,
}

impl SingleQuditState {
    pub fn from_amplitudes(modulus: PrimeModulus, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != modulus.get() as usize {
            return Err(QssError::DimensionMismatch {
                expected: modulus.get() as usize,
                actual: amplitudes.len(),
            });
        }
        Ok(Self { modulus, amplitudes })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        let n: f64 = self.amplitudes.iter().map(Complex64::norm_sqr).sum();
        (n - 1.0).abs() < NORM_TOLERANCE
    }

    pub fn inner(&self, other: &SingleQuditState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

pub fn single_prepare(basis: Basis, index: FieldElement) -> SingleQuditState {
    SingleQuditState {
        modulus: index.modulus(),
        amplitudes: basis.vector(index.modulus(), index.value()),
    }
}

/// Measures in `basis`; returns the outcome and the collapsed state.
pub fn single_measure<R: Rng + ?Sized>(
    state: &SingleQuditState,
    basis: Basis,
    rng: &mut R,
) -> (FieldElement, SingleQuditState) {
    let m = state.modulus;
    let probs: Vec<f64> = m
        .elements()
        .map(|k| single_prepare(basis, k).inner(state).norm_sqr())
        .collect();
    let outcome = m.element(sample_index(&probs, rng) as u64);
    (outcome, single_prepare(basis, outcome))
}

/// Measures one particle of a three-qudit state in `basis` and returns the
/// outcome with the renormalized post-measurement state.
pub fn measure_particle<R: Rng + ?Sized>(
    state: &DenseState,
    particle: Particle,
    basis: Basis,
    rng: &mut R,
) -> (FieldElement, DenseState) {
    let m = state.modulus;
    let d = m.get();
    // Rotate into the measured basis: row k of the projector matrix is <b_k|.
    let bra: Vec<Vec<Complex64>> = (0..d)
        .map(|k| basis.vector(m, k).into_iter().map(|c| c.conj()).collect())
        .collect();
    let rotated = apply_matrix(state, particle, &bra);
    let mut probs = vec![0.0; d as usize];
    for j1 in 0..d {
        for j2 in 0..d {
            for j3 in 0..d {
                let k = [j1, j2, j3][particle.index()];
                probs[k as usize] += rotated.amplitudes[rotated.idx(j1, j2, j3)].norm_sqr();
            }
        }
    }
    let outcome = sample_index(&probs, rng) as u64;
    let scale = 1.0 / probs[outcome as usize].sqrt();
    let ket = basis.vector(m, outcome);
    let mut out = vec![Complex64::new(0.0, 0.0); state.amplitudes.len()];
    for j1 in 0..d {
        for j2 in 0..d {
            for j3 in 0..d {
                let mut idx = [j1, j2, j3];
                let k = idx[particle.index()];
                idx[particle.index()] = outcome;
                let coeff = rotated.amplitudes[rotated.idx(idx[0], idx[1], idx[2])];
                out[state.idx(j1, j2, j3)] = ket[k as usize] * coeff * scale;
            }
        }
    }
    (
        m.element(outcome),
        DenseState {
            modulus: m,
            amplitudes: out,
        },
    )
}

/// Result of comparing [`apply_on_particle`] with [`label_apply`] over many
/// (label, operator, particle) cases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub modulus: u64,
    pub cases: usize,
    pub max_deviation: f64,
}

fn sweep_case(label: GhzLabel, particle: Particle, op: PauliOp) -> f64 {
    let dense = apply_on_particle(&ghz_state(label), particle, op).expect("same modulus");
    phase_deviation(&ghz_state(label_apply(label, particle, op)), &dense)
}

/// Every label, every `(alpha, beta)` and every particle: `3 * d^5` cases.
pub fn pauli_sweep_exhaustive(modulus: PrimeModulus) -> SweepReport {
    let mut report = SweepReport {
        modulus: modulus.get(),
        cases: 0,
        max_deviation: 0.0,
    };
    for label in GhzLabel::all(modulus) {
        let base = ghz_state(label);
        for alpha in modulus.elements() {
            for beta in modulus.elements() {
                let op = PauliOp { alpha, beta };
                for particle in Particle::ALL {
                    let dense = apply_on_particle(&base, particle, op).expect("same modulus");
                    let dev = phase_deviation(&ghz_state(label_apply(label, particle, op)), &dense);
                    report.cases += 1;
                    report.max_deviation = report.max_deviation.max(dev);
                }
            }
        }
    }
    report
}

/// `samples` uniformly random cases.
pub fn pauli_sweep_sample<R: Rng + ?Sized>(modulus: PrimeModulus, samples: usize, rng: &mut R) -> SweepReport {
    let d = modulus.get();
    let max_deviation = (0..samples)
        .map(|_| {
            let label = GhzLabel::from_values(modulus, [0; 3].map(|_| rng.random_range(0..d)));
            let op = PauliOp::from_values(modulus, rng.random_range(0..d), rng.random_range(0..d));
            let particle = Particle::ALL[rng.random_range(0..3)];
            sweep_case(label, particle, op)
        })
        .fold(0.0, f64::max);
    SweepReport {
        modulus: d,
        cases: samples,
        max_deviation,
    }
}
