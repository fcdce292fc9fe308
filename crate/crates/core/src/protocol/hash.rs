//! Public hash `H: F_d -> F_d` used for secret commitments.
//!
//! `H(x)` is SHA-256 over the UTF-8 string `"QSS|" + context + "|" + d + "|" + x`
//! (decimal integers), read as a big-endian integer and reduced mod `d`.
//! With a small `d` the output space has only `d` values, so collisions are
//! unavoidable; the scheme relies on the fixture-level absence of collisions,
//! not on collision resistance in the cryptographic sense.

use sha2::{Digest, Sha256};

use crate::field::FieldElement;

pub fn hash_fe(x: FieldElement, context: &str) -> FieldElement {
    let d = x.modulus();
    let input = format!("QSS|{context}|{}|{}", d.get(), x.value());
    let digest = Sha256::digest(input.as_bytes());
    let reduced = digest
        .iter()
        .fold(0u64, |acc, &b| ((acc << 8) | u64::from(b)) % d.get());
    d.element(reduced)
}

/// Context string for secret number `index` (1-based): `"s1"`, `"s2"`, `"s3"`.
pub fn secret_context(index: usize) -> String {
    format!("s{index}")
}
