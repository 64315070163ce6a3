use serde::Serialize;
use sha2::{Digest, Sha256};

use super::canonical::to_canonical_string;
use super::documents::SessionInputs;

/// SHA-256 of the canonical text of any value, lowercase hex.
pub fn canonical_digest<T: Serialize + ?Sized>(value: &T) -> String {
    let text = to_canonical_string(value).expect("value holds only finite numbers");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Digest of everything a run depends on.
pub fn input_digest(inputs: &SessionInputs) -> String {
    canonical_digest(inputs)
}
