use sha2::{Digest, Sha256};

/// Deterministic 64-bit seed derived from a list of strings.
pub fn stable_seed(parts: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Hex-encoded SHA-256 of `bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_separator_aware() {
        assert_eq!(stable_seed(&["a", "b"]), stable_seed(&["a", "b"]));
        assert_ne!(stable_seed(&["ab", ""]), stable_seed(&["a", "b"]));
        assert_eq!(content_hash(b"").len(), 64);
    }
}
