//! Per-task, per-episode seed derivation.
//!
//! `derive_seed(base, task, episode) = base XOR h`, where `h` is the first
//! eight bytes (little endian) of `SHA-256(task || 0x00 || episode as u64 LE)`.
//! A single episode can therefore be re-run on its own and reproduce the
//! result it had inside a full batch.

use sha2::{Digest, Sha256};

pub fn derive_seed(base: u64, task: &str, episode: u64) -> u64 {
    let digest =
        Sha256::new().chain_update(task.as_bytes()).chain_update([0u8]).chain_update(episode.to_le_bytes()).finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    base ^ u64::from_le_bytes(head)
}
