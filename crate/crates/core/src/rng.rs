// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! Seed splitting.
//!
//! Every random draw comes from a ChaCha8 generator keyed by a 64-bit seed.
//! Independent jobs that share a seed are separated by the ChaCha stream
//! number, so job `i` of a batch always sees the same sequence regardless of
//! how many jobs run or in which order they finish.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for job `stream` under master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = stream_rng(7, 0).random_iter().take(4).collect();
        let b: Vec<u64> = stream_rng(7, 0).random_iter().take(4).collect();
        let c: Vec<u64> = stream_rng(7, 1).random_iter().take(4).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
