//! Counter-style random streams.
//!
//! Every stream is a ChaCha8 keystream selected by `(seed, domain, id)`, so
//! the bits a tree node or a trial sees never depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DOMAIN_TREE: u64 = 0x7472_6565;
const DOMAIN_TRIAL: u64 = 0x7472_6961;

fn keyed(seed: u64, domain: u64, id: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(id);
    rng
}

/// Stream for the offsets of tree `tree_id`. Node with heap index `i >= 2`
/// consumes the `(i - 2)`-th 64-bit word.
pub fn tree_stream(seed: u64, tree_id: u64) -> ChaCha8Rng {
    keyed(seed, DOMAIN_TREE, tree_id)
}

/// Stream for Monte Carlo trial `trial`.
pub fn trial_stream(seed: u64, trial: u64) -> ChaCha8Rng {
    keyed(seed, DOMAIN_TRIAL, trial)
}

/// Seeks directly to the uniform of a single tree node, without generating
/// the nodes before it.
pub fn tree_node_uniform(seed: u64, tree_id: u64, heap_index: u64) -> f64 {
    debug_assert!(heap_index >= 2);
    let mut rng = tree_stream(seed, tree_id);
    rng.set_word_pos(2 * u128::from(heap_index - 2));
    rng.gen::<f64>()
}
