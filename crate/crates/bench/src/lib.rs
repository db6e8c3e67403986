//! Shared inputs for the criterion benchmarks.

use holant_core::{random_basis, random_instance, Basis, HolantInstance, InstanceSpec};

/// A random instance with `p = r = 2` and entries in the unit disc.
pub fn instance(alphabet: usize, edges: usize) -> HolantInstance {
    let spec = InstanceSpec {
        alphabet_size: alphabet,
        edge_count: edges,
        generator_parts: 2.min(edges),
        recognizer_parts: 2.min(edges),
        magnitude: 1.0,
    };
    random_instance(0xbe_ec, spec).expect("valid bench instance")
}

pub fn basis(alphabet: usize) -> Basis {
    random_basis(0xbe_ec, alphabet, 50.0).expect("well-conditioned basis")
}
