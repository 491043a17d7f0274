//! Shared fixtures for the criterion benches.

use matdeg::generate::{generate, ConstraintKind, GeneratorParams};
use matdeg::{GroundSet, Instance, Matroid};
use std::collections::BTreeMap;

/// A generated instance with `n` vertices and about `2n` edges.
pub fn instance(kind: ConstraintKind, n: usize, seed: u64) -> Instance {
    let m = (2 * n).min(14).max(n - 1);
    generate(&GeneratorParams { kind, n, m, seed })
        .expect("bench parameters are valid")
        .instance
}

/// The same graph as [`instance`] with every constraint free.
pub fn free_instance(n: usize, seed: u64) -> Instance {
    let inst = instance(ConstraintKind::UniformDeg, n, seed);
    Instance::new(
        inst.vertices().to_vec(),
        inst.edges().to_vec(),
        BTreeMap::new(),
    )
    .expect("a generated graph is valid")
}

/// `Uniform(k)` on `n` fresh elements starting at id `offset`.
pub fn uniform(n: u32, k: usize, offset: u32) -> Matroid {
    let ground = GroundSet::new((offset..offset + n).map(matdeg::EdgeId)).expect("distinct ids");
    Matroid::uniform(ground, k)
}
