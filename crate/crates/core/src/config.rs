use crate::rational::{self, Rational};

/// Desk-scale limits guarding the enumeration-based routines. Exceeding one is
/// reported as [`crate::Error::LimitExceeded`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Maximum node count for spanning-tree separation and tight-set
    /// enumeration.
    pub st_nodes: usize,
    /// Maximum ground size for enumeration-based matroid ranks and matroid
    /// separation.
    pub matroid_ground: usize,
    /// Maximum node count for spanning-tree enumeration in the oracle.
    pub oracle_nodes: usize,
    /// Maximum edge count for spanning-tree enumeration in the oracle.
    pub oracle_edges: usize,
    /// Maximum ground size for the independent-set audits of removals.
    pub audit_ground: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            st_nodes: 20,
            matroid_ground: 16,
            oracle_nodes: 10,
            oracle_edges: 20,
            audit_ground: 12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub limits: Limits,
    /// Run every lemma-level assertion, including the enumeration-based ones.
    /// Without it only the cheap checks run: support sparsity, LP
    /// monotonicity, vertex certificates, Q persistence, progress, removal
    /// feasibility and the adaptation counters.
    pub debug_asserts: bool,
    /// Adaptation threshold on `|U| - x(U)`. Fixed at 4 for the guarantee.
    pub slack_threshold: Rational,
    /// Seed for the random-order recomputation of the Q set.
    pub seed: u64,
    /// Upper bound on cutting-plane rounds per LP solve.
    pub max_cut_rounds: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            limits: Limits::default(),
            debug_asserts: false,
            slack_threshold: rational::int(4),
            seed: 0,
            max_cut_rounds: 10_000,
        }
    }
}

impl SolverConfig {
    pub fn debug() -> Self {
        SolverConfig {
            debug_asserts: true,
            ..Self::default()
        }
    }
}
