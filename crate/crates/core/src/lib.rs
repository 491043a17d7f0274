//! Minimum-cost spanning trees under per-vertex matroid degree constraints.
//!
//! Every vertex `v` of the input graph carries a matroid `M_v` over its
//! incident edges. [`rounding::run`] returns a spanning tree whose cost is at
//! most the optimum of the LP relaxation and which can be made to satisfy every
//! `M_v` by removing at most 8 of its edges at `v`.
//!
//! The crate is organised bottom-up:
//!
//! * [`matroid`]: rank oracles and the operators (direct sum, union,
//!   contraction) used when degree constraints are adapted.
//! * [`graph`]: the contracted multigraph the algorithm works on.
//! * [`lp`]: an exact rational simplex, separation oracles and the cutting
//!   plane loop that produces basic optimal solutions of the relaxation.
//! * [`rounding`]: the iterative rounding and degree adaptation loop.
//! * [`oracle`]: brute-force ground truth and lemma-level diagnostics.
//! * [`format`] and [`generate`]: the JSON instance and result files, and a
//!   deterministic instance generator.

pub mod config;
pub mod error;
pub mod format;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod lp;
pub mod matroid;
pub mod oracle;
pub mod rational;
pub mod rounding;

pub use config::{Limits, SolverConfig};
pub use error::{Error, Result};
pub use graph::Multigraph;
pub use instance::{Edge, Instance};
pub use lp::{BasicSolution, RationalVector};
pub use matroid::{GroundSet, Matroid};
pub use oracle::OracleReport;
pub use rational::Rational;
pub use rounding::{run, AdaptationKind, AdaptationRecord, SolveResult};

use serde::{Deserialize, Serialize};
use std::fmt;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl From<u32> for $name {
            fn from(v: u32) -> Self {
                $name(v)
            }
        }
    };
}

id_type!(
    /// Identifier of an edge of the input graph. Contraction never creates
    /// edges, so the id is also the original edge id.
    EdgeId
);
id_type!(
    /// Identifier of a vertex of the input graph.
    VertexId
);
id_type!(
    /// Identifier of a node of the contracted graph. Merged nodes receive fresh
    /// ids; ids are never reused.
    NodeId
);
