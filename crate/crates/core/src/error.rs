use crate::{EdgeId, NodeId, Rational};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("edge {0} is not in the ground set")]
    UnknownElement(EdgeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("ground sets overlap on edge {0}")]
    OverlappingGrounds(EdgeId),
    #[error("ground sets differ")]
    GroundMismatch,
    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),
    #[error("{what} has size {size}, above the configured limit {limit}")]
    LimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    /// `certificate` holds Farkas multipliers, one per constraint row, when the
    /// infeasibility was detected by the simplex.
    #[error("infeasible: {reason}")]
    Infeasible {
        reason: String,
        certificate: Option<Vec<Rational>>,
    },
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant `{check}` violated: {detail}")]
    Invariant { check: &'static str, detail: String },
    #[error("no progress possible in iteration {iteration}: {detail}")]
    Stuck { iteration: usize, detail: String },
    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    pub(crate) fn invariant(check: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            check,
            detail: detail.into(),
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. })
    }
}
