use thiserror::Error;

use crate::types::NodeId;

/// A documented precondition of a protocol operation was violated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("only TC messages can be forwarded")]
    ForwardHello,
    #[error("proposed flooding MPR set {0:?} is not valid for the current neighbourhood")]
    InvalidFloodingMprs(Vec<NodeId>),
    #[error("proposed routing MPR set {0:?} is not valid for the current neighbourhood")]
    InvalidRoutingMprs(Vec<NodeId>),
    #[error("proposed routing set is not optimal")]
    NonOptimalRoutingSet,
}

/// A timing parameter breaks one of the required inequalities.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node {node}: constraint violated: {inequality}")]
pub struct ConfigError {
    pub node: NodeId,
    pub inequality: &'static str,
}

/// A network could not be assembled.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("link {0} -> {1} names an unknown node")]
    DanglingLink(NodeId, NodeId),
    #[error("self link on {0}")]
    SelfLink(NodeId),
    #[error("link metric must be finite and positive")]
    BadMetric,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("network parameters: {0}")]
    Params(&'static str),
}

/// A scenario file could not be read.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}
