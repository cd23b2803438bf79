use std::io;

use thiserror::Error;

/// Errors raised by the simulation and solver modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("position ({x:.3}, {y:.3}) lies outside the domain")]
    OutOfDomain { x: f64, y: f64 },

    #[error("position ({x:.3}, {y:.3}) lies inside an obstacle")]
    InObstacle { x: f64, y: f64 },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("layout error: {0}")]
    Layout(String),

    #[error("tie at junction {junction}: two roots arrive at t = {time}")]
    JunctionTie { junction: String, time: f64 },

    #[error("singular network: floating nodes {0:?}")]
    SingularNetwork(Vec<String>),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
