use thiserror::Error;

use crate::geometry::PlacedHexagon;

/// A malformed textual input (ring element, word, ATF/SFT line, token).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ParseError {
    message: String,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        ParseError { message: message.into() }
    }

    /// Prefix the message with a line number.
    pub fn at_line(self, line: usize) -> Self {
        ParseError::new(format!("line {line}: {}", self.message))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilingError {
    #[error("small hexagon {0} has no brother in the tiling; no coarsening exists")]
    MissingBrother(Box<PlacedHexagon>),
    #[error("hexagon {0} was trimmed while coarsening")]
    HexagonTrimmed(Box<PlacedHexagon>),
    #[error("hexagon {0} is not part of the tiling")]
    NotInTiling(Box<PlacedHexagon>),
    #[error("tiling is empty")]
    Empty,
    #[error("hexagon {0} has the wrong size for unit exponent {1}")]
    WrongSize(Box<PlacedHexagon>, i64),
    #[error("level must be at least -1, got {0}")]
    BadLevel(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("a small base hexagon must be followed by `l`")]
    InvalidStart,
    #[error("sequence does not tile a quadrant")]
    NotQuadrant,
    #[error("period of an eventually periodic word must be non-empty")]
    EmptyPeriod,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShadowError {
    #[error("a hexagon crosses the edge line")]
    EdgeCrossed,
    #[error("no hexagon side lies on the edge line")]
    EmptyShadow,
    #[error("segments on the edge do not abut at position {0}")]
    NotContiguous(usize),
    #[error("shadow cannot be partitioned into blocks at segment {0}")]
    UnparsableShadow(usize),
    #[error("orientation cannot be recovered from this finite window")]
    Ambiguous,
    #[error("edge sequence mixes parities or uses an unknown symbol")]
    InvalidEdge,
    #[error("colour {0} is not a standard colour")]
    NonStandardColor(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinesError {
    #[error("tiling is not proper ({0} violations)")]
    NotProper(usize),
    #[error("need at least three lines, got {0}")]
    TooFewLines(usize),
}
