//! Exact-arithmetic engine for Ammann hexagon tilings.
//!
//! The crate is organised bottom-up:
//!
//! * [`ring`]: `Z[ψ]` with `ψ⁴ + ψ² = 1` and its fraction field,
//! * [`geometry`]: the canonical hexagon, placements, subdivision, decorations,
//! * [`tiling`]: finite patches, refinement/coarsening, local rules,
//! * [`words`]: the `l`/`s` address calculus,
//! * [`shadow`]: edge shadows of half-plane patches,
//! * [`lines`]: Ammann line families,
//! * [`subshift`]: the parallelogram alphabet and its finite-type constraints,
//! * [`format`] and [`svg`]: file formats and rendering.

pub mod error;
pub mod format;
pub mod geometry;
pub mod lines;
pub mod ring;
pub mod shadow;
pub mod subshift;
pub mod svg;
pub mod tiling;
pub mod words;

pub use error::{LinesError, ParseError, ShadowError, TilingError, WordError};
pub use geometry::{Placement, PlacedHexagon, Point, SizeClass};
pub use ring::{FieldElem, RingElem};
pub use tiling::Tiling;
