//! Planar polygon linkages with fixed side lengths.
//!
//! The crate covers the configuration space of a closed n-bar linkage in the
//! canonical frame: turn-angle coordinates, embeddedness and convexity, the
//! straight-line genericity criterion, the convex atlas built from minimally
//! and maximally stretched configurations, and convexification by descent
//! of an elliptic distance energy weighted by reflex turn angles.
//!
//! See [`geometry`] for the indexing conventions.

pub mod atlas;
pub mod config_space;
pub mod energy;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod sweep;

pub use error::{Error, Result};
pub use geometry::{PolygonChain, SideLengths, TurnAngles, Vec2};
