//! Extremal and saturation numbers for forbidden subposets of grid posets.

mod bits;
pub mod bridge;
pub mod constructions;
pub mod containment;
pub mod engine;
pub mod error;
pub mod grid;
pub mod matrix;
pub mod poset;
pub mod report;

pub use containment::{GridMatcher, Mode, Witness};
pub use engine::{SearchResult, SearchStats, SearchWitness};
pub use error::{Error, Result};
pub use grid::{GridFamily, GridPoint, GridShape, PointOrder};
pub use matrix::{BinaryMatrix, PatternFamily};
pub use poset::{Poset, Realizer2};
