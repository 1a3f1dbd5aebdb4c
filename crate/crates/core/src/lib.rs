//! Subdivision-rule tilings for right-angled Artin groups and special cube
//! complexes, with growth, ends, mesh and divergence invariants.

pub mod ball;
pub mod error;
pub mod export;
mod fsutil;
pub mod inflation;
pub mod invariants;
pub mod oracle;
pub mod pipeline;
pub mod raag;
pub mod rule;
pub mod special;
pub mod tiling;
pub mod word;

pub use error::{Error, Result};
pub use raag::{CubeCell, DefiningGraph, SignedSet};
pub use word::{Element, NormalForm, Syllable};
