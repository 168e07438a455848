//! Finitely generated semigroups of real Mobius transformations: multicone
//! certification of uniform hyperbolicity, elliptic-element detection, limit
//! sets and cores, and parameter-locus classification.

pub mod circle;
pub mod classify;
pub mod error;
pub mod exact;
pub mod hyperbolicity;
pub mod limit_sets;
pub mod moebius;
pub mod scalar;
pub mod scenarios;
pub mod svg;
pub mod tuple_io;
pub mod words;

pub use error::{Error, Result};
pub use moebius::{FixedPoints, MapClass, MoebiusMap};
pub use scalar::Scalar;

/// Default `f64` map type.
pub type Map = MoebiusMap<f64>;
