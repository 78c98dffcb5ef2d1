//! Finite quasi-pseudometric spaces, quasi-modular families, Alexandrov
//! bitopologies and their connectedness notions.

pub mod bitopology;
pub mod completion;
pub mod connectivity;
pub mod dot;
pub mod gauges;
pub mod graph;
pub mod modular;
pub mod morphisms;
pub mod pointset;
pub mod value;

pub use bitopology::{AlexandrovTopology, BitopSpace};
pub use gauges::{NumericMode, QuasiPseudoMetric};
pub use modular::QuasiModularFamily;
pub use pointset::PointSet;
pub use value::{ExtNonNeg, Rational};
