//! Exact computer algebra for multigraded combinatorial Dyson–Schwinger systems
//! over decorated rooted trees.

pub mod coloured;
pub mod deg1;
pub mod diffeo;
pub mod error;
pub mod feynman;
pub mod hopf;
pub mod hopf_check;
pub mod linalg;
pub mod prelie;
pub mod sdse;
pub mod rational;
pub mod series;
pub mod trees;

pub use error::{Error, Result};
pub use hopf::{TensorSum, TreeSum};
pub use rational::Q;
pub use trees::{DecId, Decoration, DecorationSet, DegreeVector, Forest, Tree};
pub use series::MultiSeries;
pub use sdse::{SdseSpec, Solution};
pub use hopf_check::{check_hopf, CoeffTable, HopfStatus, HopfVerdict};
