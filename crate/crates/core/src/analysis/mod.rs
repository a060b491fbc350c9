//! Bisimulation, bisimilar transforms, invariance testing, the binary-tree
//! parity results and a depth-bounded definability oracle.

mod bisim;
pub mod depth;
pub mod invariance;
pub mod transforms;
pub mod trees;

pub use bisim::{bisimilar_points, max_bisimulation, BisimPair, Bisimulation};
pub use invariance::{
    formula_suite, invariance_suite, random_bisimilar_pair, InvarianceReport, PointedPair,
};
pub use trees::{
    cw5_layer_parity, parity_sweep, parity_theorem_check, BinaryTree, LayerParityReport,
    ParityReport, SweepReport, TreeError,
};
