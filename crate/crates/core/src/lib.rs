//! Budgeted seed selection on hypergraphs.
//!
//! Node features are smoothed over the hypergraph, every node gets an
//! activation set (the nodes it strongly influences) and a feature ball
//! (the nodes that look like it after smoothing), and seeds are picked
//! greedily to maximize a mix of feature-space coverage and expected
//! diffusion over hyperedges.
//!
//! ```
//! use hyperseed::{FeatureMatrix, Hypergraph, InfluenceModel, Param, SelectionConfig};
//!
//! let g = Hypergraph::build(5, &[vec![0, 1, 2], vec![2, 3], vec![3, 4]])?;
//! let x = FeatureMatrix::from_rows(&[[0.0], [0.1], [0.5], [0.9], [1.0]])?;
//! let config = SelectionConfig {
//!     budget: 2,
//!     theta: Param::Fixed(0.1),
//!     radius: Param::Fixed(0.2),
//!     ..Default::default()
//! };
//! let model = InfluenceModel::build(g, &x, &config)?;
//! let result = model.select_lazy()?;
//! assert_eq!(result.seeds.len(), 2);
//! assert_eq!(result.seeds, model.select_naive()?.seeds);
//! # Ok::<(), hyperseed::Error>(())
//! ```

pub mod error;
pub mod eval;
pub mod features;
pub mod hypergraph;
pub mod io;
pub mod objective;
pub mod propagation;
pub mod selector;
pub mod synthetic;

pub use error::{Error, ErrorKind, Result};
pub use eval::{label_propagation, EvalReport};
pub use features::FeatureMatrix;
pub use hypergraph::{EdgeId, Hypergraph, NodeId};
pub use io::{Dataset, DatasetPaths, IdMap, ResultDocument, Splits};
pub use objective::{
    build_activation_sets, build_feature_balls, edv, normalizers, unified_objective,
    ActivationSets, CoverageState, Evaluation, FeatureBalls, Gain, GainScratch, Objective,
};
pub use propagation::{
    build_hgnn_transition, build_hoi_transition, influence_columns, propagate, Backend,
    InfluenceColumns, PropagationState, SparseColumn, TransitionMatrix,
};
pub use selector::{
    greedy_lazy, greedy_naive, InfluenceModel, Param, ResolvedParams, Selection, SelectionConfig,
    SelectionResult, TraceStep,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hypergraphs.md")]
    mod hypergraphs {}
    #[doc = include_str!("../../../book/src/propagation.md")]
    mod propagation {}
    #[doc = include_str!("../../../book/src/objective.md")]
    mod objective {}
    #[doc = include_str!("../../../book/src/selection.md")]
    mod selection {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/testing.md")]
    mod testing {}
}
