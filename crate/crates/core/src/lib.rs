//! Computational graphs for matrix functions.
//!
//! A graph combines the argument `A` and the identity `I` through linear
//! combinations, products and left divisions. It can be evaluated on scalars,
//! matrices and truncated series, differentiated with respect to its
//! coefficients, fitted to a target function, certified against round-off and
//! emitted as MATLAB or C.

pub mod error;
pub mod numerics;
pub mod graph;
pub mod eval;
pub mod degopt;
pub mod generators;
pub mod autodiff;
pub mod optimizer;
pub mod error_analysis;
pub mod codegen;
pub mod cgr;
pub mod cli;

pub use error::{Error, Result};
pub use eval::{eval_graph, eval_graph_input, eval_graph_poly, eval_graph_with, EvalOptions, GraphValue, Pointwise};
pub use graph::{compress_graph, get_topo_order, merge_graph, CoeffRef, ComputationGraph, OpKind};
