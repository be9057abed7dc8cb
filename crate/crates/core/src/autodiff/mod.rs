//! Tensor engine: define-by-run graph with reverse-mode differentiation,
//! parameter storage, Adam, checkpoints and seeded random streams.

pub mod adam;
pub mod checkpoint;
pub mod graph;
pub mod params;
pub mod rng;

pub use adam::{Adam, AdamConfig, AdamState};
pub use graph::{log_sigmoid, sigmoid, take_feed, Feeds, Graph, NodeId};
pub use params::{ParamId, ParamStore, Parameter};
pub use rng::ExperimentRng;
