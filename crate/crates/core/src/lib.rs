//! Metric, edge-metric and mixed-metric generators and dimensions of
//! graphs, with a bitwise fast path for hypercubes `Q_d` and executable
//! checks of the structural results relating the three dimensions on `Q_d`.

pub mod cli;
pub mod error;
pub mod graph;
pub mod host;
pub mod hypercube;
pub mod lemma_lab;
pub mod resolvers;
pub mod solvers;

pub use error::{Error, Result};
pub use host::{AnyHost, Element, GenericHost, Host};
pub use hypercube::{BitVertex, CubeEdge, Hypercube};
pub use resolvers::{GeneratorKind, LandmarkSet, Verdict, Witness};
