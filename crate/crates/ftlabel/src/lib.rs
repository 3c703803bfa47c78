//! Vertex-fault-tolerant connectivity labels.

pub mod archive;
pub mod bits;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod paths;
pub mod sketch;
pub mod ss;
pub mod tree;
pub mod vft1;
pub mod vft2;
pub mod vftf;
