//! Decision procedures and verifiable certificates for a duality on
//! finitely presented infinite graphs.
//!
//! For a presented graph `G` and target vertex set `U`, exactly one of two
//! structures exists: an infinite star attached to `U` that no comb can
//! dominate, or a tough subgraph of `G` containing `U` together with a tame
//! star-decomposition keeping `U` in the central part. This crate decides
//! which side holds, constructs an explicit certificate for the holding
//! side, and independently verifies certificates against the graph model
//! and finite truncations.

pub mod assignment;
pub mod certificate;
pub mod corpus;
pub mod corridor;
pub mod decompose;
pub mod duality;
pub mod finite_graph;
pub mod instance;
pub mod oracle;
pub mod presentation;
pub mod separation;
pub mod symbolic;
pub mod truncation;
pub mod union_find;
pub mod verify;
pub mod vertex;

pub use certificate::DichotomyCertificate;
pub use duality::{decide, toughness, Toughness};
pub use finite_graph::FiniteGraph;
pub use instance::{instance_digest, parse_instance, serialize_instance};
pub use presentation::{FanClass, GradedClass, Presentation, TargetSet, WindowKind};
pub use symbolic::SymbolicVertexSet;
pub use verify::{verify_payload, VerificationReport};
pub use vertex::{ClassRef, VertexRef};
