//! Teleportation-based decomposition of multi-controlled Toffoli gates.
//!
//! The crate synthesizes MCT gates as measurement-and-feedforward circuits of
//! unit Toffoli depth, checks them against exact oracles, simulates them under
//! gate, entanglement, initialization and readout noise, and builds a few
//! application circuits on top.

pub mod applications;
pub mod circuit;
pub mod comparisons;
pub mod decomposer;
pub mod fidelity;
pub mod schedule;
pub mod simulator;
