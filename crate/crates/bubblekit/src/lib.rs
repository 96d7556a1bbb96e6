//! Compact de Bruijn graph toolkit.
//!
//! `bubblekit` packs four pieces that fit together into a variant-calling
//! style pipeline for sequence data, but every layer is usable on its own:
//!
//! * [`kmer`] — 2-bit k-mer encoding, canonical forms, and external-memory
//!   k-mer counting producing a sorted solid set.
//! * [`bloom`] — cascading Bloom filters: an exact, compact representation of
//!   the solid set for neighborhood-restricted membership queries, plus the
//!   sizing math to pick filter ratios.
//! * [`dbg`] — bidirected de Bruijn graphs, arc labels, lossless compression
//!   of non-branching paths, and the split into a plain weighted digraph.
//! * [`graph`], [`bubbles`], [`paths`] — instrumented graph primitives and
//!   the enumeration algorithms: bubbles (several flavors), cycles, st-paths
//!   and bounded-length paths, all with elementary-operation counters so
//!   delay and total-work claims can be measured instead of trusted.
//! * [`pipeline`] — the batch pipeline gluing the stages together, plus
//!   desk-scale benchmark generators.
//!
//! Run `cargo run --example pipeline` for an end-to-end tour, or see the
//! `examples/` directory: each major capability has a runnable example.

pub mod bloom;
pub mod bubbles;
pub mod dbg;
pub mod graph;
pub mod kmer;
pub mod paths;
pub mod pipeline;
