//! Property O toolkit for oriented k-uniform hypergraphs.
//!
//! An oriented k-graph has Property O when every linear order of the vertex
//! set admits at least one edge whose tuple is increasing under the order.
//! This crate provides exact decision procedures, the recursive G_k family,
//! exhaustive small-case censuses, Monte Carlo experiments over random
//! tournaments, and high-precision evaluation of the associated closed-form
//! bounds.

pub mod bounds;
pub mod cli;
pub mod construct;
pub mod core;
pub mod decide;
pub mod enumerate;
pub mod stochastic;
