//! Machine verification of size multipartite Ramsey numbers for the
//! butterfly graph: lower bounds via certificate colorings, upper
//! bounds via complete arrowing search, and DIMACS CNF export for
//! instances beyond desk scale.

pub mod cli;
pub mod cnf;
pub mod engine;
pub mod mpgraph;
pub mod patterns;
pub mod witnesses;
