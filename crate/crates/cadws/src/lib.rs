//! Cost-aware dynamic workflow scheduling (CADWS).
//!
//! A discrete-event cloud simulator with hourly VM billing and SLA deadline
//! penalties, a graph-attention policy network evaluated forward-only, and an
//! evolution-strategy trainer that learns scheduling policies minimizing the
//! total cost (rental fees plus SLA penalties).
//!
//! The crate is organized in layers:
//!
//! - [`tensor`]: minimal dense linear algebra with deterministic,
//!   permutation-invariant reductions
//! - [`workflow`]: workflow DAGs, synthetic topology generators, DAG files,
//!   Poisson arrivals, deadlines
//! - [`sim`]: the discrete-event MDP engine, billing, and cost reports
//! - [`features`]: raw feature extraction and the per-decision dynamic
//!   heterogeneous graph
//! - [`policy`]: the two-stage graph-attention policy network with a
//!   self-attention decision head, parameters in one flat vector
//! - [`es`]: the evolution-strategy trainer
//! - [`baselines`]: deterministic reference policies
//! - [`cli`]: train/eval/bench commands and CSV emission

pub mod baselines;
pub mod cli;
pub mod es;
pub mod features;
pub mod policy;
pub mod sim;
pub mod tensor;
pub mod workflow;

mod seeds;

pub use seeds::derive_seed;
