//! Exact chaining of time-windowed vehicle plans, with a batch-then-chain
//! heuristic for dial-a-ride problems built on top.

pub mod chainsolve;
pub mod darp;
pub mod flownet;
pub mod io;
pub mod model;
pub mod oracle;
pub mod variantgen;
