//! Rank-metric secure network coding toolkit.
//!
//! - [`ffield`]: F_q and normal-basis F_{q^n} arithmetic.
//! - [`linpoly`]: linearized polynomials, rootspaces, minimal polynomials.
//! - [`gabidulin`]: interleaved Gabidulin codec with error/erasure decoding.
//! - [`rlnc`]: random linear network coding over F_q.
//! - [`pathfind`]: X-hop grids and the upstream multicast path search.
//! - [`wiretap`]: leakage analytics and exhaustive mutual-information oracles.
//! - [`netsim`]: Monte Carlo multicast simulation and the error-floor baseline.

pub mod ffield;
pub mod gabidulin;
pub mod linpoly;
pub mod netsim;
pub mod pathfind;
pub mod rlnc;
pub mod wiretap;
