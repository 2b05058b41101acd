//! Value-function solver and property verifier for the infinite-horizon
//! consumption problem `max ∫ e^{−ρt} u(c)` subject to `k̇ = F(k) − c`,
//! `k ≥ 0`, with concave-convex-concave production `F`.

pub mod cli;
pub mod dynamics;
pub mod functional;
pub mod hamiltonian;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod output;
pub mod sampling;
pub mod solver;
pub mod verifier;
