//! Exact combinatorics and desk-scale numerics for ordered ideal triangulations
//! of hyperbolic knot complements.
//!
//! The pipeline, bottom to top:
//!
//! * [`tri`] — parse and validate vertex-ordered ideal triangulations, compute
//!   edge classes, carry peripheral-curve data.
//! * [`kinematical`] — the exact-rational face matrices `R`, `A`, `B` and the
//!   derived symmetric matrices `Q` and `𝒢`.
//! * [`nz`] — gluing-equation matrices `G`, `G′`, `G″`, Neumann–Zagier system
//!   `𝐀 Log z + 𝐁 Log z″ = iν + iu`, and the FAMED certificate.
//! * [`angles`] — angle-structure polytope (exact LP feasibility), Lobachevsky
//!   volume functional and its constrained maximization.
//! * [`special`] — dilogarithm, Bloch–Wigner function, Faddeev's quantum
//!   dilogarithm `Φ_b`.
//! * [`geometry`] — Newton solver for the shape equations, hyperbolic volume,
//!   the potential `S` with analytic gradient/Hessian.
//! * [`oneloop`] — strong combinatorial flattenings (integer HNF solve) and
//!   the 1-loop invariant `τ`.
//! * [`partition`] — contour quadrature for `|𝒵_ℏ|` and the Jones function,
//!   asymptotic-rate fits, and evaluation of candidate annihilating operators.
//! * [`presets`] — built-in triangulation files (figure-eight and twist knots).
//! * [`accept`] — the acceptance checks run by `famedkit accept` and the
//!   `acceptance` test target.

pub mod accept;
pub mod angles;
pub mod exact;
pub mod geometry;
pub mod kinematical;
pub mod nz;
pub mod oneloop;
pub mod partition;
pub mod presets;
pub mod presets_golden;
pub mod simplex;
pub mod special;
pub mod tri;
