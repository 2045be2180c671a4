//! Exact-arithmetic integration of equivariant classes over toric symplectic
//! quotients by wall-crossing residue recursion, and the genus-zero vortex
//! invariants of linear torus actions built on top of it.
//!
//! Every scalar is an arbitrary-precision rational. The core operation is
//! the Euler class χ^{V,τ}: S(t*) → Q of a weight system at a regular level
//! τ, evaluated by walking a generic straight path from a chamber outside
//! the moment cone to the chamber of τ and accumulating, at each wall
//! crossing, the Euler class of a rank-reduced problem applied to a
//! total-residue pushforward of the integrand.
//!
//! Layers, bottom up:
//! - [`linalg`]: exact rational/integer linear algebra, cone membership,
//!   strict feasibility, lattice basis extension.
//! - [`poly`]: the polynomial ring S(t*), the line substitution ξ ↦ ξ + z·e,
//!   and total residues via series at infinity.
//! - [`weights`]: weight systems, walls, level classification, generic path
//!   planning.
//! - [`localize`]: the closed-form sphere pushforward and its colinear
//!   cross-check.
//! - [`euler`]: the wall-crossing recursion and the crossing-difference
//!   formula.
//! - [`vortex`]: genus-zero vortex invariants and moduli reports.

pub mod error;
pub mod euler;
pub mod linalg;
pub mod localize;
pub mod poly;
pub mod rat;
pub mod vortex;
pub mod weights;

pub use error::{Error, ErrorCategory, Result};
pub use euler::{euler_class, wall_crossing_difference, Evaluator, ToricProblem};
pub use linalg::{hermite_extend, lattice_generates, primitive_normal, solve_nonneg_combination};
pub use poly::{parse_poly, restrict_off_direction, substitute_line, total_residue, MultiPoly, ZPoly};
pub use rat::{parse_rat, rat_to_string, Int, IntVec, Rat, RatVec};
pub use vortex::{moduli_data, vortex_invariant, ModuliReport, VortexProblem};
pub use weights::{
    check_proper, classify_level, enumerate_walls, plan_path, CrossingEvent, LevelClass, Wall,
    WeightEntry, WeightSystem,
};
