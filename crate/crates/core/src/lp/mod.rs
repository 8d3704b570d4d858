//! Exact linear programming: a bounded-variable simplex and the cutting-plane
//! driver for the residual cut LP.

pub mod cutting_plane;
pub mod simplex;

pub use cutting_plane::{cutting_plane_extreme_point, is_integral_at, FracSolution, LpStats};
pub use simplex::{
    is_vertex, rank, simplex_solve, BasicSolution, LinearProgram, Row, Sense, Tableau,
};
