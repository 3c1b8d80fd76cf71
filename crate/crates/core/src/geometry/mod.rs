//! Numerical substrate: points, norms, a dense simplex solver, polytopes in
//! both representations, Euclidean projection and point-to-set distances.

mod distance;
mod enumerate;
mod hull;
pub(crate) mod linalg;
mod lp;
mod norm;
mod point;
mod polytope;
mod project;

pub use distance::{inradius_at_origin, point_to_set_distance, Metric};
pub(crate) use distance::{distance_to_polytope, golden_min};
pub use lp::{solve_lp, LpSolution};
pub use norm::{norm_e, norm_eval, NormSpec};
pub use point::Point;
pub(crate) use point::{dist2, dot, norm2};
pub use polytope::{convert_rep, contains, ConvertTarget, Halfspace, Polytope, RepStatus};
pub(crate) use project::project_l2;

/// Constraint-satisfaction tolerance.
pub const EPS_FEAS: f64 = 1e-9;
/// Tolerance for geometric assertions (distances, thickness, extremality).
pub const EPS_GEOM: f64 = 1e-7;
/// Vertices closer than this are merged.
pub const MERGE_TOL: f64 = 1e-8;
/// Largest ambient dimension accepted by vertex enumeration.
pub const MAX_ENUM_DIM: usize = 6;
