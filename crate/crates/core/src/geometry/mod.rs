//! Norms, set representations, projections, distances, normal cones and a small LP solver.

pub mod cone;
pub mod lp;
pub mod norm;
pub mod project;
pub mod set;

pub use cone::{dist_to_cone, normal_cone, ConeRep, NormalKind};
pub use norm::Norm;
pub use project::{
    dist_point_set, dist_set_set, intersection_is_empty, nearest_in_intersection, project, DistanceReport, Method,
};
pub use set::{Piece, Polyhedron, SetRep};
