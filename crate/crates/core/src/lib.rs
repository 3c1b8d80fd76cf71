pub mod body;
pub mod catalog;
pub mod cone;
pub mod error;
pub mod geometry;
pub mod lab;
pub mod metrics;
pub mod oracle;
pub mod rotundity;

pub use catalog::{make_body, make_norm, sequence_toward, BodyRecipe, NormRecipe, SequenceKind};
pub use body::{Body, ConvexBody, L2Ball, TruncatedHilbert};
pub use cone::{
    algebraic_segment, boundary_margin, cone_over_base, interval_between, layer_map, order_interval, sandwich_check,
    ConeOverBase, IntervalRegion, LayerMap, LiftedPoint, OrderInterval, SandwichReport, Sign,
};
pub use error::{LabError, Result};
pub use metrics::{
    interval_distances, interval_thickness, max_chord, one_sided_distance, rho, rho_both, set_distance, thickness,
    DistanceMode, Region, TwoSided,
};
pub use oracle::{
    estimate_max_chord, estimate_metric, estimate_one_sided, estimate_thickness, sample_body, sample_points, Bound,
    Estimate, EstimateKind, SampleBudget, SampleMethod,
};
pub use rotundity::{
    best_chord, extraneous_point_check, is_extreme, long_chord_scan, mlur_ladder, mlur_modulus, ChordSearch,
    ChordWitness, ExtraneousCheck,
};
