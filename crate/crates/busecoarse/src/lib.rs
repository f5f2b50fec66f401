//! busecoarse: computational experiments in Busemann nonpositively curved
//! geometry and its coarse structure.
//!
//! The crate provides a small catalogue of metric spaces (`l_p(n)`, the
//! half-line, and the glued space `X_p`), geodesics and barycenters on
//! them, projections of the visual compactification onto balls, sampled
//! certification of Higson-type functions, nerve and coarsening machinery
//! for ball covers with the spherical simplex metric, separated-net and
//! packing/covering diagnostics, and symbolic K-group bookkeeping for the
//! boundaries involved.

pub mod boundary;
pub mod busemann;
pub mod coarse;
pub mod complex;
pub mod error;
pub mod higson;
pub mod kinv;
pub mod nets;
pub mod report;
pub mod sample;
pub mod space;

pub use boundary::{
    busemann_contraction_bound, contraction, project, project_between, ray_point,
    validate_boundary, BoundaryPoint, CompactifiedPoint,
};
pub use busemann::{
    barycenter, busemann_check, busemann_check_along, convexity_sweep, geodesic_homotopy,
    ConvexityReport, SweepOptions, WeightedPoints,
};
pub use coarse::{
    closeness, coarseness_profile, continuous_approximation, ApproxOutcome, ClosenessCertificate,
    CoarsenessReport, ContinuousApproximation, DomainSample, ExpansionRow, PropernessReport,
    SampledMap,
};
pub use complex::{
    anti_cech, ball_intersection_witness, carrier_vertex, compose_vertex_maps, is_contiguous,
    map_simplex, nerve, nerve_map, simpliciality_failure, spherical_distance, AntiCechLevel,
    AntiCechSystem, Ball, BarycentricPoint, CoarseningMap, ContainmentWitness, ContiguityReport,
    Cover, SimplicialComplex,
};
pub use error::{Error, Result};
pub use higson::{
    higson_certify, higson_certify_raw, pullback, uniform_modulus, Builtin, BuiltinKind,
    HigsonCheckReport, HigsonParams, Pullback, ScalarFn, ShellStat,
};
pub use kinv::{sphere_k_homology, xp_boundary_k, xp_boundary_k_truncated, AbelianGroup};
pub use nets::{
    bounded_geometry_profile, covering_number, gamma_growth_table, gamma_k, greedy_net,
    growth_table_csv, packing_number, DiscreteSample, NetCertificate,
};
pub use report::{CheckReport, CheckStatus};
pub use space::{
    delta, distance, geodesic_point, lp_norm, validate_point, Geodesic, Point, Route, Space,
    DEFAULT_TOLERANCE,
};
