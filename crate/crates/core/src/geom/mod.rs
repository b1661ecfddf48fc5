//! Planar primitives, curve certificates, empirical constants and gluing.

pub mod bilip;
pub mod certificate;
pub mod glue;
pub mod lattice;
pub mod point;
pub mod polyline;
pub mod segment;
pub mod side;

pub use bilip::{
    empirical_bilip, exhaustive_bilip, BilipEstimate, BoxSampler, IntervalSampler, Metric,
};
pub use certificate::{
    pwaff_audit, pwaff_bound, pwaff_certificate, CertChecks, CertOptions, PwAffCertificate,
};
pub use glue::{glue_bound_brute, glue_lip_check, GluePart, GlueReport};
pub use lattice::LatticeMap;
pub use point::{point_segment_dist_d, Point, PointD};
pub use polyline::{angle_between, Polyline};
pub use segment::{point_segment_distance, segment_segment_distance, Segment};
pub use side::{component_labels, crossing_parity, same_component, side_classify, Side};
