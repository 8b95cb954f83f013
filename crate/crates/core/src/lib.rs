//! Constructive simultaneous hyperbolicity for group actions on exact
//! δ-hyperbolic models.
//!
//! Given a finitely generated group acting on several spaces, each action
//! admitting some hyperbolic element, [`combiner::simultaneous_hyperbolic`]
//! searches the `f^a g^b` family for one word that is hyperbolic in every action
//! and returns an independently checkable [`combiner::Certificate`].

pub mod action;
pub mod arith;
pub mod combiner;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod models;
pub mod sampling;

pub use arith::{format_rational, parse_rational, Quadratic, Rational};
pub use error::{Error, Result};
pub use geometry::{
    distance, estimate_delta_four_point, estimate_delta_four_point_all_bases, estimate_delta_slim,
    estimate_translation_length, gromov_product, DeltaCondition, DeltaEstimate, ExactValue, Length,
    TranslationLengthEstimate,
};
pub use models::plane::{Mat2, PlaneBoundary, PlanePoint};
pub use models::{
    boundary_equal, compose, BoundaryPoint, EllipticWitness, HyperbolicWitness, Isometry, IsometryClass,
    ModelKind, Point, SpaceModel,
};
pub use action::{Action, ActionSystem, GroupWord, Letter};
pub use combiner::{
    check_hypotheses, combine_step, independent, normalize_powers, simultaneous_hyperbolic, verify_certificate,
    ActionProfile, Certificate, CombineError, PartitionTag, SearchSchedule, StageRecord,
};
