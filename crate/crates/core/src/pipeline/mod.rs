//! End-to-end constructions: gap-peaking idempotents, the concentration
//! pipeline `S(x) = R(x) T(qx)` with a measured certificate, the `L^2`
//! gap bound, and randomized grid concentration trials.

mod concentrate;
mod l2gap;
mod peaking;
mod random;

pub use concentrate::{
    concentrate, concentrate_with_polynomial, CandidateSummary, Chain, Concentration,
    ConcentrationReport, GridKind, PipelineConfig, Route, REPORT_SCHEMA_VERSION,
};
pub use l2gap::{l2_gap_bound, triangle_coefficient, L2GapBound};
pub use peaking::{
    build_peaking_idempotent, dirichlet_peak, envelope, peaking_within_budget, riesz_degree,
    Envelope, MarginalProfile, PeakingIdempotent, PeakingOptions, DEFAULT_PEAK_DEGREE_BUDGET,
};
pub use random::{random_concentration_trial, trial_seed, RandomTrialReport};
