//! Seeded instance generation, verification campaigns and certificate
//! comparison.

mod campaign;
mod compare;
mod integral;
mod rng;
mod sample;

pub use campaign::{
    run_campaign, CampaignConfig, CampaignReport, FieldChoice, NamedCheck, TheoremResult,
    ViolationDetail, MAX_VIOLATION_DUMPS, WITNESS_STRIDE,
};
pub use compare::{compare_certificates, specialize, Comparison, ConsistencyFlag, Ranked};
pub use integral::{
    run_integral_campaign, IntegralConfig, IntegralInstance, VectorPolynomial, WeightChoice,
    CONSISTENCY_TOLERANCE, MAX_DEGREE,
};
pub use rng::{
    derive_stream, gaussian_vector, log_uniform, random_orthonormal, random_real_orthogonal_unit,
    random_unit, uniform, uniform_in_ball, Label,
};
pub use sample::{sample_instance, SampleSpec, REJECTION_CAP};
