//! Resolution sweeps measuring the commutator, cancellation and coercivity
//! bounds the approximation scheme depends on. Every check reports a fitted
//! growth exponent rather than an absolute constant.

mod checks;
mod corpus;
mod report;

pub use checks::{
    a3_terms, b12_lhs, cancellation_terms, check_a3, check_b12, check_cancellation, check_dong, check_kato_ponce,
    check_mollifier_rate, check_smoothing_gain, check_te_commutator, corpus_state, dong_ratio, dyadic_eps,
    kato_ponce_terms, run_estimate, te_commutator_ratio, te_commutator_terms, LabConfig, ESTIMATE_IDS,
};
pub use corpus::{corpus, CorpusEntry, Roughness, BANDLIMITED_MODES};
pub use report::{growth_exponent, summary_table, Criterion, EstimateReport};
