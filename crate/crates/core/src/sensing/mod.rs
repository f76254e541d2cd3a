//! Trigonometric sampling matrices on the point sets: mutual incoherence and
//! orthogonal matching pursuit recovery of sparse trigonometric polynomials.

mod coherence;
mod experiment;
mod omp;
mod poly;

pub use coherence::{coherence, coherence_gram_oracle, BoundSource, CoherenceReport, DEFAULT_GRAM_BUDGET};
pub use experiment::{recovery_experiment, ExperimentConfig, ExperimentSummary, COEFF_TOL};
pub use omp::{omp_recover, Dictionary, OmpOutcome, COND_LIMIT};
pub use poly::{evaluate, sample, SampleVector, SparseTrigPoly};
