//! Evaluation harness: mean-preserving perturbations, synthetic data
//! generation from the transport-chain model, leave-one-out comparison
//! against a kernel-regression baseline, and replicated experiment drivers.

pub mod experiments;
pub mod loo;
pub mod perturb;
pub mod simulate;

pub use experiments::{
    alpha_recovery_experiment, delta_experiment, dominance_experiment, estimate_delta,
    order_recovery_experiment, ExperimentConfig, ExperimentReport,
};
pub use loo::{loo_evaluate, FoldRecord, LooMethod, LooReport};
pub use perturb::{perturb, PerturbationSpec};
pub use simulate::{
    population_truth, simulate_from_truth, simulate_got, GeneratingTruth, SimulatedDataset,
};
