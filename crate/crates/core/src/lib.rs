//! Simultaneous and joint ruin of two insurers driven by a common fractional
//! Brownian motion: path simulation, regime classification, exact and
//! logarithmic asymptotics, Pickands-type constants and Monte Carlo.

pub mod asymptotics;
pub mod constants;
pub mod error;
pub mod gaussian_paths;
pub mod montecarlo;
pub mod optimize;
pub mod risk_model;
pub mod seeding;
pub mod special;

pub use asymptotics::{
    log_rate_and, log_rate_objective, pi_and_asym, pi_and_exact_h1, pi_sim_asym, psi_one_dim, AsymptoticValue,
    FormulaConstants, H1Exact, LogRateOptions, LogRateResult, OneDimCase, PaperFlags,
};
pub use constants::{
    pickands, piterbarg_for_crossing, piterbarg_h_half, piterbarg_simulated, ConstantMethod, PickandsEstimate,
    PickandsEstimator, PickandsOptions, PiterbargEstimate, PiterbargOptions,
};
pub use error::{Result, RuinError};
pub use gaussian_paths::{
    fbm_covariance, sample_fbm, sample_fbm_cholesky, FbmGenerator, GeneratorKind, Grid, HurstIndex, PathSample,
};
pub use montecarlo::{
    convergence_study, default_shift, estimate_ruin, estimate_ruin_multi, inclusion_check, ConvergenceOptions,
    ConvergenceRow, ConvergenceTable, EstimateCI, Estimator, EstimatorChoice, InclusionReport, RuinQuery, RuinType,
    ShiftSpec,
};
pub use risk_model::{
    classify, critical_points, m_constant, normalize, peak_constants, CriticalPoints, ModelParams, NormalizedParams,
    PeakConstants, Regime, RegimeTag,
};
pub use seeding::DEFAULT_SEED;
pub use special::{log_psi, phi, psi};
