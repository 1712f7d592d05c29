//! Weibull multi-parameter regression (MPR) survival models.
//!
//! Covariates enter both the Weibull scale and shape through log links,
//! `log λ = xᵀβ` and `log γ = zᵀα`, so hazard ratios may vary with time.
//! The crate provides
//!
//! - CSV ingestion and dummy-coded scale/shape designs ([`data`]),
//! - censored maximum likelihood with analytic derivatives ([`model`]),
//! - Wald, joint Wald and likelihood ratio tests, confidence ellipses and
//!   information criteria ([`inference`]),
//! - time-dependent hazard ratios, crossing times and Kaplan-Meier curves
//!   ([`curves`]),
//! - stagewise selection over scale, shape and joint moves ([`selection`]),
//! - simulation studies ([`sim`]).
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below name the double precision instantiations that the
//! selection and simulation layers use.
//!
//! ```
//! use mpr_core::{encode_design, fit, Column, Dataset, FitOptions, ModelSpec};
//!
//! let ds = Dataset::new(
//!     vec![0.5, 1.2, 2.0, 3.1, 0.7, 4.4],
//!     vec![true, true, false, true, true, false],
//!     vec![("c".into(), Column::Numeric(vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0]))],
//! )?;
//! let design = encode_design::<f64>(&ds, &ModelSpec::new(["c"], Vec::<&str>::new()))?;
//! let model = fit(&design, &FitOptions::default())?;
//! assert!(model.converged);
//! # Ok::<(), mpr_core::MprError>(())
//! ```

pub mod curves;
pub mod data;
pub mod error;
pub mod inference;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod selection;
pub mod sim;
pub mod special;

pub use curves::{
    crossing_time, crossing_time_from, hazard_ratio, hazard_ratio_at, hazard_ratio_averaged,
    kaplan_meier, HazardRatioCurve, KMCurve, ZTildePolicy,
};
pub use data::{
    encode_design, parse_dataset, Column, ColumnKind, ColumnLabel, Component, Dataset,
    DesignMatrices, ModelSpec,
};
pub use error::{MprError, Result};
pub use inference::{
    chi_square_sf, confidence_ellipse, information_criteria, likelihood_ratio_test, wald_joint,
    wald_single, EffectKey, Ellipse, TestKind, TestResult,
};
pub use linalg::Matrix;
pub use model::{
    fit, log_likelihood, observed_information, predict_hazard, predict_survivor, score,
    CovariateProfile, FitOptions, FittedModel, ProfileValue, Theta,
};
pub use scalar::Scalar;
pub use selection::{
    compare_models, step_mpr, CandidateSet, Criterion, Directions, SelectionOptions,
    SelectionTrace,
};
pub use sim::{
    calibrate_censoring, run_correlation_study, run_selection_study, CorrelationReport,
    FrequencyReport, SimDesign,
};

pub type Theta64 = Theta<f64>;
pub type Theta32 = Theta<f32>;
pub type FittedModel64 = FittedModel<f64>;
pub type FittedModel32 = FittedModel<f32>;
pub type DesignMatrices64 = DesignMatrices<f64>;
pub type DesignMatrices32 = DesignMatrices<f32>;
pub type HazardRatioCurve64 = HazardRatioCurve<f64>;
pub type KMCurve64 = KMCurve<f64>;
pub type Matrix64 = Matrix<f64>;
