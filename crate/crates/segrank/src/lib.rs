//! Evaluation engine for segmentation challenges.
//!
//! Scores predicted label volumes against ground truth with overlap (DSC)
//! and surface-distance (ASSD) metrics, turns per-case scores into
//! leaderboards under a rank-then-aggregate scheme and three alternatives,
//! and quantifies how stable those leaderboards are under bootstrap
//! resampling of the test set. A synthetic-challenge generator with a known
//! team-quality ordering makes the whole pipeline testable without any real
//! challenge data.
//!
//! Start with [`manifest::ChallengeManifest`], which declares cases, teams,
//! structures, metrics and file locations; everything else consumes it.
//! The `examples/` directory walks through each capability end to end.

pub mod cli;
pub mod error;
pub mod evaluate;
pub mod manifest;
pub mod metrics;
pub mod nifti;
pub mod ordinal;
pub mod ranking;
pub mod report;
pub mod rng;
pub mod stability;
pub mod stats;
pub mod synth;
mod svg;
pub mod volume;

mod nn;

pub use error::{Error, Result};
