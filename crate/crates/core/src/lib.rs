//! Learning and evaluation of data-driven multi-step predictors for
//! power-network transient trajectories (bus frequencies and voltage
//! magnitudes), plus a swing-equation scenario simulator that generates
//! the training/testing corpus.
//!
//! Predictor families:
//! - Robust DMD: closed-form ridge-regularized linear one-step operator.
//! - deepDMD: learned neural observable lifting with a linear operator on
//!   the lifted space.
//! - STGCN: spatio-temporal graph convolutional network with incremental
//!   autoregressive inference.

pub mod numerics;
