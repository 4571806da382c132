// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PinchError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("amplitude vector is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("operator expansion exceeded {cap} monomials")]
    TermExplosion { cap: usize },

    #[error("series did not converge within {0} terms")]
    NoConvergence(usize),

    #[error("projection onto the n-photon subspace has zero norm")]
    ZeroProjection,

    #[error("no coincidences recorded for {0}")]
    NoCoincidences(String),

    #[error("correlation table is missing {0} label(s)")]
    MissingLabels(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PinchError {
    fn from(e: std::io::Error) -> Self {
        PinchError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PinchError>;
