// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

pub mod bogoliubov;
pub mod error;
pub mod experiments;
pub mod fock_oracle;
pub mod measurement;
pub mod mermin;
pub mod operator;
pub mod pauli;
pub mod random;
pub mod rng;
pub mod sampler;
pub mod tensor;
pub mod tomography;

pub use error::{PinchError, Result};
