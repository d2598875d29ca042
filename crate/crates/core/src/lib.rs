// Copyright 2026 The fraclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Box dimensions of inhomogeneous self-similar sets.
//!
//! The crate builds similarity IFSs with a condensation set, generates
//! point nets of their inhomogeneous attractors, counts half-open dyadic
//! mesh cubes, and evaluates closed-form dimension bounds. Supporting
//! modules classify the algebraic parameters (Garsia and Pisot numbers),
//! enumerate Bernoulli sum sets, detect exact overlaps and follow rotation
//! orbits on the sphere.

pub mod algebraic;
pub mod bounds;
pub mod boxcount;
pub mod cli;
pub mod error;
pub mod exact;
pub mod ifs;
pub mod overlap;
pub mod separation;
pub mod sphere;

pub use error::{Error, Result};
