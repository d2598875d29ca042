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

use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (bad parameters, violated
    /// hypotheses, malformed polynomials, missing condensation, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration or allocation budget was exceeded.
    #[error("resource limit exceeded: {what} (limit {limit}){}", if *.partial { ", partial result discarded" } else { "" })]
    Budget {
        what: String,
        limit: usize,
        partial: bool,
    },

    /// Root refinement did not reach the requested certified precision.
    #[error("root refinement failed: {0}")]
    Refinement(String),

    /// A strict comparison could not be certified at the available precision.
    #[error("undecidable at precision {precision:e}: {what}")]
    Undecidable { what: String, precision: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn budget(what: impl Into<String>, limit: usize) -> Self {
        Error::Budget {
            what: what.into(),
            limit,
            partial: false,
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse(_) | Error::Undecidable { .. } | Error::Json(_) => 2,
            Error::Budget { .. } | Error::Refinement(_) => 3,
            Error::Io(_) => 1,
        }
    }
}
