use std::fmt::Display;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use bidisc_core::colligation::ColligationError;
use bidisc_core::factor::FactorError;
use bidisc_core::function::FunctionError;
use bidisc_core::kernels::KernelError;
use bidisc_core::numlin::LinalgError;
use bidisc_core::toeplitz::ToeplitzError;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

/// Domain errors that answer the question asked rather than abort it.
const REFUSALS: &[&str] = &[
    "ConditionFailed",
    "OriginZero",
    "ClassMismatch",
    "PreconditionFailed",
    "NotDbr",
    "KernelNotPsd",
    "NotCoisometric",
    "NotStructured",
    "NotDivisible",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub name: String,
    pub message: String,
}

impl CliError {
    pub fn new(name: &str, message: impl Display) -> Self {
        CliError { name: name.into(), message: message.to_string() }
    }

    pub fn parse(message: impl Display) -> Self {
        CliError::new("ParseError", message)
    }

    pub fn schema(message: impl Display) -> Self {
        CliError::new("SchemaError", message)
    }

    pub fn exit_code(&self) -> u8 {
        if REFUSALS.contains(&self.name.as_str()) {
            EXIT_FAIL
        } else {
            EXIT_ERROR
        }
    }

    pub fn verdict(&self) -> String {
        format!("{}: {}", self.name, self.message)
    }
}

macro_rules! domain_error {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new(e.name(), &e)
            }
        }
    )*};
}

domain_error!(ColligationError, FactorError, FunctionError, KernelError, LinalgError, ToeplitzError);

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new("SerializationError", e)
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: String,
    pub pass: bool,
    pub evidence: Value,
}

impl Outcome {
    pub fn new(verdict: impl Into<String>, pass: bool, evidence: impl Serialize) -> Result<Self, CliError> {
        Ok(Outcome { verdict: verdict.into(), pass, evidence: serde_json::to_value(evidence)? })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(rename = "inputs-digest")]
    pub inputs_digest: String,
    pub tol: f64,
    pub verdict: String,
    pub evidence: Value,
}

/// SHA-256 over the input files and the options that affect the result.
#[derive(Default)]
pub struct InputsDigest(Sha256);

impl InputsDigest {
    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        self.0.update((label.len() as u64).to_le_bytes());
        self.0.update(label.as_bytes());
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}
