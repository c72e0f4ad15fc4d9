//! Input files. The kind of object is read off its keys.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::Value;

use bidisc_core::colligation::{Blaschke, Colligation};
use bidisc_core::function::{PowerSeries2, RationalFunction2};
use bidisc_core::kernels::{SampledKernel, ThetaRealization};

use crate::report::{CliError, InputsDigest};

#[derive(Debug, Clone)]
pub enum Object {
    Colligation(Colligation),
    Rational(RationalFunction2),
    Blaschke(Blaschke),
    Series(PowerSeries2),
    Kernel(SampledKernel),
    Theta(ThetaRealization),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Colligation(_) => "colligation",
            Object::Rational(_) => "rational function",
            Object::Blaschke(_) => "Blaschke product",
            Object::Series(_) => "power series",
            Object::Kernel(_) => "sampled kernel",
            Object::Theta(_) => "Theta realization",
        }
    }
}

fn typed<T: DeserializeOwned>(value: Value, path: &Path) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::schema(format!("{}: {e}", path.display())))
}

pub fn classify_value(value: Value, path: &Path) -> Result<Object, CliError> {
    let has = |k: &str| value.get(k).is_some();
    if has("partition") {
        Ok(Object::Colligation(typed(value, path)?))
    } else if has("denominator") {
        Ok(Object::Rational(typed(value, path)?))
    } else if has("zeros") {
        let b: Blaschke = typed(value, path)?;
        b.validate()?;
        Ok(Object::Blaschke(b))
    } else if has("values") && has("grid") {
        Ok(Object::Kernel(typed(value, path)?))
    } else if has("dims") {
        Ok(Object::Theta(typed(value, path)?))
    } else if has("deg") && has("coeffs") {
        Ok(Object::Series(typed(value, path)?))
    } else {
        Err(CliError::schema(format!("{}: unrecognised object", path.display())))
    }
}

/// Reads, digests and parses the input files in order.
pub struct Inputs<'a> {
    digest: &'a mut InputsDigest,
}

impl<'a> Inputs<'a> {
    pub fn new(digest: &'a mut InputsDigest) -> Self {
        Inputs { digest }
    }

    pub fn value(&mut self, path: &PathBuf) -> Result<Value, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        self.digest.add("file", &bytes);
        serde_json::from_slice(&bytes).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
    }

    pub fn object(&mut self, path: &PathBuf) -> Result<Object, CliError> {
        let value = self.value(path)?;
        classify_value(value, path)
    }

    pub fn colligation(&mut self, path: &PathBuf) -> Result<Colligation, CliError> {
        match self.object(path)? {
            Object::Colligation(v) => Ok(v),
            other => Err(wrong(path, "colligation", &other)),
        }
    }

    pub fn kernel(&mut self, path: &PathBuf) -> Result<SampledKernel, CliError> {
        match self.object(path)? {
            Object::Kernel(k) => Ok(k),
            other => Err(wrong(path, "sampled kernel", &other)),
        }
    }
}

pub fn wrong(path: &Path, expected: &str, found: &Object) -> CliError {
    CliError::schema(format!("{}: expected a {expected}, found a {}", path.display(), found.kind()))
}
