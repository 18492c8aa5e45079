use std::fmt;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use covmap::covmap2::CovariantCoefficients;
use covmap::error::Error;
use covmap::linalg::ComplexMatrix;
use covmap::multicopy::MultiCopyCoefficients;

/// Process exit codes. Stable; listed in the README.
pub mod exit {
    pub const OK: i32 = 0;
    pub const GENERIC: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const DIMENSION: i32 = 3;
    pub const TRACE_TERMS: i32 = 4;
    pub const UNIQUENESS: i32 = 5;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(exit::PARSE, message)
    }

    pub fn dimension(message: impl Into<String>) -> Self {
        Self::new(exit::DIMENSION, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. }
            | Error::InvalidDimension(_)
            | Error::IndexOutOfRange { .. }
            | Error::GaugeAmbiguous => exit::DIMENSION,
            Error::TraceTermsPresent { .. } => exit::TRACE_TERMS,
            Error::UniquenessUnavailable { .. } => exit::UNIQUENESS,
            Error::InvalidPermutation(_) => exit::PARSE,
            _ => exit::GENERIC,
        };
        CliError::new(code, e.to_string())
    }
}

/// Any of the three file payloads, told apart by their keys.
#[derive(Debug)]
pub enum Payload {
    Coefficients(CovariantCoefficients),
    Superoperator(ComplexMatrix),
    MultiCopy(MultiCopyCoefficients),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Coefficients(_) => "coefficients",
            Payload::Superoperator(_) => "matrix",
            Payload::MultiCopy(_) => "multicopy coefficients",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficients {
    d: usize,
    coeffs: Vec<Complex64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMulti {
    m: usize,
    d: usize,
    lam: Vec<Vec<Complex64>>,
}

/// Reads a file, or stdin for `-`.
pub fn read_source(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| {
        CliError::new(
            exit::GENERIC,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    Ok(text)
}

pub fn parse_payload(text: &str, origin: &str) -> Result<Payload, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::parse(format!("{origin}: malformed JSON: {e}")))?;
    let shape_err = |e: serde_json::Error| CliError::parse(format!("{origin}: {e}"));
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::parse(format!("{origin}: expected a JSON object")))?;
    if obj.contains_key("coeffs") {
        let raw: RawCoefficients = serde_json::from_value(value).map_err(shape_err)?;
        let coeffs: [Complex64; 6] = raw.coeffs.as_slice().try_into().map_err(|_| {
            CliError::parse(format!(
                "{origin}: expected 6 coefficients, got {}",
                raw.coeffs.len()
            ))
        })?;
        Ok(Payload::Coefficients(CovariantCoefficients::new(
            raw.d, coeffs,
        )?))
    } else if obj.contains_key("lam") {
        let raw: RawMulti = serde_json::from_value(value).map_err(shape_err)?;
        Ok(Payload::MultiCopy(MultiCopyCoefficients::new(
            raw.m, raw.d, raw.lam,
        )?))
    } else if obj.contains_key("rows") {
        let m: ComplexMatrix = serde_json::from_value(value).map_err(shape_err)?;
        Ok(Payload::Superoperator(m))
    } else {
        Err(CliError::parse(format!(
            "{origin}: expected coefficients (\"coeffs\"), a matrix (\"rows\") or multicopy coefficients (\"lam\")"
        )))
    }
}

pub fn load(path: &Path) -> Result<Payload, CliError> {
    parse_payload(&read_source(path)?, &path.display().to_string())
}

pub fn load_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    match load(path)? {
        Payload::Superoperator(m) => Ok(m),
        other => Err(CliError::parse(format!(
            "{}: expected a matrix, got {}",
            path.display(),
            other.kind()
        ))),
    }
}
