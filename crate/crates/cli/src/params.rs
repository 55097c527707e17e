use std::fmt;
use std::fs;
use std::path::Path;

use tensor_gauss::io;
use tensor_gauss::matrix_normal::{MatrixNormalJson, MatrixNormalParams};
use tensor_gauss::tensor_normal::{TensorNormalJson, TensorNormalParams};
use tensor_gauss::{Error, Tensor};

use crate::{EXIT_IO, EXIT_USAGE};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Lib(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Lib(Error::Io(_) | Error::Format(_) | Error::Json(_)) => EXIT_IO,
            CliError::Lib(_) => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn read_tensor(path: &Path) -> CliResult<Tensor> {
    io::decode_tensor(&read_bytes(path)?).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, e: Error) -> CliError {
    match e {
        Error::Json(j) => CliError::Io(format!("{}: {j}", path.display())),
        Error::Format(m) => CliError::Io(format!("{}: {m}", path.display())),
        other => CliError::Lib(other),
    }
}

pub enum Params {
    Matrix(MatrixNormalParams<f64>),
    Tensor(TensorNormalParams<f64>),
}

impl Params {
    pub fn dims(&self) -> Vec<usize> {
        match self {
            Params::Matrix(p) => {
                let (a, b) = p.dims();
                vec![a, b]
            }
            Params::Tensor(p) => p.shape().dims().to_vec(),
        }
    }
}

/// A matrix-normal file has keys `M`, `Sigma1`, `Sigma2`; a tensor-normal
/// file has `mu` and `Sigmas`.
pub fn read_params(path: &Path) -> CliResult<Params> {
    let bytes = read_bytes(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let parse_err = |e: serde_json::Error| CliError::Io(format!("{}: {e}", path.display()));
    if value.get("mu").is_some() || value.get("Sigmas").is_some() {
        let j: TensorNormalJson = serde_json::from_str(text).map_err(parse_err)?;
        Ok(Params::Tensor(TensorNormalParams::from_json(j).map_err(|e| in_file(path, e))?))
    } else {
        let j: MatrixNormalJson = serde_json::from_str(text).map_err(parse_err)?;
        Ok(Params::Matrix(MatrixNormalParams::from_json(j).map_err(|e| in_file(path, e))?))
    }
}
