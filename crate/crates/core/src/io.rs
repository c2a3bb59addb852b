//! JSON file formats for kernels and network parameters.
//!
//! Reals are written in shortest round-trip form, so a save followed by a
//! load reproduces every value bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BlockMeta, LayerParams, MarkovKernel, NetworkParams};

/// Row `y` is the output law for the input with LSB-first index `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    pub k: usize,
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl From<&MarkovKernel> for KernelFile {
    fn from(kernel: &MarkovKernel) -> Self {
        Self {
            k: kernel.k(),
            n: kernel.n(),
            rows: kernel.rows().iter().map(|r| r.mass().to_vec()).collect(),
        }
    }
}

impl TryFrom<KernelFile> for MarkovKernel {
    type Error = Error;
    fn try_from(file: KernelFile) -> Result<Self> {
        if file.rows.len() != 1usize << file.k {
            return Err(Error::InvalidShape(format!(
                "k = {} needs {} rows, found {}",
                file.k,
                1usize << file.k,
                file.rows.len()
            )));
        }
        if let Some(row) = file.rows.iter().find(|r| r.len() != 1usize << file.n) {
            return Err(Error::InvalidShape(format!(
                "n = {} needs rows of length {}, found {}",
                file.n,
                1usize << file.n,
                row.len()
            )));
        }
        MarkovKernel::from_rows(file.rows)
    }
}

/// Weights are row-major: `hidden_weights` is `m × k`, `output_weights` is
/// `n × m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<Vec<f64>>,
    pub output_bias: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_meta: Option<BlockMeta>,
}

impl From<&NetworkParams> for ParamsFile {
    fn from(net: &NetworkParams) -> Self {
        Self {
            k: net.k(),
            m: net.m(),
            n: net.n(),
            hidden_weights: net.hidden().rows(),
            hidden_bias: net.hidden().bias().to_vec(),
            output_weights: net.output().rows(),
            output_bias: net.output().bias().to_vec(),
            block_meta: net.block_meta(),
        }
    }
}

fn flatten(rows: Vec<Vec<f64>>, width: usize, what: &str) -> Result<Vec<f64>> {
    if let Some(row) = rows.iter().find(|r| r.len() != width) {
        return Err(Error::InvalidShape(format!(
            "{what} rows must have length {width}, found {}",
            row.len()
        )));
    }
    Ok(rows.concat())
}

impl TryFrom<ParamsFile> for NetworkParams {
    type Error = Error;
    fn try_from(file: ParamsFile) -> Result<Self> {
        let (k, m, n) = (file.k, file.m, file.n);
        if file.hidden_weights.len() != m || file.output_weights.len() != n {
            return Err(Error::InvalidShape(format!(
                "declared (k, m, n) = ({k}, {m}, {n}) but found {} hidden and {} output weight rows",
                file.hidden_weights.len(),
                file.output_weights.len()
            )));
        }
        let hidden = LayerParams::from_flat(k, m, flatten(file.hidden_weights, k, "hidden weight")?, file.hidden_bias)?;
        let output = LayerParams::from_flat(m, n, flatten(file.output_weights, m, "output weight")?, file.output_bias)?;
        NetworkParams::new(hidden, output, file.block_meta)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn load_kernel(path: impl AsRef<Path>) -> Result<MarkovKernel> {
    let file: KernelFile = serde_json::from_str(&read(path.as_ref())?)?;
    file.try_into()
}

pub fn load_params(path: impl AsRef<Path>) -> Result<NetworkParams> {
    let file: ParamsFile = serde_json::from_str(&read(path.as_ref())?)?;
    file.try_into()
}

pub fn kernel_to_json(kernel: &MarkovKernel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&KernelFile::from(kernel))?)
}

pub fn params_to_json(net: &NetworkParams) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ParamsFile::from(net))?)
}

pub fn save_kernel(path: impl AsRef<Path>, kernel: &MarkovKernel) -> Result<()> {
    write_text(path, &kernel_to_json(kernel)?)
}

pub fn save_params(path: impl AsRef<Path>, net: &NetworkParams) -> Result<()> {
    write_text(path, &params_to_json(net)?)
}

pub fn save_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    write_text(path, &serde_json::to_string_pretty(value)?)
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    let mut body = text.to_owned();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    fs::write(path, body).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}
