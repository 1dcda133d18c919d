//! Array config files: engineering units in, validated SI model out.
//!
//! ```toml
//! [[coils]]
//! L_uH = 10.0
//! C_pF = 150.0      # or C_nF; exactly one per coil
//! R_ohm = 10.0
//!
//! [coupling.chain]  # or coupling.matrix / coupling.close_packed
//! k_nn = 0.14
//! # decay = 3.0     # omit for nearest-neighbour-only coupling
//!
//! drive = 1         # 1-based element index, defaults to 1
//!
//! [sweep]
//! start_MHz = 3.2
//! stop_MHz = 5.2
//! points = 2000
//! spacing = "linear"
//! ```

use std::fs;
use std::path::Path;

use overcoupled::nalgebra::DMatrix;
use overcoupled::{
    build_close_packed, build_linear_chain, validate_array, ArrayModel, CoilCircuit,
    CouplingMatrix, FrequencyGrid, GridSpacing, ValidatedArray, NEAREST_NEIGHBOR_ONLY,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub coils: Vec<CoilEntry>,
    pub coupling: CouplingSection,
    pub drive: Option<usize>,
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoilEntry {
    #[serde(rename = "L_uH")]
    pub l_uh: f64,
    #[serde(rename = "C_pF")]
    pub c_pf: Option<f64>,
    #[serde(rename = "C_nF")]
    pub c_nf: Option<f64>,
    #[serde(rename = "R_ohm")]
    pub r_ohm: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub matrix: Option<Vec<Vec<f64>>>,
    pub chain: Option<ChainSection>,
    pub close_packed: Option<ClosePackedSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub k_nn: f64,
    pub decay: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosePackedSection {
    pub k: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(rename = "start_MHz")]
    pub start_mhz: f64,
    #[serde(rename = "stop_MHz")]
    pub stop_mhz: f64,
    pub points: usize,
    pub spacing: Option<String>,
}

/// A config resolved against the core model types.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub model: ValidatedArray,
    /// Zero-based drive element.
    pub drive_index: usize,
    pub grid: Option<FrequencyGrid>,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let parsed: ConfigFile =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    resolve_config(parsed)
}

pub fn resolve_config(config: ConfigFile) -> Result<LoadedConfig, CliError> {
    let coils = resolve_coils(&config.coils)?;
    let model = resolve_coupling(&config.coupling, coils)?;
    let model = validate_array(model)?;

    let drive = config.drive.unwrap_or(1);
    if drive < 1 || drive > model.len() {
        return Err(CliError::Validation(format!(
            "drive = {drive} out of range: must lie in 1..={}",
            model.len()
        )));
    }

    let grid = config.sweep.as_ref().map(resolve_sweep).transpose()?;
    Ok(LoadedConfig {
        model,
        drive_index: drive - 1,
        grid,
    })
}

fn resolve_coils(entries: &[CoilEntry]) -> Result<Vec<CoilCircuit>, CliError> {
    if entries.is_empty() {
        return Err(CliError::Config("coils: at least one coil required".into()));
    }
    let mut coils = Vec::with_capacity(entries.len());
    for (i, entry) in entries.iter().enumerate() {
        let capacitance = match (entry.c_pf, entry.c_nf) {
            (Some(pf), None) => pf * 1e-12,
            (None, Some(nf)) => nf * 1e-9,
            _ => {
                return Err(CliError::Config(format!(
                    "coils[{i}]: exactly one of C_pF or C_nF must be set"
                )))
            }
        };
        for (key, value) in [
            ("L_uH", entry.l_uh),
            ("C", capacitance),
            ("R_ohm", entry.r_ohm),
        ] {
            if !value.is_finite() {
                return Err(CliError::Config(format!(
                    "coils[{i}].{key}: value must be finite, got {value}"
                )));
            }
        }
        coils.push(CoilCircuit::new(
            entry.l_uh * 1e-6,
            capacitance,
            entry.r_ohm,
        ));
    }
    Ok(coils)
}

fn resolve_coupling(
    section: &CouplingSection,
    coils: Vec<CoilCircuit>,
) -> Result<ArrayModel, CliError> {
    let forms = [
        section.matrix.is_some(),
        section.chain.is_some(),
        section.close_packed.is_some(),
    ]
    .iter()
    .filter(|&&present| present)
    .count();
    if forms != 1 {
        return Err(CliError::Config(
            "coupling: exactly one of matrix, chain or close_packed must be present".into(),
        ));
    }

    if let Some(rows) = &section.matrix {
        let n = rows.len();
        if rows.iter().any(|row| row.len() != n) {
            return Err(CliError::Config(format!(
                "coupling.matrix: must be square, got {n} rows of lengths {:?}",
                rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(CliError::Config(format!(
                        "coupling.matrix[{i}][{j}]: value must be finite, got {value}"
                    )));
                }
            }
        }
        let entries = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        return Ok(ArrayModel::new(coils, CouplingMatrix::new(entries)));
    }
    if let Some(chain) = &section.chain {
        let decay = chain.decay.unwrap_or(NEAREST_NEIGHBOR_ONLY);
        return Ok(build_linear_chain(coils, chain.k_nn, decay)?);
    }
    let close_packed = section.close_packed.as_ref().unwrap();
    Ok(build_close_packed(coils, close_packed.k)?)
}

fn resolve_sweep(section: &SweepSection) -> Result<FrequencyGrid, CliError> {
    let spacing = match section.spacing.as_deref() {
        None | Some("linear") => GridSpacing::Linear,
        Some("logarithmic") => GridSpacing::Logarithmic,
        Some(other) => {
            return Err(CliError::Config(format!(
                "sweep.spacing: expected \"linear\" or \"logarithmic\", got \"{other}\""
            )))
        }
    };
    for (key, value) in [
        ("start_MHz", section.start_mhz),
        ("stop_MHz", section.stop_mhz),
    ] {
        if !value.is_finite() {
            return Err(CliError::Config(format!(
                "sweep.{key}: value must be finite, got {value}"
            )));
        }
    }
    Ok(FrequencyGrid::new(
        section.start_mhz * 1e6,
        section.stop_mhz * 1e6,
        section.points,
        spacing,
    )?)
}
