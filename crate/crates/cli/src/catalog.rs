//! JSON catalogs of spectral lines.
//!
//! A catalog file is an array of objects:
//!
//! ```json
//! [{ "name": "Cs-D2", "transition": "6S1/2 -> 6P3/2",
//!    "t_recoil_uK": 0.2, "t_doppler_uK": 125.0,
//!    "wavelength_nm": 852.347, "linewidth_2pi_MHz": 5.234, "mass_amu": 132.905 }]
//! ```
//!
//! The last three fields are optional. Unknown fields are rejected.

use std::path::Path;

use atomphoton_core::spectra::{builtin_catalog, find_line, SpectralLine, SpectralLineSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Overrides the built-in catalog when `--catalog` is not given.
pub const CATALOG_ENV: &str = "ATOMPHOTON_CATALOG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(default)]
    pub transition: String,
    #[serde(rename = "t_recoil_uK")]
    pub t_recoil_uk: f64,
    #[serde(rename = "t_doppler_uK")]
    pub t_doppler_uk: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_nm: Option<f64>,
    #[serde(
        default,
        rename = "linewidth_2pi_MHz",
        skip_serializing_if = "Option::is_none"
    )]
    pub linewidth_2pi_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_amu: Option<f64>,
}

impl From<SpectralLineSpec> for CatalogEntry {
    fn from(s: SpectralLineSpec) -> Self {
        Self {
            name: s.name,
            transition: s.transition,
            t_recoil_uk: s.t_recoil_uk,
            t_doppler_uk: s.t_doppler_uk,
            wavelength_nm: s.wavelength_nm,
            linewidth_2pi_mhz: s.linewidth_2pi_mhz,
            mass_amu: s.mass_amu,
        }
    }
}

impl From<CatalogEntry> for SpectralLineSpec {
    fn from(e: CatalogEntry) -> Self {
        Self {
            name: e.name,
            transition: e.transition,
            t_recoil_uk: e.t_recoil_uk,
            t_doppler_uk: e.t_doppler_uk,
            wavelength_nm: e.wavelength_nm,
            linewidth_2pi_mhz: e.linewidth_2pi_mhz,
            mass_amu: e.mass_amu,
        }
    }
}

pub fn parse_catalog(text: &str, origin: &str) -> Result<Vec<SpectralLine>> {
    let bad = |message: String| CliError::Catalog {
        origin: origin.to_string(),
        message,
    };
    let entries: Vec<CatalogEntry> = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if entries.is_empty() {
        return Err(bad("no lines".into()));
    }
    let mut lines: Vec<SpectralLine> = Vec::with_capacity(entries.len());
    for entry in entries {
        if entry.name.trim().is_empty() {
            return Err(bad("line with empty name".into()));
        }
        if lines.iter().any(|l| l.name() == entry.name) {
            return Err(bad(format!("duplicate line `{}`", entry.name)));
        }
        let name = entry.name.clone();
        let line =
            SpectralLine::new(entry.into()).map_err(|e| bad(format!("line `{name}`: {e}")))?;
        lines.push(line);
    }
    Ok(lines)
}

pub fn to_json(lines: &[SpectralLine]) -> String {
    let entries: Vec<CatalogEntry> = lines.iter().map(|l| l.spec().into()).collect();
    serde_json::to_string_pretty(&entries).expect("catalog entries always serialize")
}

pub fn load_catalog_file(path: &Path) -> Result<Vec<SpectralLine>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_catalog(&text, &path.display().to_string())
}

/// `--catalog` if given, else the file named by [`CATALOG_ENV`], else the
/// built-in catalog.
pub fn load_catalog(path: Option<&Path>) -> Result<Vec<SpectralLine>> {
    if let Some(path) = path {
        return load_catalog_file(path);
    }
    match std::env::var_os(CATALOG_ENV) {
        Some(p) if !p.is_empty() => load_catalog_file(Path::new(&p)),
        _ => Ok(builtin_catalog()),
    }
}

pub fn lookup<'a>(catalog: &'a [SpectralLine], name: &str) -> Result<&'a SpectralLine> {
    find_line(catalog, name).ok_or_else(|| CliError::UnknownLine {
        name: name.to_string(),
        available: catalog.iter().map(|l| l.name().to_string()).collect(),
    })
}
