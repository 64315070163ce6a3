//! Workspace configuration and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::documents::{parse_document, Document, ParseError};
use crate::operator::{Scenario, TimeModelParams};
use crate::panel::{PanelSpec, PlantState};

pub const WORKSPACE_ENV: &str = "CSCP_WORKSPACE";

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: referenced file does not exist")]
    Missing { path: PathBuf },
    #[error("no workspace config given and {WORKSPACE_ENV} is unset")]
    NoConfig,
}

/// Paths are relative to the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceConfig {
    pub plant: PathBuf,
    pub panels: Vec<PathBuf>,
    #[serde(default)]
    pub scenarios: Vec<PathBuf>,
    #[serde(default)]
    pub params: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Document for WorkspaceConfig {
    const FORMAT: &'static str = "cscp.workspace/1";
}

#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    pub plant: PlantState,
    pub panels: Vec<PanelSpec>,
    pub scenarios: Vec<Scenario>,
    pub params: TimeModelParams,
    pub output_dir: PathBuf,
}

/// `CSCP_WORKSPACE` takes precedence over the path given on the command line.
pub fn config_path(given: Option<&Path>) -> Result<PathBuf, WorkspaceError> {
    match std::env::var_os(WORKSPACE_ENV) {
        Some(p) if !p.is_empty() => Ok(PathBuf::from(p)),
        _ => given.map(Path::to_path_buf).ok_or(WorkspaceError::NoConfig),
    }
}

pub fn read_text(path: &Path) -> Result<String, WorkspaceError> {
    std::fs::read_to_string(path).map_err(|source| WorkspaceError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_document<T: Document>(path: &Path) -> Result<T, WorkspaceError> {
    if !path.exists() {
        return Err(WorkspaceError::Missing {
            path: path.to_path_buf(),
        });
    }
    parse_document(&read_text(path)?).map_err(|source| WorkspaceError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

impl WorkspaceConfig {
    pub fn load(path: &Path) -> Result<Workspace, WorkspaceError> {
        let cfg: WorkspaceConfig = load_document(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let at = |p: &PathBuf| base.join(p);
        Ok(Workspace {
            plant: load_document(&at(&cfg.plant))?,
            panels: cfg
                .panels
                .iter()
                .map(|p| load_document(&at(p)))
                .collect::<Result<_, _>>()?,
            scenarios: cfg
                .scenarios
                .iter()
                .map(|p| load_document(&at(p)))
                .collect::<Result<_, _>>()?,
            params: match &cfg.params {
                Some(p) => load_document(&at(p))?,
                None => TimeModelParams::default(),
            },
            output_dir: at(&cfg.output_dir),
        })
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), WorkspaceError> {
    let err = |source| WorkspaceError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}
