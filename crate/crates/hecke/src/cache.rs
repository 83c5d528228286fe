//! On-disk cache of double-coset tables.
//!
//! One JSON file per pair, written to a temporary file in the cache
//! directory and renamed into place. Stale or unreadable files are rebuilt.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use hecke_core::hecke::HeckeAlgebra;
use hecke_core::treefam::{ball_aut_group, q_group};
use hecke_core::{DoubleCosetTable, PermGroup, TreeShape};

use crate::format::{table_from_json, table_to_json};

/// Overrides the default cache root.
pub const CACHE_ENV: &str = "HECKE_CACHE_DIR";

/// Which `(G, H)` to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// `(S_{d^l}, Q_l)`.
    Depth { d: usize, l: usize },
    /// `(S_{|V_n|}, P_n)` for `T_{d,k}`.
    Ball { shape: TreeShape, n: usize },
}

impl PairKind {
    pub fn groups(&self) -> Result<(PermGroup, PermGroup)> {
        let h = match *self {
            Self::Depth { d, l } => q_group(d, l)?,
            Self::Ball { shape, n } => ball_aut_group(shape, n)?,
        };
        Ok((PermGroup::symmetric(h.degree()), h))
    }

    pub fn key(&self) -> String {
        match *self {
            Self::Depth { d, l } => format!("depth-d{d}-l{l}"),
            Self::Ball { shape, n } => format!("ball-d{}-k{}-n{n}", shape.d, shape.k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Disabled,
    Hit,
    /// Built and stored.
    Stored,
    /// The stored file was unusable and has been replaced.
    Replaced,
}

#[derive(Clone, Debug)]
pub struct TableCache {
    root: Option<PathBuf>,
}

impl TableCache {
    pub fn disabled() -> Self {
        Self { root: None }
    }

    pub fn at(root: impl Into<PathBuf>) -> Self {
        Self { root: Some(root.into()) }
    }

    /// `explicit`, else `$HECKE_CACHE_DIR`, else `$XDG_CACHE_HOME/hecke` or
    /// `$HOME/.cache/hecke`.
    pub fn resolve(explicit: Option<PathBuf>) -> Self {
        let env = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        let root = explicit
            .or_else(|| env(CACHE_ENV))
            .or_else(|| env("XDG_CACHE_HOME").map(|p| p.join("hecke")))
            .or_else(|| env("HOME").map(|p| p.join(".cache").join("hecke")));
        Self { root }
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn path_for(&self, kind: &PairKind) -> Option<PathBuf> {
        self.root
            .as_ref()
            .map(|r| r.join(format!("{}-v{}.json", kind.key(), env!("CARGO_PKG_VERSION"))))
    }

    pub fn table(&self, kind: &PairKind) -> Result<(DoubleCosetTable, CacheStatus)> {
        let (g, h) = kind.groups()?;
        let Some(path) = self.path_for(kind) else {
            return Ok((DoubleCosetTable::new(&g, &h)?, CacheStatus::Disabled));
        };
        let existed = path.exists();
        if existed {
            if let Ok(table) = fs::read_to_string(&path)
                .map_err(anyhow::Error::from)
                .and_then(|text| table_from_json(&text, &kind.key(), &g, &h))
            {
                return Ok((table, CacheStatus::Hit));
            }
        }
        let table = DoubleCosetTable::new(&g, &h)?;
        write_atomic(&path, table_to_json(&table, &kind.key())?.as_bytes())?;
        Ok((table, if existed { CacheStatus::Replaced } else { CacheStatus::Stored }))
    }

    pub fn algebra(&self, kind: &PairKind) -> Result<(Arc<HeckeAlgebra>, CacheStatus)> {
        let (table, status) = self.table(kind)?;
        Ok((HeckeAlgebra::from_table(table)?, status))
    }
}

/// Writes `bytes` next to `path` and renames the result over it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
