//! Suite manifests.
//!
//! ```json
//! {"tasks": [{"path": "pick.cbddl", "level": "L0", "episodes": 10, "seed": 3}]}
//! ```
//!
//! Paths are relative to the manifest's directory. `episodes` and `seed` are
//! optional; command-line flags override both.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_EPISODES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    L0,
    L1,
    L2,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::L0 => "L0",
            Level::L1 => "L1",
            Level::L2 => "L2",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub level: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub episodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteManifest {
    pub tasks: Vec<ManifestEntry>,
}

impl SuiteManifest {
    /// Parses the manifest and resolves every path against `base_dir`.
    /// Entries must name existing files and ask for at least one episode.
    pub fn parse(text: &str, base_dir: &Path) -> Result<SuiteManifest> {
        let mut m: SuiteManifest = serde_json::from_str(text).context("malformed manifest")?;
        for e in &mut m.tasks {
            if e.path.is_relative() {
                e.path = base_dir.join(&e.path);
            }
            if !e.path.is_file() {
                bail!("manifest task {} does not exist", e.path.display());
            }
            if e.episodes == Some(0) {
                bail!("manifest task {} asks for zero episodes", e.path.display());
            }
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<SuiteManifest> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read manifest {}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        SuiteManifest::parse(&text, dir).with_context(|| format!("in {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.cbddl"), "").unwrap();
        let m =
            SuiteManifest::parse(r#"{"tasks":[{"path":"a.cbddl","level":"L2","episodes":3}]}"#, dir.path()).unwrap();
        assert_eq!(m.tasks[0].path, dir.path().join("a.cbddl"));
        assert_eq!(m.tasks[0].level, Level::L2);
        assert_eq!(m.tasks[0].seed, None);
    }

    #[test]
    fn rejects_bad_entries() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.cbddl"), "").unwrap();
        for bad in [
            r#"{"tasks":[{"path":"missing.cbddl","level":"L0"}]}"#,
            r#"{"tasks":[{"path":"a.cbddl","level":"L3"}]}"#,
            r#"{"tasks":[{"path":"a.cbddl","level":"L0","episodes":0}]}"#,
            r#"{"tasks":[{"path":"a.cbddl","level":"L0","extra":1}]}"#,
        ] {
            assert!(SuiteManifest::parse(bad, dir.path()).is_err(), "{bad}");
        }
    }
}
