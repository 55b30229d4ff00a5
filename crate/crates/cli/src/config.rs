use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

/// Settings read from `--config`. Command-line flags win over the file.
#[derive(Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub workers: Option<usize>,
    pub chunk_size: Option<usize>,
    pub seed: Option<u64>,
    pub alphabet: Option<String>,
    pub max_nodes: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_files() {
        let cfg: FileConfig = toml::from_str("workers = 4\nalphabet = \"generic\"\n").unwrap();
        assert_eq!(cfg.workers, Some(4));
        assert_eq!(cfg.alphabet.as_deref(), Some("generic"));
        assert_eq!(cfg.seed, None);
        assert!(toml::from_str::<FileConfig>("threads = 2").is_err());
    }
}
