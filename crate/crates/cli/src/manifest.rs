//! Run manifest: what went in, what came out, and their digests.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use textca::corpus::AnalysisConfig;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

pub const MANIFEST_NAME: &str = "manifest.json";
pub const MANIFEST_FORMAT: &str = "textca-manifest";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: String, content: &[u8]) -> Self {
        FileDigest { path, bytes: content.len() as u64, sha256: hex::encode(Sha256::digest(content)) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    /// Command parameters after defaults were applied.
    pub parameters: Vec<(String, String)>,
    pub config: AnalysisConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub started: String,
    pub finished: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub toolkit: String,
    pub version: String,
    pub runs: Vec<RunRecord>,
}

impl RunManifest {
    fn empty() -> Self {
        RunManifest {
            format: MANIFEST_FORMAT.into(),
            toolkit: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            runs: Vec::new(),
        }
    }
}

/// `SOURCE_DATE_EPOCH` when set (for reproducible manifests), else now.
pub fn timestamp() -> Result<String> {
    let when = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(secs) => {
            let secs: i64 = secs.trim().parse().context("SOURCE_DATE_EPOCH must be an integer")?;
            OffsetDateTime::from_unix_timestamp(secs).context("SOURCE_DATE_EPOCH out of range")?
        }
        Err(_) => OffsetDateTime::now_utc(),
    };
    Ok(when.format(&Rfc3339)?)
}

/// Collects the files of one command and appends the run to the manifest
/// of the output directory.
pub struct Run {
    out: PathBuf,
    record: RunRecord,
}

impl Run {
    pub fn start(out: &Path, command: &str, config: &AnalysisConfig) -> Result<Self> {
        fs::create_dir_all(out).with_context(|| format!("creating output directory {}", out.display()))?;
        Ok(Run {
            out: out.to_path_buf(),
            record: RunRecord {
                command: command.into(),
                parameters: Vec::new(),
                config: config.clone(),
                inputs: Vec::new(),
                outputs: Vec::new(),
                started: timestamp()?,
                finished: String::new(),
            },
        })
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.record.parameters.push((key.into(), value.to_string()));
    }

    /// Reads an input file and records it under its file name.
    pub fn read_input(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        self.record.inputs.push(FileDigest::of(name, &bytes));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    /// Writes `content` to `rel` under the output directory.
    pub fn write(&mut self, rel: &str, content: &str) -> Result<()> {
        let path = self.out.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        self.record.outputs.retain(|f| f.path != rel);
        self.record.outputs.push(FileDigest::of(rel.into(), content.as_bytes()));
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.record.finished = timestamp()?;
        let path = self.out.join(MANIFEST_NAME);
        let mut manifest = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text).with_context(|| format!("reading {}", path.display()))?,
            Err(_) => RunManifest::empty(),
        };
        manifest.runs.push(self.record);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
