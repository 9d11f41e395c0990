//! Versioned JSON persistence with 17-significant-digit floats.

use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::ca::CaModel;
use crate::corpus::{AnalysisConfig, BuildReport, TermDocMatrix};
use crate::error::{Error, Result};

/// Compact JSON formatter that writes every `f64` as `d.dddddddddddddddde±x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` with [`SeventeenDigits`].
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits utf-8"))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub const MODEL_FORMAT: &str = "textca-model";
pub const MODEL_VERSION: u32 = 1;

/// On-disk form of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format: String,
    pub version: u32,
    pub config: AnalysisConfig,
    /// Vocabulary of the matrix the model was fitted on.
    pub vocabulary: Vec<String>,
    pub model: CaModel,
}

impl ModelDocument {
    pub fn new(config: AnalysisConfig, vocabulary: Vec<String>, model: CaModel) -> Self {
        ModelDocument {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            config,
            vocabulary,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = from_json(text)?;
        if doc.format != MODEL_FORMAT || doc.version != MODEL_VERSION {
            return Err(Error::Malformed {
                what: "model file",
                message: format!("expected {MODEL_FORMAT} v{MODEL_VERSION}, got {} v{}", doc.format, doc.version),
            });
        }
        Ok(doc)
    }
}

pub const STORE_FORMAT: &str = "textca-corpus";
pub const STORE_VERSION: u32 = 1;

/// On-disk form of an ingested corpus: the thresholded matrix with its
/// document metadata and the bookkeeping of the build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStore {
    pub format: String,
    pub version: u32,
    pub config: AnalysisConfig,
    pub report: BuildReport,
    pub matrix: TermDocMatrix,
}

impl CorpusStore {
    pub fn new(config: AnalysisConfig, report: BuildReport, matrix: TermDocMatrix) -> Self {
        CorpusStore { format: STORE_FORMAT.into(), version: STORE_VERSION, config, report, matrix }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let store: CorpusStore = from_json(text)?;
        if store.format != STORE_FORMAT || store.version != STORE_VERSION {
            return Err(Error::Malformed {
                what: "corpus store",
                message: format!("expected {STORE_FORMAT} v{STORE_VERSION}, got {} v{}", store.format, store.version),
            });
        }
        Ok(store)
    }
}
