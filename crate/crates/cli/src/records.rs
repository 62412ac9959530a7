//! Append-only result files: `#` manifest lines, then CSV records.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::BenchError;

pub const RESULTS_FILE: &str = "results.csv";
const HEADER: &str = "dataset,variant,selector,replication,fold,metric,value,wall_time_ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub dataset: String,
    pub variant: String,
    pub selector: String,
    /// 1 to 5.
    pub replication: u8,
    /// `A` or `B`: the fold used for training.
    pub fold: char,
    pub metric: String,
    pub value: f64,
    pub wall_time_ms: u64,
}

impl ResultRecord {
    /// The (dataset, variant, replication, fold) unit the record belongs to.
    pub fn unit_key(&self) -> UnitKey {
        UnitKey {
            dataset: self.dataset.clone(),
            variant: self.variant.clone(),
            replication: self.replication,
            fold: self.fold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitKey {
    pub dataset: String,
    pub variant: String,
    pub replication: u8,
    pub fold: char,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsFile {
    pub manifest: Vec<(String, String)>,
    pub records: Vec<ResultRecord>,
}

impl ResultsFile {
    pub fn manifest_value(&self, key: &str) -> Option<&str> {
        self.manifest.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn completed_units(&self) -> BTreeSet<UnitKey> {
        self.records.iter().map(ResultRecord::unit_key).collect()
    }

    pub fn read(path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut manifest = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix('#') {
                for pair in rest.split_whitespace() {
                    if let Some((k, v)) = pair.split_once('=') {
                        manifest.push((k.to_string(), v.to_string()));
                    }
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
        let records = reader
            .deserialize()
            .collect::<Result<Vec<ResultRecord>, _>>()
            .map_err(|e| BenchError::Records(e.to_string()))?;
        Ok(ResultsFile { manifest, records })
    }

    /// Every `results.csv` below `dir` (or `dir` itself if it is a file).
    pub fn read_all(dir: &Path) -> Result<Vec<ResultRecord>, BenchError> {
        if dir.is_file() {
            return Ok(Self::read(dir)?.records);
        }
        let mut files: Vec<PathBuf> = Vec::new();
        let mut stack = vec![dir.to_path_buf()];
        while let Some(d) = stack.pop() {
            for entry in fs::read_dir(&d)? {
                let path = entry?.path();
                if path.is_dir() {
                    stack.push(path);
                } else if path.file_name().is_some_and(|n| n == RESULTS_FILE) {
                    files.push(path);
                }
            }
        }
        files.sort();
        if files.is_empty() {
            return Err(BenchError::Records(format!("no {RESULTS_FILE} under {}", dir.display())));
        }
        let mut out = Vec::new();
        for f in files {
            out.extend(Self::read(&f)?.records);
        }
        Ok(out)
    }
}

/// Appends records, writing the manifest and header when the file is new.
pub struct RecordWriter {
    file: File,
}

impl RecordWriter {
    pub fn open(path: &Path, manifest: &[(&str, String)]) -> Result<Self, BenchError> {
        if path.exists() {
            // a crash can leave a partial last line; drop it
            let bytes = fs::read(path)?;
            let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            if keep < bytes.len() {
                OpenOptions::new().write(true).open(path)?.set_len(keep as u64)?;
            }
        }
        let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if fresh {
            let line: Vec<String> = manifest.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(file, "# {}", line.join(" "))?;
            writeln!(file, "{HEADER}")?;
        }
        Ok(RecordWriter { file })
    }

    pub fn append(&mut self, records: &[ResultRecord]) -> Result<(), BenchError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for r in records {
            w.serialize(r).map_err(|e| BenchError::Records(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| BenchError::Records(e.to_string()))?;
        self.file.write_all(&bytes)?;
        self.file.flush()?;
        Ok(())
    }
}
