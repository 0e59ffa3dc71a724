//! Result files: CSV tables, JSON summaries and plain text.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("write to memory");
        for r in &self.rows {
            w.write_record(r).expect("write to memory");
        }
        w.into_inner().expect("flush to memory")
    }
}

/// Shortest round-trip formatting.
pub fn cell(x: impl Display) -> String {
    x.to_string()
}

pub fn opt_cell<T: Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Content {
    Csv(Table),
    Json(Json),
    Text(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub content: Content,
}

impl Artifact {
    pub fn csv(name: &str, table: Table) -> Self {
        Self { name: name.into(), content: Content::Csv(table) }
    }

    pub fn json(name: &str, value: Json) -> Self {
        Self { name: name.into(), content: Content::Json(value) }
    }

    pub fn text(name: &str, text: String) -> Self {
        Self { name: name.into(), content: Content::Text(text) }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match &self.content {
            Content::Csv(t) => t.to_bytes(),
            Content::Json(v) => {
                let mut b = serde_json::to_vec_pretty(v).expect("JSON values serialize");
                b.push(b'\n');
                b
            }
            Content::Text(s) => s.clone().into_bytes(),
        }
    }
}

/// Combines per-replica outputs in replica order: tables gain a leading
/// `replica` column, JSON documents become `{"replicas": [..]}`, and text
/// files are suffixed `.r<k>`.
pub fn merge_replicas(runs: Vec<Vec<Artifact>>) -> Vec<Artifact> {
    if runs.len() == 1 {
        return runs.into_iter().next().expect("one run");
    }
    let mut merged = Vec::new();
    for (i, first) in runs[0].iter().enumerate() {
        let parts = runs.iter().map(|r| &r[i].content);
        let content = match &first.content {
            Content::Csv(t) => {
                let mut header = vec!["replica".to_string()];
                header.extend(t.header.iter().cloned());
                let mut out = Table { header, rows: Vec::new() };
                for (k, part) in parts.enumerate() {
                    let Content::Csv(t) = part else { unreachable!("replicas emit identical artifact kinds") };
                    for row in &t.rows {
                        let mut r = vec![k.to_string()];
                        r.extend(row.iter().cloned());
                        out.rows.push(r);
                    }
                }
                Content::Csv(out)
            }
            Content::Json(_) => {
                let docs: Vec<Json> = parts
                    .map(|p| match p {
                        Content::Json(v) => v.clone(),
                        _ => unreachable!("replicas emit identical artifact kinds"),
                    })
                    .collect();
                Content::Json(serde_json::json!({ "replicas": docs }))
            }
            Content::Text(_) => {
                for (k, run) in runs.iter().enumerate() {
                    merged.push(Artifact { name: format!("{}.r{k}", run[i].name), content: run[i].content.clone() });
                }
                continue;
            }
        };
        merged.push(Artifact { name: first.name.clone(), content });
    }
    merged
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes every artifact into `dir` and returns their digests.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> std::io::Result<Vec<FileDigest>> {
    fs::create_dir_all(dir)?;
    artifacts
        .iter()
        .map(|a| {
            let bytes = a.to_bytes();
            fs::write(dir.join(&a.name), &bytes)?;
            Ok(FileDigest { path: a.name.clone(), sha256: sha256_hex(&bytes), bytes: bytes.len() as u64 })
        })
        .collect()
}
