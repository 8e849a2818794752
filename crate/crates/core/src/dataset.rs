//! CSV ingestion into submodular hypergraphs: one hyperedge per categorical
//! value and per numerical bin, alpha-parametrized cut weights, degree vertex
//! measure. Also the 2-way clustering error metric and the run report schema.

use crate::error::{Error, Result};
use crate::hypergraph::{Hyperedge, SubmodularHypergraph};
use crate::submodular::CutWeightFn;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Categorical,
    Numerical,
}

/// How a CSV turns into a hypergraph. Column kinds are inferred (numerical if
/// every value parses as a float) unless overridden.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub csv_path: PathBuf,
    pub label_column: String,
    pub bins: usize,
    pub alpha: f64,
    pub theta: f64,
    pub column_kinds: BTreeMap<String, ColumnKind>,
    /// Equal-frequency instead of equal-width bins for numerical columns.
    pub equal_frequency: bool,
}

impl DatasetSpec {
    pub fn new(csv_path: impl Into<PathBuf>, label_column: impl Into<String>, alpha: f64) -> Self {
        DatasetSpec {
            csv_path: csv_path.into(),
            label_column: label_column.into(),
            bins: 10,
            alpha,
            theta: 1.0,
            column_kinds: BTreeMap::new(),
            equal_frequency: false,
        }
    }
}

#[derive(Debug)]
pub struct IngestResult {
    pub hypergraph: SubmodularHypergraph,
    pub labels: Vec<String>,
    pub dropped_rows: usize,
    /// `(column, value-or-bin)` descriptor per hyperedge, in edge order.
    pub edge_descriptors: Vec<(String, String)>,
}

/// Reads the CSV and builds the hypergraph: vertices are rows (duplicates
/// stay distinct), hyperedges group rows sharing a categorical value or a
/// numerical bin, singleton edges are dropped, `ϑ_e = theta`, weights are
/// alpha-cardinality, and `μ = degrees`. Rows with empty fields are dropped
/// and counted.
pub fn ingest(spec: &DatasetSpec) -> Result<IngestResult> {
    if spec.bins < 2 {
        return Err(Error::Config(format!("bins must be ≥ 2, got {}", spec.bins)));
    }
    if !(spec.alpha > 0.0 && spec.alpha <= 0.5) {
        return Err(Error::Config(format!(
            "alpha must lie in (0, 0.5], got {}",
            spec.alpha
        )));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(&spec.csv_path)
        .map_err(|e| csv_error(e, 0))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(e, 0))?
        .iter()
        .map(str::to_owned)
        .collect();
    let label_idx = headers
        .iter()
        .position(|h| h == &spec.label_column)
        .ok_or_else(|| Error::Parse {
            row: 0,
            column: spec.label_column.clone(),
            message: "label column not found in header".into(),
        })?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut dropped_rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(e, i + 1))?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                row: i + 1,
                column: String::new(),
                message: format!(
                    "expected {} fields, found {}",
                    headers.len(),
                    record.len()
                ),
            });
        }
        let fields: Vec<String> = record.iter().map(str::to_owned).collect();
        if fields.iter().any(|f| f.is_empty()) {
            dropped_rows += 1;
            continue;
        }
        rows.push(fields);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyHypergraph);
    }

    let labels: Vec<String> = rows.iter().map(|r| r[label_idx].clone()).collect();

    let mut edges: Vec<Hyperedge> = Vec::new();
    let mut edge_descriptors: Vec<(String, String)> = Vec::new();
    let mut push_edge = |members: Vec<usize>, column: &str, value: String| -> Result<()> {
        if members.len() < 2 {
            return Ok(());
        }
        let weight = CutWeightFn::alpha(members.len(), spec.alpha)?;
        edges.push(Hyperedge::new(members, spec.theta, weight)?);
        edge_descriptors.push((column.to_owned(), value));
        Ok(())
    };

    for (col, name) in headers.iter().enumerate() {
        if col == label_idx {
            continue;
        }
        let kind = spec.column_kinds.get(name).copied().unwrap_or_else(|| {
            if rows.iter().all(|r| r[col].trim().parse::<f64>().is_ok()) {
                ColumnKind::Numerical
            } else {
                ColumnKind::Categorical
            }
        });
        match kind {
            ColumnKind::Categorical => {
                let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
                for (v, row) in rows.iter().enumerate() {
                    groups.entry(row[col].as_str()).or_default().push(v);
                }
                for (value, members) in groups {
                    push_edge(members, name, value.to_owned())?;
                }
            }
            ColumnKind::Numerical => {
                let mut parsed = Vec::with_capacity(n);
                for (v, row) in rows.iter().enumerate() {
                    let x: f64 = row[col].trim().parse().map_err(|_| Error::Parse {
                        row: v + 1,
                        column: name.clone(),
                        message: format!("cannot parse {:?} as a number", row[col]),
                    })?;
                    parsed.push(x);
                }
                let assignments = if spec.equal_frequency {
                    equal_frequency_bins(&parsed, spec.bins)
                } else {
                    equal_width_bins(&parsed, spec.bins)
                };
                let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for (v, &b) in assignments.iter().enumerate() {
                    groups.entry(b).or_default().push(v);
                }
                for (bin, members) in groups {
                    push_edge(members, name, format!("bin{bin}"))?;
                }
            }
        }
    }

    if edges.is_empty() {
        return Err(Error::EmptyHypergraph);
    }
    let hypergraph = SubmodularHypergraph::with_degree_weights(n, edges)?;
    Ok(IngestResult {
        hypergraph,
        labels,
        dropped_rows,
        edge_descriptors,
    })
}

fn csv_error(e: csv::Error, row: usize) -> Error {
    Error::Parse {
        row,
        column: String::new(),
        message: e.to_string(),
    }
}

fn equal_width_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return vec![0; values.len()];
    }
    let width = (hi - lo) / bins as f64;
    values
        .iter()
        .map(|&v| (((v - lo) / width) as usize).min(bins - 1))
        .collect()
}

fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut out = vec![0; values.len()];
    for (rank, &idx) in order.iter().enumerate() {
        out[idx] = (rank * bins / values.len()).min(bins - 1);
    }
    out
}

/// 2-way clustering error: minimum number of misclassified vertices over the
/// two side-to-label assignments. Labels must take exactly two values (one
/// value counts as degenerate-but-valid with the obvious error).
pub fn clustering_error(partition: &[bool], labels: &[String]) -> Result<usize> {
    if partition.len() != labels.len() {
        return Err(Error::LabelArityMismatch);
    }
    let mut distinct: Vec<&String> = Vec::new();
    for l in labels {
        if !distinct.contains(&l) {
            distinct.push(l);
        }
    }
    if distinct.is_empty() || distinct.len() > 2 {
        return Err(Error::LabelArityMismatch);
    }
    let first = distinct[0];
    let direct = partition
        .iter()
        .zip(labels)
        .filter(|(&p, l)| p != (**l == *first))
        .count();
    Ok(direct.min(labels.len() - direct))
}

/// One machine-readable result line for a clustering or spectrum run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub algorithm: String,
    /// Final `λ̂` for IPM runs, the relaxation objective for SDP runs.
    pub lambda: f64,
    pub conductance: f64,
    pub clustering_error: Option<usize>,
    /// 0/1 side per vertex from the best sweep cut.
    pub partition: Vec<u8>,
    pub wall_time_s: f64,
    pub seed: u64,
    pub config: serde_json::Value,
}
