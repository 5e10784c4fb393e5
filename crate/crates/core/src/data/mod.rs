//! Datasets: libsvm text parsing and synthetic generators.

mod libsvm;
mod synth;

pub use libsvm::{parse_libsvm, ParseError, ParseErrorKind};
pub use synth::{
    generate_classification, generate_patches, generate_quadratic, ClassificationSpec, QuadraticSpec,
};

/// One sample's features as sorted `(index, value)` pairs, 0-based.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseRow {
    pub fn from_dense(x: &[f64]) -> Self {
        let (indices, values) = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .unzip();
        Self { indices, values }
    }

    pub fn dot(&self, w: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&j, v)| w[j] * v)
            .sum()
    }

    /// `w += alpha * row`
    pub fn add_to(&self, alpha: f64, w: &mut [f64]) {
        for (&j, v) in self.indices.iter().zip(&self.values) {
            w[j] += alpha * v;
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }
}

/// Binary classification data with labels in {−1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n_features: usize,
    pub rows: Vec<SparseRow>,
    pub labels: Vec<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Serializes in libsvm format with 1-based indices. Values use Rust's
    /// shortest round-trip float formatting, so parsing the output gives
    /// back an identical dataset.
    pub fn to_libsvm(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for (row, &label) in self.rows.iter().zip(&self.labels) {
            let _ = write!(out, "{}", if label > 0.0 { "+1" } else { "-1" });
            for (&j, v) in row.indices.iter().zip(&row.values) {
                let _ = write!(out, " {}:{:?}", j + 1, v);
            }
            out.push('\n');
        }
        out
    }
}
