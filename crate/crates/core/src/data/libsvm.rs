use std::io::BufRead;

use thiserror::Error;

use super::{Dataset, SparseRow};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Io(String),
    Empty,
    BadLabel,
    BadToken,
    ZeroIndex,
    NonIncreasingIndex,
    IndexOutOfRange { n_features: usize },
    LabelSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind:?} at token `{token}`")]
pub struct ParseError {
    /// 1-based line number; 0 when the error concerns the whole input.
    pub line: usize,
    pub token: String,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(line: usize, token: &str, kind: ParseErrorKind) -> Self {
        Self { line, token: token.to_string(), kind }
    }
}

/// Parses `<label> <idx>:<val> ...` lines; `#` starts a comment and blank
/// lines are skipped. Indices are 1-based in the text and 0-based in the
/// result. Labels from {0,1} or {1,2} are mapped onto {−1,+1}.
///
/// `n_features` overrides the feature count (it must cover every index seen);
/// otherwise the largest index is used.
pub fn parse_libsvm<R: BufRead>(reader: R, n_features: Option<usize>) -> Result<Dataset, ParseError> {
    let mut rows = Vec::new();
    let mut raw_labels = Vec::new();
    let mut label_lines = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| ParseError::new(lineno, "", ParseErrorKind::Io(e.to_string())))?;
        let content = line.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(label_tok) = tokens.next() else { continue };
        let label: f64 = label_tok
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| ParseError::new(lineno, label_tok, ParseErrorKind::BadLabel))?;

        let mut row = SparseRow::default();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .and_then(|(i, v)| Some((i.parse::<usize>().ok()?, v.parse::<f64>().ok()?)))
                .filter(|(_, v)| v.is_finite())
                .ok_or_else(|| ParseError::new(lineno, tok, ParseErrorKind::BadToken))?;
            if idx == 0 {
                return Err(ParseError::new(lineno, tok, ParseErrorKind::ZeroIndex));
            }
            if row.indices.last().is_some_and(|&last| idx - 1 <= last) {
                return Err(ParseError::new(lineno, tok, ParseErrorKind::NonIncreasingIndex));
            }
            if let Some(p) = n_features {
                if idx > p {
                    return Err(ParseError::new(
                        lineno,
                        tok,
                        ParseErrorKind::IndexOutOfRange { n_features: p },
                    ));
                }
            }
            max_index = max_index.max(idx);
            row.indices.push(idx - 1);
            row.values.push(val);
        }
        rows.push(row);
        raw_labels.push(label);
        label_lines.push(lineno);
    }

    if rows.is_empty() {
        return Err(ParseError::new(0, "", ParseErrorKind::Empty));
    }
    let labels = normalize_labels(&raw_labels, &label_lines)?;
    Ok(Dataset {
        n_features: n_features.unwrap_or(max_index),
        rows,
        labels,
    })
}

fn normalize_labels(raw: &[f64], lines: &[usize]) -> Result<Vec<f64>, ParseError> {
    let within = |set: &[f64]| raw.iter().all(|l| set.contains(l));
    let map: fn(f64) -> f64 = if within(&[-1.0, 1.0]) {
        |l| l
    } else if within(&[0.0, 1.0]) {
        |l| if l > 0.0 { 1.0 } else { -1.0 }
    } else if within(&[1.0, 2.0]) {
        |l| if l > 1.0 { 1.0 } else { -1.0 }
    } else {
        let bad = raw
            .iter()
            .position(|l| ![-1.0, 0.0, 1.0, 2.0].contains(l))
            .unwrap_or(0);
        return Err(ParseError::new(lines[bad], &raw[bad].to_string(), ParseErrorKind::LabelSet));
    };
    Ok(raw.iter().map(|&l| map(l)).collect())
}
