//! Dataset files: libsvm text and CSV (label in the last column).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Row};
use crate::error::{invalid, Error, Result};
use crate::losses::Task;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Libsvm,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "libsvm" => Ok(Format::Libsvm),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnknownId(other.to_string())),
        }
    }
}

impl Format {
    /// Guesses from the extension: `.csv` is CSV, anything else libsvm.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Libsvm,
        }
    }
}

pub fn load_dataset(path: &Path, format: Format, task: Task) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    match format {
        Format::Libsvm => parse_libsvm(&text, task, None),
        Format::Csv => parse_csv(&text, task),
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn parse_label(tok: &str, line: usize, task: Task) -> Result<f64> {
    let b: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad label `{tok}`")))?;
    check_label(b, line, task)
}

fn check_label(b: f64, line: usize, task: Task) -> Result<f64> {
    if task == Task::Classification && b != 1.0 && b != -1.0 {
        return Err(parse_err(line, format!("classification label must be -1 or +1, got {b}")));
    }
    Ok(b)
}

/// Parses libsvm lines `label idx:val ...` with 1-based, increasing indices.
/// Blank lines and `#` comments are ignored. With `p = None` the dimension
/// is the largest index seen.
pub fn parse_libsvm(text: &str, task: Task, p: Option<usize>) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut max_dim = 0;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        labels.push(parse_label(toks.next().expect("nonempty line"), line_no, task)?);
        let mut entries = Vec::new();
        let mut last = 0;
        for tok in toks {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(line_no, format!("expected idx:val, got `{tok}`")))?;
            let i: usize = i
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad index `{i}`")))?;
            if i == 0 {
                return Err(parse_err(line_no, "indices are 1-based"));
            }
            if i <= last {
                return Err(parse_err(line_no, "indices must be strictly increasing"));
            }
            last = i;
            let v: f64 = v
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad value `{v}`")))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, "non-finite value"));
            }
            entries.push((i - 1, v));
        }
        max_dim = max_dim.max(last);
        rows.push(Row::sparse(entries)?);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let p = match p {
        Some(p) if p < max_dim => {
            return Err(invalid("p", format!("file uses index {max_dim} beyond p = {p}")));
        }
        Some(p) => p,
        None => max_dim,
    };
    Dataset::new(rows, labels, p, task)
}

/// libsvm text; zero entries are omitted and values use the shortest
/// representation that parses back to the same `f64`.
pub fn to_libsvm(ds: &Dataset) -> String {
    let mut out = String::new();
    for (row, b) in ds.rows().iter().zip(ds.labels()) {
        write!(out, "{b}").unwrap();
        for (j, v) in row.entries().filter(|e| e.1 != 0.0) {
            write!(out, " {}:{v}", j + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Numeric CSV, one sample per line, label last. A first line that does not
/// parse as numbers is taken as a header.
pub fn parse_csv(text: &str, task: Task) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut matrix = Vec::new();
    let mut labels = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let line_no = k + 1;
        let rec = rec.map_err(|e| parse_err(line_no, e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let mut vals = match parsed {
            Ok(v) => v,
            Err(_) if k == 0 => continue,
            Err(e) => return Err(parse_err(line_no, e.to_string())),
        };
        if vals.len() < 2 {
            return Err(parse_err(line_no, "need at least one feature and a label"));
        }
        if let Some(first) = matrix.first().map(|r: &Vec<f64>| r.len()) {
            if vals.len() - 1 != first {
                return Err(parse_err(
                    line_no,
                    format!("expected {} columns, got {}", first + 1, vals.len()),
                ));
            }
        }
        let b = vals.pop().expect("length checked");
        labels.push(check_label(b, line_no, task)?);
        matrix.push(vals);
    }
    if matrix.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::from_dense(matrix, labels, task)
}

/// CSV with a header `x1,...,xp,label`.
pub fn to_csv(ds: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=ds.p()).map(|j| format!("x{j}")).collect();
    header.push("label".to_string());
    w.write_record(&header).unwrap();
    for (row, b) in ds.to_dense_rows().iter().zip(ds.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(b.to_string());
        w.write_record(&rec).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).expect("ascii output")
}

/// Writes `contents` to `path` via a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn save_dataset(ds: &Dataset, path: &Path, format: Format) -> Result<()> {
    let text = match format {
        Format::Libsvm => to_libsvm(ds),
        Format::Csv => to_csv(ds),
    };
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_libsvm_line() {
        let ds = parse_libsvm("+1 1:0.5 3:2\n", Task::Classification, None).unwrap();
        assert_eq!(ds.labels(), &[1.0]);
        assert_eq!(ds.p(), 3);
        assert_eq!(
            ds.row(0),
            &Row::Sparse {
                indices: vec![0, 2],
                values: vec![0.5, 2.0]
            }
        );
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_libsvm("1 1:2\n\n1 2:x\n", Task::Regression, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_libsvm("1 0:2\n", Task::Regression, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_libsvm("1 3:2 2:1\n", Task::Regression, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_libsvm("2 1:1\n", Task::Classification, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(parse_libsvm("", Task::Regression, None), Err(Error::EmptyDataset)));
        assert!(matches!(parse_csv("x1,label\n", Task::Regression), Err(Error::EmptyDataset)));
    }

    #[test]
    fn csv_with_header() {
        let ds = parse_csv("x1,x2,label\n1,2,0.5\n3,4,-1\n", Task::Regression).unwrap();
        assert_eq!(ds.to_dense_rows(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(ds.labels(), &[0.5, -1.0]);
        assert!(parse_csv("1,2,3\n1,2\n", Task::Regression).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let ds = Dataset::from_dense(vec![vec![0.1, -2e-300], vec![1.0 / 3.0, 0.0]], vec![1.5, 2.0], Task::Regression)
            .unwrap();
        assert_eq!(parse_csv(&to_csv(&ds), Task::Regression).unwrap(), ds);
    }
}
