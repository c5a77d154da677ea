//! File formats: headerless numeric CSV matrices and JSON manifests.
//!
//! CSV files hold one matrix row per line. A single-column file is read as
//! a vector. Manifest paths are resolved relative to the manifest's own
//! directory.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GroupPartition, MultiTaskSpec, Problem, RegressionData};

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_error(path, e))?;
    let mut data = Vec::new();
    let mut cols = None;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    message: format!("row {r} has {} fields, expected {c}", record.len()),
                })
            }
            _ => {}
        }
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                message: format!("row {r}: cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("{} row {r}", path.display())));
            }
            data.push(v);
        }
    }
    let cols = cols.ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        message: "file holds no rows".into(),
    })?;
    Ok(DMatrix::from_row_slice(data.len() / cols, cols, &data))
}

pub fn read_vector(path: &Path) -> Result<DVector<f64>> {
    let m = read_matrix(path)?;
    if m.ncols() != 1 && m.nrows() != 1 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            message: format!("expected a vector, found a {}x{} matrix", m.nrows(), m.ncols()),
        });
    }
    Ok(DVector::from_iterator(m.len(), m.transpose().iter().cloned()))
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| io_error(path, e))?;
    for row in m.row_iter() {
        writer
            .write_record(row.iter().map(|v| v.to_string()))
            .map_err(|e| io_error(path, e))?;
    }
    writer.flush().map_err(|e| io_error(path, e))
}

pub fn write_vector(path: &Path, v: &DVector<f64>) -> Result<()> {
    write_matrix(path, &DMatrix::from_column_slice(v.len(), 1, v.as_slice()))
}

fn io_error(path: &Path, e: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// `{"design": path, "response": path, "groups": [[int]], "lambda": [float]?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemManifest {
    pub design: PathBuf,
    pub response: PathBuf,
    #[serde(default)]
    pub groups: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
}

/// `{"tasks": [{"design": path, "response": path}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiTaskManifest {
    pub tasks: Vec<TaskFiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskFiles {
    pub design: PathBuf,
    pub response: PathBuf,
}

fn base_dir(manifest: &Path) -> PathBuf {
    manifest.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Loads a problem manifest. The penalty vector is returned separately
/// because it is optional in the file.
pub fn load_problem(path: &Path) -> Result<(RegressionData, Option<Vec<f64>>)> {
    let manifest: ProblemManifest = read_json(path)?;
    let dir = base_dir(path);
    let x = read_matrix(&dir.join(&manifest.design))?;
    let y = read_vector(&dir.join(&manifest.response))?;
    let groups = manifest
        .groups
        .ok_or_else(|| Error::Coverage(format!("{}: manifest has no \"groups\" field", path.display())))?;
    let partition = GroupPartition::new(groups, x.ncols())?;
    Ok((RegressionData::new(x, y, partition)?, manifest.lambda))
}

pub fn load_problem_with_lambda(path: &Path) -> Result<Problem> {
    let (data, lambda) = load_problem(path)?;
    let lambda = lambda.ok_or_else(|| Error::Domain(format!("{}: manifest has no \"lambda\" field", path.display())))?;
    Problem::new(data, lambda)
}

pub fn load_multitask(path: &Path) -> Result<MultiTaskSpec> {
    let manifest: MultiTaskManifest = read_json(path)?;
    let dir = base_dir(path);
    let mut designs = Vec::with_capacity(manifest.tasks.len());
    let mut responses = Vec::with_capacity(manifest.tasks.len());
    for task in &manifest.tasks {
        designs.push(read_matrix(&dir.join(&task.design))?);
        responses.push(read_vector(&dir.join(&task.response))?);
    }
    MultiTaskSpec::new(designs, responses)
}

/// Serde adapter for `Option<f64>` fields that may be infinite: `±∞` is
/// written as the strings `"inf"` / `"-inf"`, `None` as `null`.
pub mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if *x == f64::INFINITY => s.serialize_str("inf"),
            Some(x) if *x == f64::NEG_INFINITY => s.serialize_str("-inf"),
            Some(x) => s.serialize_f64(*x),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Text(t)) => match t.as_str() {
                "inf" => Ok(Some(f64::INFINITY)),
                "-inf" => Ok(Some(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!("unexpected value {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        let m = DMatrix::from_row_slice(2, 3, &[1.0, -2.5, 0.1, 3.0, 1e-300, 7.0]);
        write_matrix(&p, &m).unwrap();
        assert_eq!(read_matrix(&p).unwrap(), m);
        let v = DVector::from_vec(vec![0.3, 0.7]);
        write_vector(&p, &v).unwrap();
        assert_eq!(read_vector(&p).unwrap(), v);
    }

    #[test]
    fn ragged_and_bad_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        fs::write(&p, "1,2\n3\n").unwrap();
        assert!(read_matrix(&p).is_err());
        fs::write(&p, "1,abc\n").unwrap();
        assert!(matches!(read_matrix(&p), Err(Error::Parse { .. })));
        assert!(matches!(read_matrix(&dir.path().join("none.csv")), Err(Error::Io { .. })));
    }

    #[test]
    fn manifests() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("x.csv"), "1,0\n0,1\n1,1\n").unwrap();
        fs::write(dir.path().join("y.csv"), "1\n2\n3\n").unwrap();
        let mp = dir.path().join("p.json");
        fs::write(&mp, r#"{"design":"x.csv","response":"y.csv","groups":[[0],[1]],"lambda":[0.1,0.2]}"#).unwrap();
        let problem = load_problem_with_lambda(&mp).unwrap();
        assert_eq!(problem.lambda, vec![0.1, 0.2]);
        assert_eq!(problem.data.n_obs(), 3);

        fs::write(&mp, r#"{"design":"x.csv","response":"y.csv"}"#).unwrap();
        assert!(matches!(load_problem(&mp), Err(Error::Coverage(_))));
        fs::write(&mp, r#"{"design":"x.csv","response":"y.csv","groups":[[0]]}"#).unwrap();
        assert!(matches!(load_problem(&mp), Err(Error::Coverage(_))));

        let tp = dir.path().join("mt.json");
        fs::write(&tp, r#"{"tasks":[{"design":"x.csv","response":"y.csv"},{"design":"x.csv","response":"y.csv"}]}"#)
            .unwrap();
        let spec = load_multitask(&tp).unwrap();
        assert_eq!((spec.tasks(), spec.samples(), spec.vars()), (2, 3, 2));
    }

    #[test]
    fn infinite_values_serialize_as_text() {
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct W {
            #[serde(with = "extended_f64")]
            a: Option<f64>,
        }
        for v in [None, Some(1.5), Some(f64::INFINITY)] {
            let text = serde_json::to_string(&W { a: v }).unwrap();
            assert_eq!(serde_json::from_str::<W>(&text).unwrap(), W { a: v });
        }
        assert_eq!(serde_json::to_string(&W { a: Some(f64::INFINITY) }).unwrap(), r#"{"a":"inf"}"#);
    }
}
