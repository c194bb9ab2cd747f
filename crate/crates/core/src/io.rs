//! Matrix file formats.
//!
//! * CSV: one matrix row per line, real entries, no header; `#` starts a
//!   comment line.
//! * JSON: an array of rows; each entry is either a number or a two-element
//!   array `[re, im]`. A JSON array of such matrices is an operator tuple.

use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ideal::OperatorTuple;
use crate::scalar::{cplx, Real};
use crate::CMatrix;

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

fn from_rows<T: Real>(rows: Vec<Vec<Entry>>) -> Result<CMatrix<T>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(Error::parse("matrix has no entries"));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != c) {
        return Err(Error::parse(format!("row {i} has {} entries, expected {c}", row.len())));
    }
    let mut m = CMatrix::zeros(r, c);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, e) in row.into_iter().enumerate() {
            let (re, im) = match e {
                Entry::Real(x) => (x, 0.0),
                Entry::Complex([a, b]) => (a, b),
            };
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::NonFinite(format!("entry ({i}, {j})")));
            }
            m[(i, j)] = cplx(T::lit(re), T::lit(im));
        }
    }
    Ok(m)
}

pub fn parse_matrix_json<T: Real>(text: &str) -> Result<CMatrix<T>> {
    let rows: Vec<Vec<Entry>> = serde_json::from_str(text).map_err(|e| Error::parse(format!("matrix json: {e}")))?;
    from_rows(rows)
}

pub fn parse_tuple_json<T: Real>(text: &str) -> Result<OperatorTuple<T>> {
    let mats: Vec<Vec<Vec<Entry>>> = serde_json::from_str(text).map_err(|e| Error::parse(format!("tuple json: {e}")))?;
    OperatorTuple::new(mats.into_iter().map(from_rows).collect::<Result<_>>()?)
}

pub fn parse_matrix_csv<T: Real>(text: &str) -> Result<CMatrix<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::parse(format!("matrix csv: {e}")))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map(Entry::Real).map_err(|_| Error::parse(format!("matrix csv: bad number `{f}`"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    from_rows(rows)
}

/// Reads a matrix, choosing the format by extension (`.csv`, else JSON).
pub fn read_matrix<T: Real>(path: &Path) -> Result<CMatrix<T>> {
    let text = std::fs::read_to_string(path)?;
    if is_csv(path) {
        parse_matrix_csv(&text)
    } else {
        parse_matrix_json(&text)
    }
}

/// Reads a tuple from JSON, or a single CSV matrix as a one-element tuple.
pub fn read_tuple<T: Real>(path: &Path) -> Result<OperatorTuple<T>> {
    let text = std::fs::read_to_string(path)?;
    if is_csv(path) {
        OperatorTuple::new(vec![parse_matrix_csv(&text)?])
    } else {
        parse_tuple_json(&text)
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Nested `[re, im]` rows.
pub fn matrix_to_json<T: Real>(m: &CMatrix<T>) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re.to64(), m[(i, j)].im.to64()]).collect())
        .collect();
    serde_json::to_value(rows).expect("finite floats serialize")
}

pub fn matrix_to_csv<T: Real>(m: &CMatrix<T>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)].re.to64())).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `#[serde(with = "crate::io::cmatrix")]` adapter using the JSON matrix format.
pub mod cmatrix {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(m: &CMatrix<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_json(m).serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix<T>, D::Error> {
        let rows = Vec::<Vec<Entry>>::deserialize(d)?;
        from_rows(rows).map_err(D::Error::custom)
    }
}

/// Same as [`cmatrix`] for lists of matrices.
pub mod cmatrix_vec {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(v: &[CMatrix<T>], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(matrix_to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<CMatrix<T>>, D::Error> {
        let mats = Vec::<Vec<Vec<Entry>>>::deserialize(d)?;
        mats.into_iter().map(|m| from_rows(m).map_err(D::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_complex_and_real_entries() {
        let m: CMatrix<f64> = parse_matrix_json("[[1, [0, 2]], [[3, -1], 4.5]]").unwrap();
        assert_eq!(m.shape(), (2, 2));
        assert_eq!(m[(0, 1)].im, 2.0);
        assert_eq!(m[(1, 0)].re, 3.0);
        let back: CMatrix<f64> = parse_matrix_json(&matrix_to_json(&m).to_string()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn csv_rows() {
        let m: CMatrix<f64> = parse_matrix_csv("# identity\n1, 0\n0, 1\n").unwrap();
        assert_eq!(m[(1, 1)].re, 1.0);
        assert_eq!(parse_matrix_csv::<f64>(&matrix_to_csv(&m)).unwrap(), m);
    }

    #[test]
    fn ragged_and_junk_rejected() {
        assert!(parse_matrix_json::<f64>("[[1,2],[3]]").is_err());
        assert!(parse_matrix_json::<f64>("[]").is_err());
        assert!(parse_matrix_csv::<f64>("1,x\n").is_err());
        assert!(parse_tuple_json::<f64>("[[[1]], [[1, 2]]]").is_err());
    }
}
