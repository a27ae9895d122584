//! File formats: the JSON matrix interchange format, run manifests and the
//! scan CSV.
//!
//! Matrices travel as `{ "rows": r, "cols": c, "data": [[re, im], ...] }`
//! with row-major data. Floats are written in shortest-round-trip decimal
//! form, so write-then-read is exact.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `[re, im]` pairs; `data.len() == rows * cols`.
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let expected = self
            .rows
            .checked_mul(self.cols)
            .ok_or_else(|| Error::Parse("rows * cols overflows".into()))?;
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Parse("matrix dimensions must be positive".into()));
        }
        if expected != self.data.len() {
            return Err(Error::Parse(format!(
                "data length {} does not match {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        for (k, [re, im]) in self.data.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: k / self.cols,
                    col: k % self.cols,
                });
            }
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            Complex64::new(re, im)
        }))
    }
}

/// Parses a matrix from JSON bytes. Never panics on malformed input.
pub fn parse_matrix_json(bytes: &[u8]) -> Result<CMatrix> {
    let file: MatrixFile =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_matrix()
}

pub fn matrix_json_string(m: &CMatrix) -> String {
    serde_json::to_string_pretty(&MatrixFile::from_matrix(m)).expect("matrix serializes")
}

pub fn read_matrix_file(path: &Path) -> Result<CMatrix> {
    let bytes = fs::read(path)?;
    parse_matrix_json(&bytes)
}

pub fn write_matrix_file(path: &Path, m: &CMatrix) -> Result<()> {
    fs::write(path, matrix_json_string(m) + "\n")?;
    Ok(())
}

/// Writes scan rows as CSV with the columns
/// `lambda_re,lambda_im,N,growth,status`. Floats are shortest-round-trip
/// decimals; infinite growth prints as `inf`.
pub fn scan_csv_string(rows: &[crate::shiftlab::ScanResult]) -> String {
    let mut out = String::from("lambda_re,lambda_im,N,growth,status\n");
    for r in rows {
        let status = match r.status {
            crate::shiftlab::ScanStatus::Finite => "finite",
            crate::shiftlab::ScanStatus::Singular => "singular",
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.lambda.re, r.lambda.im, r.n, r.growth, status
        ));
    }
    out
}

pub fn write_scan_csv(path: &Path, rows: &[crate::shiftlab::ScanResult]) -> Result<()> {
    fs::write(path, scan_csv_string(rows))?;
    Ok(())
}

/// Everything needed to reproduce a run bit-for-bit, modulo the timestamp.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub tolerances: ToleranceConfig,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str, arguments: Vec<String>, tolerances: ToleranceConfig, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            arguments,
            tolerances,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, json + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(parse_matrix_json(b"not json").is_err());
        assert!(parse_matrix_json(b"{\"rows\":1,\"cols\":2,\"data\":[[1,0]]}").is_err());
        assert!(parse_matrix_json(b"{\"rows\":0,\"cols\":0,\"data\":[]}").is_err());
        // huge dims must not allocate or overflow
        let huge = format!(
            "{{\"rows\":{0},\"cols\":{0},\"data\":[[1,0]]}}",
            usize::MAX / 2
        );
        assert!(parse_matrix_json(huge.as_bytes()).is_err());
        // non-finite entries rejected (JSON numbers can overflow to inf)
        assert!(parse_matrix_json(b"{\"rows\":1,\"cols\":1,\"data\":[[1e999,0]]}").is_err());
    }

    #[test]
    fn roundtrip_exactness_spot() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.1, -0.2), c(1.0 / 3.0, 0.0), c(-5e-300, 2e300), c(0.0, -0.0)],
        );
        let back = parse_matrix_json(matrix_json_string(&m).as_bytes()).unwrap();
        assert!(m.iter().zip(back.iter()).all(|(a, b)| {
            a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
        }));
    }

    proptest! {
        #[test]
        fn roundtrip_is_bit_exact(
            rows in 1usize..6,
            cols in 1usize..6,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = CMatrix::from_fn(rows, cols, |_, _| {
                // mix of scales, including subnormals and exact values
                let exp = rng.gen_range(-320i32..300);
                let x: f64 = (rng.gen::<f64>() - 0.5) * 10f64.powi(exp);
                let y: f64 = (rng.gen::<f64>() - 0.5) * 10f64.powi(-exp.clamp(-300, 300));
                c(x, y)
            });
            let back = parse_matrix_json(matrix_json_string(&m).as_bytes()).unwrap();
            let exact = m.iter().zip(back.iter()).all(|(a, b)| {
                a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
            });
            prop_assert!(exact);
        }
    }
}
