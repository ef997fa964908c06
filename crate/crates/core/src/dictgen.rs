//! Reproducible dictionaries and observations, plus CSV matrix I/O.
//!
//! Random draws come from ChaCha8 seeded with `seed_from_u64(seed)`; stream 0
//! feeds dictionaries and stream 1 feeds observations, so the same seed can be
//! used for both without correlation. A uniform on `(0, 1)` is
//! `((u64 >> 11) + 0.5)·2⁻⁵³` and a standard normal is the inverse normal CDF
//! of such a uniform. Random matrices are drawn in row-major order.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

const DICTIONARY_STREAM: u64 = 0;
const OBSERVATION_STREAM: u64 = 1;
const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DictionaryVariant {
    Gaussian,
    Uniform,
    Dct,
    Toeplitz,
}

impl DictionaryVariant {
    pub const ALL: [DictionaryVariant; 4] = [Self::Gaussian, Self::Uniform, Self::Dct, Self::Toeplitz];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Uniform => "uniform",
            Self::Dct => "dct",
            Self::Toeplitz => "toeplitz",
        }
    }
}

impl FromStr for DictionaryVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Self::Gaussian),
            "uniform" => Ok(Self::Uniform),
            "dct" => Ok(Self::Dct),
            "toeplitz" => Ok(Self::Toeplitz),
            other => Err(Error::InvalidArgument(format!("unknown dictionary kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DictionaryKind {
    pub variant: DictionaryVariant,
    pub seed: u64,
}

impl DictionaryKind {
    pub fn new(variant: DictionaryVariant, seed: u64) -> Self {
        Self { variant, seed }
    }
}

struct Draws {
    rng: ChaCha8Rng,
    normal: Normal,
}

impl Draws {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, normal: Normal::standard() }
    }

    /// Uniform on the open interval `(0, 1)`.
    fn open_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }

    /// Uniform on `[0, 1)`.
    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    fn normal(&mut self) -> f64 {
        let u = self.open_uniform();
        self.normal.inverse_cdf(u)
    }
}

/// `m × n` dictionary with unit-norm columns.
///
/// A Gaussian or Uniform column that comes out exactly zero is redrawn from
/// the continuing stream; a zero DCT or Toeplitz column is an error.
pub fn generate_dictionary(kind: DictionaryKind, m: usize, n: usize) -> Result<Array2<f64>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("dictionary dimensions must be positive, got {m}x{n}")));
    }
    let mut a = match kind.variant {
        DictionaryVariant::Gaussian | DictionaryVariant::Uniform => random_matrix(kind, m, n),
        DictionaryVariant::Dct => {
            if m > n {
                return Err(Error::InvalidArgument(format!("DCT dictionary needs m <= n, got {m}x{n}")));
            }
            let mut draws = Draws::new(kind.seed, DICTIONARY_STREAM);
            let mut rows = rand::seq::index::sample(&mut draws.rng, n, m).into_vec();
            rows.sort_unstable();
            dct_rows(&rows, n)
        }
        DictionaryVariant::Toeplitz => toeplitz_bells(m, n),
    };
    normalize_columns(&mut a)?;
    Ok(a)
}

/// Length-`m` vector of i.i.d. standard normals.
pub fn generate_observation(seed: u64, m: usize) -> Result<Array1<f64>> {
    if m == 0 {
        return Err(Error::InvalidArgument("observation length must be positive".into()));
    }
    let mut draws = Draws::new(seed, OBSERVATION_STREAM);
    Ok(Array1::from_shape_fn(m, |_| draws.normal()))
}

fn random_matrix(kind: DictionaryKind, m: usize, n: usize) -> Array2<f64> {
    let mut draws = Draws::new(kind.seed, DICTIONARY_STREAM);
    let gaussian = kind.variant == DictionaryVariant::Gaussian;
    let mut sample = move || if gaussian { draws.normal() } else { draws.uniform() };
    let mut a = Array2::from_shape_fn((m, n), |_| sample());
    for j in 0..n {
        while a.column(j).iter().all(|&v| v == 0.0) {
            a.column_mut(j).mapv_inplace(|_| sample());
        }
    }
    a
}

/// Selected rows of the orthonormal `n × n` DCT-II matrix.
pub fn dct_rows(rows: &[usize], n: usize) -> Array2<f64> {
    let nf = n as f64;
    Array2::from_shape_fn((rows.len(), n), |(i, j)| {
        let k = rows[i] as f64;
        let scale = if rows[i] == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        scale * (std::f64::consts::PI * (2.0 * j as f64 + 1.0) * k / (2.0 * nf)).cos()
    })
}

/// Row `i` is `exp(−(j − i·n/m)² / (2σ²))` with `σ = n/20`.
fn toeplitz_bells(m: usize, n: usize) -> Array2<f64> {
    let sigma = n as f64 / 20.0;
    let shift = n as f64 / m as f64;
    Array2::from_shape_fn((m, n), |(i, j)| {
        let d = j as f64 - i as f64 * shift;
        (-d * d / (2.0 * sigma * sigma)).exp()
    })
}

fn normalize_columns(a: &mut Array2<f64>) -> Result<()> {
    for (j, mut col) in a.columns_mut().into_iter().enumerate() {
        let norm = col.dot(&col).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::ZeroColumn(j));
        }
        col.mapv_inplace(|v| v / norm);
    }
    Ok(())
}

fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `a` row-major with an `m,n` header line.
pub fn write_matrix_csv<W: Write>(mut out: W, a: &Array2<f64>) -> Result<()> {
    let (m, n) = a.dim();
    let mut buf = format!("{m},{n}\n");
    for row in a.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                buf.push(',');
            }
            let _ = write!(buf, "{}", format_float(*v));
        }
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

/// Writes `y` as an `m × 1` matrix.
pub fn write_vector_csv<W: Write>(out: W, y: &Array1<f64>) -> Result<()> {
    let col = y.clone().insert_axis(ndarray::Axis(1));
    write_matrix_csv(out, &col)
}

/// Reads a matrix written by [`write_matrix_csv`].
pub fn read_matrix_csv<R: BufRead>(input: R) -> Result<Array2<f64>> {
    let mut lines = input.lines().enumerate().filter_map(|(i, line)| match line {
        Ok(l) if l.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing \"m,n\" header".into() })?;
    let header = header?;
    let dims: Vec<&str> = header.split(',').map(str::trim).collect();
    let parse_dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse { line: hline, msg: format!("invalid dimension {s:?} in header") })
    };
    if dims.len() != 2 {
        return Err(Error::Parse { line: hline, msg: format!("header must be \"m,n\", got {header:?}") });
    }
    let (m, n) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    let mut data = Vec::with_capacity(m * n);
    let mut rows = 0;
    let mut last_line = hline;
    for (lineno, line) in lines {
        let line = line?;
        last_line = lineno;
        if rows == m {
            return Err(Error::Parse { line: lineno, msg: format!("more than {m} data rows") });
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {n} fields, found {}", fields.len()),
            });
        }
        for f in fields {
            let v = f
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse { line: lineno, msg: format!("invalid number {:?}", f.trim()) })?;
            data.push(v);
        }
        rows += 1;
    }
    if rows != m {
        return Err(Error::Parse { line: last_line, msg: format!("expected {m} data rows, found {rows}") });
    }
    Array2::from_shape_vec((m, n), data).map_err(|e| Error::DimensionMismatch(e.to_string()))
}

/// Reads a vector stored as an `m × 1` (or `1 × m`) matrix.
pub fn read_vector_csv<R: BufRead>(input: R) -> Result<Array1<f64>> {
    let a = read_matrix_csv(input)?;
    match a.dim() {
        (_, 1) => Ok(a.column(0).to_owned()),
        (1, _) => Ok(a.row(0).to_owned()),
        (m, n) => Err(Error::DimensionMismatch(format!("expected a vector, got a {m}x{n} matrix"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_have_unit_norm() {
        for variant in DictionaryVariant::ALL {
            let a = generate_dictionary(DictionaryKind::new(variant, 3), 10, 15).unwrap();
            for col in a.columns() {
                assert!((col.dot(&col).sqrt() - 1.0).abs() < 1e-12, "{variant:?}");
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let k = DictionaryKind::new(DictionaryVariant::Gaussian, 11);
        assert_eq!(generate_dictionary(k, 5, 7).unwrap(), generate_dictionary(k, 5, 7).unwrap());
        let other = DictionaryKind::new(DictionaryVariant::Gaussian, 12);
        assert_ne!(generate_dictionary(k, 5, 7).unwrap(), generate_dictionary(other, 5, 7).unwrap());
        assert_eq!(generate_observation(4, 9).unwrap(), generate_observation(4, 9).unwrap());
    }

    #[test]
    fn dct_rejects_tall() {
        assert!(generate_dictionary(DictionaryKind::new(DictionaryVariant::Dct, 0), 8, 4).is_err());
    }

    #[test]
    fn full_dct_is_orthonormal() {
        let a = generate_dictionary(DictionaryKind::new(DictionaryVariant::Dct, 1), 6, 6).unwrap();
        let g = a.t().dot(&a);
        for i in 0..6 {
            for j in 0..6 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g[[i, j]] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let a = generate_dictionary(DictionaryKind::new(DictionaryVariant::Uniform, 2), 3, 4).unwrap();
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &a).unwrap();
        assert!(buf.starts_with(b"3,4\n"));
        assert_eq!(read_matrix_csv(&buf[..]).unwrap(), a);
    }

    #[test]
    fn csv_errors_report_lines() {
        let err = read_matrix_csv(&b"2,2\n1,2\n3,x\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_matrix_csv(&b"2,2\n1,2\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = read_matrix_csv(&b"2,2\n1,2,3\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
