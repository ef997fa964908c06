mod common;

use antisparse::dictgen::{
    dct_rows, generate_dictionary, generate_observation, read_matrix_csv, read_vector_csv, write_matrix_csv,
    write_vector_csv, DictionaryKind, DictionaryVariant,
};
use antisparse::Error;
use common::TestRng;
use nalgebra::DMatrix;
use ndarray::Array2;

fn moments(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn gaussian_entries_are_standard_normal_before_scaling() {
    let m = 100_000;
    let a = generate_dictionary(DictionaryKind::new(DictionaryVariant::Gaussian, 11), m, 1).unwrap();
    let scale = (m as f64).sqrt();
    let (mean, var) = moments(a.iter().map(|v| v * scale));
    // after normalization the scaled column has unit mean square exactly
    assert!(mean.abs() < 0.02, "{mean}");
    assert!((var - 1.0).abs() < 0.02, "{var}");
}

#[test]
fn uniform_entries_have_uniform_moments() {
    let m = 100_000;
    let a = generate_dictionary(DictionaryKind::new(DictionaryVariant::Uniform, 12), m, 1).unwrap();
    // with x ~ U[0,1) and c = √E[x²] = 1/√3, x/c has mean √3/2 and variance 1/4
    let scale = (m as f64).sqrt();
    let (mean, var) = moments(a.iter().map(|v| v * scale));
    assert!((mean - 3f64.sqrt() / 2.0).abs() < 0.01, "{mean}");
    assert!((var - 0.25).abs() < 0.01, "{var}");
    assert!(a.iter().all(|&v| v >= 0.0));
}

#[test]
fn observation_is_standard_normal() {
    let y = generate_observation(5, 100_000).unwrap();
    let (mean, var) = moments(y.iter().copied());
    assert!(mean.abs() < 0.02 && (var - 1.0).abs() < 0.02, "{mean} {var}");
}

#[test]
fn columns_have_unit_norm() {
    for variant in DictionaryVariant::ALL {
        let a = generate_dictionary(DictionaryKind::new(variant, 3), 20, 30).unwrap();
        for col in a.columns() {
            assert!((col.dot(&col) - 1.0).abs() < 1e-14, "{}", variant.name());
        }
    }
}

fn smallest_singular_value(a: &Array2<f64>, cols: &[usize]) -> f64 {
    let m = a.nrows();
    let sub = DMatrix::from_fn(m, cols.len(), |i, k| a[[i, cols[k]]]);
    sub.singular_values().min()
}

#[test]
fn random_dictionaries_have_full_spark_on_sampled_subsets() {
    let mut rng = TestRng::new(21);
    // partial DCT matrices can lose rank on column subsets through cosine symmetries
    for variant in [DictionaryVariant::Gaussian, DictionaryVariant::Uniform] {
        let a = generate_dictionary(DictionaryKind::new(variant, 4), 10, 15).unwrap();
        for _ in 0..20 {
            let mut cols: Vec<usize> = (0..15).collect();
            for i in (1..cols.len()).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                cols.swap(i, j);
            }
            cols.truncate(10);
            let smin = smallest_singular_value(&a, &cols);
            assert!(smin > 1e-8, "{}: σmin = {smin}", variant.name());
        }
    }
}

#[test]
fn dct_rows_are_orthonormal() {
    let n = 32;
    let all: Vec<usize> = (0..n).collect();
    let full = dct_rows(&all, n);
    let gram = full.dot(&full.t());
    let eye = Array2::<f64>::eye(n);
    assert!((&gram - &eye).iter().all(|v| v.abs() < 1e-13));
    let part = dct_rows(&[0, 3, 7, 20], n);
    let gram = part.dot(&part.t());
    assert!((&gram - &Array2::<f64>::eye(4)).iter().all(|v| v.abs() < 1e-13));
}

#[test]
fn dct_dictionary_rows_are_distinct_dct_rows() {
    let a = generate_dictionary(DictionaryKind::new(DictionaryVariant::Dct, 9), 10, 15).unwrap();
    assert!(generate_dictionary(DictionaryKind::new(DictionaryVariant::Dct, 9), 16, 15).is_err());
    // normalized DCT rows stay mutually orthogonal up to column scaling: check rank instead
    let all: Vec<usize> = (0..10).collect();
    assert!(smallest_singular_value(&a.t().to_owned(), &all) > 1e-8);
}

#[test]
fn toeplitz_bells_peak_along_the_diagonal() {
    let a = generate_dictionary(DictionaryKind::new(DictionaryVariant::Toeplitz, 0), 10, 40).unwrap();
    for i in 1..9 {
        let row = a.row(i);
        let peak = row.iter().enumerate().fold((0, f64::MIN), |b, (j, &v)| if v > b.1 { (j, v) } else { b }).0;
        assert_eq!(peak, 4 * i);
    }
    // seed independent
    assert_eq!(a, generate_dictionary(DictionaryKind::new(DictionaryVariant::Toeplitz, 99), 10, 40).unwrap());
}

#[test]
fn generation_is_deterministic_per_seed() {
    for variant in [DictionaryVariant::Gaussian, DictionaryVariant::Uniform, DictionaryVariant::Dct] {
        let a1 = generate_dictionary(DictionaryKind::new(variant, 7), 10, 15).unwrap();
        let a2 = generate_dictionary(DictionaryKind::new(variant, 7), 10, 15).unwrap();
        let b = generate_dictionary(DictionaryKind::new(variant, 8), 10, 15).unwrap();
        assert_eq!(a1, a2);
        assert_ne!(a1, b);
    }
    assert_eq!(generate_observation(7, 10).unwrap(), generate_observation(7, 10).unwrap());
    assert_ne!(generate_observation(7, 10).unwrap(), generate_observation(8, 10).unwrap());
}

#[test]
fn invalid_dimensions_are_rejected() {
    assert!(generate_dictionary(DictionaryKind::new(DictionaryVariant::Gaussian, 0), 0, 4).is_err());
    assert!(generate_observation(0, 0).is_err());
}

#[test]
fn csv_round_trip_is_exact() {
    let a = generate_dictionary(DictionaryKind::new(DictionaryVariant::Gaussian, 1), 6, 9).unwrap();
    let mut buf = Vec::new();
    write_matrix_csv(&mut buf, &a).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("6,9\n"));
    assert_eq!(read_matrix_csv(buf.as_slice()).unwrap(), a);

    let y = generate_observation(1, 6).unwrap();
    let mut buf = Vec::new();
    write_vector_csv(&mut buf, &y).unwrap();
    assert_eq!(read_vector_csv(buf.as_slice()).unwrap(), y);
}

#[test]
fn csv_errors_report_lines() {
    let bad = "2,2\n1.0,2.0\n3.0,oops\n";
    match read_matrix_csv(bad.as_bytes()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
    let short = "2,2\n1.0,2.0\n";
    assert!(matches!(read_matrix_csv(short.as_bytes()), Err(Error::Parse { .. })));
    let ragged = "2,2\n1.0\n3.0,4.0\n";
    match read_matrix_csv(ragged.as_bytes()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
}
