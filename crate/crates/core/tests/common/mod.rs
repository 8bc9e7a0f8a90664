//! Independent reference implementations shared by the oracle and acceptance suites.
#![allow(dead_code)]

use chrono::{Days, NaiveDate};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use txentropy::econometrics::DesignMatrix;
use txentropy::timeseries::IndexSeries;

pub type Rows = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn random_walk(seed: u64, n: usize) -> Vec<f64> {
    let mut acc = 0.0;
    normals(&mut rng(seed), n)
        .into_iter()
        .map(|e| {
            acc += e;
            acc
        })
        .collect()
}

pub fn ar1_path(seed: u64, n: usize, phi: f64) -> Vec<f64> {
    let e = normals(&mut rng(seed), n + 200);
    let mut x = vec![0.0; e.len()];
    for t in 1..x.len() {
        x[t] = phi * x[t - 1] + e[t];
    }
    x.split_off(200)
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(a: &Rows) -> Rows {
    let k = a.len();
    let mut m: Rows = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        let d = m[c][c];
        m[c].iter_mut().for_each(|v| *v /= d);
        for r in 0..k {
            if r != c {
                let f = m[r][c];
                let pivot = m[c].clone();
                m[r].iter_mut().zip(pivot).for_each(|(v, pv)| *v -= f * pv);
            }
        }
    }
    m.into_iter().map(|r| r[k..].to_vec()).collect()
}

pub fn mat_mul(a: &Rows, b: &Rows) -> Rows {
    (0..a.len())
        .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

fn gram(x: &Rows) -> Rows {
    let k = x[0].len();
    (0..k).map(|i| (0..k).map(|j| x.iter().map(|r| r[i] * r[j]).sum()).collect()).collect()
}

/// `(XᵀX)⁻¹ Xᵀy` by explicit normal equations.
pub fn normal_equations(x: &Rows, y: &[f64]) -> Vec<f64> {
    let inv = invert(&gram(x));
    let k = x[0].len();
    let xty: Vec<f64> = (0..k).map(|j| x.iter().zip(y).map(|(r, v)| r[j] * v).sum()).collect();
    inv.iter().map(|row| row.iter().zip(&xty).map(|(a, b)| a * b).sum()).collect()
}

/// White's sandwich with an explicit loop over rows.
pub fn hc0(x: &Rows, y: &[f64]) -> Rows {
    let beta = normal_equations(x, y);
    let k = beta.len();
    let mut meat = vec![vec![0.0; k]; k];
    for (row, yv) in x.iter().zip(y) {
        let e = yv - row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..k {
            for j in 0..k {
                meat[i][j] += e * e * row[i] * row[j];
            }
        }
    }
    let bread = invert(&gram(x));
    mat_mul(&mat_mul(&bread, &meat), &bread)
}

pub fn design(x: &Rows, y: &[f64]) -> DesignMatrix {
    let (n, k) = (x.len(), x[0].len());
    let names = (0..k).map(|j| if j == 0 { "const".to_string() } else { format!("x{j}") }).collect();
    DesignMatrix::from_parts(names, DMatrix::from_fn(n, k, |i, j| x[i][j]), DVector::from_column_slice(y), true).unwrap()
}

/// Random regression problem with an intercept column.
pub fn random_problem(seed: u64) -> (Rows, Vec<f64>) {
    let mut r = rng(seed);
    let k = r.gen_range(1..=6);
    let n = r.gen_range(k + 5..=300);
    let beta: Vec<f64> = (0..k).map(|_| r.gen_range(-3.0..3.0)).collect();
    let x: Rows = (0..n)
        .map(|_| {
            let mut row = vec![1.0];
            row.extend((1..k).map(|_| {
                let z: f64 = StandardNormal.sample(&mut r);
                z * r.gen_range(0.5..2.0)
            }));
            row
        })
        .collect();
    let y = x
        .iter()
        .map(|row| {
            let e: f64 = StandardNormal.sample(&mut r);
            row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + e * (1.0 + row.last().unwrap().abs())
        })
        .collect();
    (x, y)
}

/// Leading eigenpair of a symmetric matrix by power iteration.
pub fn power_iteration(a: &Rows) -> (f64, Vec<f64>) {
    let k = a.len();
    let mut v = vec![1.0 / (k as f64).sqrt(); k];
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w: Vec<f64> = (0..k).map(|i| (0..k).map(|j| a[i][j] * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let delta: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = next;
        lambda = norm;
        if delta < 1e-15 {
            break;
        }
    }
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    (lambda, v)
}

pub fn correlation(columns: &[Vec<f64>]) -> Rows {
    let n = columns[0].len() as f64;
    let z: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| {
            let m = c.iter().sum::<f64>() / n;
            let sd = (c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            c.iter().map(|v| (v - m) / sd).collect()
        })
        .collect();
    z.iter()
        .map(|a| z.iter().map(|b| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>() / (n - 1.0)).collect())
        .collect()
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

/// Daily index series from 2021-06-01 to 2021-09-30 with a level jump of
/// `jump` on and after 2021-08-05, a mild trend and Gaussian noise.
pub fn index_with_jump(seed: u64, jump: f64) -> IndexSeries {
    let start = date(2021, 6, 1);
    let n = (date(2021, 9, 30) - start).num_days() as usize + 1;
    let event = date(2021, 8, 5);
    let e = normals(&mut rng(seed), n);
    let dates: Vec<NaiveDate> = (0..n as u64).map(|i| start + Days::new(i)).collect();
    let raw = dates
        .iter()
        .zip(e)
        .map(|(d, e)| {
            let day = (*d - event).num_days() as f64;
            50.0 + 0.2 * day + if *d >= event { jump } else { 0.0 } + e
        })
        .collect();
    IndexSeries::new(dates, raw, 30, 0.1).unwrap()
}
