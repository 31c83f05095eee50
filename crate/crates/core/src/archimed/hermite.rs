//! Hermite functions psi_m with F psi_m = (-i)^m psi_m for the kernel e^{-2 pi i x y}.

use crate::C64;
use std::f64::consts::PI;

/// psi_0..psi_{n-1} at x; psi_0 = 2^{1/4} e^{-pi x^2}.
pub fn hermite_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    let y = (2.0 * PI).sqrt() * x;
    out[0] = 2f64.powf(0.25) * (-PI * x * x).exp();
    if n > 1 {
        out[1] = 2f64.sqrt() * y * out[0];
    }
    for m in 1..n.saturating_sub(1) {
        let mf = m as f64;
        out[m + 1] = (2.0 / (mf + 1.0)).sqrt() * y * out[m] - (mf / (mf + 1.0)).sqrt() * out[m - 1];
    }
    out
}

pub fn hermite(m: usize, x: f64) -> f64 {
    hermite_all(m + 1, x)[m]
}

/// (-i)^m
pub fn eigenvalue(m: usize) -> C64 {
    match m % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// Lebesgue integrals of psi_0..psi_{n-1}: (F psi_m)(0) = (-i)^m psi_m(0).
pub fn integrals(n: usize) -> Vec<C64> {
    hermite_all(n, 0.0)
        .into_iter()
        .enumerate()
        .map(|(m, v)| eigenvalue(m) * v)
        .collect()
}

/// Uniform trapezoid grid on [-l, l].
pub fn grid(l: f64, h: f64) -> Vec<f64> {
    let n = (l / h).round() as i64;
    (-n..=n).map(|i| i as f64 * h).collect()
}

/// Numerical value of the transform integral of psi_m at y.
pub fn transform_by_quadrature(m: usize, y: f64) -> C64 {
    let h = 1.0 / 64.0;
    grid(12.0, h)
        .into_iter()
        .map(|x| C64::from_polar(hermite(m, x), -2.0 * PI * x * y))
        .sum::<C64>()
        * h
}

/// Overlap matrix O[m][n] = int psi_m(x) psi_n(x + s) dx, m < rows, n < cols.
pub fn shift_matrix(rows: usize, cols: usize, s: f64) -> Vec<Vec<f64>> {
    let h = 1.0 / 64.0;
    let xs = grid(14.0 + s.abs(), h);
    let a: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_all(rows, x)).collect();
    let b: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_all(cols, x + s)).collect();
    let n = cols;
    (0..rows)
        .map(|m| {
            (0..n)
                .map(|k| a.iter().zip(&b).map(|(u, v)| u[m] * v[k]).sum::<f64>() * h)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal() {
        let h = 1.0 / 64.0;
        let xs = grid(10.0, h);
        let vals: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_all(8, x)).collect();
        for m in 0..8 {
            for n in 0..8 {
                let ip: f64 = vals.iter().map(|v| v[m] * v[n]).sum::<f64>() * h;
                assert!((ip - (m == n) as u8 as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_is_fixed() {
        for y in [0.0, 0.3, 1.1] {
            let q = transform_by_quadrature(0, y);
            assert!((q - hermite(0, y)).norm() < 1e-10);
        }
    }

    #[test]
    fn eigenrelation_by_quadrature() {
        for m in 0..=12 {
            for y in [-1.3, -0.2, 0.0, 0.45, 2.0] {
                let q = transform_by_quadrature(m, y);
                assert!((q - eigenvalue(m) * hermite(m, y)).norm() < 1e-10, "m={m} y={y}");
            }
        }
    }

    #[test]
    fn integral_of_gaussian() {
        let h = 1.0 / 64.0;
        let q: f64 = grid(10.0, h).iter().map(|&x| hermite(0, x)).sum::<f64>() * h;
        assert!((integrals(1)[0].re - q).abs() < 1e-12);
    }
}
