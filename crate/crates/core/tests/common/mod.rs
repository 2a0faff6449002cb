//! Reference implementations for the test suites. Written against the
//! definitions, not against the library's code paths.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rda_core::nonlinearity::NonlinearitySpec;

/// `f(u, du)` one point at a time, one term at a time. Divergence terms use
/// the product rule written out here.
pub fn brute_force_eval(spec: &NonlinearitySpec, u: &[Vec<f64>], du: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = spec.n();
    let len = u[0].len();
    let mut out = vec![vec![0.0; len]; n];
    for p in 0..len {
        for i in 0..n {
            let mut acc = 0.0;
            for m in &spec.terms()[i] {
                let a = m.u_exponents();
                let b = m.du_exponents();
                if m.outer_divergence() {
                    // ∂x Π u_j^{a_j} = Σ_l a_l u_l^{a_l - 1} ∂x u_l Π_{j≠l} u_j^{a_j}
                    let mut s = 0.0;
                    for l in 0..n {
                        if a[l] == 0 {
                            continue;
                        }
                        let mut prod = f64::from(a[l]) * du[l][p];
                        for j in 0..n {
                            let e = if j == l { a[j] - 1 } else { a[j] };
                            for _ in 0..e {
                                prod *= u[j][p];
                            }
                        }
                        s += prod;
                    }
                    acc += m.coefficient() * s;
                } else {
                    let mut prod = m.coefficient();
                    for j in 0..n {
                        for _ in 0..a[j] {
                            prod *= u[j][p];
                        }
                        for _ in 0..b[j] {
                            prod *= du[j][p];
                        }
                    }
                    acc += prod;
                }
            }
            out[i][p] = acc;
        }
    }
    out
}

/// Plain DFT coefficients `c_m = (1/N) Σ_j u_j e^{-2πi m j/N}` for
/// `m = -N/2 .. N/2 - 1`, index `m + N/2`.
pub fn dft(u: &[f64]) -> Vec<Complex64> {
    let n = u.len();
    let half = n as i64 / 2;
    (-half..half)
        .map(|m| {
            u.iter()
                .enumerate()
                .map(|(j, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * (m * j as i64) as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64
        })
        .collect()
}

/// Product of band-limited fields by direct convolution of their DFT
/// coefficients over the integers, truncated to `|m| < N/2`.
pub fn convolution_product(factors: &[&[f64]]) -> Vec<f64> {
    let n = factors[0].len();
    let half = n as i64 / 2;
    // coefficient maps over an index range that grows with each factor
    let mut acc: Vec<(i64, Complex64)> = vec![(0, Complex64::new(1.0, 0.0))];
    for f in factors {
        let c = dft(f);
        let mut next = std::collections::BTreeMap::<i64, Complex64>::new();
        for &(m1, a) in &acc {
            for (idx, &b) in c.iter().enumerate() {
                let m2 = idx as i64 - half;
                if b.norm() == 0.0 {
                    continue;
                }
                *next.entry(m1 + m2).or_default() += a * b;
            }
        }
        acc = next.into_iter().collect();
    }
    (0..n)
        .map(|j| {
            acc.iter()
                .filter(|(m, _)| m.abs() < half)
                .map(|&(m, c)| c * Complex64::from_polar(1.0, 2.0 * PI * (m * j as i64) as f64 / n as f64))
                .sum::<Complex64>()
                .re
        })
        .collect()
}

/// Random real field on `n` nodes with DFT modes confined to `|m| < band`.
pub fn band_limited_field<R: Rng>(rng: &mut R, n: usize, band: usize) -> Vec<f64> {
    let mut u = vec![0.0; n];
    let a0: f64 = rng.gen_range(-1.0..1.0);
    for v in u.iter_mut() {
        *v = a0;
    }
    for m in 1..band {
        let (re, im): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let scale = 1.0 / band as f64;
        for (j, v) in u.iter_mut().enumerate() {
            let th = 2.0 * PI * (m * j) as f64 / n as f64;
            *v += 2.0 * scale * (re * th.cos() - im * th.sin());
        }
    }
    u
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}
