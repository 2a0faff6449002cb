//! Periodic spectral discretization of the line.
//!
//! Transform convention. On nodes `x_j = -L/2 + j·dx` the forward transform
//! approximates the continuous transform `∫ e^{-ikx} u(x) dx` by the
//! rectangle rule,
//!
//! ```text
//! v̂(k_m) = dx · Σ_j u(x_j) e^{-i k_m x_j}   = dx · (-1)^m · FFT[u]_m
//! u(x_j) = (1/L) · Σ_m v̂(k_m) e^{i k_m x_j} = (1/L) · IFFT[(-1)^m v̂]_j
//! ```
//!
//! so `v̂` is directly comparable with closed-form transforms, and the
//! inverse is the rectangle rule for `(1/2π) ∫ e^{ikx} v(k) dk` with
//! `Δk = 2π/L`. Coefficient arrays are stored in FFT order: index `i`
//! holds the mode `m = i` for `i < N/2` and `m = i - N` otherwise, so the
//! Nyquist mode is `m = -N/2`. Discrete Parseval in this convention reads
//! `Σ |u_j|² dx = (1/L) Σ |v̂_m|²`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Forward/inverse transform pair for `size` equispaced nodes on a box of
/// length `length`. Sizes need only be even; padded product grids use this
/// directly.
#[derive(Clone)]
pub struct Basis {
    size: usize,
    length: f64,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Basis")
            .field("size", &self.size)
            .field("length", &self.length)
            .finish()
    }
}

impl Basis {
    pub fn new(size: usize, length: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            size,
            length,
            fft: planner.plan_fft_forward(size),
            ifft: planner.plan_fft_inverse(size),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dx(&self) -> f64 {
        self.length / self.size as f64
    }

    /// Forward transform of complex samples.
    pub fn forward_complex(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut buf = u.to_vec();
        self.fft.process(&mut buf);
        let dx = self.dx();
        for (i, v) in buf.iter_mut().enumerate() {
            *v *= if i % 2 == 0 { dx } else { -dx };
        }
        buf
    }

    pub fn forward(&self, u: &[f64]) -> Vec<Complex64> {
        let buf: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward_complex(&buf)
    }

    pub fn inverse_complex(&self, vhat: &[Complex64]) -> Vec<Complex64> {
        let scale = 1.0 / self.length;
        let mut buf: Vec<Complex64> = vhat
            .iter()
            .enumerate()
            .map(|(i, &v)| v * if i % 2 == 0 { scale } else { -scale })
            .collect();
        self.ifft.process(&mut buf);
        buf
    }

    /// Inverse transform, keeping the real part.
    pub fn inverse(&self, vhat: &[Complex64]) -> Vec<f64> {
        self.inverse_complex(vhat).into_iter().map(|c| c.re).collect()
    }
}

/// Signed mode index stored at FFT-order position `i` of an `n`-array.
pub fn mode_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn position_of(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

/// Uniform periodic grid standing in for the real line.
#[derive(Debug, Clone)]
pub struct Grid {
    basis: Basis,
    x: Vec<f64>,
    k: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "mode count must be a power of two ≥ 16, got {n}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        let dx = length / n as f64;
        let x = (0..n).map(|j| -length / 2.0 + j as f64 * dx).collect();
        let k = (0..n)
            .map(|i| 2.0 * PI * mode_index(i, n) as f64 / length)
            .collect();
        Ok(Self {
            basis: Basis::new(n, length),
            x,
            k,
        })
    }

    pub fn n(&self) -> usize {
        self.basis.size
    }

    pub fn length(&self) -> f64 {
        self.basis.length
    }

    pub fn dx(&self) -> f64 {
        self.basis.dx()
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.basis.length
    }

    /// Nodes on `[-L/2, L/2)`.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Wavenumbers in FFT order.
    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn nyquist_index(&self) -> usize {
        self.n() / 2
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Derivative multiplier `ik`, zero at the Nyquist mode.
    pub fn derivative_multiplier(&self) -> Vec<Complex64> {
        let nyq = self.nyquist_index();
        self.k
            .iter()
            .enumerate()
            .map(|(i, &k)| if i == nyq { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, k) })
            .collect()
    }

    /// Zero-pad an `N`-coefficient array to `target.size()` modes. The
    /// Nyquist coefficient is split evenly between `±N/2`.
    pub fn pad(&self, vhat: &[Complex64], target: &Basis) -> Vec<Complex64> {
        let n = self.n();
        let m = target.size();
        debug_assert!(m >= n);
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        for (i, &v) in vhat.iter().enumerate() {
            let mode = mode_index(i, n);
            if i == n / 2 {
                if m == n {
                    out[i] = v;
                } else {
                    out[position_of(mode, m)] = v * 0.5;
                    out[position_of(-mode, m)] = v * 0.5;
                }
            } else {
                out[position_of(mode, m)] = v;
            }
        }
        out
    }

    /// Keep the modes `|m| < N/2` of a padded coefficient array; the Nyquist
    /// slot is zeroed.
    pub fn truncate(&self, padded: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        let m = padded.len();
        (0..n)
            .map(|i| {
                if i == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    padded[position_of(mode_index(i, n), m)]
                }
            })
            .collect()
    }

    /// Padded basis with at least `ratio · N` nodes (rounded up to even).
    pub fn padded_basis(&self, ratio: f64) -> Basis {
        let mut m = (ratio * self.n() as f64 - 1e-9).ceil() as usize;
        m = m.max(self.n());
        if m % 2 == 1 {
            m += 1;
        }
        Basis::new(m, self.length())
    }
}

/// Minimal padding ratio for an alias-free product of `degree` factors.
pub fn required_pad_ratio(degree: u32) -> f64 {
    (f64::from(degree) + 1.0) / 2.0
}

/// Fourier coefficients of an `n`-component field at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub t: f64,
    pub vhat: Vec<Vec<Complex64>>,
}

impl SpectralState {
    pub fn n_components(&self) -> usize {
        self.vhat.len()
    }

    /// Largest relative violation of `v̂(-k) = conj(v̂(k))` over components.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        self.vhat
            .iter()
            .map(|row| {
                let n = row.len();
                let scale = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
                if scale == 0.0 {
                    return 0.0;
                }
                (1..n)
                    .map(|i| (row[i] - row[n - i].conj()).norm())
                    .chain(std::iter::once(row[0].im.abs()))
                    .fold(0.0, f64::max)
                    / scale
            })
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.vhat.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

fn check_rows<T>(fields: &[Vec<T>], n: usize) -> Result<()> {
    if let Some(bad) = fields.iter().find(|row| row.len() != n) {
        return Err(Error::ShapeMismatch {
            expected: format!("rows of length {n}"),
            found: format!("row of length {}", bad.len()),
        });
    }
    Ok(())
}

pub fn to_spectral(u: &[Vec<f64>], grid: &Grid, t: f64) -> Result<SpectralState> {
    check_rows(u, grid.n())?;
    Ok(SpectralState {
        t,
        vhat: u.iter().map(|row| grid.basis.forward(row)).collect(),
    })
}

pub fn to_physical(state: &SpectralState, grid: &Grid) -> Result<Vec<Vec<f64>>> {
    check_rows(&state.vhat, grid.n())?;
    Ok(state.vhat.iter().map(|row| grid.basis.inverse(row)).collect())
}

/// `v̂ ↦ ik·v̂` per component, Nyquist mode zeroed.
pub fn spectral_derivative(state: &SpectralState, grid: &Grid) -> SpectralState {
    let ik = grid.derivative_multiplier();
    SpectralState {
        t: state.t,
        vhat: state
            .vhat
            .iter()
            .map(|row| row.iter().zip(&ik).map(|(v, m)| v * m).collect())
            .collect(),
    }
}

/// Pointwise product of physical fields computed alias-free on a padded grid
/// of `⌈pad_ratio·N⌉` nodes. Requires `pad_ratio ≥ (deg + 1)/2`.
pub fn dealiased_product(factors: &[&[f64]], grid: &Grid, pad_ratio: f64) -> Result<Vec<f64>> {
    dealiased_product_band_limited(factors, grid, pad_ratio, grid.n() / 2)
}

/// As [`dealiased_product`] for inputs whose modes satisfy `|m| ≤ band`.
/// The padded size `M` must satisfy `M ≥ deg·band + N/2`, which reduces to
/// the general rule when `band = N/2`.
pub fn dealiased_product_band_limited(
    factors: &[&[f64]],
    grid: &Grid,
    pad_ratio: f64,
    band: usize,
) -> Result<Vec<f64>> {
    let n = grid.n();
    if factors.is_empty() {
        return Ok(vec![1.0; n]);
    }
    if let Some(bad) = factors.iter().find(|f| f.len() != n) {
        return Err(Error::ShapeMismatch {
            expected: format!("factors of length {n}"),
            found: format!("{}", bad.len()),
        });
    }
    let degree = factors.len();
    let padded = grid.padded_basis(pad_ratio);
    let needed = degree * band.min(n / 2) + n / 2;
    if padded.size() < needed {
        return Err(Error::InsufficientPadding(format!(
            "degree {degree} with band {band} needs {needed} padded nodes, pad ratio {pad_ratio} gives {}",
            padded.size()
        )));
    }
    let mut product = vec![1.0; padded.size()];
    for f in factors {
        let coeffs = grid.pad(&grid.basis.forward(f), &padded);
        for (p, v) in product.iter_mut().zip(padded.inverse(&coeffs)) {
            *p *= v;
        }
    }
    let truncated = grid.truncate(&padded.forward(&product));
    Ok(grid.basis.inverse(&truncated))
}

/// Co-moving coefficients `w_i(k) = e^{-i c_i k t} v̂_i(k)`. The inverse
/// transform of `w_i` samples `u_i(x - c_i t, t)`.
pub fn comoving_shift(state: &SpectralState, grid: &Grid, velocities: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    if velocities.len() != state.n_components() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} velocities", state.n_components()),
            found: format!("{}", velocities.len()),
        });
    }
    Ok(state
        .vhat
        .iter()
        .zip(velocities)
        .map(|(row, &c)| {
            row.iter()
                .zip(grid.k())
                .map(|(v, &k)| v * Complex64::from_polar(1.0, -c * k * state.t))
                .collect()
        })
        .collect())
}

/// Ratio of `max |u|` over the outer `margin_fraction` of the box (both ends)
/// to `max |u|` over the whole box; 0 for a zero field.
pub fn boundary_mass_field(u: &[f64], margin_fraction: f64) -> f64 {
    let n = u.len();
    let edge = ((margin_fraction * n as f64).ceil() as usize).clamp(1, n / 2);
    let total = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if total == 0.0 {
        return 0.0;
    }
    let outer = u[..edge]
        .iter()
        .chain(&u[n - edge..])
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    outer / total
}

/// Per-component boundary mass of a state.
pub fn boundary_mass(state: &SpectralState, grid: &Grid, margin_fraction: f64) -> Result<Vec<f64>> {
    Ok(to_physical(state, grid)?
        .iter()
        .map(|row| boundary_mass_field(row, margin_fraction))
        .collect())
}
