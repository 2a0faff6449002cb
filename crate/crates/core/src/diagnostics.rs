//! Quantities the decay theory bounds: sup-norms, co-moving weighted Fourier
//! norms, the temporal weight η, pointwise envelopes, decay-rate fits and the
//! CAS3 normal-form field.
//!
//! All L¹/L² norms in `k` are rectangle/trapezoid sums on the periodic
//! `k`-grid with spacing `Δk = 2π/L`. With the transform convention of
//! [`crate::spectral`] the discrete embedding `‖u_i‖∞ ≤ ‖w_i‖₁/(2π)` holds
//! exactly up to rounding; see [`SUP_NORM_CONSTANT`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::integrator::{run_simulation, IntegratorConfig, Status};
use crate::scenarios::SystemSpec;
use crate::spectral::{boundary_mass_field, comoving_shift, to_physical, Grid, SpectralState};

/// `‖u_i‖∞ ≤ SUP_NORM_CONSTANT · ‖w_i‖₁`.
pub const SUP_NORM_CONSTANT: f64 = 1.0 / (2.0 * PI);

/// Weighted co-moving Fourier norms of one component.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ComponentNorms {
    /// `‖w‖₁`
    pub n00: f64,
    /// `‖k w‖₁`
    pub n10: f64,
    /// `‖∂k w‖₁`
    pub n01: f64,
    /// `‖k ∂k w‖₁`
    pub n11: f64,
    /// `‖k w‖₂`
    pub n10_2: f64,
}

impl ComponentNorms {
    /// Norm `‖k^j ∂k^m w‖₁` for `j, m ∈ {0, 1}`.
    pub fn get(&self, j: u32, m: u32) -> f64 {
        match (j, m) {
            (0, 0) => self.n00,
            (1, 0) => self.n10,
            (0, 1) => self.n01,
            _ => self.n11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub sup_u: Vec<f64>,
    pub sup_du: Vec<f64>,
    pub norms: Vec<ComponentNorms>,
    /// The five rate-weighted terms of η at this time, summed over components.
    pub eta_components: [f64; 5],
    /// Running supremum of `Σ eta_components` up to this snapshot.
    pub eta: f64,
    pub envelope_u: Vec<f64>,
    pub envelope_du: Vec<f64>,
    /// `envelope_du` without the `1/ln(2+t)` factor. Reported, never asserted.
    pub envelope_du_logfree: Vec<f64>,
    /// False when no seam leaves a co-moving field negligible, which
    /// invalidates the `x`-multiplication used for `∂k w`.
    pub reliable: bool,
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Weighted norms of one co-moving coefficient array on the centered
/// coordinate. `∂k w` comes from the physical side:
/// `F⁻¹(∂k w)(x) = -i x F⁻¹(w)(x)`.
pub fn component_norms(w: &[Complex64], grid: &Grid) -> ComponentNorms {
    norms_on(w, grid, grid.x())
}

fn norms_on(w: &[Complex64], grid: &Grid, x: &[f64]) -> ComponentNorms {
    let basis = grid.basis();
    let field = basis.inverse_complex(w);
    let weighted: Vec<Complex64> = field
        .iter()
        .zip(x)
        .map(|(u, &x)| Complex64::new(0.0, -x) * u)
        .collect();
    let dkw = basis.forward_complex(&weighted);
    let dk = grid.dk();
    let mut n = ComponentNorms::default();
    let mut l2 = 0.0;
    for ((wi, dwi), &k) in w.iter().zip(&dkw).zip(grid.k()) {
        let a = wi.norm();
        let b = dwi.norm();
        n.n00 += a;
        n.n10 += k.abs() * a;
        n.n01 += b;
        n.n11 += k.abs() * b;
        l2 += (k * a).powi(2);
    }
    n.n00 *= dk;
    n.n10 *= dk;
    n.n01 *= dk;
    n.n11 *= dk;
    n.n10_2 = (l2 * dk).sqrt();
    n
}

/// Real-line coordinate for a co-moving field on the periodic box.
///
/// The default is the centered coordinate, with the seam at `±L/2`. When the
/// field is not negligible there (relative max above `threshold` within
/// `margin_fraction` of the seam) the seam moves to the window where the
/// field is smallest, and points past it are shifted by `±L` so the origin
/// stays put. A trail the coupling leaves between two frames is then
/// measured on the side where it actually lies. Returns the coordinate and
/// whether the chosen seam is clean.
pub fn seam_lift(u: &[f64], grid: &Grid, margin_fraction: f64, threshold: f64) -> (Vec<f64>, bool) {
    let x = grid.x();
    if boundary_mass_field(u, margin_fraction) <= threshold {
        return (x.to_vec(), true);
    }
    let n = u.len();
    let sup = sup_abs(u);
    let edge = ((margin_fraction * n as f64).ceil() as usize).clamp(1, n / 2);
    // max |u| over the 2·edge cells straddling each candidate seam
    let abs: Vec<f64> = u.iter().map(|v| v.abs()).collect();
    let mut deque = std::collections::VecDeque::new();
    let mut best = (f64::INFINITY, 0usize);
    for j in 0..n + 2 * edge {
        let idx = (j + n - edge) % n;
        while deque.back().is_some_and(|&(_, v): &(usize, f64)| v <= abs[idx]) {
            deque.pop_back();
        }
        deque.push_back((j, abs[idx]));
        if deque.front().is_some_and(|&(i, _)| i + 2 * edge <= j) {
            deque.pop_front();
        }
        if j + 1 >= 2 * edge {
            let seam = (j + 1 - 2 * edge) % n;
            let m = deque.front().map_or(0.0, |&(_, v)| v);
            if m < best.0 {
                best = (m, seam);
            }
        }
    }
    let (m, seam) = best;
    let l = grid.length();
    let lifted = x
        .iter()
        .enumerate()
        .map(|(p, &xp)| match (seam < n / 2, p < seam) {
            (true, true) => xp + l,
            (false, false) => xp - l,
            _ => xp,
        })
        .collect();
    let lifted = if seam == 0 { x.to_vec() } else { lifted };
    (lifted, m / sup <= threshold)
}

/// Co-moving weighted norms per component, and whether every co-moving field
/// is negligible at the seam of its coordinate (see [`seam_lift`]).
pub fn weighted_fourier_norms(
    state: &SpectralState,
    grid: &Grid,
    velocities: &[f64],
    margin_fraction: f64,
    threshold: f64,
) -> Result<(Vec<ComponentNorms>, bool)> {
    let w = comoving_shift(state, grid, velocities)?;
    let mut reliable = true;
    let mut norms = Vec::with_capacity(w.len());
    for wi in &w {
        let (x, ok) = seam_lift(&grid.basis().inverse(wi), grid, margin_fraction, threshold);
        reliable &= ok;
        norms.push(norms_on(wi, grid, &x));
    }
    Ok((norms, reliable))
}

/// The five bracketed weight terms at time `t`, summed over components.
pub fn eta_components(norms: &[ComponentNorms], t: f64) -> [f64; 5] {
    let s = 1.0 + t;
    let sum = |f: fn(&ComponentNorms) -> f64| norms.iter().map(f).sum::<f64>();
    [
        s.sqrt() * sum(|n| n.n00),
        s.sqrt() / (2.0 + t).ln() * sum(|n| n.n11),
        s * sum(|n| n.n10),
        sum(|n| n.n01),
        s.powf(0.75) * sum(|n| n.n10_2),
    ]
}

/// `η(t)`: supremum over the history of the summed weight terms.
pub fn eta(history: &[DiagnosticsRecord]) -> Result<f64> {
    if history.is_empty() {
        return Err(invalid("history", "η needs at least one snapshot"));
    }
    Ok(history
        .iter()
        .map(|r| r.eta_components.iter().sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Per component: `sup_x |u_i|(1 + |x + c_i t| + √t)`, the same for `∂x u_i`
/// with the extra `√(1+t)/ln(2+t)`, and the log-free variant of the latter.
/// `x + c_i t` is read off the co-moving field on the coordinate of
/// [`seam_lift`] with the default margin and threshold.
pub fn pointwise_envelope(
    state: &SpectralState,
    grid: &Grid,
    velocities: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let d = IntegratorConfig::default();
    envelope_with(state, grid, velocities, d.margin_fraction, d.boundary_threshold)
}

fn envelope_with(
    state: &SpectralState,
    grid: &Grid,
    velocities: &[f64],
    margin_fraction: f64,
    threshold: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let w = comoving_shift(state, grid, velocities)?;
    let ik = grid.derivative_multiplier();
    let t = state.t.max(0.0);
    let root_t = t.sqrt();
    let du_factor = (1.0 + t).sqrt();
    let log = (2.0 + t).ln();
    let mut env_u = Vec::with_capacity(w.len());
    let mut env_du = Vec::with_capacity(w.len());
    let mut env_du_free = Vec::with_capacity(w.len());
    for wi in &w {
        let u = grid.basis().inverse(wi);
        let dw: Vec<Complex64> = wi.iter().zip(&ik).map(|(a, b)| a * b).collect();
        let du = grid.basis().inverse(&dw);
        let (x, _) = seam_lift(&u, grid, margin_fraction, threshold);
        let weight = |x: f64| 1.0 + x.abs() + root_t;
        let eu = u.iter().zip(&x).fold(0.0_f64, |m, (v, &x)| m.max(v.abs() * weight(x)));
        let edu = du.iter().zip(&x).fold(0.0_f64, |m, (v, &x)| m.max(v.abs() * weight(x)));
        env_u.push(eu);
        env_du.push(edu * du_factor / log);
        env_du_free.push(edu * du_factor);
    }
    Ok((env_u, env_du, env_du_free))
}

/// Every per-snapshot diagnostic except the running η (set by the caller).
pub fn diagnose(
    state: &SpectralState,
    grid: &Grid,
    velocities: &[f64],
    config: &IntegratorConfig,
) -> Result<DiagnosticsRecord> {
    let u = to_physical(state, grid)?;
    let du = to_physical(&crate::spectral::spectral_derivative(state, grid), grid)?;
    let (norms, reliable) = weighted_fourier_norms(
        state,
        grid,
        velocities,
        config.margin_fraction,
        config.boundary_threshold,
    )?;
    let (envelope_u, envelope_du, envelope_du_logfree) =
        envelope_with(state, grid, velocities, config.margin_fraction, config.boundary_threshold)?;
    let eta_components = eta_components(&norms, state.t);
    Ok(DiagnosticsRecord {
        t: state.t,
        sup_u: u.iter().map(|r| sup_abs(r)).collect(),
        sup_du: du.iter().map(|r| sup_abs(r)).collect(),
        norms,
        eta: eta_components.iter().sum(),
        eta_components,
        envelope_u,
        envelope_du,
        envelope_du_logfree,
        reliable,
    })
}

/// Fit window as fractions of the final time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub start: f64,
    pub end: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self { start: 0.25, end: 1.0 }
    }
}

impl FitWindow {
    pub fn resolve(&self, t_end: f64) -> (f64, f64) {
        (self.start * t_end, self.end * t_end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Least-squares slope of `ln(value)` against `ln(1 + t)` over the samples
/// with `t ∈ [t_a, t_b]`.
pub fn fit_decay_rate(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let (ta, tb) = window;
    if ta < 1.0 {
        return Err(Error::Fit(format!("window must start at t >= 1, got {ta}")));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t >= ta - 1e-9 && *t <= tb + 1e-9)
        .copied()
        .collect();
    if pts.len() < 10 {
        return Err(Error::Fit(format!(
            "need at least 10 samples in [{ta}, {tb}], found {}",
            pts.len()
        )));
    }
    if let Some((t, v)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Fit(format!("non-positive value {v} at t = {t}")));
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _)| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(DecayFit {
        slope,
        stderr,
        samples: pts.len(),
    })
}

/// `ṽ(ζ) = u₁(ζ − c₁t) + γ/(c₂ − c₁) · u₂(ζ − c₁t)²`, both components read in
/// the frame moving with component 1.
pub fn normal_form_transform(state: &SpectralState, grid: &Grid, gamma: f64, c1: f64, c2: f64) -> Result<Vec<f64>> {
    if state.n_components() != 2 {
        return Err(invalid("n", "normal form transform needs two components"));
    }
    if c1 == c2 {
        return Err(invalid("c2", "normal form transform needs c1 != c2"));
    }
    let w = comoving_shift(state, grid, &[c1, c1])?;
    let u1 = grid.basis().inverse(&w[0]);
    let u2 = grid.basis().inverse(&w[1]);
    let k = gamma / (c2 - c1);
    Ok(u1.iter().zip(&u2).map(|(a, b)| a + k * b * b).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentRow {
    pub j: u32,
    pub m: u32,
    pub predicted: f64,
    pub slope: f64,
    pub stderr: f64,
}

/// Linear decay exponents: run `f ≡ 0` from `init` and fit
/// `Σ_i ‖k^j ∂k^m w_i‖₁` on `[t_end/4, t_end]` for `j, m ∈ {0, 1}`, next to
/// the predicted `-(1 + j - m)/2`.
pub fn linear_exponent_suite(
    d: &[f64],
    c: &[f64],
    init: &[Vec<f64>],
    grid: &Grid,
    config: &IntegratorConfig,
) -> Result<Vec<ExponentRow>> {
    let spec = crate::scenarios::build_linear(d.to_vec(), c.to_vec())?;
    let record = run_simulation(&spec, init, grid, config)?;
    if record.status != Status::Completed {
        return Err(Error::Fit(format!("linear run ended with {:?}", record.status)));
    }
    let window = FitWindow::default().resolve(config.t_end);
    [(0, 0), (1, 0), (0, 1), (1, 1)]
        .into_iter()
        .map(|(j, m)| {
            let series: Vec<(f64, f64)> = record
                .snapshots
                .iter()
                .map(|s| (s.t, s.norms.iter().map(|n| n.get(j, m)).sum()))
                .collect();
            let fit = fit_decay_rate(&series, window)?;
            Ok(ExponentRow {
                j,
                m,
                predicted: (f64::from(m) - 1.0 - f64::from(j)) / 2.0,
                slope: fit.slope,
                stderr: fit.stderr,
            })
        })
        .collect()
}

/// Convenience for callers holding a [`SystemSpec`].
pub fn linear_exponents_for(spec: &SystemSpec, init: &[Vec<f64>], grid: &Grid, config: &IntegratorConfig) -> Result<Vec<ExponentRow>> {
    linear_exponent_suite(spec.d(), spec.c(), init, grid, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::to_spectral;

    fn record_with(t: f64, norms: ComponentNorms) -> DiagnosticsRecord {
        let eta_components = eta_components(&[norms], t);
        DiagnosticsRecord {
            t,
            sup_u: vec![0.0],
            sup_du: vec![0.0],
            norms: vec![norms],
            eta_components,
            eta: eta_components.iter().sum(),
            envelope_u: vec![0.0],
            envelope_du: vec![0.0],
            envelope_du_logfree: vec![0.0],
            reliable: true,
        }
    }

    #[test]
    fn synthetic_gaussian_spectrum_norms() {
        let g = Grid::new(1024, 200.0).unwrap();
        let w: Vec<Complex64> = g.k().iter().map(|&k| Complex64::new((-k * k).exp(), 0.0)).collect();
        let n = component_norms(&w, &g);
        assert!((n.n00 - PI.sqrt()).abs() < 1e-10, "{}", n.n00);
        // the kink of |k| at 0 shifts the trapezoid sum by its Euler-Maclaurin terms
        let kink = g.dk().powi(2) / 6.0 + g.dk().powi(4) / 60.0;
        assert!((n.n10 - (1.0 - kink)).abs() < 1e-10, "{}", n.n10);
        // ∂k e^{-k²} = -2k e^{-k²}: L¹ norm 2, and ‖k ∂k w‖₁ = 2∫k²e^{-k²} = √π
        assert!((n.n01 - 2.0 * (1.0 - kink)).abs() < 1e-10, "{}", n.n01);
        assert!((n.n11 - PI.sqrt()).abs() < 1e-10, "{}", n.n11);
        // ‖k e^{-k²}‖₂² = ∫k² e^{-2k²} = √(π/2)/4
        assert!((n.n10_2 - ((PI / 2.0).sqrt() / 4.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn zero_state_norms() {
        let g = Grid::new(64, 20.0).unwrap();
        let s = to_spectral(&[vec![0.0; 64]], &g, 1.0).unwrap();
        let (n, ok) = weighted_fourier_norms(&s, &g, &[1.0], 0.05, 1e-8).unwrap();
        assert_eq!(n[0], ComponentNorms::default());
        assert!(ok);
        let (eu, edu, _) = pointwise_envelope(&s, &g, &[1.0]).unwrap();
        assert_eq!((eu[0], edu[0]), (0.0, 0.0));
    }

    #[test]
    fn physical_gaussian_has_norm_two_pi() {
        let g = Grid::new(1024, 200.0).unwrap();
        let u: Vec<f64> = g.x().iter().map(|&x| (-x * x / 4.0).exp()).collect();
        let s = to_spectral(&[u], &g, 0.0).unwrap();
        let (n, ok) = weighted_fourier_norms(&s, &g, &[0.0], 0.05, 1e-8).unwrap();
        assert!(ok);
        assert!((n[0].n00 - 2.0 * PI).abs() < 1e-10);
        // sup-norm domination with equality for a positive spectrum
        assert!((1.0 - SUP_NORM_CONSTANT * n[0].n00).abs() < 1e-10);
    }

    #[test]
    fn eta_examples() {
        let n = ComponentNorms { n00: 1.0, n10: 2.0, n01: 3.0, n11: 4.0, n10_2: 5.0 };
        let h = vec![record_with(0.0, n)];
        let expect = 1.0 + 4.0 / 2.0_f64.ln() + 2.0 + 3.0 + 5.0;
        assert!((eta(&h).unwrap() - expect).abs() < 1e-12);
        assert!(eta(&[]).is_err());

        // norms sitting exactly on their linear-decay envelopes; the one term
        // with a ln(2+s) weight is fed ln(2+s)/√(1+s) so it also cancels
        let history: Vec<_> = (0..50)
            .map(|i| {
                let t = i as f64;
                let s = 1.0 + t;
                record_with(
                    t,
                    ComponentNorms {
                        n00: 1.0 / s.sqrt(),
                        n10: 1.0 / s,
                        n01: 1.0,
                        n11: (2.0 + t).ln() / s.sqrt(),
                        n10_2: s.powf(-0.75),
                    },
                )
            })
            .collect();
        let first = eta(&history[..1]).unwrap();
        for i in 1..=history.len() {
            let e = eta(&history[..i]).unwrap();
            assert!((e - first).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_never_decreases() {
        let mut history = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for i in 0..30 {
            let t = i as f64 * 0.7;
            let v = (i as f64 * 1.3).sin().abs() + 0.1;
            history.push(record_with(t, ComponentNorms { n00: v, n10: v, n01: v, n11: v, n10_2: v }));
            let e = eta(&history).unwrap();
            assert!(e >= last);
            last = e;
        }
    }

    /// Golden-section maximization of the closed-form envelope, independent
    /// of the grid.
    fn envelope_oracle(t: f64) -> f64 {
        let f = |z: f64| (-z * z / (4.0 * (1.0 + t))).exp() / (1.0 + t).sqrt() * (1.0 + z.abs() + t.sqrt());
        let (mut a, mut b) = (0.0, 20.0);
        let r = (5.0_f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        f(0.5 * (a + b))
    }

    #[test]
    fn envelope_of_exact_gaussian() {
        let oracle = envelope_oracle(3.0);
        assert!((oracle - 1.8508).abs() < 1e-3, "{oracle}");
        let g = Grid::new(4096, 200.0).unwrap();
        let t = 3.0;
        let u: Vec<f64> = g
            .x()
            .iter()
            .map(|&x| crate::scenarios::linear_gaussian_exact(1.0, 1.0, x, t).unwrap())
            .collect();
        let s = to_spectral(&[u], &g, t).unwrap();
        let (eu, _, _) = pointwise_envelope(&s, &g, &[1.0]).unwrap();
        // grid-node supremum: within a grid cell's worth of the oracle
        assert!((eu[0] - oracle).abs() < 1e-3, "{} vs {oracle}", eu[0]);
    }

    #[test]
    fn envelope_of_algebraic_profile() {
        let g = Grid::new(4096, 400.0).unwrap();
        let u: Vec<f64> = g.x().iter().map(|&x| 1.0 / (1.0 + x.abs())).collect();
        let s = to_spectral(&[u], &g, 0.0).unwrap();
        let (eu, _, _) = pointwise_envelope(&s, &g, &[0.0]).unwrap();
        assert!((eu[0] - 1.0).abs() < 0.05, "{}", eu[0]);
    }

    #[test]
    fn fit_examples() {
        let series = |f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
            (0..=200).map(|i| i as f64).map(|t| (t, f(t))).collect()
        };
        let fit = fit_decay_rate(&series(&|t| (1.0 + t).powf(-0.5)), (10.0, 200.0)).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12 && fit.stderr < 1e-12);
        let fit = fit_decay_rate(&series(&|t| 3.0 / (1.0 + t)), (10.0, 200.0)).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit_decay_rate(&series(&|_| 1.0), (0.5, 200.0)).is_err());
        assert!(fit_decay_rate(&series(&|_| 1.0), (10.0, 15.0)).is_err());
        assert!(fit_decay_rate(&series(&|t| t - 100.0), (10.0, 200.0)).is_err());
    }

    #[test]
    fn normal_form_basics() {
        let g = Grid::new(256, 40.0).unwrap();
        let u1: Vec<f64> = g.x().iter().map(|&x| (-x * x).exp()).collect();
        let u2: Vec<f64> = g.x().iter().map(|&x| 0.5 * (-(x - 1.0).powi(2)).exp()).collect();
        let s = to_spectral(&[u1.clone(), u2.clone()], &g, 0.0).unwrap();
        let v = normal_form_transform(&s, &g, 0.0, 0.0, 1.0).unwrap();
        assert!(v.iter().zip(&u1).all(|(a, b)| (a - b).abs() < 1e-13));
        let v = normal_form_transform(&s, &g, 2.0, 0.0, 4.0).unwrap();
        for j in 0..256 {
            assert!((v[j] - (u1[j] + 0.5 * u2[j] * u2[j])).abs() < 1e-13);
        }
        assert!(normal_form_transform(&s, &g, 1.0, 1.0, 1.0).is_err());
    }
}
