//! Fourier-space time stepping: the diagonal linear symbol
//! `-d_i k² + i c_i k` is integrated exactly and the nonlinearity by
//! fourth-order exponential time differencing (ETDRK4), with blow-up and
//! boundary-contamination monitoring.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{diagnose, DiagnosticsRecord};
use crate::error::{invalid, Error, Result};
use crate::nonlinearity::{classify_system, evaluate_nonlinearity, Classification, NonlinearitySpec};
use crate::scenarios::SystemSpec;
use crate::spectral::{boundary_mass_field, required_pad_ratio, to_physical, to_spectral, Basis, Grid, SpectralState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Snapshot cadence in time units.
    pub output_every: f64,
    /// Blow-up is declared once `max_i ‖u_i‖∞` exceeds this multiple of its
    /// initial value.
    pub blowup_factor: f64,
    /// Largest tolerated boundary mass before the run is aborted.
    pub boundary_threshold: f64,
    /// Fraction of the box at each end watched for boundary mass.
    pub margin_fraction: f64,
    /// Spectral tail (see [`spectral_tail`]) above which boundary mass is
    /// read as the ringing of an unresolved singularity, i.e. blow-up.
    pub resolution_threshold: f64,
    /// Product padding; `None` picks `(deg + 1)/2` from the nonlinearity.
    pub pad_ratio: Option<f64>,
    /// Keep the physical fields of every snapshot in the run record.
    pub keep_fields: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_end: 10.0,
            output_every: 0.1,
            blowup_factor: 1e3,
            boundary_threshold: 1e-8,
            margin_fraction: 0.05,
            resolution_threshold: 1e-6,
            pad_ratio: None,
            keep_fields: false,
        }
    }
}

impl IntegratorConfig {
    /// Every violated constraint, keyed by field name.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            out.push(("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            out.push(("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if !(self.output_every >= self.dt) {
            out.push(("output_every", format!("must be at least dt = {}, got {}", self.dt, self.output_every)));
        }
        if !(self.blowup_factor >= 10.0) {
            out.push(("blowup_factor", format!("must be at least 10, got {}", self.blowup_factor)));
        }
        if !(self.boundary_threshold > 0.0) {
            out.push(("boundary_threshold", format!("must be positive, got {}", self.boundary_threshold)));
        }
        if !(self.margin_fraction > 0.0 && self.margin_fraction < 0.5) {
            out.push(("margin_fraction", format!("must lie in (0, 0.5), got {}", self.margin_fraction)));
        }
        if !(self.resolution_threshold > 0.0) {
            out.push(("resolution_threshold", format!("must be positive, got {}", self.resolution_threshold)));
        }
        if let Some(p) = self.pad_ratio {
            if !(p >= 1.0) {
                out.push(("pad_ratio", format!("must be at least 1, got {p}")));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some((name, reason)) => Err(invalid(name, reason)),
            None => Ok(()),
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Completed,
    BlowUp { t_star: f64 },
    BoundaryContaminated { t_c: f64 },
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub spec: SystemSpec,
    pub config: IntegratorConfig,
    pub classification: Classification,
    pub snapshots: Vec<DiagnosticsRecord>,
    /// Physical fields per snapshot when `config.keep_fields` is set.
    pub fields: Vec<(f64, Vec<Vec<f64>>)>,
    pub status: Status,
    /// Last clean state reached.
    pub final_state: SpectralState,
}

impl RunRecord {
    pub fn last_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.t)
    }

    /// `(t, max_i ‖u_i‖∞)` per snapshot.
    pub fn sup_u_series(&self) -> Vec<(f64, f64)> {
        self.snapshots
            .iter()
            .map(|s| (s.t, s.sup_u.iter().copied().fold(0.0, f64::max)))
            .collect()
    }

    /// `(t, max_i ‖∂x u_i‖∞)` per snapshot.
    pub fn sup_du_series(&self) -> Vec<(f64, f64)> {
        self.snapshots
            .iter()
            .map(|s| (s.t, s.sup_du.iter().copied().fold(0.0, f64::max)))
            .collect()
    }

    pub fn eta_max(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.eta)
    }
}

/// `exp((-d_i k² + i c_i k) h)` per component. The advection part is zero at
/// the Nyquist mode, like every odd derivative multiplier.
pub fn linear_propagator(grid: &Grid, d: &[f64], c: &[f64], h: f64) -> Result<Vec<Vec<Complex64>>> {
    Ok(linear_symbol(grid, d, c)?
        .into_iter()
        .map(|row| row.into_iter().map(|z| (z * h).exp()).collect())
        .collect())
}

fn linear_symbol(grid: &Grid, d: &[f64], c: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    if d.len() != c.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} velocities", d.len()),
            found: format!("{}", c.len()),
        });
    }
    if let Some((i, di)) = d.iter().enumerate().find(|(_, &di)| !(di > 0.0)) {
        return Err(invalid(format!("d{}", i + 1), format!("diffusion must be positive, got {di}")));
    }
    let nyq = grid.nyquist_index();
    Ok(d.iter()
        .zip(c)
        .map(|(&di, &ci)| {
            grid.k()
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let adv = if i == nyq { 0.0 } else { ci * k };
                    Complex64::new(-di * k * k, adv)
                })
                .collect()
        })
        .collect())
}

const CONTOUR_POINTS: usize = 64;

/// `φ₁(z) = (e^z − 1)/z`, `φ₂ = (e^z − 1 − z)/z²`, `φ₃ = (e^z − 1 − z − z²/2)/z³`.
/// For `|z| < 1/2` the direct formulas cancel badly, so each is replaced by
/// its mean over a radius-1 circle around `z`.
pub fn phi_functions(z: Complex64) -> (Complex64, Complex64, Complex64) {
    if z.norm() >= 0.5 {
        return phi_direct(z);
    }
    let mut acc = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for j in 0..CONTOUR_POINTS {
        let theta = std::f64::consts::PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64 * 2.0;
        let (a, b, c) = phi_direct(z + Complex64::from_polar(1.0, theta));
        acc.0 += a;
        acc.1 += b;
        acc.2 += c;
    }
    let m = CONTOUR_POINTS as f64;
    let (mut a, mut b, mut c) = (acc.0 / m, acc.1 / m, acc.2 / m);
    if z.im == 0.0 {
        a.im = 0.0;
        b.im = 0.0;
        c.im = 0.0;
    }
    (a, b, c)
}

fn phi_direct(z: Complex64) -> (Complex64, Complex64, Complex64) {
    let ez = z.exp();
    let z2 = z * z;
    (
        (ez - 1.0) / z,
        (ez - 1.0 - z) / z2,
        (ez - 1.0 - z - z2 * 0.5) / (z2 * z),
    )
}

/// `f(u, ∂x u)` in Fourier space with alias-free products.
pub(crate) struct NonlinearTerm {
    expanded: NonlinearitySpec,
    grid: Grid,
    padded: Basis,
    ik: Vec<Complex64>,
    uses_du: bool,
}

impl NonlinearTerm {
    pub(crate) fn new(f: &NonlinearitySpec, grid: &Grid, pad_ratio: Option<f64>) -> Result<Self> {
        let expanded = f.expanded();
        let required = required_pad_ratio(expanded.max_degree().max(1));
        let ratio = match pad_ratio {
            Some(r) if r + 1e-12 < required => {
                return Err(Error::InsufficientPadding(format!(
                    "degree {} needs pad ratio {required}, got {r}",
                    expanded.max_degree()
                )))
            }
            Some(r) => r,
            None => required,
        };
        Ok(Self {
            uses_du: expanded.uses_derivatives(),
            expanded,
            padded: grid.padded_basis(ratio),
            ik: grid.derivative_multiplier(),
            grid: grid.clone(),
        })
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.expanded.is_zero()
    }

    pub(crate) fn eval(&self, vhat: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let n = self.grid.n();
        let zero = || vec![Complex64::new(0.0, 0.0); n];
        if self.is_zero() {
            return vhat.iter().map(|_| zero()).collect();
        }
        let m = self.padded.size();
        let u: Vec<Vec<f64>> = vhat
            .iter()
            .map(|row| self.padded.inverse(&self.grid.pad(row, &self.padded)))
            .collect();
        let du: Vec<Vec<f64>> = if self.uses_du {
            vhat.iter()
                .map(|row| {
                    let d: Vec<Complex64> = row.iter().zip(&self.ik).map(|(v, k)| v * k).collect();
                    self.padded.inverse(&self.grid.pad(&d, &self.padded))
                })
                .collect()
        } else {
            vec![vec![0.0; m]; vhat.len()]
        };
        let f = evaluate_nonlinearity(&self.expanded, &u, &du)
            .expect("nonlinear term shapes are fixed at construction");
        f.iter()
            .zip(self.expanded.terms())
            .map(|(row, terms)| {
                if terms.is_empty() {
                    zero()
                } else {
                    self.grid.truncate(&self.padded.forward(row))
                }
            })
            .collect()
    }
}

/// Precomputed ETDRK4 coefficients for one step size.
pub struct Etdrk4 {
    h: f64,
    e: Vec<Vec<Complex64>>,
    e2: Vec<Vec<Complex64>>,
    half: Vec<Vec<Complex64>>,
    f1: Vec<Vec<Complex64>>,
    f2: Vec<Vec<Complex64>>,
    f3: Vec<Vec<Complex64>>,
    nonlinear: NonlinearTerm,
}

impl Etdrk4 {
    pub fn new(spec: &SystemSpec, grid: &Grid, h: f64, pad_ratio: Option<f64>) -> Result<Self> {
        if !(h > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {h}")));
        }
        let symbol = linear_symbol(grid, spec.d(), spec.c())?;
        let map = |g: &dyn Fn(Complex64) -> Complex64| -> Vec<Vec<Complex64>> {
            symbol.iter().map(|row| row.iter().map(|&l| g(l * h)).collect()).collect()
        };
        let e = map(&|z| z.exp());
        let e2 = map(&|z| (z * 0.5).exp());
        let half = map(&|z| phi_functions(z * 0.5).0 * (h * 0.5));
        let f1 = map(&|z| {
            let (p1, p2, p3) = phi_functions(z);
            (p1 - p2 * 3.0 + p3 * 4.0) * h
        });
        let f2 = map(&|z| {
            let (_, p2, p3) = phi_functions(z);
            (p2 - p3 * 2.0) * (2.0 * h)
        });
        let f3 = map(&|z| {
            let (_, p2, p3) = phi_functions(z);
            (p3 * 4.0 - p2) * h
        });
        Ok(Self {
            h,
            e,
            e2,
            half,
            f1,
            f2,
            f3,
            nonlinear: NonlinearTerm::new(spec.f(), grid, pad_ratio)?,
        })
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    /// Advance `state` by one step of size `h`.
    pub fn step(&self, state: &SpectralState) -> SpectralState {
        let v = &state.vhat;
        let t = state.t + self.h;
        if self.nonlinear.is_zero() {
            return SpectralState { t, vhat: mul(&self.e, v) };
        }
        let nv = self.nonlinear.eval(v);
        let e2v = mul(&self.e2, v);
        let a = axpy(&e2v, &self.half, &nv);
        let na = self.nonlinear.eval(&a);
        let b = axpy(&e2v, &self.half, &na);
        let nb = self.nonlinear.eval(&b);
        let e2a = mul(&self.e2, &a);
        let two_nb_minus_nv: Vec<Vec<Complex64>> = nb
            .iter()
            .zip(&nv)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * 2.0 - q).collect())
            .collect();
        let c = axpy(&e2a, &self.half, &two_nb_minus_nv);
        let nc = self.nonlinear.eval(&c);
        let vhat = (0..v.len())
            .map(|i| {
                (0..v[i].len())
                    .map(|m| {
                        self.e[i][m] * v[i][m]
                            + self.f1[i][m] * nv[i][m]
                            + self.f2[i][m] * (na[i][m] + nb[i][m])
                            + self.f3[i][m] * nc[i][m]
                    })
                    .collect()
            })
            .collect();
        SpectralState { t, vhat }
    }
}

fn mul(a: &[Vec<Complex64>], v: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    a.iter()
        .zip(v)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).collect())
        .collect()
}

/// `base + coeff ⊙ n`.
fn axpy(base: &[Vec<Complex64>], coeff: &[Vec<Complex64>], n: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    base.iter()
        .zip(coeff)
        .zip(n)
        .map(|((b, c), x)| b.iter().zip(c).zip(x).map(|((b, c), x)| b + c * x).collect())
        .collect()
}

/// One ETDRK4 step from scratch. Prefer [`Etdrk4`] when stepping repeatedly.
pub fn etdrk4_step(state: &SpectralState, spec: &SystemSpec, grid: &Grid, h: f64) -> Result<SpectralState> {
    Ok(Etdrk4::new(spec, grid, h, None)?.step(state))
}

/// Outcome of a per-step health check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    Clean,
    BlowUp,
    BoundaryContaminated,
}

/// Largest `|v̂_m|` with `|m| ≥ N/4`, relative to the largest coefficient of
/// the same component, maximized over components.
pub fn spectral_tail(state: &SpectralState) -> f64 {
    state
        .vhat
        .iter()
        .map(|v| {
            let n = v.len();
            let peak = v.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
            if peak == 0.0 {
                return 0.0;
            }
            let tail = v
                .iter()
                .enumerate()
                .filter(|(i, _)| 4 * crate::spectral::mode_index(*i, n).unsigned_abs() as usize >= n)
                .map(|(_, c)| c.norm())
                .fold(0.0_f64, f64::max);
            tail / peak
        })
        .fold(0.0, f64::max)
}

/// Flags non-finite samples or `sup |u| > blowup_factor · baseline_sup` as
/// blow-up, and boundary mass above the threshold as contamination. Boundary
/// mass that comes with a spectral tail above `resolution_threshold` is the
/// Gibbs ringing of a singularity the grid can no longer resolve and counts
/// as blow-up.
pub fn detect_blowup(u: &[Vec<f64>], tail: f64, baseline_sup: f64, config: &IntegratorConfig) -> Detection {
    let mut sup = 0.0_f64;
    for v in u.iter().flatten() {
        if !v.is_finite() {
            return Detection::BlowUp;
        }
        sup = sup.max(v.abs());
    }
    if baseline_sup > 0.0 && sup > config.blowup_factor * baseline_sup {
        return Detection::BlowUp;
    }
    if u
        .iter()
        .any(|row| boundary_mass_field(row, config.margin_fraction) > config.boundary_threshold)
    {
        if tail > config.resolution_threshold {
            return Detection::BlowUp;
        }
        return Detection::BoundaryContaminated;
    }
    Detection::Clean
}

/// Integrate from `init` until `t_end`, blow-up, or boundary contamination,
/// recording diagnostics every `output_every`. The admissibility verdict is
/// recorded but not enforced.
pub fn run_simulation(
    spec: &SystemSpec,
    init: &[Vec<f64>],
    grid: &Grid,
    config: &IntegratorConfig,
) -> Result<RunRecord> {
    config.validate()?;
    if init.len() != spec.n() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} initial fields", spec.n()),
            found: format!("{}", init.len()),
        });
    }
    let classification = classify_system(spec);
    let stepper = Etdrk4::new(spec, grid, config.dt, config.pad_ratio)?;
    let mut state = to_spectral(init, grid, 0.0)?;
    let baseline_sup = init.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));

    let n_steps = (config.t_end / config.dt).round().max(1.0) as u64;
    let every = (config.output_every / config.dt).round().max(1.0) as u64;

    let mut snapshots = Vec::new();
    let mut fields = Vec::new();
    let mut eta = 0.0_f64;
    let mut record = |state: &SpectralState, u: Vec<Vec<f64>>| -> Result<()> {
        let mut snap = diagnose(state, grid, spec.c(), config)?;
        eta = eta.max(snap.eta_components.iter().sum());
        snap.eta = eta;
        snapshots.push(snap);
        if config.keep_fields {
            fields.push((state.t, u));
        }
        Ok(())
    };
    record(&state, init.to_vec())?;

    let mut status = Status::Completed;
    for step in 1..=n_steps {
        let mut next = stepper.step(&state);
        next.t = step as f64 * config.dt;
        let u = to_physical(&next, grid)?;
        match detect_blowup(&u, spectral_tail(&next), baseline_sup, config) {
            Detection::Clean => {}
            Detection::BlowUp => {
                status = Status::BlowUp { t_star: next.t };
                break;
            }
            Detection::BoundaryContaminated => {
                status = Status::BoundaryContaminated { t_c: next.t };
                break;
            }
        }
        state = next;
        if step % every == 0 || step == n_steps {
            record(&state, u)?;
        }
    }

    Ok(RunRecord {
        spec: spec.clone(),
        config: config.clone(),
        classification,
        snapshots,
        fields,
        status,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{build_burgers_scalar, build_linear};

    /// Taylor series of φ_j with enough terms to reach rounding.
    fn phi_taylor(z: Complex64, j: u32) -> Complex64 {
        let mut term = Complex64::new(1.0, 0.0);
        for m in 1..=j {
            term /= m as f64;
        }
        let mut sum = term;
        for m in 1..30 {
            term = term * z / (m + j) as f64;
            sum += term;
        }
        sum
    }

    #[test]
    fn propagator_examples() {
        let g = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let p = linear_propagator(&g, &[1.0, 2.0], &[0.0, 3.0], 2.0_f64.ln()).unwrap();
        assert_eq!(p[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(p[1][0], Complex64::new(1.0, 0.0));
        assert!((p[0][1] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let h = 0.3;
        let p = linear_propagator(&g, &[1.0, 1.0], &[0.0, -5.0], h).unwrap();
        for (i, &k) in g.k().iter().enumerate() {
            let expect = (-k * k * h).exp();
            assert!((p[1][i].norm() - expect).abs() <= 1e-15 * expect.max(1e-300));
            assert!(p[1][i].norm() <= 1.0);
        }
        assert!(linear_propagator(&g, &[0.0], &[0.0], h).is_err());
    }

    #[test]
    fn phi_limits() {
        let (a, b, c) = phi_functions(Complex64::new(0.0, 0.0));
        assert!((a - 1.0).norm() < 1e-14);
        assert!((b - 0.5).norm() < 1e-14);
        assert!((c - 1.0 / 6.0).norm() < 1e-14);
        let z = Complex64::new(1e-8, 0.0);
        let (a, b, c) = phi_functions(z);
        for (v, j) in [(a, 1), (b, 2), (c, 3)] {
            let t = phi_taylor(z, j);
            assert!((v - t).norm() / t.norm() < 1e-12, "phi{j}: {v} vs {t}");
        }
        let (a, _, _) = phi_functions(Complex64::new(-10.0, 0.0));
        assert!((a.re - 0.09999546000702375).abs() < 1e-15);
    }

    #[test]
    fn phi_matches_taylor_across_small_disk() {
        for &(re, im) in &[(0.3, 0.2), (-0.45, 0.0), (0.0, 0.49), (0.1, -0.1), (-0.2, -0.3)] {
            let z = Complex64::new(re, im);
            let (a, b, c) = phi_functions(z);
            for (v, j) in [(a, 1), (b, 2), (c, 3)] {
                let t = phi_taylor(z, j);
                assert!((v - t).norm() / t.norm() < 1e-13, "z={z} phi{j}");
            }
        }
    }

    #[test]
    fn linear_step_is_exact_propagator() {
        let g = Grid::new(256, 50.0).unwrap();
        let spec = build_linear(vec![1.0], vec![1.0]).unwrap();
        let u: Vec<f64> = g.x().iter().map(|&x| (-x * x / 4.0).exp()).collect();
        let s0 = to_spectral(&[u], &g, 0.0).unwrap();
        let s1 = etdrk4_step(&s0, &spec, &g, 0.1).unwrap();
        let p = linear_propagator(&g, &[1.0], &[1.0], 0.1).unwrap();
        for (i, v) in s1.vhat[0].iter().enumerate() {
            assert_eq!(*v, s0.vhat[0][i] * p[0][i]);
        }
        // n steps of h compose to one exact propagator over n·h
        let stepper = Etdrk4::new(&spec, &g, 0.1, None).unwrap();
        let mut s = s0.clone();
        for _ in 0..25 {
            s = stepper.step(&s);
        }
        let p = linear_propagator(&g, &[1.0], &[1.0], 2.5).unwrap();
        let scale = s0.vhat[0].iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (i, v) in s.vhat[0].iter().enumerate() {
            assert!((v - s0.vhat[0][i] * p[0][i]).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn nonlinear_step_preserves_reality() {
        let g = Grid::new(128, 20.0).unwrap();
        let spec = build_burgers_scalar(1.0, 0.5, 1.0).unwrap();
        let u: Vec<f64> = g.x().iter().map(|&x| (-(x - 1.0).powi(2)).exp() * 0.8).collect();
        let mut s = to_spectral(&[u], &g, 0.0).unwrap();
        let stepper = Etdrk4::new(&spec, &g, 0.01, None).unwrap();
        for _ in 0..20 {
            s = stepper.step(&s);
            assert!(s.conjugate_symmetry_error() < 1e-12);
        }
    }

    #[test]
    fn detection_rules() {
        let cfg = IntegratorConfig::default();
        let mut u = vec![vec![0.0; 64]];
        u[0][30] = f64::NAN;
        assert_eq!(detect_blowup(&u, 0.0, 1.0, &cfg), Detection::BlowUp);
        let mut u = vec![vec![0.0; 64]];
        u[0][30] = 1001.0;
        assert_eq!(detect_blowup(&u, 0.0, 1.0, &cfg), Detection::BlowUp);
        u[0][30] = 999.0;
        assert_eq!(detect_blowup(&u, 0.0, 1.0, &cfg), Detection::Clean);
        u[0][0] = 1.0;
        assert_eq!(detect_blowup(&u, 0.0, 1.0, &cfg), Detection::BoundaryContaminated);
        assert_eq!(detect_blowup(&u, 1e-3, 1.0, &cfg), Detection::BlowUp);
        // a tail alone is not a verdict
        u[0][0] = 0.0;
        assert_eq!(detect_blowup(&u, 1e-3, 1.0, &cfg), Detection::Clean);
    }

    #[test]
    fn spectral_tail_of_resolved_and_rough_fields() {
        let g = Grid::new(256, 40.0).unwrap();
        let smooth: Vec<f64> = g.x().iter().map(|&x| (-x * x / 4.0).exp()).collect();
        let s = to_spectral(&[smooth], &g, 0.0).unwrap();
        assert!(spectral_tail(&s) < 1e-14);
        let mut rough = vec![0.0; 256];
        rough[128] = 1.0;
        let s = to_spectral(&[rough], &g, 0.0).unwrap();
        assert!((spectral_tail(&s) - 1.0).abs() < 1e-12);
        let zero = to_spectral(&[vec![0.0; 256]], &g, 0.0).unwrap();
        assert_eq!(spectral_tail(&zero), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        let bad = IntegratorConfig {
            dt: 0.0,
            output_every: 0.001,
            blowup_factor: 2.0,
            ..Default::default()
        };
        let names: Vec<_> = bad.violations().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, vec!["dt", "blowup_factor"]);
        let bad = IntegratorConfig { output_every: 0.001, ..Default::default() };
        assert_eq!(bad.violations()[0].0, "output_every");
    }

    #[test]
    fn insufficient_explicit_padding_is_rejected() {
        let g = Grid::new(64, 20.0).unwrap();
        let spec = build_burgers_scalar(1.0, 0.0, 1.0).unwrap();
        assert!(Etdrk4::new(&spec, &g, 0.01, Some(1.2)).is_err());
        assert!(Etdrk4::new(&spec, &g, 0.01, Some(1.5)).is_ok());
    }
}
