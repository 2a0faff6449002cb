//! System builders for the model families, closed-form oracles, initial
//! data, and parameter scans.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{fit_decay_rate, FitWindow};
use crate::error::{invalid, Error, Result};
use crate::integrator::{run_simulation, IntegratorConfig, Status};
use crate::nonlinearity::{parse_nonlinearity, Monomial, NonlinearitySpec};
use crate::spectral::Grid;

/// `∂t u = D ∂xx u + C ∂x u + f(u, ∂x u)` with diagonal `D`, `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    d: Vec<f64>,
    c: Vec<f64>,
    f: NonlinearitySpec,
}

impl SystemSpec {
    pub fn new(d: Vec<f64>, c: Vec<f64>, f: NonlinearitySpec) -> Result<Self> {
        let n = d.len();
        if n == 0 {
            return Err(invalid("n", "at least one component is required"));
        }
        if c.len() != n || f.n() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n} components"),
                found: format!("{} velocities, {} nonlinearity components", c.len(), f.n()),
            });
        }
        for (i, &di) in d.iter().enumerate() {
            if !(di > 0.0 && di.is_finite()) {
                return Err(invalid(format!("d{}", i + 1), format!("diffusion must be positive, got {di}")));
            }
        }
        for (i, &ci) in c.iter().enumerate() {
            if !ci.is_finite() {
                return Err(invalid(format!("c{}", i + 1), "velocity must be finite"));
            }
        }
        Ok(Self { d, c, f })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn f(&self) -> &NonlinearitySpec {
        &self.f
    }

    /// Same system with the nonlinearity removed.
    pub fn linearized(&self) -> SystemSpec {
        SystemSpec {
            d: self.d.clone(),
            c: self.c.clone(),
            f: NonlinearitySpec::zero(self.n()),
        }
    }

    /// Same system with every velocity shifted by `c0`.
    pub fn with_velocity_offset(&self, c0: f64) -> SystemSpec {
        SystemSpec {
            c: self.c.iter().map(|c| c + c0).collect(),
            ..self.clone()
        }
    }

    /// Relabel components: component `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SystemSpec {
        let mut d = vec![0.0; self.n()];
        let mut c = vec![0.0; self.n()];
        for (i, &p) in perm.iter().enumerate() {
            d[p] = self.d[i];
            c[p] = self.c[i];
        }
        SystemSpec {
            d,
            c,
            f: self.f.permuted(perm),
        }
    }
}

/// Drifting Gaussian `e^{-(x+ct)²/(4d(1+t))}/√(1+t)`, the solution of the
/// linear equation with initial datum `e^{-x²/(4d)}`.
pub fn linear_gaussian_exact(d: f64, c: f64, x: f64, t: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(invalid("d", format!("diffusion must be positive, got {d}")));
    }
    if t < 0.0 {
        return Err(invalid("t", format!("time must be non-negative, got {t}")));
    }
    let s = 1.0 + t;
    Ok((-(x + c * t).powi(2) / (4.0 * d * s)).exp() / s.sqrt())
}

pub fn build_linear(d: Vec<f64>, c: Vec<f64>) -> Result<SystemSpec> {
    let n = d.len();
    SystemSpec::new(d, c, NonlinearitySpec::zero(n))
}

/// Two-component toy model:
/// `f₁ = (2π u₁)^r u₂ + (2π)^{q-1} u₂^q`,
/// `f₂ = 2π ∂x(u₁²) + (2π)^{q-1} u₂^q`.
pub fn build_toy(r: u32, q: u32, d1: f64, d2: f64, c1: f64, c2: f64) -> Result<SystemSpec> {
    if r < 2 {
        return Err(invalid(
            "r",
            format!(
                "r = {r}: the quadratic mixed term u1*u2 cannot be handled by the Fourier-space \
                 iteration and needs stronger-than-polynomial localization; use r >= 2"
            ),
        ));
    }
    if q < 4 {
        return Err(invalid("q", format!("q = {q}: the pure power u2^q must be irrelevant (q >= 4)")));
    }
    let tp = 2.0 * PI;
    let cq = tp.powi(q as i32 - 1);
    let f = NonlinearitySpec::new(
        2,
        vec![
            vec![Monomial::pure(tp.powi(r as i32), vec![r, 1])?, Monomial::pure(cq, vec![0, q])?],
            vec![Monomial::divergence(tp, vec![2, 0])?, Monomial::pure(cq, vec![0, q])?],
        ],
    )?;
    SystemSpec::new(vec![d1, d2], vec![c1, c2], f)
}

/// `f₁ = κ u₁u₂ + β u₂³`, `f₂ = γ ∂x(u₂²)`; zero coefficients drop their term.
#[allow(clippy::too_many_arguments)]
pub fn build_cas3(d1: f64, d2: f64, c1: f64, c2: f64, kappa: f64, beta: f64, gamma: f64) -> Result<SystemSpec> {
    let mut f1 = Vec::new();
    if kappa != 0.0 {
        f1.push(Monomial::pure(kappa, vec![1, 1])?);
    }
    if beta != 0.0 {
        f1.push(Monomial::pure(beta, vec![0, 3])?);
    }
    let mut f2 = Vec::new();
    if gamma != 0.0 {
        f2.push(Monomial::divergence(gamma, vec![0, 2])?);
    }
    SystemSpec::new(vec![d1, d2], vec![c1, c2], NonlinearitySpec::new(2, vec![f1, f2])?)
}

/// `β* = γκ/(c₂ − c₁)`; global existence for small data needs `β < β*`.
pub fn cas3_threshold(kappa: f64, gamma: f64, c1: f64, c2: f64) -> Result<f64> {
    if c1 == c2 {
        return Err(invalid("c2", "threshold undefined for equal velocities"));
    }
    Ok(gamma * kappa / (c2 - c1))
}

/// `∂t u₁ = ∂xx u₁ + u₁^{p₁}u₂^{q₁}`, `∂t u₂ = ∂xx u₂ + u₁^{p₂}u₂^{q₂}` with
/// `p_i, q_i ∈ {1, 2}` and `p_i + q_i = 3`. Velocities default to zero.
pub fn build_esclev(p1: u32, q1: u32, p2: u32, q2: u32, velocities: Option<(f64, f64)>) -> Result<SystemSpec> {
    for (name, p, q) in [("p1", p1, q1), ("p2", p2, q2)] {
        if !(1..=2).contains(&p) || !(1..=2).contains(&q) || p + q != 3 {
            return Err(invalid(
                name,
                format!("exponents ({p}, {q}) outside the blow-up regime p, q in {{1, 2}}, p + q = 3"),
            ));
        }
    }
    let (c1, c2) = velocities.unwrap_or((0.0, 0.0));
    let f = NonlinearitySpec::new(
        2,
        vec![vec![Monomial::pure(1.0, vec![p1, q1])?], vec![Monomial::pure(1.0, vec![p2, q2])?]],
    )?;
    SystemSpec::new(vec![1.0, 1.0], vec![c1, c2], f)
}

/// Scalar viscous Burgers `∂t u = d ∂xx u + c ∂x u + a ∂x(u²)`.
pub fn build_burgers_scalar(d: f64, c: f64, coefficient: f64) -> Result<SystemSpec> {
    let terms = if coefficient == 0.0 {
        vec![]
    } else {
        vec![Monomial::divergence(coefficient, vec![2])?]
    };
    SystemSpec::new(vec![d], vec![c], NonlinearitySpec::new(1, vec![terms])?)
}

pub fn build_custom<S: AsRef<str>>(d: Vec<f64>, c: Vec<f64>, f: &[S]) -> Result<SystemSpec> {
    let n = d.len();
    SystemSpec::new(d, c, parse_nonlinearity(f, n)?)
}

/// Gaussian bumps `A_i exp(-(x - x0_i)²/(4σ_i))`. Centers must keep a 10%
/// margin from the periodic seam.
pub fn gaussian_initial_data(
    amplitudes: &[f64],
    widths: &[f64],
    centers: &[f64],
    grid: &Grid,
) -> Result<Vec<Vec<f64>>> {
    let n = amplitudes.len();
    if widths.len() != n || centers.len() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n} widths and centers"),
            found: format!("{} widths, {} centers", widths.len(), centers.len()),
        });
    }
    let half = grid.length() / 2.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if !(widths[i] > 0.0) {
            return Err(invalid(format!("width{}", i + 1), format!("must be positive, got {}", widths[i])));
        }
        if centers[i].abs() > half - 0.1 * grid.length() {
            return Err(invalid(
                format!("center{}", i + 1),
                format!("{} is within 10% of the periodic seam at ±{half}", centers[i]),
            ));
        }
        out.push(
            grid.x()
                .iter()
                .map(|&x| amplitudes[i] * (-(x - centers[i]).powi(2) / (4.0 * widths[i])).exp())
                .collect(),
        );
    }
    Ok(out)
}

/// Builder arguments of a named scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ScenarioParams {
    Linear {
        d: Vec<f64>,
        c: Vec<f64>,
    },
    Toy {
        r: u32,
        q: u32,
        d1: f64,
        d2: f64,
        c1: f64,
        c2: f64,
    },
    Cas3 {
        d1: f64,
        d2: f64,
        c1: f64,
        c2: f64,
        kappa: f64,
        beta: f64,
        gamma: f64,
    },
    Esclev {
        p1: u32,
        q1: u32,
        p2: u32,
        q2: u32,
        c1: f64,
        c2: f64,
    },
    BurgersScalar {
        d: f64,
        c: f64,
        coefficient: f64,
    },
    Custom {
        d: Vec<f64>,
        c: Vec<f64>,
        f: Vec<String>,
    },
}

pub const SCENARIO_NAMES: [&str; 6] = ["linear", "toy", "cas3", "esclev", "burgers-scalar", "custom"];

impl ScenarioParams {
    /// Defaults for a named scenario.
    pub fn defaults(name: &str) -> Option<Self> {
        Some(match name {
            "linear" => ScenarioParams::Linear {
                d: vec![1.0, 1.0],
                c: vec![1.0, -1.0],
            },
            "toy" => ScenarioParams::Toy {
                r: 2,
                q: 4,
                d1: 1.0,
                d2: 1.0,
                c1: 1.0,
                c2: -1.0,
            },
            "cas3" => ScenarioParams::Cas3 {
                d1: 1.0,
                d2: 1.0,
                c1: 0.0,
                c2: 1.0,
                kappa: 1.0,
                beta: 0.0,
                gamma: 1.0,
            },
            "esclev" => ScenarioParams::Esclev {
                p1: 1,
                q1: 2,
                p2: 2,
                q2: 1,
                c1: 0.0,
                c2: 0.0,
            },
            "burgers-scalar" => ScenarioParams::BurgersScalar {
                d: 1.0,
                c: 0.0,
                coefficient: 1.0,
            },
            "custom" => ScenarioParams::Custom {
                d: vec![1.0, 1.0],
                c: vec![1.0, -1.0],
                f: vec![String::new(), String::new()],
            },
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioParams::Linear { .. } => "linear",
            ScenarioParams::Toy { .. } => "toy",
            ScenarioParams::Cas3 { .. } => "cas3",
            ScenarioParams::Esclev { .. } => "esclev",
            ScenarioParams::BurgersScalar { .. } => "burgers-scalar",
            ScenarioParams::Custom { .. } => "custom",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ScenarioParams::Linear { d, .. } | ScenarioParams::Custom { d, .. } => d.len(),
            ScenarioParams::BurgersScalar { .. } => 1,
            _ => 2,
        }
    }

    /// Names accepted by [`ScenarioParams::set`].
    pub fn parameter_names(&self) -> Vec<String> {
        let indexed = |prefix: &'static str, n: usize| (1..=n).map(move |i| format!("{prefix}{i}"));
        match self {
            ScenarioParams::Linear { d, .. } | ScenarioParams::Custom { d, .. } => {
                indexed("d", d.len()).chain(indexed("c", d.len())).collect()
            }
            ScenarioParams::Toy { .. } => ["r", "q", "d1", "d2", "c1", "c2"].map(String::from).to_vec(),
            ScenarioParams::Cas3 { .. } => ["d1", "d2", "c1", "c2", "kappa", "beta", "gamma"]
                .map(String::from)
                .to_vec(),
            ScenarioParams::Esclev { .. } => ["p1", "q1", "p2", "q2", "c1", "c2"].map(String::from).to_vec(),
            ScenarioParams::BurgersScalar { .. } => ["d", "c", "coefficient"].map(String::from).to_vec(),
        }
    }

    /// Set a numeric builder argument by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        fn as_u32(name: &str, v: f64) -> Result<u32> {
            if v >= 0.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
                Ok(v as u32)
            } else {
                Err(invalid(name, format!("expected a non-negative integer, got {v}")))
            }
        }
        fn indexed<'a>(name: &str, prefix: char, v: &'a mut [f64]) -> Option<&'a mut f64> {
            let rest = name.strip_prefix(prefix)?;
            let i: usize = rest.parse().ok()?;
            if i == 0 {
                return None;
            }
            v.get_mut(i - 1)
        }
        let unknown = || Error::UnknownParameter(name.to_string());
        match self {
            ScenarioParams::Linear { d, c } | ScenarioParams::Custom { d, c, .. } => {
                let slot = if name.starts_with('d') {
                    indexed(name, 'd', d)
                } else {
                    indexed(name, 'c', c)
                };
                *slot.ok_or_else(unknown)? = value;
            }
            ScenarioParams::Toy { r, q, d1, d2, c1, c2 } => match name {
                "r" => *r = as_u32(name, value)?,
                "q" => *q = as_u32(name, value)?,
                "d1" => *d1 = value,
                "d2" => *d2 = value,
                "c1" => *c1 = value,
                "c2" => *c2 = value,
                _ => return Err(unknown()),
            },
            ScenarioParams::Cas3 { d1, d2, c1, c2, kappa, beta, gamma } => match name {
                "d1" => *d1 = value,
                "d2" => *d2 = value,
                "c1" => *c1 = value,
                "c2" => *c2 = value,
                "kappa" => *kappa = value,
                "beta" => *beta = value,
                "gamma" => *gamma = value,
                _ => return Err(unknown()),
            },
            ScenarioParams::Esclev { p1, q1, p2, q2, c1, c2 } => match name {
                "p1" => *p1 = as_u32(name, value)?,
                "q1" => *q1 = as_u32(name, value)?,
                "p2" => *p2 = as_u32(name, value)?,
                "q2" => *q2 = as_u32(name, value)?,
                "c1" => *c1 = value,
                "c2" => *c2 = value,
                _ => return Err(unknown()),
            },
            ScenarioParams::BurgersScalar { d, c, coefficient } => match name {
                "d" => *d = value,
                "c" => *c = value,
                "coefficient" => *coefficient = value,
                _ => return Err(unknown()),
            },
        }
        Ok(())
    }

    pub fn build(&self) -> Result<SystemSpec> {
        match self {
            ScenarioParams::Linear { d, c } => build_linear(d.clone(), c.clone()),
            &ScenarioParams::Toy { r, q, d1, d2, c1, c2 } => build_toy(r, q, d1, d2, c1, c2),
            &ScenarioParams::Cas3 { d1, d2, c1, c2, kappa, beta, gamma } => {
                build_cas3(d1, d2, c1, c2, kappa, beta, gamma)
            }
            &ScenarioParams::Esclev { p1, q1, p2, q2, c1, c2 } => build_esclev(p1, q1, p2, q2, Some((c1, c2))),
            &ScenarioParams::BurgersScalar { d, c, coefficient } => build_burgers_scalar(d, c, coefficient),
            ScenarioParams::Custom { d, c, f } => build_custom(d.clone(), c.clone(), f),
        }
    }
}

/// Per-component Gaussian initial-data knobs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialData {
    pub amplitude: Vec<f64>,
    pub width: Vec<f64>,
    pub center: Vec<f64>,
}

impl InitialData {
    pub fn uniform(n: usize, amplitude: f64) -> Self {
        Self {
            amplitude: vec![amplitude; n],
            width: vec![1.0; n],
            center: vec![0.0; n],
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<Vec<Vec<f64>>> {
        gaussian_initial_data(&self.amplitude, &self.width, &self.center, grid)
    }

    /// `amplitude`/`width`/`center` set every component; `amplitude2` etc.
    /// one. Returns `Ok(false)` for names this block does not own.
    fn set(&mut self, name: &str, value: f64) -> Result<bool> {
        for (prefix, v) in [
            ("amplitude", &mut self.amplitude),
            ("width", &mut self.width),
            ("center", &mut self.center),
        ] {
            if let Some(rest) = name.strip_prefix(prefix) {
                if rest.is_empty() {
                    v.iter_mut().for_each(|x| *x = value);
                    return Ok(true);
                }
                let slot = rest
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1)
                    .and_then(|i| v.get_mut(i - 1))
                    .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
                *slot = value;
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// A runnable scenario: system builder arguments plus initial data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub params: ScenarioParams,
    pub init: InitialData,
}

impl Scenario {
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if self.init.set(name, value)? {
            return Ok(());
        }
        self.params.set(name, value)
    }
}

/// Grid, integrator and fit settings shared by every row of a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSetup {
    pub n: usize,
    pub length: f64,
    pub integrator: IntegratorConfig,
    pub fit_window: FitWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub value: f64,
    pub status: Status,
    pub verdict: String,
    pub sup_u_slope: Option<f64>,
    pub blowup_time: Option<f64>,
    pub eta_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub parameter: String,
    pub base: Scenario,
    pub rows: Vec<ScanRow>,
}

/// Run `base` once per value of `parameter`. Rows are independent,
/// deterministic runs and execute in parallel.
pub fn scan_parameter(base: &Scenario, parameter: &str, values: &[f64], setup: &RunSetup) -> Result<ScanResult> {
    // Validate the name even when there is nothing to run.
    base.clone().set(parameter, values.first().copied().unwrap_or(1.0))?;
    let grid = Grid::new(setup.n, setup.length)?;
    let rows = values
        .par_iter()
        .map(|&value| {
            let mut scenario = base.clone();
            scenario.set(parameter, value)?;
            let spec = scenario.params.build()?;
            let init = scenario.init.sample(&grid)?;
            let record = run_simulation(&spec, &init, &grid, &setup.integrator)?;
            let series: Vec<(f64, f64)> = record.sup_u_series();
            let window = setup.fit_window.resolve(record.last_time());
            let sup_u_slope = match record.status {
                Status::Completed => fit_decay_rate(&series, window).ok().map(|f| f.slope),
                _ => None,
            };
            let blowup_time = match record.status {
                Status::BlowUp { t_star } => Some(t_star),
                _ => None,
            };
            Ok(ScanRow {
                value,
                status: record.status,
                verdict: record.classification.verdict().to_string(),
                sup_u_slope,
                blowup_time,
                eta_max: record.eta_max(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        parameter: parameter.to_string(),
        base: base.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::{classify_system, ViolationKind};

    #[test]
    fn gaussian_exact_values() {
        assert!((linear_gaussian_exact(1.0, 1.0, -3.0, 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(linear_gaussian_exact(1.0, 0.0, 0.0, 0.0).unwrap(), 1.0);
        assert!((linear_gaussian_exact(2.0, -1.0, 1.0, 1.0).unwrap() - 0.5_f64.sqrt()).abs() < 1e-15);
        assert!(linear_gaussian_exact(0.0, 1.0, 0.0, 1.0).is_err());
        assert!(linear_gaussian_exact(-1.0, 1.0, 0.0, 1.0).is_err());
    }

    /// Fourth-order centered differences of the closed form against the PDE.
    #[test]
    fn gaussian_exact_solves_linear_equation() {
        for &(d, c) in &[(1.0, 1.0), (0.5, -2.0), (2.0, 0.3)] {
            let u = |x: f64, t: f64| linear_gaussian_exact(d, c, x, t).unwrap();
            let h = 1e-2;
            for i in 0..9 {
                for &t in &[0.5, 1.0, 3.0, 7.0] {
                    let x = -4.0 + i as f64 - c * t;
                    let ut = (-u(x, t + 2.0 * h) + 8.0 * u(x, t + h) - 8.0 * u(x, t - h) + u(x, t - 2.0 * h))
                        / (12.0 * h);
                    let ux = (-u(x + 2.0 * h, t) + 8.0 * u(x + h, t) - 8.0 * u(x - h, t) + u(x - 2.0 * h, t))
                        / (12.0 * h);
                    let uxx = (-u(x + 2.0 * h, t) + 16.0 * u(x + h, t) - 30.0 * u(x, t) + 16.0 * u(x - h, t)
                        - u(x - 2.0 * h, t))
                        / (12.0 * h * h);
                    let residual = (ut - d * uxx - c * ux).abs();
                    assert!(residual < 1e-6, "d={d} c={c} x={x} t={t}: {residual}");
                }
            }
        }
    }

    #[test]
    fn toy_builder() {
        let spec = build_toy(2, 4, 1.0, 1.0, 1.0, -1.0).unwrap();
        assert!(classify_system(&spec).admissible);
        let f2 = &spec.f().terms()[1];
        assert_eq!(f2.iter().filter(|m| m.outer_divergence()).count(), 1);
        assert_eq!(f2.iter().filter(|m| m.u_exponents() == [0, 4]).count(), 1);
        let tp = 2.0 * PI;
        assert!((spec.f().terms()[0][0].coefficient() - tp * tp).abs() < 1e-12);
        assert!((spec.f().terms()[0][1].coefficient() - tp.powi(3)).abs() < 1e-12);
        let err = build_toy(1, 4, 1.0, 1.0, 1.0, -1.0).unwrap_err().to_string();
        assert!(err.contains("cannot be handled"), "{err}");
        assert!(build_toy(2, 3, 1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn cas3_builder() {
        let spec = build_cas3(1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(spec.f().terms().iter().map(Vec::len).sum::<usize>(), 3);
        let spec = build_cas3(1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(spec.f().terms().iter().map(Vec::len).sum::<usize>(), 1);
        assert!(classify_system(&spec).admissible);
        let spec = build_cas3(1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let cls = classify_system(&spec);
        assert!(!cls.admissible);
        assert_eq!(cls.violations[0].kind, ViolationKind::PureCube);
        // equal velocities are allowed at build time
        assert!(build_cas3(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn cas3_threshold_values() {
        assert_eq!(cas3_threshold(1.0, 1.0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(cas3_threshold(0.0, 5.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(cas3_threshold(2.0, 3.0, 1.0, 4.0).unwrap(), 2.0);
        assert!(cas3_threshold(1.0, 1.0, 2.0, 2.0).is_err());
        assert_eq!(cas3_threshold(2.0, 3.0, 4.0, 1.0).unwrap(), -2.0);
    }

    #[test]
    fn esclev_builder() {
        let s = build_esclev(1, 2, 2, 1, None).unwrap();
        assert_eq!(s.c(), &[0.0, 0.0]);
        assert_eq!(s.d(), &[1.0, 1.0]);
        assert!(build_esclev(2, 1, 1, 2, None).is_ok());
        assert!(build_esclev(3, 0, 1, 2, None).is_err());
        assert!(build_esclev(1, 1, 1, 2, None).is_err());
    }

    #[test]
    fn initial_data() {
        let g = Grid::new(256, 100.0).unwrap();
        let u = gaussian_initial_data(&[0.05, 0.05], &[1.0, 1.0], &[0.0, 0.0], &g).unwrap();
        let peak = u[0].iter().fold(0.0_f64, |m, v| m.max(*v));
        assert!((peak - 0.05).abs() < 1e-15);
        let z = gaussian_initial_data(&[0.0], &[1.0], &[0.0], &g).unwrap();
        assert!(z[0].iter().all(|&v| v == 0.0));
        assert!(gaussian_initial_data(&[1.0], &[1.0], &[49.0], &g).is_err());
        assert!(gaussian_initial_data(&[1.0], &[0.0], &[0.0], &g).is_err());
    }

    #[test]
    fn scenario_parameters() {
        let mut s = Scenario {
            params: ScenarioParams::defaults("cas3").unwrap(),
            init: InitialData::uniform(2, 0.05),
        };
        s.set("beta", 1.5).unwrap();
        s.set("amplitude2", 0.1).unwrap();
        assert!(matches!(s.params, ScenarioParams::Cas3 { beta, .. } if beta == 1.5));
        assert_eq!(s.init.amplitude, vec![0.05, 0.1]);
        assert!(matches!(s.set("zeta", 1.0), Err(Error::UnknownParameter(_))));
        assert!(matches!(s.set("amplitude3", 1.0), Err(Error::UnknownParameter(_))));
        let mut lin = ScenarioParams::defaults("linear").unwrap();
        lin.set("c2", 3.0).unwrap();
        assert!(matches!(&lin, ScenarioParams::Linear { c, .. } if c[1] == 3.0));
        assert!(lin.set("c3", 1.0).is_err());
        let mut toy = ScenarioParams::defaults("toy").unwrap();
        assert!(toy.set("r", 2.5).is_err());
        for name in SCENARIO_NAMES {
            let p = ScenarioParams::defaults(name).unwrap();
            assert_eq!(p.name(), name);
            assert!(p.build().is_ok(), "{name}");
        }
    }

    #[test]
    fn permutation_relabels_consistently() {
        let spec = build_cas3(1.0, 2.0, 0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let p = spec.permuted(&[1, 0]);
        assert_eq!(p.d(), &[2.0, 1.0]);
        assert_eq!(p.f().terms()[1][0].u_exponents(), &[1, 1]);
        assert_eq!(p.f().terms()[1][1].u_exponents(), &[3, 0]);
        assert_eq!(p.f().terms()[0][0].u_exponents(), &[2, 0]);
    }
}
