//! Polynomial nonlinearities `f(u, ∂x u)`.
//!
//! A nonlinearity is a per-component sum of [`Monomial`]s
//! `c · Π u_i^{a_i} · Π (∂x u_j)^{b_j}`, optionally wrapped in a single
//! outer `∂x(·)` (divergence form). Each term carries a degree index
//! `p = Σ a_i + 2 Σ b_j` that sorts it into relevant (`p < 3`), marginal
//! (`p = 3`) or irrelevant (`p > 3`).
//!
//! Text form, whitespace insignificant:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := [sign] [coeff "*"] factor ("*" factor)*
//! factor := base ["^" int]
//! base   := "u" int | "dx(" inner ")"
//! ```
//!
//! `dx(u3)` is the derivative factor `∂x u3`; any other `dx(...)` is a
//! divergence wrapper and must make up the whole term.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, ParseError, Result};
use crate::scenarios::SystemSpec;

/// One additive term of a component's nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    coefficient: f64,
    u_exponents: Vec<u32>,
    du_exponents: Vec<u32>,
    outer_divergence: bool,
}

impl Monomial {
    pub fn new(
        coefficient: f64,
        u_exponents: Vec<u32>,
        du_exponents: Vec<u32>,
        outer_divergence: bool,
    ) -> Result<Self> {
        if u_exponents.len() != du_exponents.len() {
            return Err(Error::InvalidMonomial(format!(
                "exponent vectors differ in length ({} vs {})",
                u_exponents.len(),
                du_exponents.len()
            )));
        }
        if !coefficient.is_finite() {
            return Err(Error::InvalidMonomial("coefficient is not finite".into()));
        }
        let su: u32 = u_exponents.iter().sum();
        let sb: u32 = du_exponents.iter().sum();
        if su + sb == 0 {
            return Err(Error::InvalidMonomial("constant term".into()));
        }
        if outer_divergence {
            if sb > 0 {
                return Err(Error::InvalidMonomial(
                    "divergence wrapper around a derivative factor".into(),
                ));
            }
            if su == 1 {
                return Err(Error::InvalidMonomial(
                    "bare-linear term dx(u) belongs to the advection part".into(),
                ));
            }
        } else if su + sb == 1 {
            return Err(Error::InvalidMonomial(
                "bare-linear term belongs to the linear part".into(),
            ));
        }
        Ok(Self {
            coefficient,
            u_exponents,
            du_exponents,
            outer_divergence,
        })
    }

    /// `coefficient · u^{u_exponents}`, no derivatives, no wrapper.
    pub fn pure(coefficient: f64, u_exponents: Vec<u32>) -> Result<Self> {
        let n = u_exponents.len();
        Self::new(coefficient, u_exponents, vec![0; n], false)
    }

    /// `coefficient · ∂x(u^{u_exponents})`.
    pub fn divergence(coefficient: f64, u_exponents: Vec<u32>) -> Result<Self> {
        let n = u_exponents.len();
        Self::new(coefficient, u_exponents, vec![0; n], true)
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn u_exponents(&self) -> &[u32] {
        &self.u_exponents
    }

    pub fn du_exponents(&self) -> &[u32] {
        &self.du_exponents
    }

    pub fn outer_divergence(&self) -> bool {
        self.outer_divergence
    }

    pub fn n_components(&self) -> usize {
        self.u_exponents.len()
    }

    pub fn with_coefficient(&self, coefficient: f64) -> Self {
        Self {
            coefficient,
            ..self.clone()
        }
    }

    /// Number of field factors in each expanded branch. Expansion turns one
    /// `u` factor into a `∂x u` factor, so this is the same before and after.
    pub fn degree(&self) -> u32 {
        self.u_exponents.iter().sum::<u32>() + self.du_exponents.iter().sum::<u32>()
    }

    /// Degree index `p = Σa + 2Σb` of the expanded form.
    pub fn index_p(&self) -> u32 {
        let su: u32 = self.u_exponents.iter().sum();
        let sb: u32 = self.du_exponents.iter().sum();
        if self.outer_divergence {
            su + 1
        } else {
            su + 2 * sb
        }
    }

    /// Symbolic product of two unwrapped monomials.
    pub fn multiply(&self, other: &Monomial) -> Result<Monomial> {
        if self.outer_divergence || other.outer_divergence {
            return Err(Error::InvalidMonomial(
                "cannot multiply divergence-wrapped terms".into(),
            ));
        }
        if self.n_components() != other.n_components() {
            return Err(Error::InvalidMonomial("component counts differ".into()));
        }
        let add = |a: &[u32], b: &[u32]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Monomial::new(
            self.coefficient * other.coefficient,
            add(&self.u_exponents, &other.u_exponents),
            add(&self.du_exponents, &other.du_exponents),
            false,
        )
    }

    /// Components with a nonzero `a_i + b_i`.
    fn involved(&self) -> impl Iterator<Item = usize> + '_ {
        self.u_exponents
            .iter()
            .zip(&self.du_exponents)
            .enumerate()
            .filter(|(_, (a, b))| *a + *b > 0)
            .map(|(i, _)| i)
    }

    /// Index of the single component this monomial is a power of, if any.
    fn pure_power_of(&self) -> Option<(usize, u32)> {
        let mut it = self.involved();
        let i = it.next()?;
        if it.next().is_some() || self.du_exponents[i] != 0 {
            return None;
        }
        Some((i, self.u_exponents[i]))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors = Vec::new();
        for (i, &a) in self.u_exponents.iter().enumerate() {
            match a {
                0 => {}
                1 => factors.push(format!("u{}", i + 1)),
                _ => factors.push(format!("u{}^{}", i + 1, a)),
            }
        }
        for (j, &b) in self.du_exponents.iter().enumerate() {
            match b {
                0 => {}
                1 => factors.push(format!("dx(u{})", j + 1)),
                _ => factors.push(format!("dx(u{})^{}", j + 1, b)),
            }
        }
        let body = factors.join("*");
        if self.outer_divergence {
            write!(f, "{:?}*dx({})", self.coefficient, body)
        } else {
            write!(f, "{:?}*{}", self.coefficient, body)
        }
    }
}

/// Product-rule expansion of a divergence-wrapped term into unwrapped terms.
/// Unwrapped input is returned unchanged.
pub fn expand_divergence(m: &Monomial) -> Vec<Monomial> {
    if !m.outer_divergence {
        return vec![m.clone()];
    }
    let n = m.n_components();
    m.u_exponents
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(i, &a)| {
            let mut u = m.u_exponents.clone();
            u[i] -= 1;
            let mut du = vec![0; n];
            du[i] = 1;
            Monomial {
                coefficient: m.coefficient * f64::from(a),
                u_exponents: u,
                du_exponents: du,
                outer_divergence: false,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Relevant,
    Marginal,
    Irrelevant,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Relevant => "relevant",
            Category::Marginal => "marginal",
            Category::Irrelevant => "irrelevant",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TermClass {
    pub p: u32,
    pub category: Category,
    pub is_mixed: bool,
    pub is_burgers: bool,
}

pub fn classify_term(m: &Monomial) -> TermClass {
    let p = m.index_p();
    let category = match p.cmp(&3) {
        std::cmp::Ordering::Less => Category::Relevant,
        std::cmp::Ordering::Equal => Category::Marginal,
        std::cmp::Ordering::Greater => Category::Irrelevant,
    };
    TermClass {
        p,
        category,
        is_mixed: m.involved().count() >= 2,
        is_burgers: m.outer_divergence && matches!(m.pure_power_of(), Some((_, 2))),
    }
}

/// Per-component polynomial nonlinearity; `terms[i]` are the terms of `f_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearitySpec {
    n: usize,
    terms: Vec<Vec<Monomial>>,
}

impl NonlinearitySpec {
    pub fn new(n: usize, terms: Vec<Vec<Monomial>>) -> Result<Self> {
        if terms.len() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n} component term lists"),
                found: format!("{}", terms.len()),
            });
        }
        if let Some(bad) = terms.iter().flatten().find(|m| m.n_components() != n) {
            return Err(Error::ShapeMismatch {
                expected: format!("exponent vectors of length {n}"),
                found: format!("{} in `{bad}`", bad.n_components()),
            });
        }
        Ok(Self { n, terms })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Vec<Monomial>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(Vec::is_empty)
    }

    /// Same nonlinearity with every divergence wrapper expanded.
    pub fn expanded(&self) -> NonlinearitySpec {
        NonlinearitySpec {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|ts| ts.iter().flat_map(expand_divergence).collect())
                .collect(),
        }
    }

    /// Largest number of field factors in any term (0 for `f ≡ 0`).
    pub fn max_degree(&self) -> u32 {
        self.terms.iter().flatten().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Whether any expanded term needs `∂x u`.
    pub fn uses_derivatives(&self) -> bool {
        self.terms
            .iter()
            .flatten()
            .any(|m| m.outer_divergence || m.du_exponents.iter().any(|&b| b > 0))
    }

    /// Relabel components: component `i` becomes component `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> NonlinearitySpec {
        let remap = |v: &[u32]| {
            let mut out = vec![0; v.len()];
            for (i, &e) in v.iter().enumerate() {
                out[perm[i]] = e;
            }
            out
        };
        let mut terms = vec![Vec::new(); self.n];
        for (i, ts) in self.terms.iter().enumerate() {
            terms[perm[i]] = ts
                .iter()
                .map(|m| Monomial {
                    coefficient: m.coefficient,
                    u_exponents: remap(&m.u_exponents),
                    du_exponents: remap(&m.du_exponents),
                    outer_divergence: m.outer_divergence,
                })
                .collect();
        }
        NonlinearitySpec { n: self.n, terms }
    }

    /// One expression string per component, parseable by [`parse_nonlinearity`].
    pub fn to_strings(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|ts| {
                if ts.is_empty() {
                    "0".to_string()
                } else {
                    ts.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
                }
            })
            .collect()
    }
}

/// Parse one expression per component (`texts[i]` is `f_{i+1}`).
/// An empty string or `"0"` means no terms.
pub fn parse_nonlinearity<S: AsRef<str>>(texts: &[S], n: usize) -> Result<NonlinearitySpec> {
    if texts.len() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n} component expressions"),
            found: format!("{}", texts.len()),
        });
    }
    let mut terms = Vec::with_capacity(n);
    for (i, text) in texts.iter().enumerate() {
        let parsed = Parser::new(text.as_ref(), n).expr().map_err(|mut e| {
            e.component = Some(i + 1);
            e
        })?;
        terms.push(parsed);
    }
    NonlinearitySpec::new(n, terms)
}

/// Recursive-descent parser over a single component expression.
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

/// A `dx(...)` body as seen by the parser.
enum DxInner {
    Derivative(usize),
    Wrapper { coefficient: f64, u: Vec<u32> },
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, n: usize) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
            n,
        }
    }

    fn err<T>(&self, position: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            component: None,
            position,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(self.pos, format!("expected `{}`", c as char))
        }
    }

    fn expr(&mut self) -> Result<Vec<Monomial>, ParseError> {
        match self.peek() {
            None => return Ok(Vec::new()),
            Some(b'0') => {
                let save = self.pos;
                self.pos += 1;
                if self.peek().is_none() {
                    return Ok(Vec::new());
                }
                self.pos = save;
            }
            _ => {}
        }
        let mut terms = vec![self.term(false)?];
        loop {
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term(false)?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    terms.push(self.term(true)?);
                }
                Some(c) => return self.err(self.pos, format!("unexpected `{}`", c as char)),
            }
        }
        Ok(terms)
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        digits(&mut self.pos);
        if self.pos < s.len() && s[self.pos] == b'.' {
            self.pos += 1;
            digits(&mut self.pos);
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < s.len() && (s[p] == b'+' || s[p] == b'-') {
                p += 1;
            }
            let exp_start = p;
            digits(&mut p);
            if p > exp_start {
                self.pos = p;
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).unwrap_or("");
        text.parse::<f64>()
            .or_else(|_| self.err(start, format!("malformed number `{text}`")))
    }

    fn integer(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(start, "expected an integer");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .map_or_else(|| self.err(start, "integer out of range"), Ok)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        let at = self.pos;
        match self.integer()? {
            0 => self.err(at, "exponent must be positive"),
            e => Ok(e),
        }
    }

    fn component_index(&mut self) -> Result<usize, ParseError> {
        let at = self.pos;
        let i = self.integer()? as usize;
        if i == 0 || i > self.n {
            return self.err(at, format!("component index {i} out of range 1..={}", self.n));
        }
        Ok(i - 1)
    }

    fn term(&mut self, negated: bool) -> Result<Monomial, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let mut sign = if negated { -1.0 } else { 1.0 };
        if self.eat(b'-') {
            sign = -sign;
        } else {
            self.eat(b'+');
        }
        let mut coefficient = 1.0;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
            coefficient = self.number()?;
            if !self.eat(b'*') {
                return self.err(start, "constant term (f(0,0) must vanish)");
            }
        }
        let mut u = vec![0u32; self.n];
        let mut du = vec![0u32; self.n];
        let mut wrapper: Option<(f64, Vec<u32>)> = None;
        let mut factor_count = 0;
        loop {
            let at = self.pos;
            match self.peek() {
                Some(b'u') => {
                    self.pos += 1;
                    let i = self.component_index()?;
                    u[i] += self.exponent()?;
                }
                Some(b'd') => match self.dx_factor()? {
                    DxInner::Derivative(j) => du[j] += self.exponent()?,
                    DxInner::Wrapper { coefficient: c, u: w } => {
                        if self.peek() == Some(b'^') {
                            return self.err(self.pos, "a divergence wrapper cannot be raised to a power");
                        }
                        wrapper = Some((c, w));
                    }
                },
                Some(c) => return self.err(at, format!("expected a factor, found `{}`", c as char)),
                None => return self.err(at, "expected a factor, found end of input"),
            }
            factor_count += 1;
            if !self.eat(b'*') {
                break;
            }
        }
        let (m, at) = match wrapper {
            Some((inner_coefficient, w)) => {
                if factor_count > 1 {
                    return self.err(start, "a divergence wrapper must be the entire term");
                }
                (
                    Monomial::new(sign * coefficient * inner_coefficient, w, vec![0; self.n], true),
                    start,
                )
            }
            None => (Monomial::new(sign * coefficient, u, du, false), start),
        };
        m.or_else(|e| {
            let msg = match e {
                Error::InvalidMonomial(s) => s,
                other => other.to_string(),
            };
            self.err(at, msg)
        })
    }

    fn dx_factor(&mut self) -> Result<DxInner, ParseError> {
        let at = self.pos;
        if !self.src[self.pos..].starts_with(b"dx") {
            return self.err(at, "expected `dx(`");
        }
        self.pos += 2;
        self.expect(b'(')?;
        let inner_start = self.pos;
        let mut coefficient = 1.0;
        if self.eat(b'-') {
            coefficient = -1.0;
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
            coefficient *= self.number()?;
            self.expect(b'*')?;
        }
        let mut u = vec![0u32; self.n];
        let mut single: Option<usize>;
        let mut count = 0;
        loop {
            match self.peek() {
                Some(b'u') => {
                    self.pos += 1;
                    let i = self.component_index()?;
                    let e = self.exponent()?;
                    u[i] += e;
                    single = (e == 1).then_some(i);
                    count += 1;
                }
                Some(b'd') => {
                    return self.err(
                        self.pos,
                        "divergence wrapper around a derivative factor (second derivatives leave the model class)",
                    )
                }
                _ => return self.err(self.pos, "expected `u<i>` inside dx(...)"),
            }
            if !self.eat(b'*') {
                break;
            }
        }
        self.expect(b')')?;
        if count == 1 && coefficient == 1.0 {
            if let Some(j) = single {
                return Ok(DxInner::Derivative(j));
            }
        }
        if u.iter().sum::<u32>() == 1 {
            return self.err(inner_start, "bare-linear term dx(u) belongs to the advection part");
        }
        Ok(DxInner::Wrapper { coefficient, u })
    }
}

/// Pointwise evaluation of `f(u, ∂x u)` on `n × N` arrays. Divergence terms
/// are evaluated through their product-rule expansion.
pub fn evaluate_nonlinearity(
    spec: &NonlinearitySpec,
    u: &[Vec<f64>],
    du: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    let n = spec.n();
    if u.len() != n || du.len() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n} components"),
            found: format!("u: {}, du: {}", u.len(), du.len()),
        });
    }
    let len = u.first().map_or(0, Vec::len);
    if u.iter().chain(du).any(|row| row.len() != len) {
        return Err(Error::ShapeMismatch {
            expected: format!("rows of length {len}"),
            found: "ragged field arrays".into(),
        });
    }
    let expanded = spec.expanded();
    let mut out = vec![vec![0.0; len]; n];
    for (out_i, terms) in out.iter_mut().zip(expanded.terms()) {
        for m in terms {
            let factors: Vec<(&[f64], i32)> = m
                .u_exponents
                .iter()
                .zip(u)
                .chain(m.du_exponents.iter().zip(du))
                .filter(|(&e, _)| e > 0)
                .map(|(&e, row)| (row.as_slice(), e as i32))
                .collect();
            for (x, acc) in out_i.iter_mut().enumerate() {
                let mut prod = m.coefficient;
                for (row, e) in &factors {
                    prod *= if *e == 1 { row[x] } else { row[x].powi(*e) };
                }
                *acc += prod;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Two components share a velocity.
    EqualVelocities,
    /// `p < 3` term.
    RelevantTerm,
    /// `u_j^3`, not covered by the mixed-cubic bound.
    PureCube,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::EqualVelocities => "equal velocities",
            ViolationKind::RelevantTerm => "relevant term",
            ViolationKind::PureCube => "pure cube",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// 1-based component equation, or the first of the two clashing components.
    pub component: usize,
    /// Offending term, or the second clashing component for velocity clashes.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermEntry {
    pub component: usize,
    pub term: String,
    #[serde(flatten)]
    pub class: TermClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub admissible: bool,
    pub terms: Vec<TermEntry>,
    pub violations: Vec<Violation>,
}

impl Classification {
    pub fn verdict(&self) -> &'static str {
        if self.admissible {
            "admissible"
        } else {
            "not admissible"
        }
    }
}

/// Check a system against the global-existence hypotheses: pairwise distinct
/// velocities, and every expanded term with `p ≤ 3` of the form
/// `u·∂x u`, `(∂x u)^2`, or a cubic in `u` that is not a pure cube.
pub fn classify_system(spec: &SystemSpec) -> Classification {
    let mut violations = Vec::new();
    let c = spec.c();
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            if c[i] == c[j] {
                violations.push(Violation {
                    kind: ViolationKind::EqualVelocities,
                    component: i + 1,
                    detail: format!("c{} = c{} = {}", i + 1, j + 1, c[i]),
                });
            }
        }
    }
    let mut terms = Vec::new();
    for (i, ts) in spec.f().terms().iter().enumerate() {
        for m in ts {
            let class = classify_term(m);
            terms.push(TermEntry {
                component: i + 1,
                term: m.to_string(),
                class,
            });
            let kind = expand_divergence(m).iter().find_map(|b| {
                let su: u32 = b.u_exponents.iter().sum();
                let sb: u32 = b.du_exponents.iter().sum();
                match b.index_p() {
                    p if p < 3 => Some(ViolationKind::RelevantTerm),
                    3 if sb == 0 && su == 3 && b.pure_power_of().is_some() => {
                        Some(ViolationKind::PureCube)
                    }
                    _ => None,
                }
            });
            if let Some(kind) = kind {
                violations.push(Violation {
                    kind,
                    component: i + 1,
                    detail: m.to_string(),
                });
            }
        }
    }
    Classification {
        admissible: violations.is_empty(),
        terms,
        violations,
    }
}
