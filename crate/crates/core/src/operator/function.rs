//! Functions the operator can be applied to.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Exponential growth envelope `|f(t)| <= k·e^{a·t}` on `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub a: f64,
    pub k: f64,
}

impl Growth {
    pub const BOUNDED: Growth = Growth { a: 0.0, k: 1.0 };
}

/// Anything the operator can average against Gamma densities.
pub trait Integrand: Send + Sync {
    fn eval(&self, t: f64) -> f64;

    fn growth(&self) -> Growth;

    /// Smooth integrands use Gauss–Laguerre; others use adaptive panels.
    fn is_smooth(&self) -> bool {
        true
    }

    /// Points in `t` where the integrand has a kink or jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<T: Integrand + ?Sized> Integrand for &T {
    fn eval(&self, t: f64) -> f64 {
        (**self).eval(t)
    }
    fn growth(&self) -> Growth {
        (**self).growth()
    }
    fn is_smooth(&self) -> bool {
        (**self).is_smooth()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

/// Closure-backed integrand with caller-declared growth and regularity.
pub struct FnIntegrand<F> {
    f: F,
    growth: Growth,
    smooth: bool,
    kinks: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Send + Sync> FnIntegrand<F> {
    pub fn new(f: F, growth: Growth) -> Self {
        Self {
            f,
            growth,
            smooth: true,
            kinks: Vec::new(),
        }
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.smooth = false;
        self.kinks = kinks;
        self
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> Integrand for FnIntegrand<F> {
    fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn growth(&self) -> Growth {
        self.growth
    }
    fn is_smooth(&self) -> bool {
        self.smooth
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.kinks.clone()
    }
}

/// Piecewise-linear interpolant of samples `(t_i, v_i)`, constant beyond the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    t: Vec<f64>,
    v: Vec<f64>,
}

impl SampledFunction {
    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != v.len() {
            return Err(Error::Sampled(format!(
                "{} abscissae but {} values",
                t.len(),
                v.len()
            )));
        }
        if t.len() < 2 {
            return Err(Error::Sampled("need at least two samples".into()));
        }
        if t[0] != 0.0 {
            return Err(Error::Sampled(format!("grid must start at t = 0, got {}", t[0])));
        }
        if let Some(i) = t.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Sampled(format!(
                "grid must be strictly increasing (t[{}] = {}, t[{}] = {})",
                i,
                t[i],
                i + 1,
                t[i + 1]
            )));
        }
        if t.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::Sampled("samples must be finite".into()));
        }
        Ok(Self { t, v })
    }

    /// Parses two columns `t f(t)` separated by whitespace or a comma.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = Vec::new();
        let mut v = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(Error::Sampled(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::Sampled(format!("line {}: cannot parse number {s:?}", lineno + 1))
                })
            };
            t.push(parse(fields[0])?);
            v.push(parse(fields[1])?);
        }
        Self::new(t, v)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Sampled(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn knots(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.t.len();
        if x <= 0.0 {
            return self.v[0];
        }
        if x >= self.t[n - 1] {
            return self.v[n - 1];
        }
        let i = self.t.partition_point(|&ti| ti <= x) - 1;
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let w = (x - t0) / (t1 - t0);
        self.v[i] + w * (self.v[i + 1] - self.v[i])
    }
}

/// Closed-form catalog plus sampled data.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    /// `t^r`
    Monomial(u32),
    /// `Σ c_i t^i`
    Polynomial(Vec<f64>),
    /// `e^{c t}`
    Exp(f64),
    /// `|t − c|`
    AbsShift(f64),
    /// `√t`
    Sqrt,
    /// `sin(c t)`
    Sin(f64),
    Sampled(SampledFunction),
}

/// A function on `[0, ∞)` with a declared growth class.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub kind: FunctionKind,
    pub growth_a: f64,
    pub growth_k: f64,
}

/// Exponent used for the growth envelope of polynomially growing kinds.
pub const DEFAULT_POLY_GROWTH: f64 = 0.25;

/// `sup_t t^r e^{-a t} = (r / (a e))^r`.
fn monomial_envelope(r: u32, a: f64) -> f64 {
    if r == 0 {
        1.0
    } else {
        let r = r as f64;
        (r / (a * std::f64::consts::E)).powf(r)
    }
}

impl TestFunction {
    fn with_default_growth(kind: FunctionKind) -> Self {
        let a = DEFAULT_POLY_GROWTH;
        let (growth_a, growth_k) = match &kind {
            FunctionKind::Monomial(0) => (0.0, 1.0),
            FunctionKind::Monomial(r) => (a, monomial_envelope(*r, a)),
            FunctionKind::Polynomial(c) => {
                if c.len() <= 1 {
                    (0.0, c.first().map_or(0.0, |x| x.abs()).max(f64::MIN_POSITIVE))
                } else {
                    let k: f64 = c
                        .iter()
                        .enumerate()
                        .map(|(i, ci)| ci.abs() * monomial_envelope(i as u32, a))
                        .sum();
                    (a, k.max(f64::MIN_POSITIVE))
                }
            }
            FunctionKind::Exp(c) => (c.max(0.0), 1.0),
            FunctionKind::AbsShift(c) => (a, c.abs() + 1.0 / (a * std::f64::consts::E)),
            FunctionKind::Sqrt => (a, (1.0 / (2.0 * a * std::f64::consts::E)).sqrt()),
            FunctionKind::Sin(_) => (0.0, 1.0),
            FunctionKind::Sampled(s) => (
                0.0,
                s.values()
                    .iter()
                    .fold(0.0f64, |m, v| m.max(v.abs()))
                    .max(f64::MIN_POSITIVE),
            ),
        };
        Self {
            kind,
            growth_a,
            growth_k,
        }
    }

    pub fn monomial(r: u32) -> Self {
        Self::with_default_growth(FunctionKind::Monomial(r))
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::with_default_growth(FunctionKind::Polynomial(coeffs))
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn exp(c: f64) -> Self {
        Self::with_default_growth(FunctionKind::Exp(c))
    }

    pub fn abs_shift(c: f64) -> Self {
        Self::with_default_growth(FunctionKind::AbsShift(c))
    }

    pub fn sqrt() -> Self {
        Self::with_default_growth(FunctionKind::Sqrt)
    }

    pub fn sin(c: f64) -> Self {
        Self::with_default_growth(FunctionKind::Sin(c))
    }

    pub fn sampled(s: SampledFunction) -> Self {
        Self::with_default_growth(FunctionKind::Sampled(s))
    }

    /// Replaces the growth envelope; `k` is recomputed when `None`.
    ///
    /// The envelope must dominate the function on `[0, 100]`.
    pub fn with_growth(mut self, a: f64, k: Option<f64>) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "growth_a",
                detail: format!("must be finite and nonnegative, got {a}"),
            });
        }
        let k = match k {
            Some(k) => k,
            None => {
                // Smallest K on a fine grid, padded slightly.
                let grid = (0..=20_000).map(|i| i as f64 * 0.005);
                1.0001 * grid.fold(f64::MIN_POSITIVE, |m, t| m.max(self.eval(t).abs() * (-a * t).exp()))
            }
        };
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "growth_k",
                detail: format!("must be finite and positive, got {k}"),
            });
        }
        self.growth_a = a;
        self.growth_k = k;
        if !self.growth_holds_on_grid() {
            return Err(Error::InvalidParameter {
                name: "growth_a",
                detail: format!("|f(t)| <= {k} e^({a} t) fails on [0, 100]"),
            });
        }
        Ok(self)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            FunctionKind::Monomial(r) => t.powi(*r as i32),
            FunctionKind::Polynomial(c) => c.iter().rev().fold(0.0, |acc, ci| acc * t + ci),
            FunctionKind::Exp(c) => (c * t).exp(),
            FunctionKind::AbsShift(c) => (t - c).abs(),
            FunctionKind::Sqrt => t.max(0.0).sqrt(),
            FunctionKind::Sin(c) => (c * t).sin(),
            FunctionKind::Sampled(s) => s.eval(t),
        }
    }

    /// True when `|f(t)| <= K e^{A t}` at 10 001 points of `[0, 100]`.
    pub fn growth_holds_on_grid(&self) -> bool {
        (0..=10_000).all(|i| {
            let t = i as f64 * 0.01;
            self.eval(t).abs() <= self.growth_k * (self.growth_a * t).exp() * (1.0 + 1e-12)
        })
    }

    /// Short text form matching the CLI grammar.
    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::Monomial(r) => write!(f, "monomial:{r}"),
            FunctionKind::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            FunctionKind::Exp(c) => write!(f, "exp:{c}"),
            FunctionKind::AbsShift(c) => write!(f, "abs:{c}"),
            FunctionKind::Sqrt => write!(f, "sqrt"),
            FunctionKind::Sin(c) => write!(f, "sin:{c}"),
            FunctionKind::Sampled(s) => write!(f, "sampled[{} knots]", s.knots().len()),
        }
    }
}

impl Integrand for TestFunction {
    fn eval(&self, t: f64) -> f64 {
        TestFunction::eval(self, t)
    }

    fn growth(&self) -> Growth {
        Growth {
            a: self.growth_a,
            k: self.growth_k,
        }
    }

    fn is_smooth(&self) -> bool {
        !matches!(
            self.kind,
            FunctionKind::AbsShift(_) | FunctionKind::Sqrt | FunctionKind::Sampled(_)
        )
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            FunctionKind::AbsShift(c) if *c > 0.0 => vec![*c],
            FunctionKind::Sampled(s) => s.knots()[1..].to_vec(),
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_values() {
        assert_eq!(TestFunction::monomial(3).eval(2.0), 8.0);
        assert_eq!(TestFunction::polynomial(vec![1.0, 2.0, 3.0]).eval(2.0), 17.0);
        assert_eq!(TestFunction::abs_shift(1.0).eval(0.25), 0.75);
        assert_eq!(TestFunction::sqrt().eval(4.0), 2.0);
        assert_eq!(TestFunction::constant(1.0).eval(1e6), 1.0);
    }

    #[test]
    fn default_envelopes_hold() {
        let catalog = [
            TestFunction::monomial(0),
            TestFunction::monomial(1),
            TestFunction::monomial(8),
            TestFunction::polynomial(vec![1.0, -3.0, 0.5]),
            TestFunction::exp(-2.0),
            TestFunction::exp(0.7),
            TestFunction::abs_shift(1.0),
            TestFunction::abs_shift(-2.0),
            TestFunction::sqrt(),
            TestFunction::sin(3.0),
        ];
        for f in catalog {
            assert!(f.growth_holds_on_grid(), "{f}");
        }
    }

    #[test]
    fn with_growth_rejects_false_envelope() {
        assert!(TestFunction::exp(1.0).with_growth(0.5, Some(1.0)).is_err());
        let f = TestFunction::monomial(2).with_growth(1.0, None).unwrap();
        assert!(f.growth_k > 0.5 && f.growth_k < 0.6); // (2/e)^2 ≈ 0.541
    }

    #[test]
    fn sampled_parsing_and_interpolation() {
        let s = SampledFunction::parse("# t f\n0 1\n1, 3\n\n2\t2\n").unwrap();
        assert_eq!(s.eval(0.5), 2.0);
        assert_eq!(s.eval(1.5), 2.5);
        assert_eq!(s.eval(10.0), 2.0);
        let f = TestFunction::sampled(s);
        assert_eq!(f.growth_a, 0.0);
        assert_eq!(f.growth_k, 3.0);
    }

    #[test]
    fn sampled_rejects_bad_grids() {
        assert!(SampledFunction::parse("0.5 1\n1 2\n").is_err());
        assert!(SampledFunction::parse("0 1\n1 2\n1 3\n").is_err());
        assert!(SampledFunction::parse("0 1\n1 2 3\n").is_err());
        assert!(SampledFunction::parse("0 1\nx 2\n").is_err());
        assert!(SampledFunction::parse("0 1\n").is_err());
    }
}
