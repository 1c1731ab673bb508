//! Momentum profiles `f(x - k)` and the overlap integrals built from them.
//!
//! For two profiles centred at `k` and `k'` the direct overlap is
//! `L = ∫|f(x-k)|² dx · ∫|f(x-k')|² dx` and the exchange overlap is
//! `M = |∫ f*(x-k) f(x-k') dx|²`. Both are available in closed form for
//! same-family Lorentzian and Gaussian pairs and by quadrature for anything.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{self, gauss_legendre, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileFamily {
    Lorentzian,
    Gaussian,
    Tabulated,
}

impl fmt::Display for ProfileFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileFamily::Lorentzian => "lorentzian",
            ProfileFamily::Gaussian => "gaussian",
            ProfileFamily::Tabulated => "table",
        })
    }
}

/// Sampled profile shape as a function of the offset from its centre,
/// linearly interpolated between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl ProfileTable {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(Error::InvalidProfile(format!(
                "table has {} abscissae but {} values",
                xs.len(),
                fs.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidProfile("table needs at least two samples".into()));
        }
        if xs.iter().chain(&fs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("table contains non-finite values".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile("table abscissae must be strictly increasing".into()));
        }
        if fs.iter().any(|&f| f < 0.0) {
            return Err(Error::InvalidProfile("table values must be non-negative".into()));
        }
        Ok(ProfileTable { xs, fs })
    }

    /// Sample `f` at `n` evenly spaced offsets in `[lo, hi]`.
    pub fn sample<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || hi <= lo {
            return Err(Error::InvalidProfile(format!("cannot sample {n} points on [{lo}, {hi}]")));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        let fs = xs.iter().map(|&x| f(x)).collect();
        ProfileTable::new(xs, fs)
    }

    /// Two-column text, whitespace or comma separated; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::InvalidProfile(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidProfile(format!("line {}: {e}", lineno + 1)))
            };
            xs.push(parse(cols[0])?);
            fs.push(parse(cols[1])?);
        }
        ProfileTable::new(xs, fs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        ProfileTable::parse(&std::fs::read_to_string(path)?)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().expect("table is non-empty"))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&x) {
            return Err(Error::OutOfRange { x, lo, hi });
        }
        Ok(self.interpolate(x))
    }

    fn interpolate(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&v| v <= x);
        if i == 0 {
            return self.fs[0];
        }
        if i >= self.xs.len() {
            return *self.fs.last().expect("table is non-empty");
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = (x - x0) / (x1 - x0);
        self.fs[i - 1] + t * (self.fs[i] - self.fs[i - 1])
    }

    /// Half width at half maximum, measured on the interpolant.
    pub fn half_width(&self) -> f64 {
        let (imax, &peak) = self
            .fs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("table is non-empty");
        if peak <= 0.0 {
            return 0.0;
        }
        let half = 0.5 * peak;
        let crossing = |range: &mut dyn Iterator<Item = usize>, step_back: isize| {
            for i in range {
                if self.fs[i] <= half {
                    let j = (i as isize + step_back) as usize;
                    let (xa, fa, xb, fb) = (self.xs[i], self.fs[i], self.xs[j], self.fs[j]);
                    return xa + (half - fa) * (xb - xa) / (fb - fa);
                }
            }
            if step_back > 0 {
                self.xs[0]
            } else {
                *self.xs.last().expect("table is non-empty")
            }
        };
        let left = crossing(&mut (0..imax).rev(), 1);
        let right = crossing(&mut (imax + 1..self.xs.len()), -1);
        0.5 * (right - left)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Lorentzian { delta: f64 },
    Gaussian { sigma: f64 },
    Tabulated(Arc<ProfileTable>),
}

/// A momentum distribution `f(x - center)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumProfile {
    shape: Shape,
    center: f64,
}

impl MomentumProfile {
    pub fn lorentzian(delta: f64, center: f64) -> Result<Self> {
        check_width(delta)?;
        check_center(center)?;
        Ok(MomentumProfile {
            shape: Shape::Lorentzian { delta },
            center,
        })
    }

    pub fn gaussian(sigma: f64, center: f64) -> Result<Self> {
        check_width(sigma)?;
        check_center(center)?;
        Ok(MomentumProfile {
            shape: Shape::Gaussian { sigma },
            center,
        })
    }

    pub fn tabulated(table: ProfileTable, center: f64) -> Result<Self> {
        check_center(center)?;
        if table.fs.iter().all(|&f| f == 0.0) {
            return Err(Error::InvalidProfile("table is identically zero".into()));
        }
        Ok(MomentumProfile {
            shape: Shape::Tabulated(Arc::new(table)),
            center,
        })
    }

    pub fn family(&self) -> ProfileFamily {
        match self.shape {
            Shape::Lorentzian { .. } => ProfileFamily::Lorentzian,
            Shape::Gaussian { .. } => ProfileFamily::Gaussian,
            Shape::Tabulated(_) => ProfileFamily::Tabulated,
        }
    }

    /// δ for Lorentzians, σ for Gaussians, the half width at half maximum
    /// for tables.
    pub fn width(&self) -> f64 {
        match &self.shape {
            Shape::Lorentzian { delta } => *delta,
            Shape::Gaussian { sigma } => *sigma,
            Shape::Tabulated(t) => t.half_width(),
        }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn table(&self) -> Option<&ProfileTable> {
        match &self.shape {
            Shape::Tabulated(t) => Some(t),
            _ => None,
        }
    }

    /// Same shape moved to a new centre.
    pub fn recentered(&self, center: f64) -> Self {
        MomentumProfile {
            shape: self.shape.clone(),
            center,
        }
    }

    /// `f(x - center)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("profile evaluated at non-finite x = {x}")));
        }
        let u = x - self.center;
        Ok(match &self.shape {
            Shape::Lorentzian { delta } => lorentzian(*delta, u),
            Shape::Gaussian { sigma } => gaussian(*sigma, u),
            Shape::Tabulated(t) => t.eval(u)?,
        })
    }

    /// Interval outside which the profile vanishes.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Tabulated(t) => {
                let (lo, hi) = t.range();
                (lo + self.center, hi + self.center)
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Value with zero extension outside the support.
    fn value(&self, x: f64) -> f64 {
        let u = x - self.center;
        match &self.shape {
            Shape::Lorentzian { delta } => lorentzian(*delta, u),
            Shape::Gaussian { sigma } => gaussian(*sigma, u),
            Shape::Tabulated(t) => {
                let (lo, hi) = t.range();
                if (lo..=hi).contains(&u) {
                    t.interpolate(u)
                } else {
                    0.0
                }
            }
        }
    }

    fn same_shape(&self, other: &MomentumProfile) -> bool {
        self.shape == other.shape
    }
}

fn check_width(w: f64) -> Result<()> {
    if w > 0.0 && w.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidProfile(format!("width must be positive and finite, got {w}")))
    }
}

fn check_center(c: f64) -> Result<()> {
    if c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidProfile(format!("center must be finite, got {c}")))
    }
}

fn lorentzian(delta: f64, u: f64) -> f64 {
    delta / (PI * (u * u + delta * delta))
}

fn gaussian(sigma: f64, u: f64) -> f64 {
    (-0.5 * (u / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
}

pub fn profile_eval(p: &MomentumProfile, x: f64) -> Result<f64> {
    p.eval(x)
}

/// Profile description shared with the command line:
/// `lorentzian:delta=2`, `gaussian:sigma=1`, `table:path=<file>`, or a bare
/// family name whose width is supplied separately.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    pub family: ProfileFamily,
    pub width: Option<f64>,
    pub path: Option<PathBuf>,
}

impl FromStr for ProfileSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s, None),
        };
        let family = match name {
            "lorentzian" => ProfileFamily::Lorentzian,
            "gaussian" => ProfileFamily::Gaussian,
            "table" | "tabulated" => ProfileFamily::Tabulated,
            other => return Err(Error::InvalidProfile(format!("unknown profile family `{other}`"))),
        };
        let mut spec = ProfileSpec {
            family,
            width: None,
            path: None,
        };
        for kv in params.into_iter().flat_map(|p| p.split(',')).filter(|p| !p.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidProfile(format!("expected key=value, got `{kv}`")))?;
            match (family, key.trim()) {
                (ProfileFamily::Lorentzian, "delta") | (ProfileFamily::Gaussian, "sigma") => {
                    let w: f64 = value
                        .trim()
                        .parse()
                        .map_err(|e| Error::InvalidProfile(format!("{key}: {e}")))?;
                    check_width(w)?;
                    spec.width = Some(w);
                }
                (ProfileFamily::Tabulated, "path") => spec.path = Some(PathBuf::from(value.trim())),
                (_, k) => {
                    return Err(Error::InvalidProfile(format!(
                        "parameter `{k}` not valid for {family} profiles"
                    )))
                }
            }
        }
        if family == ProfileFamily::Tabulated && spec.path.is_none() {
            return Err(Error::InvalidProfile("table profile requires path=<file>".into()));
        }
        Ok(spec)
    }
}

/// Loaded, centre-free profile shape; instantiate at a centre with [`ProfileShape::at`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileShape(MomentumProfile);

impl ProfileShape {
    pub fn lorentzian(delta: f64) -> Result<Self> {
        MomentumProfile::lorentzian(delta, 0.0).map(ProfileShape)
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        MomentumProfile::gaussian(sigma, 0.0).map(ProfileShape)
    }

    pub fn tabulated(table: ProfileTable) -> Result<Self> {
        MomentumProfile::tabulated(table, 0.0).map(ProfileShape)
    }

    /// Resolve a spec, with `width` overriding any width inside it.
    pub fn from_spec(spec: &ProfileSpec, width: Option<f64>) -> Result<Self> {
        let width = width.or(spec.width);
        match spec.family {
            ProfileFamily::Lorentzian => ProfileShape::lorentzian(
                width.ok_or_else(|| Error::InvalidProfile("lorentzian needs a width".into()))?,
            ),
            ProfileFamily::Gaussian => ProfileShape::gaussian(
                width.ok_or_else(|| Error::InvalidProfile("gaussian needs a width".into()))?,
            ),
            ProfileFamily::Tabulated => {
                let path = spec.path.as_ref().expect("validated when parsed");
                ProfileShape::tabulated(ProfileTable::load(path)?)
            }
        }
    }

    pub fn at(&self, center: f64) -> MomentumProfile {
        self.0.recentered(center)
    }

    pub fn family(&self) -> ProfileFamily {
        self.0.family()
    }

    pub fn width(&self) -> f64 {
        self.0.width()
    }
}

/// The four profiles entering a two-pair matrix element: electrons at `k`,
/// `k'` and holes at `k̃`, `k̃'`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairProfiles {
    pub electron: [MomentumProfile; 2],
    pub hole: [MomentumProfile; 2],
}

impl PairProfiles {
    /// Electrons at `∓d/2`, holes mirrored to `±d/2` (`k̃ = -k`).
    pub fn symmetric(electron: &ProfileShape, hole: &ProfileShape, d: f64) -> Result<Self> {
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::Domain(format!("momentum mismatch must be >= 0, got {d}")));
        }
        let k = -0.5 * d;
        let kp = 0.5 * d;
        Ok(PairProfiles {
            electron: [electron.at(k), electron.at(kp)],
            hole: [hole.at(-k), hole.at(-kp)],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapMethod {
    /// Closed form where one exists, quadrature otherwise.
    #[default]
    Auto,
    ClosedForm,
    Quadrature,
}

/// `∫ |f|²` for a single profile.
fn self_overlap(p: &MomentumProfile, method: OverlapMethod) -> Result<f64> {
    let closed = match p.shape {
        Shape::Lorentzian { delta } => Some(1.0 / (2.0 * PI * delta)),
        Shape::Gaussian { sigma } => Some(1.0 / (2.0 * sigma * PI.sqrt())),
        Shape::Tabulated(_) => None,
    };
    match (method, closed) {
        (OverlapMethod::Auto | OverlapMethod::ClosedForm, Some(v)) => Ok(v),
        (OverlapMethod::ClosedForm, None) => Err(no_closed_form(p, p)),
        _ => cross_quadrature(p, p),
    }
}

/// `g = ∫ f₁(x) f₂(x) dx`.
fn cross_overlap(p1: &MomentumProfile, p2: &MomentumProfile, method: OverlapMethod) -> Result<f64> {
    if p1 == p2 {
        return self_overlap(p1, method);
    }
    let d = p1.center - p2.center;
    let closed = match (&p1.shape, &p2.shape) {
        (Shape::Lorentzian { delta: a }, Shape::Lorentzian { delta: b }) => {
            let w = a + b;
            Some(w / (PI * (d * d + w * w)))
        }
        (Shape::Gaussian { sigma: a }, Shape::Gaussian { sigma: b }) => {
            let var = a * a + b * b;
            Some((-0.5 * d * d / var).exp() / (2.0 * PI * var).sqrt())
        }
        _ => None,
    };
    match (method, closed) {
        (OverlapMethod::Auto | OverlapMethod::ClosedForm, Some(v)) => Ok(v),
        (OverlapMethod::ClosedForm, None) => Err(no_closed_form(p1, p2)),
        _ => cross_quadrature(p1, p2),
    }
}

fn no_closed_form(p1: &MomentumProfile, p2: &MomentumProfile) -> Error {
    Error::Domain(format!(
        "no closed form for {} x {} overlap",
        p1.family(),
        p2.family()
    ))
}

fn cross_quadrature(p1: &MomentumProfile, p2: &MomentumProfile) -> Result<f64> {
    let (lo1, hi1) = p1.support();
    let (lo2, hi2) = p2.support();
    let lo = lo1.max(lo2);
    let hi = hi1.min(hi2);
    if lo >= hi {
        return Ok(0.0);
    }
    let integrand = |x: f64| p1.value(x) * p2.value(x);

    if lo.is_finite() && hi.is_finite() {
        return piecewise_over_nodes(p1, p2, lo, hi);
    }
    let scale = p1.width().min(p2.width());
    let est = quadrature::integrate_line(integrand, &[p1.center, p2.center], scale, Tolerance::default())?;
    Ok(est.value)
}

/// Tables are piecewise linear, so their products are integrated segment by
/// segment between interpolation nodes, where the integrand is smooth.
fn piecewise_over_nodes(p1: &MomentumProfile, p2: &MomentumProfile, lo: f64, hi: f64) -> Result<f64> {
    let mut cuts = vec![lo, hi];
    for p in [p1, p2] {
        if let Some(t) = p.table() {
            cuts.extend(t.nodes().iter().map(|x| x + p.center).filter(|x| *x > lo && *x < hi));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let (nodes, weights) = gauss_legendre(8);
    let (coarse_nodes, coarse_weights) = gauss_legendre(6);
    let rule = |a: f64, b: f64, xs: &[f64], ws: &[f64]| {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        h * xs
            .iter()
            .zip(ws)
            .map(|(x, w)| w * p1.value(c + h * x) * p2.value(c + h * x))
            .sum::<f64>()
    };
    let mut value = 0.0;
    let mut error = 0.0;
    for w in cuts.windows(2) {
        let fine = rule(w[0], w[1], &nodes, &weights);
        value += fine;
        error += (fine - rule(w[0], w[1], &coarse_nodes, &coarse_weights)).abs();
    }
    let tol = Tolerance::default();
    if error > tol.abs.max(tol.rel * value.abs()) {
        return Err(Error::Quadrature {
            value,
            estimate: error,
        });
    }
    Ok(value)
}

/// `L = ∫|f(x-k)|² dx · ∫|f(x-k')|² dx`.
pub fn compute_l(p1: &MomentumProfile, p2: &MomentumProfile, method: OverlapMethod) -> Result<f64> {
    Ok(self_overlap(p1, method)? * self_overlap(p2, method)?)
}

/// `M = |∫ f*(x-k) f(x-k') dx|²`.
pub fn compute_m(p1: &MomentumProfile, p2: &MomentumProfile, method: OverlapMethod) -> Result<f64> {
    if p1 == p2 {
        // coincident centres: M is L by definition
        return compute_l(p1, p2, method);
    }
    let g = cross_overlap(p1, p2, method)?;
    Ok(g * g)
}

/// Direct and exchange overlaps of the electron pair (`l`, `m`) and of the
/// hole pair (`l_tilde`, `m_tilde`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapQuad {
    pub l: f64,
    pub m: f64,
    pub l_tilde: f64,
    pub m_tilde: f64,
}

/// Relative slack allowed when checking `M ≤ L` on computed values.
const ORDER_SLACK: f64 = 1e-12;

impl OverlapQuad {
    pub fn new(l: f64, m: f64, l_tilde: f64, m_tilde: f64) -> Result<Self> {
        let q = OverlapQuad {
            l,
            m,
            l_tilde,
            m_tilde,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("L", self.l), ("M", self.m), ("L~", self.l_tilde), ("M~", self.m_tilde)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.m > self.l * (1.0 + ORDER_SLACK) {
            return Err(Error::Domain(format!("M = {} exceeds L = {}", self.m, self.l)));
        }
        if self.m_tilde > self.l_tilde * (1.0 + ORDER_SLACK) {
            return Err(Error::Domain(format!(
                "M~ = {} exceeds L~ = {}",
                self.m_tilde, self.l_tilde
            )));
        }
        Ok(())
    }

    /// Exchange-to-direct ratio `M/L` of the electron pair.
    pub fn ratio(&self) -> f64 {
        self.m / self.l
    }

    pub fn ratio_tilde(&self) -> f64 {
        self.m_tilde / self.l_tilde
    }
}

pub fn overlap_quad(profiles: &PairProfiles, method: OverlapMethod) -> Result<OverlapQuad> {
    let [e0, e1] = &profiles.electron;
    let [h0, h1] = &profiles.hole;
    let mut l = compute_l(e0, e1, method)?;
    let mut m = compute_m(e0, e1, method)?;
    let mut lt = compute_l(h0, h1, method)?;
    let mut mt = compute_m(h0, h1, method)?;
    // quadrature rounding can leave M a few ulps above L for near-equal centres
    if m > l && m <= l * (1.0 + ORDER_SLACK) {
        m = l;
    }
    if mt > lt && mt <= lt * (1.0 + ORDER_SLACK) {
        mt = lt;
    }
    if e0.same_shape(e1) && e0.center == e1.center {
        l = l.max(m);
        m = l;
    }
    if h0.same_shape(h1) && h0.center == h1.center {
        lt = lt.max(mt);
        mt = lt;
    }
    OverlapQuad::new(l, m, lt, mt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lor(delta: f64, c: f64) -> MomentumProfile {
        MomentumProfile::lorentzian(delta, c).unwrap()
    }

    #[test]
    fn lorentzian_peak_and_half_width() {
        let p = lor(2.0, 0.0);
        let peak = p.eval(0.0).unwrap();
        assert!((peak - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((peak - 0.159155).abs() < 1e-6);
        let shifted = lor(2.0, 3.0);
        assert!((shifted.eval(5.0).unwrap() - 0.5 * peak).abs() < 1e-15);
        assert!((shifted.eval(1.0).unwrap() - 0.5 * peak).abs() < 1e-15);
    }

    #[test]
    fn gaussian_peak() {
        let p = MomentumProfile::gaussian(1.0, 4.0).unwrap();
        assert!((p.eval(4.0).unwrap() - 0.398942).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_widths() {
        assert!(MomentumProfile::lorentzian(0.0, 0.0).is_err());
        assert!(MomentumProfile::gaussian(-1.0, 0.0).is_err());
        assert!(MomentumProfile::lorentzian(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn table_out_of_range() {
        let t = ProfileTable::new(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let p = MomentumProfile::tabulated(t, 5.0).unwrap();
        assert!((p.eval(5.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(p.eval(3.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn table_parse_and_validation() {
        let t = ProfileTable::parse("# x f\n-1 0\n0, 2\n1 0 # tail\n").unwrap();
        assert_eq!(t.range(), (-1.0, 1.0));
        assert!((t.half_width() - 0.5).abs() < 1e-15);
        assert!(ProfileTable::parse("0 1\n0 2\n").is_err());
        assert!(ProfileTable::parse("0 1 2\n").is_err());
        assert!(ProfileTable::parse("0 -1\n1 0\n").is_err());
    }

    #[test]
    fn l_lorentzian_closed_form() {
        let l = compute_l(&lor(2.0, 0.0), &lor(2.0, 0.0), OverlapMethod::Auto).unwrap();
        assert!((l - (1.0 / (4.0 * PI)).powi(2)).abs() < 1e-15);
        assert!((l - 6.3326e-3).abs() < 1e-7);
        let far = compute_l(&lor(2.0, 0.0), &lor(2.0, 7.0), OverlapMethod::Auto).unwrap();
        assert_eq!(l, far);
    }

    #[test]
    fn l_gaussian_closed_form_and_quadrature() {
        let g = MomentumProfile::gaussian(1.0, 0.0).unwrap();
        let want = (1.0 / (2.0 * PI.sqrt())).powi(2);
        assert!((want - 7.9577e-2).abs() < 1e-6);
        let closed = compute_l(&g, &g, OverlapMethod::ClosedForm).unwrap();
        let quad = compute_l(&g, &g.recentered(1.0), OverlapMethod::Quadrature).unwrap();
        assert!((closed - want).abs() < 1e-15);
        assert!((quad - want).abs() / want < 1e-8);
    }

    #[test]
    fn m_lorentzian_examples() {
        let l = compute_l(&lor(2.0, 0.0), &lor(2.0, 2.0), OverlapMethod::Auto).unwrap();
        let m = compute_m(&lor(2.0, 0.0), &lor(2.0, 2.0), OverlapMethod::Auto).unwrap();
        assert!((m - (1.0 / (5.0 * PI)).powi(2)).abs() < 1e-15);
        assert!((m - 4.0528e-3).abs() < 1e-7);
        assert!((m / l - 0.64).abs() < 1e-12);

        let l4 = compute_l(&lor(4.0, 1.0), &lor(4.0, 5.0), OverlapMethod::Auto).unwrap();
        let m4 = compute_m(&lor(4.0, 1.0), &lor(4.0, 5.0), OverlapMethod::Auto).unwrap();
        assert!((m4 / l4 - 0.64).abs() < 1e-12);
    }

    #[test]
    fn m_equals_l_at_coincident_centres() {
        for method in [OverlapMethod::Auto, OverlapMethod::Quadrature] {
            let p = lor(3.0, 1.5);
            assert_eq!(compute_m(&p, &p, method).unwrap(), compute_l(&p, &p, method).unwrap());
        }
    }

    #[test]
    fn mixed_families_need_quadrature() {
        let a = lor(1.0, 0.0);
        let b = MomentumProfile::gaussian(1.0, 0.5).unwrap();
        assert!(compute_m(&a, &b, OverlapMethod::ClosedForm).is_err());
        let m = compute_m(&a, &b, OverlapMethod::Auto).unwrap();
        let l = compute_l(&a, &b, OverlapMethod::Auto).unwrap();
        assert!(m > 0.0 && m < l);
    }

    #[test]
    fn quad_mirror_symmetry() {
        let shape = ProfileShape::lorentzian(2.0).unwrap();
        let pp = PairProfiles::symmetric(&shape, &shape, 3.0).unwrap();
        let q = overlap_quad(&pp, OverlapMethod::Auto).unwrap();
        assert_eq!(q.l, q.l_tilde);
        assert_eq!(q.m, q.m_tilde);

        let q0 = overlap_quad(&PairProfiles::symmetric(&shape, &shape, 0.0).unwrap(), OverlapMethod::Auto).unwrap();
        let want = (1.0 / (4.0 * PI)).powi(2);
        for v in [q0.l, q0.m, q0.l_tilde, q0.m_tilde] {
            assert!((v - want).abs() < 1e-15);
        }
    }

    #[test]
    fn quad_validation() {
        assert!(OverlapQuad::new(1.0, 1.1, 1.0, 0.5).is_err());
        assert!(OverlapQuad::new(1.0, 0.5, 1.0, -0.1).is_err());
        assert!(OverlapQuad::new(1.0, 1.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn spec_grammar() {
        let s: ProfileSpec = "lorentzian:delta=2".parse().unwrap();
        assert_eq!(s.family, ProfileFamily::Lorentzian);
        assert_eq!(s.width, Some(2.0));
        let s: ProfileSpec = "gaussian:sigma=1.5".parse().unwrap();
        assert_eq!(s.width, Some(1.5));
        let s: ProfileSpec = "table:path=/tmp/x.txt".parse().unwrap();
        assert_eq!(s.path.as_deref(), Some(Path::new("/tmp/x.txt")));
        let s: ProfileSpec = "lorentzian".parse().unwrap();
        assert_eq!(s.width, None);
        assert!("lorentzian:sigma=1".parse::<ProfileSpec>().is_err());
        assert!("cauchy".parse::<ProfileSpec>().is_err());
        assert!("table".parse::<ProfileSpec>().is_err());
        assert!("lorentzian:delta=-1".parse::<ProfileSpec>().is_err());
    }
}
