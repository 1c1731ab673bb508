//! Globally adaptive Gauss-Legendre quadrature on finite intervals and on the
//! whole real line.
//!
//! Each interval is scored by comparing a single 15-point rule against the
//! same rule applied to its two halves; the interval with the largest
//! discrepancy is bisected until the summed estimate meets the tolerance.
//! Half-infinite pieces are mapped onto `[0, 1)` with `x = a + s·t/(1-t)`,
//! which turns the `x⁻⁴` tails of squared Lorentzians into bounded
//! integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-8,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

fn fixed_rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Finite,
    Above { origin: f64, scale: f64 },
    Below { origin: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Integrator<'a, F> {
    f: &'a F,
    pieces: Vec<Piece>,
}

impl<F: Fn(f64) -> f64> Integrator<'_, F> {
    fn eval(&self, piece: usize, t: f64) -> f64 {
        match self.pieces[piece] {
            Piece::Finite => (self.f)(t),
            Piece::Above { origin, scale } => {
                let u = 1.0 - t;
                (self.f)(origin + scale * t / u) * scale / (u * u)
            }
            Piece::Below { origin, scale } => {
                let u = 1.0 - t;
                (self.f)(origin - scale * t / u) * scale / (u * u)
            }
        }
    }

    fn interval(&self, piece: usize, a: f64, b: f64) -> Interval {
        let g = |t: f64| self.eval(piece, t);
        let whole = fixed_rule(&g, a, b);
        let mid = 0.5 * (a + b);
        let halves = fixed_rule(&g, a, mid) + fixed_rule(&g, mid, b);
        Interval {
            piece,
            a,
            b,
            value: halves,
            error: (whole - halves).abs(),
        }
    }

    fn run(&self, seeds: &[(usize, f64, f64)], tol: Tolerance) -> Result<Estimate> {
        let mut heap: BinaryHeap<Interval> = seeds
            .iter()
            .map(|&(p, a, b)| self.interval(p, a, b))
            .collect();
        loop {
            let value: f64 = heap.iter().map(|i| i.value).sum();
            let error: f64 = heap.iter().map(|i| i.error).sum();
            if !value.is_finite() || !error.is_finite() {
                return Err(Error::Quadrature {
                    value,
                    estimate: error,
                });
            }
            if error <= tol.abs.max(tol.rel * value.abs()) {
                return Ok(Estimate { value, error });
            }
            if heap.len() >= tol.max_intervals {
                return Err(Error::Quadrature {
                    value,
                    estimate: error,
                });
            }
            let worst = heap.pop().expect("heap holds at least one interval");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval cannot be split further in floating point
                return Err(Error::Quadrature {
                    value,
                    estimate: error,
                });
            }
            heap.push(self.interval(worst.piece, worst.a, mid));
            heap.push(self.interval(worst.piece, mid, worst.b));
        }
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("finite bounds required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let integrator = Integrator {
        f: &f,
        pieces: vec![Piece::Finite],
    };
    let est = integrator.run(&[(0, lo, hi)], tol)?;
    Ok(Estimate {
        value: sign * est.value,
        error: est.error,
    })
}

/// Integrate `f` over the whole real line.
///
/// `breakpoints` split the line where the integrand peaks; `scale` sets the
/// length over which the half-infinite maps stretch and should be of the
/// order of the integrand's width.
pub fn integrate_line<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    scale: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    let mut points: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    if points.is_empty() {
        points.push(0.0);
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut pieces = vec![Piece::Finite];
    let mut seeds = Vec::new();
    for w in points.windows(2) {
        seeds.push((0, w[0], w[1]));
    }
    pieces.push(Piece::Below {
        origin: points[0],
        scale,
    });
    seeds.push((1, 0.0, 1.0));
    pieces.push(Piece::Above {
        origin: *points.last().expect("non-empty"),
        scale,
    });
    seeds.push((2, 0.0, 1.0));

    Integrator { f: &f, pieces }.run(&seeds, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 2n-1 = 29 is the exactness limit
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(28)).sum();
        assert!((s - 2.0 / 29.0).abs() < 1e-14);
    }

    #[test]
    fn small_rules_match_tables() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert_eq!(x[1], 0.0);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn finite_interval() {
        let est = integrate(|x: f64| x.sin(), 0.0, PI, Tolerance::default()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-12);
        let rev = integrate(|x: f64| x.sin(), PI, 0.0, Tolerance::default()).unwrap();
        assert!((rev.value + 2.0).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_mass_over_line() {
        let delta = 2.0;
        let f = |x: f64| delta / (PI * (x * x + delta * delta));
        let est = integrate_line(f, &[0.0], delta, Tolerance::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9, "{est:?}");
    }

    #[test]
    fn gaussian_over_line_with_offset_breakpoints() {
        let f = |x: f64| (-(x - 3.0) * (x - 3.0) / 2.0).exp();
        let est = integrate_line(f, &[3.0, -1.0], 1.0, Tolerance::default()).unwrap();
        assert!((est.value - (2.0 * PI).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn divergent_integrand_reports_failure() {
        let tol = Tolerance {
            max_intervals: 200,
            ..Tolerance::default()
        };
        let err = integrate_line(|x: f64| 1.0 / (1.0 + x.abs()), &[0.0], 1.0, tol).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
