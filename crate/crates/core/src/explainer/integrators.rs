//! Quadrature rules for the path integral from baseline to input.
//!
//! Each rule maps a step count to `(alpha, weight)` nodes on `[0, 1]` whose
//! weights sum to one.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::registry::Registry;

pub trait PathIntegrator: std::fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;
    fn nodes(&self, steps: usize) -> Vec<(f64, f64)>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Riemann {
    Left,
    Right,
    Middle,
    Trapezoid,
}

#[derive(Debug)]
struct RiemannRule(Riemann);

impl PathIntegrator for RiemannRule {
    fn name(&self) -> &'static str {
        match self.0 {
            Riemann::Left => "riemann_left",
            Riemann::Right => "riemann_right",
            Riemann::Middle => "riemann_middle",
            Riemann::Trapezoid => "riemann_trapezoid",
        }
    }

    fn nodes(&self, steps: usize) -> Vec<(f64, f64)> {
        let m = steps.max(1) as f64;
        match self.0 {
            Riemann::Left => (0..steps).map(|k| (k as f64 / m, 1.0 / m)).collect(),
            Riemann::Right => (1..=steps).map(|k| (k as f64 / m, 1.0 / m)).collect(),
            Riemann::Middle => (0..steps).map(|k| ((k as f64 + 0.5) / m, 1.0 / m)).collect(),
            Riemann::Trapezoid => (0..=steps)
                .map(|k| {
                    let w = if k == 0 || k == steps { 0.5 / m } else { 1.0 / m };
                    (k as f64 / m, w)
                })
                .collect(),
        }
    }
}

#[derive(Debug)]
struct GaussLegendre;

/// Roots and weights of the degree-`n` Legendre polynomial on `[-1, 1]`.
fn legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess, refined by Newton's method
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

impl PathIntegrator for GaussLegendre {
    fn name(&self) -> &'static str {
        "gausslegendre"
    }

    fn nodes(&self, steps: usize) -> Vec<(f64, f64)> {
        legendre_nodes(steps.max(1))
            .into_iter()
            .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect()
    }
}

pub const DEFAULT_INTEGRATOR: &str = "gausslegendre";

pub fn builtin() -> Registry<Arc<dyn PathIntegrator>> {
    let mut reg: Registry<Arc<dyn PathIntegrator>> = Registry::new("integration method");
    let rules: [Arc<dyn PathIntegrator>; 5] = [
        Arc::new(GaussLegendre),
        Arc::new(RiemannRule(Riemann::Left)),
        Arc::new(RiemannRule(Riemann::Right)),
        Arc::new(RiemannRule(Riemann::Middle)),
        Arc::new(RiemannRule(Riemann::Trapezoid)),
    ];
    for r in rules {
        reg.register(r.name(), r).expect("unique");
    }
    reg
}
