//! Small quadrature toolbox: Gauss–Legendre rules, composite rules on an
//! interval and cumulative integration on uniformly spaced samples.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    assert!(order >= 1);
    let n = order;
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule.reverse();
    rule
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Choice of composite rule for integrals over a time interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// One midpoint per panel.
    Midpoint,
    /// `order` Gauss–Legendre points per panel.
    GaussLegendre { order: usize },
}

/// Nodes and weights of a composite rule on `[a, b]` with `panels` equal
/// panels. For `b < a` the weights are negative, so that the rule integrates
/// from `a` to `b`.
pub fn composite_rule(rule: QuadratureRule, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    if panels == 0 || a == b {
        return Vec::new();
    }
    let h = (b - a) / panels as f64;
    match rule {
        QuadratureRule::Midpoint => (0..panels)
            .map(|m| (a + (m as f64 + 0.5) * h, h))
            .collect(),
        QuadratureRule::GaussLegendre { order } => {
            let base = gauss_legendre(order);
            let mut out = Vec::with_capacity(panels * order);
            for m in 0..panels {
                let left = a + m as f64 * h;
                for &(x, w) in &base {
                    out.push((left + 0.5 * h * (x + 1.0), 0.5 * h * w));
                }
            }
            out
        }
    }
}

/// Cumulative integral `∫_{ξ_0}^{ξ_i} f` of samples on a uniform grid of step
/// `h`, fourth order accurate. Interior intervals use the four-point panel
/// formula `h/24 (-f₋₁ + 13f₀ + 13f₁ - f₂)`; the two boundary intervals use
/// the one-sided cubic formula.
pub fn cumulative_uniform<T>(samples: &[T], h: f64) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = samples.len();
    let mut out = vec![T::default(); n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + (samples[i - 1] + samples[i]) * (0.5 * h);
        }
        return out;
    }
    let f = samples;
    let c = h / 24.0;
    for i in 0..n - 1 {
        let panel = if i == 0 {
            f[0] * (9.0 * c) + f[1] * (19.0 * c) + f[2] * (-5.0 * c) + f[3] * c
        } else if i == n - 2 {
            f[n - 1] * (9.0 * c) + f[n - 2] * (19.0 * c) + f[n - 3] * (-5.0 * c) + f[n - 4] * c
        } else {
            f[i - 1] * (-c) + f[i] * (13.0 * c) + f[i + 1] * (13.0 * c) + f[i + 2] * (-c)
        };
        out[i + 1] = out[i] + panel;
    }
    out
}

/// Fourth order central first derivative of uniform samples (one-sided
/// five-point stencils at the two ends on each side).
pub fn derivative_uniform<T>(samples: &[T], h: f64) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = samples.len();
    assert!(n >= 5, "need at least five samples");
    let f = samples;
    let inv = 1.0 / (12.0 * h);
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (f[i - 2] + f[i - 1] * -8.0 + f[i + 1] * 8.0 + f[i + 2] * -1.0) * inv
            } else if i < 2 {
                let s = &f[i..];
                let base = if i == 0 {
                    s[0] * -25.0 + s[1] * 48.0 + s[2] * -36.0 + s[3] * 16.0 + s[4] * -3.0
                } else {
                    f[0] * -3.0 + f[1] * -10.0 + f[2] * 18.0 + f[3] * -6.0 + f[4] * 1.0
                };
                base * inv
            } else if i + 2 == n {
                (f[n - 5] * -1.0 + f[n - 4] * 6.0 + f[n - 3] * -18.0 + f[n - 2] * 10.0 + f[n - 1] * 3.0)
                    * inv
            } else {
                (f[n - 5] * 3.0 + f[n - 4] * -16.0 + f[n - 3] * 36.0 + f[n - 2] * -48.0 + f[n - 1] * 25.0)
                    * inv
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for order in 1..=12 {
            let rule = gauss_legendre(order);
            let wsum: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert!((wsum - 2.0).abs() < 1e-13);
            for p in 0..(2 * order) {
                let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
                let approx: f64 = rule.iter().map(|&(x, w)| w * x.powi(p as i32)).sum();
                assert!((approx - exact).abs() < 1e-13, "order {order}, p {p}");
            }
        }
    }

    #[test]
    fn composite_rules_on_reversed_interval() {
        for rule in [QuadratureRule::Midpoint, QuadratureRule::GaussLegendre { order: 4 }] {
            let forward: f64 = composite_rule(rule, 0.0, 2.0, 400)
                .iter()
                .map(|&(s, w)| w * s.cos())
                .sum();
            let backward: f64 = composite_rule(rule, 2.0, 0.0, 400)
                .iter()
                .map(|&(s, w)| w * s.cos())
                .sum();
            assert!((forward - 2f64.sin()).abs() < 1e-5);
            assert!((forward + backward).abs() < 1e-13);
        }
        assert!(composite_rule(QuadratureRule::Midpoint, 1.0, 1.0, 5).is_empty());
    }

    #[test]
    fn cumulative_is_fourth_order() {
        let err = |n: usize| {
            let h = 2.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|i| (3.0 * i as f64 * h).cos()).collect();
            let q = cumulative_uniform(&f, h);
            q.iter()
                .enumerate()
                .map(|(i, &v)| (v - (3.0 * i as f64 * h).sin() / 3.0).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(101) / err(201);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn derivative_is_fourth_order() {
        let err = |n: usize| {
            let h = 2.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|i| (2.0 * i as f64 * h).sin()).collect();
            derivative_uniform(&f, h)
                .iter()
                .enumerate()
                .map(|(i, &d)| (d - 2.0 * (2.0 * i as f64 * h).cos()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(101) / err(201);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
