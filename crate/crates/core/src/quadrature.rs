//! Gauss–Legendre rules, an adaptive Gauss integrator, and the azimuthal
//! rule used for inner products on the rotation group.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, refined by Newton on P_n
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
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫_a^b f(x) dx.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
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

/// Adaptive Gauss–Legendre: bisect until the 10-point estimate on an
/// interval agrees with the sum over its two halves.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let rule = GaussLegendre::new(10);
    let whole = rule.integrate(a, b, &f);
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    fn recurse<F: Fn(f64) -> f64>(
        rule: &GaussLegendre,
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        abs_tol: f64,
        floor: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = rule.integrate(a, m, f);
        let right = rule.integrate(m, b, f);
        let refined = left + right;
        if (refined - whole).abs() <= abs_tol.max(floor) || depth >= 40 {
            refined
        } else {
            recurse(rule, f, a, m, left, 0.5 * abs_tol, floor, depth + 1)
                + recurse(rule, f, m, b, right, 0.5 * abs_tol, floor, depth + 1)
        }
    }
    // below this the comparison only measures rounding
    let floor = 64.0 * f64::EPSILON * scale;
    recurse(&rule, &f, a, b, whole, rel_tol * scale, floor, 0)
}

/// Rule for ∫_0^{2π} h(α) dα where h contains half-integer frequencies.
///
/// Samples lie on a uniform grid over the 4π period of h; the weights apply
/// the exact window integral of every resolvable mode e^{ikα/2}, so the
/// rule is exact for |k| < n/2 even when h is not 2π-periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct AzimuthalRule {
    pub points: Vec<f64>,
    pub weights: Vec<Complex64>,
}

impl AzimuthalRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2 && n.is_multiple_of(2), "azimuthal rule needs an even point count");
        let period = 2.0 * TAU;
        let points: Vec<f64> = (0..n).map(|j| period * j as f64 / n as f64).collect();
        let half = (n / 2) as i64;
        let window = |k: i64| -> Complex64 {
            // ∫_0^{2π} e^{ikα/2} dα
            if k == 0 {
                Complex64::new(TAU, 0.0)
            } else if k % 2 == 0 {
                Complex64::default()
            } else {
                Complex64::new(0.0, 4.0 / k as f64)
            }
        };
        let weights = points
            .iter()
            .map(|&a| {
                let mut w = Complex64::default();
                for k in -half..half {
                    // the Nyquist mode is split between ±n/2
                    let wk = if k == -half {
                        (window(k) + window(-k)) * 0.5
                    } else {
                        window(k)
                    };
                    w += wk * Complex64::from_polar(1.0, -(k as f64) * a / 2.0);
                }
                w / n as f64
            })
            .collect();
        Self { points, weights }
    }

    /// Largest |frequency| (in units of 1/rad) integrated exactly.
    pub fn band_capacity(&self) -> f64 {
        (self.points.len() / 2) as f64 / 2.0 - 0.5
    }
}

/// Tensor-product rule over α¹ ∈ (0, 2π), α² ∈ (0, π) with weight sin α²,
/// α³ ∈ (0, 2π). The polar factor is Gauss–Legendre in α² itself: the
/// integrands are trigonometric polynomials in α²/2, which are smooth on
/// [0, π] even when they are not polynomials in cos α².
#[derive(Debug, Clone, PartialEq)]
pub struct GroupQuadrature {
    pub azimuthal: AzimuthalRule,
    pub polar: GaussLegendre,
    band_limit: f64,
}

pub const DEFAULT_POLAR_NODES: usize = 32;
pub const DEFAULT_AZIMUTHAL_POINTS: usize = 64;
pub const DEFAULT_BAND_LIMIT: f64 = 6.0;

impl Default for GroupQuadrature {
    fn default() -> Self {
        Self::new(DEFAULT_AZIMUTHAL_POINTS, DEFAULT_POLAR_NODES, DEFAULT_BAND_LIMIT)
            .expect("default grid resolves default band limit")
    }
}

impl GroupQuadrature {
    /// `band_limit` bounds the azimuthal frequency content of integrands
    /// (products f*·g) the caller intends to integrate.
    pub fn new(azimuthal_points: usize, polar_nodes: usize, band_limit: f64) -> Result<Self> {
        let azimuthal = AzimuthalRule::new(azimuthal_points);
        let capacity = azimuthal.band_capacity();
        if band_limit > capacity {
            return Err(Error::QuadratureUnderresolved {
                band_limit,
                capacity,
            });
        }
        Ok(Self {
            azimuthal,
            polar: GaussLegendre::new(polar_nodes),
            band_limit,
        })
    }

    pub fn band_limit(&self) -> f64 {
        self.band_limit
    }

    pub fn len(&self) -> usize {
        self.azimuthal.points.len().pow(2) * self.polar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visit every node as ((α¹, α², α³), weight).
    pub fn nodes(&self) -> impl Iterator<Item = ([f64; 3], Complex64)> + '_ {
        let az = &self.azimuthal;
        az.points.iter().zip(&az.weights).flat_map(move |(&a1, &w1)| {
            self.polar
                .nodes
                .iter()
                .zip(&self.polar.weights)
                .flat_map(move |(&x, &wx)| {
                    az.points
                        .iter()
                        .zip(&az.weights)
                        .map(move |(&a3, &w3)| {
                            let beta = FRAC_PI_2 * (x + 1.0);
                            ([a1, beta, a3], w1 * w3 * (wx * FRAC_PI_2 * beta.sin()))
                        })
                })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(8);
        for k in 0..16 {
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(k));
            let expect = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((got - expect).abs() < 1e-14, "k={k}: {got}");
        }
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_odd_count() {
        let rule = GaussLegendre::new(5);
        assert_eq!(rule.nodes[2], 0.0);
        assert!((rule.integrate(0.0, 1.0, |x| x.powi(9)) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let got = integrate_adaptive(|x| (x - 0.3).abs().sqrt(), 0.0, 1.0, 1e-12);
        let expect = (2.0 / 3.0) * (0.3f64.powf(1.5) + 0.7f64.powf(1.5));
        assert!((got - expect).abs() < 1e-10);
    }

    #[test]
    fn azimuthal_rule_integrates_half_integer_modes() {
        let rule = AzimuthalRule::new(64);
        for k in -20i32..=20 {
            let got: Complex64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(&a, &w)| w * Complex64::from_polar(1.0, k as f64 * a / 2.0))
                .sum();
            let expect = if k == 0 {
                Complex64::new(TAU, 0.0)
            } else if k % 2 == 0 {
                Complex64::default()
            } else {
                // (e^{iπk} − 1)/(ik/2)
                Complex64::new(0.0, 4.0 / k as f64)
            };
            assert!((got - expect).norm() < 1e-12, "k={k}: {got}");
        }
    }

    #[test]
    fn underresolved_band_is_rejected() {
        assert!(matches!(
            GroupQuadrature::new(16, 8, 10.0),
            Err(Error::QuadratureUnderresolved { .. })
        ));
        assert!(GroupQuadrature::new(64, 8, 10.0).is_ok());
    }

    #[test]
    fn group_volume() {
        let q = GroupQuadrature::new(8, 16, 1.0).unwrap();
        let vol: Complex64 = q.nodes().map(|(_, w)| w).sum();
        // 2π · 2 · 2π
        assert!((vol - Complex64::new(8.0 * PI * PI, 0.0)).norm() < 1e-12);
    }
}
