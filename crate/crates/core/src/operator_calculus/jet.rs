//! Truncated multivariate Taylor polynomials in the three Euler angles.
//!
//! A jet of order N stores the Taylor coefficients `f_α / α!` for every
//! multi-index α with |α| ≤ N. Arithmetic is exact on the truncated
//! polynomial ring, so derivatives up to order N come out to rounding.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::kinematics::AngleScalar;

/// Highest supported jet order. Ten lowerings of a spin-5/2 harmonic need 10.
pub const MAX_ORDER: usize = 16;

pub(crate) struct Layout {
    order: usize,
    monomials: Vec<[u8; 3]>,
    index: Vec<u16>,
    /// (lhs, rhs, out) for every pair of monomials whose degrees sum to ≤ order.
    products: Vec<(u16, u16, u16)>,
}

const UNSET: u16 = u16::MAX;

impl Layout {
    fn build(order: usize) -> Self {
        let mut monomials = Vec::new();
        for deg in 0..=order {
            for i in (0..=deg).rev() {
                for j in (0..=deg - i).rev() {
                    monomials.push([i as u8, j as u8, (deg - i - j) as u8]);
                }
            }
        }
        let side = order + 1;
        let mut index = vec![UNSET; side * side * side];
        for (n, m) in monomials.iter().enumerate() {
            index[(m[0] as usize * side + m[1] as usize) * side + m[2] as usize] = n as u16;
        }
        let mut products = Vec::new();
        for (a, ma) in monomials.iter().enumerate() {
            let da: usize = ma.iter().map(|&v| v as usize).sum();
            for (b, mb) in monomials.iter().enumerate() {
                let db: usize = mb.iter().map(|&v| v as usize).sum();
                if da + db <= order {
                    let o = index[((ma[0] + mb[0]) as usize * side + (ma[1] + mb[1]) as usize)
                        * side
                        + (ma[2] + mb[2]) as usize];
                    products.push((a as u16, b as u16, o));
                }
            }
        }
        Self {
            order,
            monomials,
            index,
            products,
        }
    }

    fn get(order: usize) -> &'static Layout {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        static LAYOUTS: [OnceLock<Layout>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];
        LAYOUTS[order].get_or_init(|| Layout::build(order))
    }

    fn lookup(&self, m: [u8; 3]) -> Option<usize> {
        let side = self.order + 1;
        if m.iter().map(|&v| v as usize).sum::<usize>() > self.order {
            return None;
        }
        let i = self.index[(m[0] as usize * side + m[1] as usize) * side + m[2] as usize];
        (i != UNSET).then_some(i as usize)
    }

    fn len(&self) -> usize {
        self.monomials.len()
    }
}

#[derive(Clone)]
pub struct Jet {
    layout: &'static Layout,
    coeffs: Vec<Complex64>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order())
            .field("value", &self.value())
            .finish()
    }
}

impl Jet {
    pub fn constant(order: usize, c: Complex64) -> Self {
        let layout = Layout::get(order);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); layout.len()];
        coeffs[0] = c;
        Self { layout, coeffs }
    }

    /// The coordinate function α^axis expanded about `value`.
    pub fn variable(order: usize, axis: usize, value: f64) -> Self {
        let mut j = Self::constant(order, Complex64::new(value, 0.0));
        if order > 0 {
            let mut m = [0u8; 3];
            m[axis] = 1;
            let i = j.layout.lookup(m).unwrap();
            j.coeffs[i] = Complex64::new(1.0, 0.0);
        }
        j
    }

    /// Seeds for the three angles at a point.
    pub fn seeds(order: usize, point: [f64; 3]) -> [Jet; 3] {
        [
            Self::variable(order, 0, point[0]),
            Self::variable(order, 1, point[1]),
            Self::variable(order, 2, point[2]),
        ]
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    fn taylor(&self, m: [u8; 3]) -> Complex64 {
        self.layout
            .lookup(m)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    /// The partial derivative ∂^|m| f / ∂α^m at the expansion point, or zero
    /// when |m| exceeds the order.
    pub fn partial(&self, m: [u8; 3]) -> Complex64 {
        let fact: f64 = m.iter().map(|&k| (1..=k as u32).product::<u32>() as f64).product();
        self.taylor(m) * fact
    }

    pub fn grad(&self) -> [Complex64; 3] {
        [
            self.partial([1, 0, 0]),
            self.partial([0, 1, 0]),
            self.partial([0, 0, 1]),
        ]
    }

    pub fn hess(&self) -> [[Complex64; 3]; 3] {
        let mut h = [[Complex64::default(); 3]; 3];
        for (b, row) in h.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                let mut m = [0u8; 3];
                m[b] += 1;
                m[c] += 1;
                *v = self.partial(m);
            }
        }
        h
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let layout = Layout::get(order);
        // monomials are sorted by degree, so the lower layout is a prefix
        Jet {
            layout,
            coeffs: self.coeffs[..layout.len()].to_vec(),
        }
    }

    /// ∂f/∂α^axis as a jet one order lower.
    pub fn derivative(&self, axis: usize) -> Jet {
        assert!(self.order() > 0, "cannot differentiate an order-0 jet");
        let layout = Layout::get(self.order() - 1);
        let coeffs = layout
            .monomials
            .iter()
            .map(|m| {
                let mut up = *m;
                up[axis] += 1;
                self.taylor(up) * f64::from(up[axis])
            })
            .collect();
        Jet { layout, coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Jet {
        Jet {
            layout: self.layout,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    fn aligned(a: &Jet, b: &Jet) -> (Jet, Jet) {
        let n = a.order().min(b.order());
        (a.truncate(n), b.truncate(n))
    }

    fn mul_ref(&self, rhs: &Jet) -> Jet {
        if self.order() != rhs.order() {
            let (a, b) = Self::aligned(self, rhs);
            return a.mul_ref(&b);
        }
        let mut out = vec![Complex64::default(); self.layout.len()];
        for &(a, b, o) in &self.layout.products {
            out[o as usize] += self.coeffs[a as usize] * rhs.coeffs[b as usize];
        }
        Jet {
            layout: self.layout,
            coeffs: out,
        }
    }

    fn add_ref(&self, rhs: &Jet, sign: f64) -> Jet {
        if self.order() != rhs.order() {
            let (a, b) = Self::aligned(self, rhs);
            return a.add_ref(&b, sign);
        }
        Jet {
            layout: self.layout,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(x, y)| x + y * sign)
                .collect(),
        }
    }

    /// f(x₀ + h) = Σ f⁽ᵏ⁾(x₀)/k! hᵏ for a univariate function given its
    /// derivatives at the jet's value; `derivs(k)` returns f⁽ᵏ⁾(x₀).
    fn compose(&self, derivs: impl Fn(usize) -> Complex64) -> Jet {
        let n = self.order();
        let mut h = self.clone();
        h.coeffs[0] = Complex64::default();
        let mut out = Jet::constant(n, derivs(0));
        let mut power = Jet::constant(n, Complex64::new(1.0, 0.0));
        let mut fact = 1.0;
        for k in 1..=n {
            power = power.mul_ref(&h);
            fact *= k as f64;
            out = out.add_ref(&power.scale(derivs(k) / fact), 1.0);
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(|_| e)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose(|k| match k % 4 {
            0 => s,
            1 => c,
            2 => -s,
            _ => -c,
        })
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose(|k| match k % 4 {
            0 => c,
            1 => -s,
            2 => -c,
            _ => s,
        })
    }

    pub fn recip(&self) -> Jet {
        let x0 = self.value();
        // d^k/dx^k x^{-1} = (-1)^k k! x^{-k-1}
        self.compose(|k| {
            let fact: f64 = (1..=k).map(|v| v as f64).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            x0.powi(-(k as i32) - 1) * (sign * fact)
        })
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut out = Jet::constant(self.order(), Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.add_ref(&rhs, 1.0)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.add_ref(&rhs, -1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs)
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &'a Jet) -> Jet {
        self.mul_ref(rhs)
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &'a Jet) -> Jet {
        self.add_ref(rhs, 1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl AngleScalar for Jet {
    fn sin(&self) -> Self {
        Jet::sin(self)
    }
    fn cos(&self) -> Self {
        Jet::cos(self)
    }
    fn recip(&self) -> Self {
        Jet::recip(self)
    }
    fn constant_like(&self, c: f64) -> Self {
        Jet::constant(self.order(), Complex64::new(c, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn layout_sizes() {
        for n in 0..=6 {
            assert_eq!(Layout::get(n).len(), (n + 1) * (n + 2) * (n + 3) / 6);
        }
    }

    #[test]
    fn polynomial_derivatives_are_exact() {
        // f = x² y + 3 z³ at (1, 2, -1)
        let [x, y, z] = Jet::seeds(3, [1.0, 2.0, -1.0]);
        let f = x.powi(2) * y + z.powi(3).scale(c(3.0));
        assert_eq!(f.value(), c(2.0 - 3.0));
        assert_eq!(f.grad(), [c(4.0), c(1.0), c(9.0)]);
        let h = f.hess();
        assert_eq!(h[0][0], c(4.0));
        assert_eq!(h[0][1], c(2.0));
        assert_eq!(h[1][0], c(2.0));
        assert_eq!(h[2][2], c(-18.0));
        assert_eq!(f.partial([0, 0, 3]), c(18.0));
        assert_eq!(f.partial([2, 1, 0]), c(2.0));
    }

    #[test]
    fn transcendental_derivatives() {
        let [x, _, _] = Jet::seeds(5, [0.7, 0.0, 0.0]);
        let s = x.sin();
        let e = x.scale(Complex64::new(0.0, 1.5)).exp();
        let r = x.recip();
        for k in 0..=5u8 {
            let ds = match k % 4 {
                0 => 0.7f64.sin(),
                1 => 0.7f64.cos(),
                2 => -0.7f64.sin(),
                _ => -0.7f64.cos(),
            };
            assert!((s.partial([k, 0, 0]) - c(ds)).norm() < 1e-13);
            let de = Complex64::new(0.0, 1.5).powi(k as i32) * Complex64::new(0.0, 1.05).exp();
            assert!((e.partial([k, 0, 0]) - de).norm() < 1e-12);
            let fact: f64 = (1..=k as u32).map(f64::from).product();
            let dr = (-1f64).powi(k as i32) * fact * 0.7f64.powi(-(k as i32) - 1);
            assert!((r.partial([k, 0, 0]).re - dr).abs() < 1e-10 * dr.abs().max(1.0));
        }
    }

    #[test]
    fn derivative_lowers_order() {
        let [x, y, _] = Jet::seeds(2, [0.3, 0.4, 0.0]);
        let f = (x * y).sin();
        let d = f.derivative(0);
        assert_eq!(d.order(), 1);
        // ∂x sin(xy) = y cos(xy); ∂y of that = cos(xy) - xy sin(xy)
        let xy = 0.12f64;
        assert!((d.value() - c(0.4 * xy.cos())).norm() < 1e-15);
        assert!((d.grad()[1] - c(xy.cos() - xy * xy.sin())).norm() < 1e-15);
        assert!((f.hess()[0][1] - d.grad()[1]).norm() < 1e-15);
    }

    #[test]
    fn mixed_orders_truncate() {
        let a = Jet::variable(3, 0, 1.0);
        let b = Jet::variable(1, 0, 2.0);
        assert_eq!((a.clone() * b.clone()).order(), 1);
        assert_eq!((a + b).order(), 1);
    }
}
