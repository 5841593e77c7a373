//! Smooth complex functions on the Euler-angle domain, built from a small
//! constructor algebra and evaluated to any derivative order through jets.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::jet::Jet;
use crate::error::Result;
use crate::kinematics::{
    a_inv_entries, b_inv_entries, rotation_entries, EulerAngles, DEFAULT_SINGULAR_THRESHOLD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    SpaceFixed,
    BodyFixed,
}

/// The sign σ of [S_i, S_j] = σ iħ ε_ijk S_k in this frame.
impl Frame {
    pub fn commutator_sign(self) -> f64 {
        match self {
            Frame::SpaceFixed => 1.0,
            Frame::BodyFixed => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FirstOrderOp {
    /// Cartesian component `axis` (0-based).
    Spin { axis: usize, frame: Frame },
    /// Raising (`true`) or lowering ladder.
    Ladder { raise: bool, frame: Frame },
}

pub(crate) enum Node {
    Const(Complex64),
    Angle(usize),
    Sum(Vec<AngleFunction>),
    Product(Vec<AngleFunction>),
    Scale(Complex64, AngleFunction),
    Exp(AngleFunction),
    Sin(AngleFunction),
    Cos(AngleFunction),
    Powi(AngleFunction, u32),
    /// Body-frame component Σ_k R_ik B_k of a uniform field.
    RotatedField { field: [f64; 3], component: usize },
    FirstOrder {
        op: FirstOrderOp,
        hbar: f64,
        threshold: f64,
        inner: AngleFunction,
    },
    /// The explicit second-order Casimir operator in Euler angles.
    Casimir {
        hbar: f64,
        threshold: f64,
        inner: AngleFunction,
    },
}

/// A cheaply clonable handle to a function of the three Euler angles.
#[derive(Clone)]
pub struct AngleFunction(pub(crate) Arc<Node>);

impl std::fmt::Debug for AngleFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match &*self.0 {
            Node::Const(c) => return write!(f, "Const({c})"),
            Node::Angle(b) => return write!(f, "alpha{}", b + 1),
            Node::Sum(_) => "Sum",
            Node::Product(_) => "Product",
            Node::Scale(..) => "Scale",
            Node::Exp(_) => "Exp",
            Node::Sin(_) => "Sin",
            Node::Cos(_) => "Cos",
            Node::Powi(..) => "Powi",
            Node::RotatedField { .. } => "RotatedField",
            Node::FirstOrder { .. } => "FirstOrder",
            Node::Casimir { .. } => "Casimir",
        };
        f.write_str(name)
    }
}

fn i_unit() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

impl AngleFunction {
    pub(crate) fn from_node(node: Node) -> Self {
        Self(Arc::new(node))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_node(Node::Const(c))
    }

    pub fn real(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    /// The coordinate α^(axis+1).
    pub fn angle(axis: usize) -> Self {
        assert!(axis < 3, "angle index {axis} out of range");
        Self::from_node(Node::Angle(axis))
    }

    /// exp(i·p·α^(axis+1)).
    pub fn phase(p: f64, axis: usize) -> Self {
        Self::angle(axis).scale(Complex64::new(0.0, p)).exp()
    }

    /// cos(α²/2) and sin(α²/2), the building blocks of the harmonics.
    pub fn cos_half_polar() -> Self {
        Self::angle(1).scale(Complex64::new(0.5, 0.0)).cos()
    }

    pub fn sin_half_polar() -> Self {
        Self::angle(1).scale(Complex64::new(0.5, 0.0)).sin()
    }

    pub fn rotated_field(field: [f64; 3], component: usize) -> Self {
        Self::from_node(Node::RotatedField { field, component })
    }

    pub fn sum(terms: Vec<AngleFunction>) -> Self {
        Self::from_node(Node::Sum(terms))
    }

    pub fn product(factors: Vec<AngleFunction>) -> Self {
        Self::from_node(Node::Product(factors))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_node(Node::Scale(c, self.clone()))
    }

    pub fn exp(&self) -> Self {
        Self::from_node(Node::Exp(self.clone()))
    }

    pub fn sin(&self) -> Self {
        Self::from_node(Node::Sin(self.clone()))
    }

    pub fn cos(&self) -> Self {
        Self::from_node(Node::Cos(self.clone()))
    }

    pub fn powi(&self, n: u32) -> Self {
        Self::from_node(Node::Powi(self.clone(), n))
    }

    /// Evaluate value and all partial derivatives up to `order` at a point.
    pub fn jet(&self, at: &EulerAngles, order: usize) -> Result<Jet> {
        let seeds = Jet::seeds(order, at.to_array());
        self.eval_jet(at, &seeds, order)
    }

    /// Value plus first and second partials.
    pub fn jet2(&self, at: &EulerAngles) -> Result<Jet> {
        self.jet(at, 2)
    }

    fn eval_jet(&self, at: &EulerAngles, seeds: &[Jet; 3], order: usize) -> Result<Jet> {
        let seeds_at = |n: usize| -> [Jet; 3] {
            if n == seeds[0].order() {
                seeds.clone()
            } else {
                Jet::seeds(n, at.to_array())
            }
        };
        Ok(match &*self.0 {
            Node::Const(c) => Jet::constant(order, *c),
            Node::Angle(b) => seeds[*b].truncate(order),
            Node::Sum(terms) => {
                let mut acc = Jet::constant(order, Complex64::default());
                for t in terms {
                    acc = acc + t.eval_jet(at, seeds, order)?;
                }
                acc
            }
            Node::Product(factors) => {
                let mut acc = Jet::constant(order, Complex64::new(1.0, 0.0));
                for f in factors {
                    acc = acc * f.eval_jet(at, seeds, order)?;
                }
                acc
            }
            Node::Scale(c, f) => f.eval_jet(at, seeds, order)?.scale(*c),
            Node::Exp(f) => f.eval_jet(at, seeds, order)?.exp(),
            Node::Sin(f) => f.eval_jet(at, seeds, order)?.sin(),
            Node::Cos(f) => f.eval_jet(at, seeds, order)?.cos(),
            Node::Powi(f, n) => f.eval_jet(at, seeds, order)?.powi(*n),
            Node::RotatedField { field, component } => {
                let [a1, a2, a3] = seeds_at(order);
                let r = rotation_entries(&a1, &a2, &a3);
                let mut acc = Jet::constant(order, Complex64::default());
                for (k, bk) in field.iter().enumerate() {
                    acc = acc + r[*component][k].scale(Complex64::new(*bk, 0.0));
                }
                acc
            }
            Node::FirstOrder {
                op,
                hbar,
                threshold,
                inner,
            } => {
                at.check_nonsingular(*threshold)?;
                let f = inner.jet(at, order + 1)?;
                let [a1, a2, a3] = seeds_at(order);
                let coeffs = first_order_coefficients(*op, &a1, &a2, &a3);
                let mut acc = Jet::constant(order, Complex64::default());
                for (b, cb) in coeffs.iter().enumerate() {
                    acc = acc + cb * &f.derivative(b);
                }
                acc.scale(Complex64::new(0.0, -hbar))
            }
            Node::Casimir {
                hbar,
                threshold,
                inner,
            } => {
                at.check_nonsingular(*threshold)?;
                let f = inner.jet(at, order + 2)?;
                let [_, a2, _] = seeds_at(order);
                let csc = a2.sin().recip();
                let cos2 = a2.cos();
                let cot = cos2.clone() * csc.clone();
                let d1 = f.derivative(0);
                let d2 = f.derivative(1);
                let d3 = f.derivative(2);
                let d22 = d2.derivative(1);
                let d11 = d1.derivative(0);
                let d33 = d3.derivative(2);
                let d13 = d1.derivative(2);
                let azimuthal =
                    d11 + d33 - (cos2 * d13).scale(Complex64::new(2.0, 0.0));
                let polar = d22 + cot * d2.truncate(order);
                (polar + csc.clone() * csc * azimuthal).scale(Complex64::new(-hbar * hbar, 0.0))
            }
        })
    }

    /// Value only. Differential operator nodes fall back to jet evaluation.
    pub fn value(&self, at: &EulerAngles) -> Result<Complex64> {
        Ok(match &*self.0 {
            Node::Const(c) => *c,
            Node::Angle(b) => Complex64::new(at.to_array()[*b], 0.0),
            Node::Sum(terms) => {
                let mut acc = Complex64::default();
                for t in terms {
                    acc += t.value(at)?;
                }
                acc
            }
            Node::Product(factors) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in factors {
                    acc *= f.value(at)?;
                }
                acc
            }
            Node::Scale(c, f) => c * f.value(at)?,
            Node::Exp(f) => f.value(at)?.exp(),
            Node::Sin(f) => f.value(at)?.sin(),
            Node::Cos(f) => f.value(at)?.cos(),
            Node::Powi(f, n) => f.value(at)?.powu(*n),
            Node::RotatedField { field, component } => {
                let r = rotation_entries(&at.alpha1, &at.alpha2, &at.alpha3);
                let v: f64 = (0..3).map(|k| r[*component][k] * field[k]).sum();
                Complex64::new(v, 0.0)
            }
            Node::FirstOrder { .. } | Node::Casimir { .. } => self.jet(at, 0)?.value(),
        })
    }
}

/// Coefficients c_b of the operator −iħ Σ_b c_b ∂_b.
fn first_order_coefficients(op: FirstOrderOp, a1: &Jet, a2: &Jet, a3: &Jet) -> [Jet; 3] {
    let column = |m: &[[Jet; 3]; 3], i: usize| [m[0][i].clone(), m[1][i].clone(), m[2][i].clone()];
    match op {
        FirstOrderOp::Spin { axis, frame } => {
            let m = match frame {
                Frame::SpaceFixed => a_inv_entries(a1, a2, a3),
                Frame::BodyFixed => b_inv_entries(a1, a2, a3),
            };
            column(&m, axis)
        }
        FirstOrderOp::Ladder { raise, frame } => {
            // space: S₁ ± iS₂; body: S̄₁ ∓ iS̄₂
            let (m, sign) = match frame {
                Frame::SpaceFixed => (a_inv_entries(a1, a2, a3), if raise { 1.0 } else { -1.0 }),
                Frame::BodyFixed => (b_inv_entries(a1, a2, a3), if raise { -1.0 } else { 1.0 }),
            };
            let c1 = column(&m, 0);
            let c2 = column(&m, 1);
            let [x0, x1, x2] = c1;
            let [y0, y1, y2] = c2;
            let s = i_unit() * sign;
            [x0 + y0.scale(s), x1 + y1.scale(s), x2 + y2.scale(s)]
        }
    }
}

pub(crate) fn first_order(op: FirstOrderOp, hbar: f64, threshold: f64, f: &AngleFunction) -> AngleFunction {
    AngleFunction::from_node(Node::FirstOrder {
        op,
        hbar,
        threshold,
        inner: f.clone(),
    })
}

pub(crate) fn casimir(hbar: f64, threshold: f64, f: &AngleFunction) -> AngleFunction {
    AngleFunction::from_node(Node::Casimir {
        hbar,
        threshold,
        inner: f.clone(),
    })
}

impl Add for AngleFunction {
    type Output = AngleFunction;
    fn add(self, rhs: AngleFunction) -> AngleFunction {
        AngleFunction::sum(vec![self, rhs])
    }
}

impl Sub for AngleFunction {
    type Output = AngleFunction;
    fn sub(self, rhs: AngleFunction) -> AngleFunction {
        AngleFunction::sum(vec![self, -rhs])
    }
}

impl Mul for AngleFunction {
    type Output = AngleFunction;
    fn mul(self, rhs: AngleFunction) -> AngleFunction {
        AngleFunction::product(vec![self, rhs])
    }
}

impl Neg for AngleFunction {
    type Output = AngleFunction;
    fn neg(self) -> AngleFunction {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<AngleFunction> for Complex64 {
    type Output = AngleFunction;
    fn mul(self, rhs: AngleFunction) -> AngleFunction {
        rhs.scale(self)
    }
}

/// Polar factor of the smooth test family, as a function of α²/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarFactor {
    One,
    Cos,
    Sin,
    CosSquared,
    SinCos,
}

impl PolarFactor {
    pub const ALL: [PolarFactor; 5] = [
        PolarFactor::One,
        PolarFactor::Cos,
        PolarFactor::Sin,
        PolarFactor::CosSquared,
        PolarFactor::SinCos,
    ];

    pub fn function(self) -> AngleFunction {
        let c = AngleFunction::cos_half_polar();
        let s = AngleFunction::sin_half_polar();
        match self {
            PolarFactor::One => AngleFunction::real(1.0),
            PolarFactor::Cos => c,
            PolarFactor::Sin => s,
            PolarFactor::CosSquared => c.powi(2),
            PolarFactor::SinCos => s * c,
        }
    }
}

/// exp(i p α¹) exp(i q α³) T(α²/2).
pub fn test_function(p: f64, q: f64, polar: PolarFactor) -> AngleFunction {
    AngleFunction::product(vec![
        AngleFunction::phase(p, 0),
        AngleFunction::phase(q, 2),
        polar.function(),
    ])
}

/// The 20-member smooth test family: azimuthal frequencies from
/// {0, ±1/2, ±1, ±3/2} in both parity sectors, every polar factor used.
pub fn test_family() -> Vec<AngleFunction> {
    const FREQS: [f64; 7] = [0.0, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5];
    (0..20)
        .map(|n| {
            let p = FREQS[n % 7];
            let q = FREQS[(3 * n + 1) % 7];
            let polar = PolarFactor::ALL[n % 5];
            test_function(p, q, polar)
        })
        .collect()
}

/// A dense trigonometric polynomial combining several family members;
/// used where a less structured test function is wanted.
pub fn mixed_test_function(weights: &[Complex64]) -> AngleFunction {
    let family = test_family();
    AngleFunction::sum(
        weights
            .iter()
            .zip(&family)
            .map(|(w, f)| f.scale(*w))
            .collect(),
    )
}

pub(crate) const DEFAULT_THRESHOLD: f64 = DEFAULT_SINGULAR_THRESHOLD;
