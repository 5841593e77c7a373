//! External electromagnetic fields evaluated at the centre of mass.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// The contract a user-supplied field must meet. `grad_b` returns the
/// matrix G with G[(j, k)] = ∂B_k/∂x_j; providers of non-uniform fields
/// must supply it.
pub trait FieldProvider: Send + Sync {
    fn scalar_potential(&self, x: &Vec3, t: f64) -> f64;
    fn vector_potential(&self, x: &Vec3, t: f64) -> Vec3;
    fn magnetic(&self, x: &Vec3, t: f64) -> Vec3;
    fn electric(&self, x: &Vec3, t: f64) -> Vec3;
    fn grad_b(&self, x: &Vec3, t: f64) -> Option<Matrix3<f64>>;
    /// Static fields make H conserved and Ṡ = g̃S×B exact.
    fn is_static(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldClass {
    UniformStatic,
    LinearStatic,
    UserSupplied,
}

#[derive(Clone)]
pub enum FieldConfig {
    /// Constant B and E, with A = ½B×x and φ = −E·x.
    UniformStatic { b: Vec3, e: Vec3 },
    /// B = b(x, −y, 0) from A = (0, 0, b x y); curl- and divergence-free.
    LinearStatic { b: f64 },
    UserSupplied(Arc<dyn FieldProvider>),
}

impl fmt::Debug for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UniformStatic { b, e } => f
                .debug_struct("UniformStatic")
                .field("b", &b.as_slice())
                .field("e", &e.as_slice())
                .finish(),
            Self::LinearStatic { b } => f.debug_struct("LinearStatic").field("b", b).finish(),
            Self::UserSupplied(_) => f.write_str("UserSupplied(..)"),
        }
    }
}

impl FieldConfig {
    pub fn zero() -> Self {
        Self::UniformStatic {
            b: Vec3::zeros(),
            e: Vec3::zeros(),
        }
    }

    pub fn uniform_magnetic(b: Vec3) -> Self {
        Self::UniformStatic { b, e: Vec3::zeros() }
    }

    pub fn class(&self) -> FieldClass {
        match self {
            Self::UniformStatic { .. } => FieldClass::UniformStatic,
            Self::LinearStatic { .. } => FieldClass::LinearStatic,
            Self::UserSupplied(_) => FieldClass::UserSupplied,
        }
    }

    pub fn is_static(&self) -> bool {
        match self {
            Self::UserSupplied(p) => p.is_static(),
            _ => true,
        }
    }

    pub fn scalar_potential(&self, x: &Vec3, t: f64) -> f64 {
        match self {
            Self::UniformStatic { e, .. } => -e.dot(x),
            Self::LinearStatic { .. } => 0.0,
            Self::UserSupplied(p) => p.scalar_potential(x, t),
        }
    }

    pub fn vector_potential(&self, x: &Vec3, t: f64) -> Vec3 {
        match self {
            Self::UniformStatic { b, .. } => 0.5 * b.cross(x),
            Self::LinearStatic { b } => Vec3::new(0.0, 0.0, b * x.x * x.y),
            Self::UserSupplied(p) => p.vector_potential(x, t),
        }
    }

    pub fn magnetic(&self, x: &Vec3, t: f64) -> Vec3 {
        match self {
            Self::UniformStatic { b, .. } => *b,
            Self::LinearStatic { b } => Vec3::new(b * x.x, -b * x.y, 0.0),
            Self::UserSupplied(p) => p.magnetic(x, t),
        }
    }

    pub fn electric(&self, x: &Vec3, t: f64) -> Vec3 {
        match self {
            Self::UniformStatic { e, .. } => *e,
            Self::LinearStatic { .. } => Vec3::zeros(),
            Self::UserSupplied(p) => p.electric(x, t),
        }
    }

    /// G[(j, k)] = ∂B_k/∂x_j.
    pub fn grad_b(&self, x: &Vec3, t: f64) -> Result<Matrix3<f64>> {
        match self {
            Self::UniformStatic { .. } => Ok(Matrix3::zeros()),
            Self::LinearStatic { b } => Ok(Matrix3::from_diagonal(&Vec3::new(*b, -b, 0.0))),
            Self::UserSupplied(p) => p.grad_b(x, t).ok_or(Error::FieldProviderMissingGradient),
        }
    }
}
