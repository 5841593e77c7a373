//! Rotation and kinematic matrices of the z-y-z Euler-angle parametrization.
//!
//! Angle rates map to angular velocity through two matrices,
//! `ω = (a) α̇` in the space-fixed frame and `ω̄ = (b) α̇` in the body-fixed
//! frame. The closed forms are written once, generically over
//! [`AngleScalar`], so the same expressions serve plain `f64` evaluation and
//! jet evaluation in the operator calculus.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat3 = Matrix3<f64>;

/// Default threshold on |sin α²| below which inverse matrices are refused.
pub const DEFAULT_SINGULAR_THRESHOLD: f64 = 1e-12;

/// The three rotation coordinates. Azimuthal angles are stored unreduced;
/// use [`crate::units::reduce_angle`] for display.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

impl EulerAngles {
    pub const fn new(alpha1: f64, alpha2: f64, alpha3: f64) -> Self {
        Self {
            alpha1,
            alpha2,
            alpha3,
        }
    }

    /// Builds a physical configuration; the polar angle must lie in [0, π].
    pub fn physical(alpha1: f64, alpha2: f64, alpha3: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&alpha2) {
            return Err(Error::InvalidParameter(format!(
                "polar angle {alpha2} outside [0, pi]"
            )));
        }
        Ok(Self::new(alpha1, alpha2, alpha3))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.alpha1, self.alpha2, self.alpha3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn sin_polar(&self) -> f64 {
        self.alpha2.sin()
    }

    pub fn check_nonsingular(&self, threshold: f64) -> Result<()> {
        let s = self.alpha2.sin();
        if s.abs() < threshold {
            Err(Error::SingularOrientation {
                sin_polar: s.abs(),
                threshold,
            })
        } else {
            Ok(())
        }
    }
}

/// Scalar type the closed-form matrix entries can be evaluated over.
pub trait AngleScalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn recip(&self) -> Self;
    /// A constant of the same kind (same jet order, for jets).
    fn constant_like(&self, c: f64) -> Self;
}

impl AngleScalar for f64 {
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn constant_like(&self, c: f64) -> Self {
        c
    }
}

pub type Entries<T> = [[T; 3]; 3];

struct Trig<T> {
    s1: T,
    c1: T,
    s2: T,
    c2: T,
    s3: T,
    c3: T,
}

impl<T: AngleScalar> Trig<T> {
    fn new(a1: &T, a2: &T, a3: &T) -> Self {
        Self {
            s1: a1.sin(),
            c1: a1.cos(),
            s2: a2.sin(),
            c2: a2.cos(),
            s3: a3.sin(),
            c3: a3.cos(),
        }
    }
}

/// R = R^z(α³) R^y(α²) R^z(α¹), rows are the body-fixed basis vectors.
pub fn rotation_entries<T: AngleScalar>(a1: &T, a2: &T, a3: &T) -> Entries<T> {
    let t = Trig::new(a1, a2, a3);
    let zero = a1.constant_like(0.0);
    let Trig {
        s1,
        c1,
        s2,
        c2,
        s3,
        c3,
    } = t;
    // R^y(α²) R^z(α¹)
    let m = [
        [c2.clone() * c1.clone(), c2.clone() * s1.clone(), -s2.clone()],
        [-s1.clone(), c1.clone(), zero.clone()],
        [s2.clone() * c1.clone(), s2.clone() * s1.clone(), c2.clone()],
    ];
    let row = |k: usize| -> [T; 3] {
        match k {
            0 => [
                c3.clone() * m[0][0].clone() + s3.clone() * m[1][0].clone(),
                c3.clone() * m[0][1].clone() + s3.clone() * m[1][1].clone(),
                c3.clone() * m[0][2].clone() + s3.clone() * m[1][2].clone(),
            ],
            1 => [
                c3.clone() * m[1][0].clone() - s3.clone() * m[0][0].clone(),
                c3.clone() * m[1][1].clone() - s3.clone() * m[0][1].clone(),
                c3.clone() * m[1][2].clone() - s3.clone() * m[0][2].clone(),
            ],
            _ => m[2].clone(),
        }
    };
    [row(0), row(1), row(2)]
}

/// Space-fixed kinematic matrix: ω_i = a_ib α̇^b.
pub fn a_entries<T: AngleScalar>(a1: &T, a2: &T, a3: &T) -> Entries<T> {
    let Trig { s1, c1, s2, c2, .. } = Trig::new(a1, a2, a3);
    let zero = a1.constant_like(0.0);
    let one = a1.constant_like(1.0);
    [
        [zero.clone(), -s1.clone(), s2.clone() * c1.clone()],
        [zero.clone(), c1.clone(), s2 * s1],
        [one, zero, c2],
    ]
}

/// Body-fixed kinematic matrix: ω̄_i = b_ib α̇^b.
pub fn b_entries<T: AngleScalar>(a1: &T, a2: &T, a3: &T) -> Entries<T> {
    let Trig { s2, c2, s3, c3, .. } = Trig::new(a1, a2, a3);
    let zero = a1.constant_like(0.0);
    let one = a1.constant_like(1.0);
    [
        [-(s2.clone() * c3.clone()), s3.clone(), zero.clone()],
        [s2 * s3, c3, zero.clone()],
        [c2, zero, one],
    ]
}

/// Inverse of (a). Contains 1/sin α²; callers check the singularity.
pub fn a_inv_entries<T: AngleScalar>(a1: &T, a2: &T, a3: &T) -> Entries<T> {
    let Trig { s1, c1, s2, c2, .. } = Trig::new(a1, a2, a3);
    let zero = a1.constant_like(0.0);
    let one = a1.constant_like(1.0);
    let csc = s2.recip();
    let cot = c2 * csc.clone();
    [
        [-(c1.clone() * cot.clone()), -(s1.clone() * cot), one],
        [-s1.clone(), c1.clone(), zero.clone()],
        [c1 * csc.clone(), s1 * csc, zero],
    ]
}

/// Inverse of (b).
pub fn b_inv_entries<T: AngleScalar>(a1: &T, a2: &T, a3: &T) -> Entries<T> {
    let Trig { s2, c2, s3, c3, .. } = Trig::new(a1, a2, a3);
    let zero = a1.constant_like(0.0);
    let one = a1.constant_like(1.0);
    let csc = s2.recip();
    let cot = c2 * csc.clone();
    [
        [-(c3.clone() * csc.clone()), s3.clone() * csc, zero.clone()],
        [s3.clone(), c3.clone(), zero.clone()],
        [c3 * cot.clone(), -(s3 * cot), one],
    ]
}

fn to_mat(e: Entries<f64>) -> Mat3 {
    Mat3::from_fn(|i, j| e[i][j])
}

fn eval<F>(angles: &EulerAngles, f: F) -> Mat3
where
    F: Fn(&f64, &f64, &f64) -> Entries<f64>,
{
    to_mat(f(&angles.alpha1, &angles.alpha2, &angles.alpha3))
}

pub fn rotation_matrix(angles: &EulerAngles) -> Mat3 {
    eval(angles, rotation_entries)
}

pub fn a_matrix(angles: &EulerAngles) -> Mat3 {
    eval(angles, a_entries)
}

pub fn b_matrix(angles: &EulerAngles) -> Mat3 {
    eval(angles, b_entries)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicMatrices {
    pub a: Mat3,
    pub b: Mat3,
    pub a_inv: Mat3,
    pub b_inv: Mat3,
}

pub fn kinematic_matrices(angles: &EulerAngles) -> Result<KinematicMatrices> {
    kinematic_matrices_with_threshold(angles, DEFAULT_SINGULAR_THRESHOLD)
}

pub fn kinematic_matrices_with_threshold(
    angles: &EulerAngles,
    threshold: f64,
) -> Result<KinematicMatrices> {
    angles.check_nonsingular(threshold)?;
    Ok(KinematicMatrices {
        a: a_matrix(angles),
        b: b_matrix(angles),
        a_inv: eval(angles, a_inv_entries),
        b_inv: eval(angles, b_inv_entries),
    })
}

/// Hand-differentiated ∂(a)/∂α^b, indexed `[b]`. (a) does not depend on α³.
pub fn a_matrix_derivatives(angles: &EulerAngles) -> [Mat3; 3] {
    let (s1, c1) = angles.alpha1.sin_cos();
    let (s2, c2) = angles.alpha2.sin_cos();
    let d1 = Mat3::new(0.0, -c1, -s2 * s1, 0.0, -s1, s2 * c1, 0.0, 0.0, 0.0);
    let d2 = Mat3::new(0.0, 0.0, c2 * c1, 0.0, 0.0, c2 * s1, 0.0, 0.0, -s2);
    [d1, d2, Mat3::zeros()]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub g_cov: Mat3,
    pub g_contra: Mat3,
    pub sqrt_det: f64,
}

fn check_inertia(inertia: f64, mass: f64) -> Result<()> {
    if inertia > 0.0 && mass > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "moment of inertia ({inertia}) and mass ({mass}) must be positive"
        )))
    }
}

/// Rotational metric of the Euler-angle space for a spherical top.
pub fn metric(angles: &EulerAngles, inertia: f64, mass: f64) -> Result<Metric> {
    check_inertia(inertia, mass)?;
    let KinematicMatrices { a_inv, .. } = kinematic_matrices(angles)?;
    let r = inertia / mass;
    let c2 = angles.alpha2.cos();
    let g_cov = Mat3::new(1.0, 0.0, c2, 0.0, 1.0, 0.0, c2, 0.0, 1.0) * r;
    // g^{cd} = (m/I) a⁻¹_{cj} a⁻¹_{dj}
    let g_contra = a_inv * a_inv.transpose() / r;
    Ok(Metric {
        g_cov,
        g_contra,
        sqrt_det: r.powf(1.5) * angles.alpha2.sin(),
    })
}

pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// The tensor (a⁻¹_bi a⁻¹_cj − a⁻¹_bj a⁻¹_ci) ∂a_kc/∂α^b, indexed `[i][j][k]`.
/// It equals the Levi-Civita symbol identically.
pub fn epsilon_identity_tensor(angles: &EulerAngles) -> Result<[[[f64; 3]; 3]; 3]> {
    let KinematicMatrices { a_inv, .. } = kinematic_matrices(angles)?;
    Ok(epsilon_tensor_from(&a_inv, &a_matrix_derivatives(angles)))
}

/// Contraction shared by the closed-form route and any externally supplied
/// derivative set (used by tests with finite differences).
pub fn epsilon_tensor_from(a_inv: &Mat3, da: &[Mat3; 3]) -> [[[f64; 3]; 3]; 3] {
    let mut out = [[[0.0; 3]; 3]; 3];
    for (i, plane) in out.iter_mut().enumerate() {
        for (j, row) in plane.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (b, dab) in da.iter().enumerate() {
                    for c in 0..3 {
                        let w = a_inv[(b, i)] * a_inv[(c, j)] - a_inv[(b, j)] * a_inv[(c, i)];
                        acc += w * dab[(k, c)];
                    }
                }
                *v = acc;
            }
        }
    }
    out
}

pub fn epsilon_identity_residual(angles: &EulerAngles) -> Result<f64> {
    let t = epsilon_identity_tensor(angles)?;
    let mut worst = 0.0f64;
    for (i, plane) in t.iter().enumerate() {
        for (j, row) in plane.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                worst = worst.max((v - levi_civita(i, j, k)).abs());
            }
        }
    }
    Ok(worst)
}

/// Jacobian ∂α/∂ξ of α¹ = ξ¹ + ξ³, α² = ξ², α³ = ξ¹ − ξ³.
pub fn cayley_klein_jacobian() -> Mat3 {
    Mat3::new(1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0)
}

/// The rotational metric in the coordinates ξ¹ = (α¹+α³)/2, ξ² = α²,
/// ξ³ = (α¹−α³)/2. Diagonal: diag(2r(1+cos α²), r, 2r(1−cos α²)), r = I/m.
pub fn cayley_klein_metric(angles: &EulerAngles, inertia: f64, mass: f64) -> Mat3 {
    let r = inertia / mass;
    let c2 = angles.alpha2.cos();
    let g = Mat3::new(1.0, 0.0, c2, 0.0, 1.0, 0.0, c2, 0.0, 1.0) * r;
    let j = cayley_klein_jacobian();
    j.transpose() * g * j
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn max_abs(m: &Mat3) -> f64 {
        m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Rotation built from the three elementary factors, independent of
    /// the expanded closed form.
    fn rz(mu: f64) -> Mat3 {
        let (s, c) = mu.sin_cos();
        Mat3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0)
    }

    fn ry(mu: f64) -> Mat3 {
        let (s, c) = mu.sin_cos();
        Mat3::new(c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c)
    }

    #[test]
    fn identity_at_zero() {
        let r = rotation_matrix(&EulerAngles::new(0.0, 0.0, 0.0));
        assert!(max_abs(&(r - Mat3::identity())) == 0.0);
    }

    #[test]
    fn quarter_turn_about_z() {
        let r = rotation_matrix(&EulerAngles::new(FRAC_PI_2, 0.0, 0.0));
        let expect = Mat3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!(max_abs(&(r - expect)) < 1e-15);
    }

    #[test]
    fn rotation_matches_factor_product() {
        let ang = EulerAngles::new(0.3, 0.7, 1.1);
        let expect = rz(1.1) * ry(0.7) * rz(0.3);
        assert!(max_abs(&(rotation_matrix(&ang) - expect)) < 1e-15);
        let r = rotation_matrix(&ang);
        assert!(max_abs(&(r.transpose() * r - Mat3::identity())) < 1e-14);
        assert!((r.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn a_at_polar_quarter_turn() {
        let k = kinematic_matrices(&EulerAngles::new(0.0, FRAC_PI_2, 0.0)).unwrap();
        let expect = Mat3::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0);
        assert!(max_abs(&(k.a - expect)) < 1e-15);
    }

    #[test]
    fn b_is_rotation_times_a() {
        let ang = EulerAngles::new(0.3, 0.7, 1.1);
        let k = kinematic_matrices(&ang).unwrap();
        assert!(max_abs(&(k.b - rotation_matrix(&ang) * k.a)) < 1e-14);
    }

    #[test]
    fn a_columns_are_rotation_axes() {
        // column b of (a) is the space-fixed axis about which α^b rotates
        let ang = EulerAngles::new(0.4, 1.2, -0.8);
        let a = a_matrix(&ang);
        let ez = nalgebra::Vector3::z();
        let ey = nalgebra::Vector3::y();
        assert!((a.column(0) - ez).norm() < 1e-15);
        let new_y = rz(0.4).transpose() * ey;
        assert!((a.column(1) - new_y).norm() < 1e-15);
        let new_z = (ry(1.2) * rz(0.4)).transpose() * ez;
        assert!((a.column(2) - new_z).norm() < 1e-15);
    }

    #[test]
    fn singular_orientation_rejected() {
        for polar in [0.0, PI, 1e-13] {
            let err = kinematic_matrices(&EulerAngles::new(0.1, polar, 0.2)).unwrap_err();
            assert!(matches!(err, Error::SingularOrientation { .. }));
        }
        assert!(kinematic_matrices_with_threshold(&EulerAngles::new(0.1, 1e-13, 0.2), 1e-14).is_ok());
    }

    #[test]
    fn metric_at_right_angle_is_scaled_identity() {
        let m = metric(&EulerAngles::new(0.2, FRAC_PI_2, 0.9), 3.0, 2.0).unwrap();
        assert!(max_abs(&(m.g_cov - Mat3::identity() * 1.5)) < 1e-15);
    }

    #[test]
    fn metric_determinant() {
        let m = metric(&EulerAngles::new(0.0, FRAC_PI_3, 0.0), 1.0, 1.0).unwrap();
        assert!((m.sqrt_det - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn metric_from_kinematic_products() {
        let ang = EulerAngles::new(0.3, 0.7, 1.1);
        let (inertia, mass) = (0.7, 1.3);
        let m = metric(&ang, inertia, mass).unwrap();
        let k = kinematic_matrices(&ang).unwrap();
        let r = inertia / mass;
        assert!(max_abs(&(m.g_cov - k.a.transpose() * k.a * r)) < 1e-13);
        assert!(max_abs(&(m.g_cov - k.b.transpose() * k.b * r)) < 1e-13);
        assert!(max_abs(&(m.g_cov * m.g_contra - Mat3::identity())) < 1e-13);
    }

    #[test]
    fn metric_rejects_bad_inertia() {
        assert!(metric(&EulerAngles::new(0.0, 1.0, 0.0), 0.0, 1.0).is_err());
        assert!(metric(&EulerAngles::new(0.0, 1.0, 0.0), 1.0, -1.0).is_err());
    }

    #[test]
    fn epsilon_identity_holds() {
        for ang in [EulerAngles::new(0.3, 0.7, 1.1), EulerAngles::new(1.9, 2.2, -4.0)] {
            assert!(epsilon_identity_residual(&ang).unwrap() < 1e-12);
        }
    }

    #[test]
    fn epsilon_component_with_finite_difference_derivatives() {
        let ang = EulerAngles::new(0.5, 1.0, 1.5);
        let t = epsilon_identity_tensor(&ang).unwrap();
        assert!((t[0][1][2] - 1.0).abs() < 1e-12);

        // central differences of (a) in each angle
        let h = 1e-5;
        let mut da = [Mat3::zeros(); 3];
        for (b, d) in da.iter_mut().enumerate() {
            let mut p = ang.to_array();
            let mut q = ang.to_array();
            p[b] += h;
            q[b] -= h;
            *d = (a_matrix(&EulerAngles::from_array(p)) - a_matrix(&EulerAngles::from_array(q)))
                / (2.0 * h);
        }
        let closed = a_matrix_derivatives(&ang);
        for b in 0..3 {
            assert!(max_abs(&(da[b] - closed[b])) < 1e-9);
        }
        let a_inv = kinematic_matrices(&ang).unwrap().a_inv;
        let fd = epsilon_tensor_from(&a_inv, &da);
        assert!((fd[0][1][2] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cayley_klein_examples() {
        let g = cayley_klein_metric(&EulerAngles::new(0.1, FRAC_PI_2, 0.2), 1.0, 1.0);
        assert!(max_abs(&(g - Mat3::from_diagonal(&nalgebra::Vector3::new(2.0, 1.0, 2.0)))) < 1e-15);
        let g = cayley_klein_metric(&EulerAngles::new(0.1, 0.0, 0.2), 2.0, 1.0);
        assert!(max_abs(&(g - Mat3::from_diagonal(&nalgebra::Vector3::new(8.0, 2.0, 0.0)))) < 1e-15);
    }

    fn angles() -> impl Strategy<Value = EulerAngles> {
        (-10.0f64..10.0, 0.05f64..(PI - 0.05), -10.0f64..10.0)
            .prop_map(|(a, b, c)| EulerAngles::new(a, b, c))
    }

    proptest! {
        #[test]
        fn rotation_is_proper_orthogonal(a in -20.0f64..20.0, b in -20.0f64..20.0, c in -20.0f64..20.0) {
            let r = rotation_matrix(&EulerAngles::new(a, b, c));
            prop_assert!(max_abs(&(r.transpose() * r - Mat3::identity())) < 1e-13);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-13);
        }

        #[test]
        fn kinematic_identities(ang in angles()) {
            let k = kinematic_matrices(&ang).unwrap();
            prop_assert!(max_abs(&(k.a * k.a_inv - Mat3::identity())) < 1e-12);
            prop_assert!(max_abs(&(k.b * k.b_inv - Mat3::identity())) < 1e-12);
            prop_assert!(max_abs(&(k.b - rotation_matrix(&ang) * k.a)) < 1e-12);
            let m = metric(&ang, 1.7, 0.6).unwrap();
            prop_assert!(((m.g_cov.determinant().sqrt() - m.sqrt_det) / m.sqrt_det).abs() < 1e-12);
            prop_assert!(max_abs(&(m.g_cov * m.g_contra - Mat3::identity())) < 1e-12);
        }

        #[test]
        fn epsilon_identity_everywhere(ang in angles()) {
            prop_assert!(epsilon_identity_residual(&ang).unwrap() < 1e-11);
        }

        #[test]
        fn cayley_klein_is_diagonal(ang in angles()) {
            let g = cayley_klein_metric(&ang, 1.3, 0.8);
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        prop_assert!(g[(i, j)].abs() < 1e-14);
                    }
                }
            }
        }
    }
}
