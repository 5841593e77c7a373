//! Radial density profiles and the moments I, g, g̃ they determine.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

/// Relative accuracy requested from the radial integrals.
pub const RADIAL_TOLERANCE: f64 = 1e-13;
/// Allowed deviation of 4π∫r²f dr from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

type Radial = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Radial(Radial),
    /// All weight on the sphere r = a.
    Shell,
}

/// A spherically symmetric density f(r) ≥ 0 on [0, a] with unit integral.
#[derive(Clone)]
pub struct DensityProfile {
    shape: Shape,
    radius: f64,
    scale: f64,
}

impl fmt::Debug for DensityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.shape {
            Shape::Radial(_) => "radial",
            Shape::Shell => "shell",
        };
        f.debug_struct("DensityProfile")
            .field("kind", &kind)
            .field("radius", &self.radius)
            .field("scale", &self.scale)
            .finish()
    }
}

fn radial_moment(f: &Radial, radius: f64, power: i32) -> f64 {
    4.0 * PI * integrate_adaptive(|r| r.powi(power) * f(r), 0.0, radius, RADIAL_TOLERANCE)
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("profile radius must be positive, got {radius}")))
    }
}

impl DensityProfile {
    /// Any nonnegative f; it is rescaled to unit integral.
    pub fn new<F>(f: F, radius: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_radius(radius)?;
        let f: Radial = Arc::new(f);
        let integral = radial_moment(&f, radius, 2);
        if !integral.is_finite() || integral <= 0.0 {
            return Err(Error::UnnormalizedProfile { integral });
        }
        Ok(Self {
            shape: Shape::Radial(f),
            radius,
            scale: 1.0 / integral,
        })
    }

    /// An f the caller asserts is already normalized; checked, not rescaled.
    pub fn normalized<F>(f: F, radius: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_radius(radius)?;
        let f: Radial = Arc::new(f);
        let integral = radial_moment(&f, radius, 2);
        if !((integral - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
            return Err(Error::UnnormalizedProfile { integral });
        }
        Ok(Self {
            shape: Shape::Radial(f),
            radius,
            scale: 1.0,
        })
    }

    pub fn uniform_ball(radius: f64) -> Result<Self> {
        Self::new(|_| 1.0, radius)
    }

    pub fn thin_shell(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self {
            shape: Shape::Shell,
            radius,
            scale: 1.0,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Density at r after normalization; zero outside the ball. A shell
    /// has no pointwise density and reports NaN.
    pub fn density(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Radial(f) if (0.0..=self.radius).contains(&r) => self.scale * f(r),
            Shape::Radial(_) => 0.0,
            Shape::Shell => f64::NAN,
        }
    }

    /// 4π∫r²f dr after normalization.
    pub fn integral(&self) -> f64 {
        match &self.shape {
            Shape::Radial(f) => self.scale * radial_moment(f, self.radius, 2),
            Shape::Shell => 1.0,
        }
    }

    /// ⟨r²⟩ = 4π∫r⁴f dr.
    pub fn mean_square_radius(&self) -> f64 {
        match &self.shape {
            Shape::Radial(f) => self.scale * radial_moment(f, self.radius, 4),
            Shape::Shell => self.radius * self.radius,
        }
    }

    /// The profile λ³f(λr) on [0, a/λ], which keeps unit normalization.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {lambda}")));
        }
        let shape = match &self.shape {
            Shape::Radial(f) => {
                let f = f.clone();
                Shape::Radial(Arc::new(move |r| lambda.powi(3) * f(lambda * r)))
            }
            Shape::Shell => Shape::Shell,
        };
        Ok(Self {
            shape,
            radius: self.radius / lambda,
            scale: self.scale,
        })
    }
}

/// Mass, charge and the rotational constants of a spherical rotator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ParticleModel {
    pub mass: f64,
    pub charge: f64,
    pub inertia: f64,
    pub g: f64,
    /// g̃ = g q / 2 m c.
    pub gtilde: f64,
    /// Speed of light in the units the model was built in.
    pub c: f64,
}

impl ParticleModel {
    pub fn new(mass: f64, charge: f64, inertia: f64, g: f64, c: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("moment of inertia", inertia), ("c", c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(charge.is_finite() && g.is_finite()) {
            return Err(Error::InvalidParameter("charge and g must be finite".into()));
        }
        Ok(Self {
            mass,
            charge,
            inertia,
            g,
            gtilde: g * charge / (2.0 * mass * c),
            c,
        })
    }

    /// A model given g̃ directly, with g inferred from it.
    pub fn with_gtilde(mass: f64, charge: f64, inertia: f64, gtilde: f64, c: f64) -> Result<Self> {
        let mut model = Self::new(mass, charge, inertia, 0.0, c)?;
        model.gtilde = gtilde;
        model.g = if charge != 0.0 {
            2.0 * mass * c * gtilde / charge
        } else {
            f64::NAN
        };
        Ok(model)
    }
}

/// I = (2/3) m ⟨r²⟩_m and g = ⟨r²⟩_q / ⟨r²⟩_m.
pub fn moments_from_profiles(
    fq: &DensityProfile,
    fm: &DensityProfile,
    mass: f64,
    charge: f64,
    c: f64,
) -> Result<ParticleModel> {
    for p in [fq, fm] {
        let integral = p.integral();
        if !((integral - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
            return Err(Error::UnnormalizedProfile { integral });
        }
    }
    let r2_m = fm.mean_square_radius();
    let r2_q = fq.mean_square_radius();
    ParticleModel::new(mass, charge, 2.0 / 3.0 * mass * r2_m, r2_q / r2_m, c)
}
