//! Wigner harmonics |s, m_s, m̄_s⟩, the group inner product, spin matrices,
//! and the parity superselection rule.
//!
//! Harmonics are exp(i(m α¹ + m̄ α³)) u(α²) with u the Wigner little-d
//! function d^s_{m m̄} in the Jacobi-sum form. With this choice every
//! ladder relation holds with a positive real coefficient. For s = 1/2 it
//! coincides with the familiar SU(2) closed forms except for the overall
//! sign of |½, +½, −½⟩, which is −sin(α²/2) here.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::EulerAngles;
use crate::operator_calculus::{AngleFunction, Frame, LadderSign, SpinAlgebra};
use crate::quadrature::GroupQuadrature;

/// Default largest spin for harmonic construction, as 2s.
pub const DEFAULT_TWO_S_MAX: i32 = 5;

/// Quantum numbers stored doubled so half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinLabel {
    pub two_s: i32,
    pub two_m: i32,
    pub two_mbar: i32,
}

impl std::fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let half = |v: i32| {
            if v % 2 == 0 {
                format!("{}", v / 2)
            } else {
                format!("{v}/2")
            }
        };
        write!(
            f,
            "|{}, {}, {}>",
            half(self.two_s),
            half(self.two_m),
            half(self.two_mbar)
        )
    }
}

impl SpinLabel {
    pub fn new(two_s: i32, two_m: i32, two_mbar: i32) -> Result<Self> {
        let bad = |reason| {
            Err(Error::InvalidLabel {
                two_s,
                two_m,
                two_mbar,
                reason,
            })
        };
        if two_s < 0 {
            return bad("2s must be nonnegative");
        }
        if two_m.abs() > two_s || two_mbar.abs() > two_s {
            return bad("|m| and |mbar| may not exceed s");
        }
        if (two_s - two_m) % 2 != 0 || (two_s - two_mbar) % 2 != 0 {
            return bad("m and mbar must differ from s by integers");
        }
        Ok(Self {
            two_s,
            two_m,
            two_mbar,
        })
    }

    pub fn s(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }

    pub fn mbar(&self) -> f64 {
        self.two_mbar as f64 / 2.0
    }

    pub fn is_half_odd(&self) -> bool {
        self.two_s % 2 == 1
    }

    /// All labels of one s, ordered m from s down to −s, then m̄ likewise.
    pub fn multiplet(two_s: i32) -> Vec<SpinLabel> {
        let mut out = Vec::new();
        for two_m in (-two_s..=two_s).rev().step_by(2) {
            for two_mbar in (-two_s..=two_s).rev().step_by(2) {
                out.push(SpinLabel {
                    two_s,
                    two_m,
                    two_mbar,
                });
            }
        }
        out
    }

    /// Every label with s ≤ two_s_max/2 in the parity sector of `half_odd`.
    pub fn sector(two_s_max: i32, half_odd: bool) -> Vec<SpinLabel> {
        let start = if half_odd { 1 } else { 0 };
        (start..=two_s_max)
            .step_by(2)
            .flat_map(SpinLabel::multiplet)
            .collect()
    }
}

fn factorial(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Terms (coefficient, power of cos(β/2), power of sin(β/2)) of the Jacobi
/// sum for d^j_{m' m}(β), with m' = m_s and m = m̄_s.
fn little_d_terms(label: &SpinLabel) -> Vec<(f64, u32, u32)> {
    let j2 = label.two_s;
    let (mp2, m2) = (label.two_m, label.two_mbar);
    let jpm = (j2 + m2) / 2;
    let jmm = (j2 - m2) / 2;
    let jpmp = (j2 + mp2) / 2;
    let jmmp = (j2 - mp2) / 2;
    let root = (factorial(jpmp) * factorial(jmmp) * factorial(jpm) * factorial(jmm)).sqrt();
    let mut terms = Vec::new();
    for k in 0..=j2 {
        let a = jpm - k;
        let b = jmmp - k;
        let c = k + (mp2 - m2) / 2;
        if a < 0 || b < 0 || c < 0 {
            continue;
        }
        let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * root / (factorial(a) * factorial(k) * factorial(b) * factorial(c));
        let cos_pow = (j2 - 2 * k - (mp2 - m2) / 2) as u32;
        let sin_pow = (2 * k + (mp2 - m2) / 2) as u32;
        terms.push((coeff, cos_pow, sin_pow));
    }
    terms
}

/// d^s_{m_s, m̄_s}(β) evaluated directly.
pub fn little_d(label: &SpinLabel, beta: f64) -> f64 {
    let (s, c) = (0.5 * beta).sin_cos();
    little_d_terms(label)
        .iter()
        .map(|&(k, pc, ps)| k * c.powi(pc as i32) * s.powi(ps as i32))
        .sum()
}

/// √((2s+1)/8π²): unit norm over α¹, α³ ∈ (0, 2π), α² ∈ (0, π).
pub fn harmonic_normalization(two_s: i32) -> f64 {
    ((two_s as f64 + 1.0) / (8.0 * PI * PI)).sqrt()
}

pub fn wigner_harmonic(label: &SpinLabel) -> Result<AngleFunction> {
    wigner_harmonic_with_limit(label, DEFAULT_TWO_S_MAX)
}

pub fn wigner_harmonic_with_limit(label: &SpinLabel, two_s_max: i32) -> Result<AngleFunction> {
    let label = SpinLabel::new(label.two_s, label.two_m, label.two_mbar)?;
    if label.two_s > two_s_max {
        return Err(Error::InvalidLabel {
            two_s: label.two_s,
            two_m: label.two_m,
            two_mbar: label.two_mbar,
            reason: "s exceeds the configured maximum",
        });
    }
    let c = AngleFunction::cos_half_polar();
    let s = AngleFunction::sin_half_polar();
    let polar = AngleFunction::sum(
        little_d_terms(&label)
            .into_iter()
            .map(|(k, pc, ps)| {
                AngleFunction::product(vec![
                    AngleFunction::real(k),
                    c.powi(pc),
                    s.powi(ps),
                ])
            })
            .collect(),
    );
    Ok(AngleFunction::product(vec![
        AngleFunction::real(harmonic_normalization(label.two_s)),
        AngleFunction::phase(label.m(), 0),
        AngleFunction::phase(label.mbar(), 2),
        polar,
    ]))
}

/// Spin-1/2 harmonic with m̄ left at the default +1/2.
pub fn spin_half_harmonic(two_m: i32) -> Result<AngleFunction> {
    wigner_harmonic(&SpinLabel::new(1, two_m, 1)?)
}

/// The four spin-1/2 functions in their textbook closed forms,
/// (2π)⁻¹ e^{i(±α¹±α³)/2} times cos or sin of α²/2, all with a plus sign.
/// They differ from [`wigner_harmonic`] only in the sign of |½, +½, −½⟩,
/// so with these the ladder relations hold up to a phase of −1 on that
/// state.
pub fn spin_half_closed_form(two_m: i32, two_mbar: i32) -> Result<AngleFunction> {
    let label = SpinLabel::new(1, two_m, two_mbar)?;
    let polar = if two_m == two_mbar {
        AngleFunction::cos_half_polar()
    } else {
        AngleFunction::sin_half_polar()
    };
    Ok(AngleFunction::product(vec![
        AngleFunction::real(1.0 / (2.0 * PI)),
        AngleFunction::phase(label.m(), 0),
        AngleFunction::phase(label.mbar(), 2),
        polar,
    ]))
}

/// Function values at every node of a quadrature rule, in node order.
pub fn sample(f: &AngleFunction, quad: &GroupQuadrature) -> Result<Vec<Complex64>> {
    let nodes: Vec<[f64; 3]> = quad.nodes().map(|(p, _)| p).collect();
    nodes
        .par_iter()
        .map(|p| f.value(&EulerAngles::from_array(*p)))
        .collect()
}

/// ⟨f, g⟩ = ∫ dα¹ dα³ dα² sin α² f* g over the group volume.
pub fn inner_product(f: &AngleFunction, g: &AngleFunction) -> Result<Complex64> {
    inner_product_with(f, g, &GroupQuadrature::default())
}

pub fn inner_product_with(
    f: &AngleFunction,
    g: &AngleFunction,
    quad: &GroupQuadrature,
) -> Result<Complex64> {
    let fs = sample(f, quad)?;
    let gs = sample(g, quad)?;
    Ok(weighted_dot(&fs, &gs, quad))
}

fn weighted_dot(fs: &[Complex64], gs: &[Complex64], quad: &GroupQuadrature) -> Complex64 {
    quad.nodes()
        .zip(fs.iter().zip(gs))
        .map(|((_, w), (a, b))| w * a.conj() * b)
        .sum()
}

/// Gram matrix ⟨f_i, f_j⟩ of a family of functions.
pub fn gram_matrix(fs: &[AngleFunction], quad: &GroupQuadrature) -> Result<DMatrix<Complex64>> {
    let samples: Vec<Vec<Complex64>> = fs.iter().map(|f| sample(f, quad)).collect::<Result<_>>()?;
    let weights: Vec<Complex64> = quad.nodes().map(|(_, w)| w).collect();
    let n = fs.len();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let wi: Vec<Complex64> = samples[i]
                .iter()
                .zip(&weights)
                .map(|(a, w)| a.conj() * w)
                .collect();
            (0..n)
                .map(|j| wi.iter().zip(&samples[j]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinMatrices {
    pub sx: DMatrix<Complex64>,
    pub sy: DMatrix<Complex64>,
    pub sz: DMatrix<Complex64>,
    pub sp: DMatrix<Complex64>,
    pub sm: DMatrix<Complex64>,
}

impl SpinMatrices {
    pub fn components(&self) -> [&DMatrix<Complex64>; 3] {
        [&self.sx, &self.sy, &self.sz]
    }
}

/// Ladder coefficient √((s ∓ m)(s ± m + 1)) for doubled arguments.
pub fn ladder_coefficient(two_s: i32, two_m: i32, raise: bool) -> f64 {
    let s = two_s as f64 / 2.0;
    let m = two_m as f64 / 2.0;
    let v = if raise {
        (s - m) * (s + m + 1.0)
    } else {
        (s + m) * (s - m + 1.0)
    };
    v.max(0.0).sqrt()
}

/// (2s+1)-dimensional space-fixed spin matrices, basis ordered m = s … −s,
/// unit ladder phases.
pub fn spin_matrices(two_s: i32) -> SpinMatrices {
    spin_matrices_hbar(two_s, 1.0)
}

pub fn spin_matrices_hbar(two_s: i32, hbar: f64) -> SpinMatrices {
    let dim = (two_s + 1) as usize;
    let two_m = |k: usize| two_s - 2 * k as i32;
    let sz = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(hbar * two_m(c) as f64 / 2.0, 0.0)
        } else {
            Complex64::default()
        }
    });
    // raising moves index k to k−1
    let sp = DMatrix::from_fn(dim, dim, |r, c| {
        if c >= 1 && r == c - 1 {
            Complex64::new(hbar * ladder_coefficient(two_s, two_m(c), true), 0.0)
        } else {
            Complex64::default()
        }
    });
    let sm = sp.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let sx = (&sp + &sm) * half;
    let sy = (&sp - &sm) * Complex64::new(0.0, -0.5);
    SpinMatrices { sx, sy, sz, sp, sm }
}

/// Body-fixed matrices in the m̄ basis (ordered m̄ = s … −s): S̄₃ = m̄ħ,
/// S̄± = S̄₁ ∓ iS̄₂ raise/lower m̄ with the same coefficients, so these obey
/// the left-handed algebra [S̄_i, S̄_j] = −iħ ε_ijk S̄_k.
pub fn body_spin_matrices(two_s: i32, hbar: f64) -> SpinMatrices {
    let m = spin_matrices_hbar(two_s, hbar);
    // S̄₁ = (S̄₊ + S̄₋)/2, S̄₂ = i(S̄₊ − S̄₋)/2
    let sx = (&m.sp + &m.sm) * Complex64::new(0.5, 0.0);
    let sy = (&m.sp - &m.sm) * Complex64::new(0.0, 0.5);
    SpinMatrices {
        sx,
        sy,
        sz: m.sz,
        sp: m.sp,
        sm: m.sm,
    }
}

/// Matrices ⟨s, m', m̄|S_i|s, m, m̄⟩ of the differential operators in one
/// fixed-m̄ column of harmonics, rows and columns ordered m = s … −s.
/// Equal to [`spin_matrices_hbar`] for every allowed m̄.
pub fn spin_matrices_from_harmonics(
    two_s: i32,
    two_mbar: i32,
    hbar: f64,
    quad: &GroupQuadrature,
) -> Result<SpinMatrices> {
    let algebra = SpinAlgebra::with_hbar(hbar);
    let column: Vec<AngleFunction> = (-two_s..=two_s)
        .rev()
        .step_by(2)
        .map(|two_m| wigner_harmonic_with_limit(&SpinLabel::new(two_s, two_m, two_mbar)?, two_s))
        .collect::<Result<_>>()?;
    let bras: Vec<Vec<Complex64>> = column.iter().map(|f| sample(f, quad)).collect::<Result<_>>()?;
    let represent = |op: &dyn Fn(&AngleFunction) -> AngleFunction| -> Result<DMatrix<Complex64>> {
        let kets: Vec<Vec<Complex64>> = column.iter().map(|f| sample(&op(f), quad)).collect::<Result<_>>()?;
        let n = column.len();
        Ok(DMatrix::from_fn(n, n, |r, c| weighted_dot(&bras[r], &kets[c], quad)))
    };
    Ok(SpinMatrices {
        sx: represent(&|f| algebra.spin(1, Frame::SpaceFixed, f))?,
        sy: represent(&|f| algebra.spin(2, Frame::SpaceFixed, f))?,
        sz: represent(&|f| algebra.spin(3, Frame::SpaceFixed, f))?,
        sp: represent(&|f| algebra.ladder(LadderSign::Raise, Frame::SpaceFixed, f))?,
        sm: represent(&|f| algebra.ladder(LadderSign::Lower, Frame::SpaceFixed, f))?,
    })
}

/// Ok iff every label has the same parity of 2s.
pub fn validate_superposition(labels: &[SpinLabel]) -> Result<()> {
    if let Some(first) = labels.first() {
        if let Some(bad) = labels.iter().find(|l| l.is_half_odd() != first.is_half_odd()) {
            return Err(Error::ParityMixing {
                first: *first,
                second: *bad,
            });
        }
    }
    Ok(())
}

/// A normalized superposition confined to one parity sector.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisExpansion {
    terms: Vec<(SpinLabel, Complex64)>,
}

impl BasisExpansion {
    pub fn new(terms: Vec<(SpinLabel, Complex64)>) -> Result<Self> {
        let labels: Vec<SpinLabel> = terms.iter().map(|(l, _)| *l).collect();
        validate_superposition(&labels)?;
        Ok(Self { terms })
    }

    /// Rescales so that Σ|c|² = 1.
    pub fn normalized(terms: Vec<(SpinLabel, Complex64)>) -> Result<Self> {
        let norm = terms.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero superposition".into()));
        }
        Self::new(terms.into_iter().map(|(l, c)| (l, c / norm)).collect())
    }

    pub fn terms(&self) -> &[(SpinLabel, Complex64)] {
        &self.terms
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    pub fn function(&self) -> Result<AngleFunction> {
        let parts = self
            .terms
            .iter()
            .map(|(l, c)| Ok(wigner_harmonic(l)?.scale(*c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(AngleFunction::sum(parts))
    }
}

/// |C + D e^{iα¹/2}|², the density of the simplest mixed-parity state.
pub fn mixed_parity_density(c: Complex64, d: Complex64, alpha1: f64) -> f64 {
    (c + d * Complex64::from_polar(1.0, 0.5 * alpha1)).norm_sqr()
}
