//! Closed-form coefficients for the two solvable barriers.
//!
//! The rectangular barrier uses the two-segment formula written in terms of
//! `sin(pa)/p` and `sin(qa)/q`, which is the same expression divided through
//! by `pq`. It only depends on p² and q², so it is branch independent and
//! stays finite when a segment wavenumber vanishes.
//!
//! The Scarf barrier uses circular/hyperbolic forms in κ, f and g. Complex
//! `f`, `g` cover both the g² > 0 and g² < 0 regimes through one code path.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::potential::{Coefficients, Model, PotentialSpec, Side};

const UNDERFLOW: f64 = 1e-300;

/// Square root on the principal branch, with the negative real axis mapped to
/// +i·sqrt (a signed zero imaginary part is normalised first).
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    Complex64::new(z.re, z.im + 0.0).sqrt()
}

fn check_energy(energy: f64) -> Result<()> {
    if energy > 0.0 && energy.is_finite() {
        Ok(())
    } else {
        Err(ScatterError::NonPositiveEnergy(energy))
    }
}

fn expect_model(spec: &PotentialSpec, model: Model) -> Result<()> {
    if spec.model() == model {
        Ok(())
    } else {
        Err(ScatterError::NoClosedForm(spec.model()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectWavenumbers {
    pub k: f64,
    /// Wavenumber in the left segment (−a, 0).
    pub p: Complex64,
    /// Wavenumber in the right segment (0, a).
    pub q: Complex64,
}

pub fn rect_wavenumbers(spec: &PotentialSpec, energy: f64) -> Result<RectWavenumbers> {
    expect_model(spec, Model::Rect)?;
    check_energy(energy)?;
    let units = spec.units();
    let (s1, s2) = spec.signs();
    let segment = |sign: i8| {
        let kinetic = Complex64::new(energy - spec.v1(), -f64::from(sign) * spec.v2());
        principal_sqrt(kinetic * units.mass_times_two) / units.hbar
    };
    Ok(RectWavenumbers {
        k: units.wavenumber(energy),
        p: segment(s1),
        q: segment(s2),
    })
}

/// sin(w a)/w, continuous through w = 0.
fn sin_over(w: Complex64, a: f64) -> Complex64 {
    let x = w * a;
    if x.norm() < 1e-4 {
        let x2 = x * x;
        (Complex64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0) * a
    } else {
        x.sin() / w
    }
}

/// Complex reflection ratio and transmission ratio for incidence from the
/// side whose segment has wavenumber `p`.
fn rect_amplitudes(
    k: f64,
    p: Complex64,
    q: Complex64,
    a: f64,
    energy: f64,
) -> Result<(Complex64, Complex64)> {
    let i = Complex64::i();
    let (cp, cq) = ((p * a).cos(), (q * a).cos());
    let (sp, sq) = (sin_over(p, a), sin_over(q, a));
    let (k2, p2, q2) = (k * k, p * p, q * q);

    let denominator = i * 2.0 * k * cp * cq + (q2 + k2) * cp * sq + (p2 + k2) * sp * cq
        - i * k * (p2 + q2) * sp * sq;
    if denominator.norm() < UNDERFLOW {
        return Err(ScatterError::DegenerateEnergy {
            energy,
            what: "rectangular-barrier denominator",
        });
    }
    let reflected = (k2 - p2) * sp * cq + (k2 - q2) * cp * sq + i * k * (p2 - q2) * sp * sq;
    Ok((reflected / denominator, i * 2.0 * k / denominator))
}

fn rect_pair(spec: &PotentialSpec, energy: f64, side: Side) -> Result<(Complex64, Complex64)> {
    let w = rect_wavenumbers(spec, energy)?;
    let (near, far) = match side {
        Side::Left => (w.p, w.q),
        Side::Right => (w.q, w.p),
    };
    rect_amplitudes(w.k, near, far, spec.a(), energy)
}

pub fn rect_reflection(spec: &PotentialSpec, energy: f64, side: Side) -> Result<f64> {
    Ok(rect_pair(spec, energy, side)?.0.norm_sqr())
}

/// Side independent: the formula is symmetric under p ↔ q.
pub fn rect_transmission(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    Ok(rect_pair(spec, energy, Side::Left)?.1.norm_sqr())
}

pub fn rect_coefficients(spec: &PotentialSpec, energy: f64) -> Result<Coefficients> {
    let (r_left, t) = rect_pair(spec, energy, Side::Left)?;
    let (r_right, _) = rect_pair(spec, energy, Side::Right)?;
    Ok(Coefficients::new(
        energy,
        t.norm_sqr(),
        r_left.norm_sqr(),
        r_right.norm_sqr(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScarfParams {
    /// ħ²/(2m a²)
    pub delta: f64,
    /// sqrt(E/Δ) = k a
    pub kappa: f64,
    pub f: Complex64,
    pub g: Complex64,
}

impl ScarfParams {
    /// Parameters seen from the right: V2 → −V2 exchanges f and g.
    fn mirrored(self) -> Self {
        ScarfParams {
            f: self.g,
            g: self.f,
            ..self
        }
    }
}

pub fn scarf_params(spec: &PotentialSpec, energy: f64) -> Result<ScarfParams> {
    expect_model(spec, Model::Scarf)?;
    check_energy(energy)?;
    let delta = spec.delta();
    let branch = |v: f64| principal_sqrt(Complex64::new(v / delta - 0.25, 0.0));
    Ok(ScarfParams {
        delta,
        kappa: (energy / delta).sqrt(),
        f: branch(spec.v1() + spec.v2()),
        g: branch(spec.v1() - spec.v2()),
    })
}

fn scarf_transmission_from(params: &ScarfParams, energy: f64) -> Result<f64> {
    let two_pi_kappa = 2.0 * PI * params.kappa;
    let (f, g) = (params.f, params.g);
    // Numerator and denominator divided by cosh²(2πκ) to stay finite at large κ.
    let ch = two_pi_kappa.cosh();
    let tanh = two_pi_kappa.tanh();
    let numerator = 2.0 * tanh * tanh;
    let denominator = 2.0
        + 4.0 * (f * PI).cosh() * (g * PI).cosh() / ch
        + ((f * 2.0 * PI).cosh() + (g * 2.0 * PI).cosh()) / (ch * ch);
    if denominator.norm() < UNDERFLOW {
        return Err(ScatterError::DegenerateEnergy {
            energy,
            what: "Scarf transmission denominator",
        });
    }
    let t = numerator / denominator;
    debug_assert!(
        t.im.abs() <= 1e-12 * t.re.abs().max(1e-300),
        "Scarf T must be real, got {t}"
    );
    Ok(t.re)
}

pub fn scarf_transmission(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    let params = scarf_params(spec, energy)?;
    scarf_transmission_from(&params, energy)
}

/// F_l for the requested side; right incidence uses (g, f).
pub fn scarf_amplitude_factor(spec: &PotentialSpec, energy: f64, side: Side) -> Result<Complex64> {
    let mut params = scarf_params(spec, energy)?;
    if side == Side::Right {
        params = params.mirrored();
    }
    amplitude_factor_from(&params, energy)
}

fn amplitude_factor_from(params: &ScarfParams, energy: f64) -> Result<Complex64> {
    let pk = PI * params.kappa;
    if (2.0 * pk).sinh().abs() < UNDERFLOW {
        return Err(ScatterError::DegenerateEnergy {
            energy,
            what: "sinh(2πκ)",
        });
    }
    // [e^{−πκ} cosh πf + e^{πκ} cosh πg] / sinh 2πκ, rescaled by e^{−πκ}.
    let decay = (-pk).exp();
    let bracket = (params.f * PI).cosh() * (decay * decay) + (params.g * PI).cosh();
    Ok(bracket * (2.0 * decay / -(-4.0 * pk).exp_m1()))
}

pub fn scarf_reflection(spec: &PotentialSpec, energy: f64, side: Side) -> Result<f64> {
    let mut params = scarf_params(spec, energy)?;
    if side == Side::Right {
        params = params.mirrored();
    }
    let t = scarf_transmission_from(&params, energy)?;
    Ok(amplitude_factor_from(&params, energy)?.norm_sqr() * t)
}

pub fn scarf_coefficients(spec: &PotentialSpec, energy: f64) -> Result<Coefficients> {
    let params = scarf_params(spec, energy)?;
    let t = scarf_transmission_from(&params, energy)?;
    let fl = amplitude_factor_from(&params, energy)?;
    let fr = amplitude_factor_from(&params.mirrored(), energy)?;
    Ok(Coefficients::new(
        energy,
        t,
        fl.norm_sqr() * t,
        fr.norm_sqr() * t,
    ))
}

/// Closed-form coefficients for rect or scarf.
pub fn coefficients(spec: &PotentialSpec, energy: f64) -> Result<Coefficients> {
    match spec.model() {
        Model::Rect => rect_coefficients(spec, energy),
        Model::Scarf => scarf_coefficients(spec, energy),
        other => Err(ScatterError::NoClosedForm(other)),
    }
}
