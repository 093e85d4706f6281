//! Reference routes that share no code with the engine or the closed forms.

#![allow(dead_code)]

use num_complex::Complex64;
use ptscatter::{Model, PotentialSpec, Side};

/// Transfer-matrix slicing: the potential is replaced by constant slabs of
/// width `slice` (value at the slab midpoint) and (ψ, ψ') is carried across
/// each slab with its exact 2×2 propagator. Left incidence; returns (R, T).
pub fn transfer_matrix(
    spec: &PotentialSpec,
    energy: f64,
    half_width: f64,
    slice: f64,
) -> (f64, f64) {
    transfer_matrix_from(spec, Side::Left, energy, half_width, slice)
}

/// As [`transfer_matrix`], with right incidence handled by mirroring V.
pub fn transfer_matrix_from(
    spec: &PotentialSpec,
    side: Side,
    energy: f64,
    half_width: f64,
    slice: f64,
) -> (f64, f64) {
    let potential = |x: f64| match side {
        Side::Left => spec.evaluate(x),
        Side::Right => spec.evaluate(-x),
    };
    let units = spec.units();
    let c = units.mass_times_two / (units.hbar * units.hbar);
    let k = (units.mass_times_two * energy).sqrt() / units.hbar;
    let i = Complex64::i();

    // even slab count per half keeps x = 0 and, for rect, x = ±a on slab edges
    let per_half = ((half_width / slice).ceil() as usize).max(1);
    let n = 2 * per_half;
    let w = 2.0 * half_width / n as f64;

    let mut psi = (i * k * half_width).exp();
    let mut dpsi = i * k * psi;
    for j in 0..n {
        let top = half_width - j as f64 * w;
        let mid = top - 0.5 * w;
        let kappa2 = (potential(mid) - energy) * c;
        let kappa = kappa2.sqrt();
        let s = -w;
        let x = kappa * s;
        let (ch, sh_over) = if x.norm() < 1e-6 {
            (
                Complex64::new(1.0, 0.0) + kappa2 * s * s / 2.0,
                (Complex64::new(1.0, 0.0) + kappa2 * s * s / 6.0) * s,
            )
        } else {
            (x.cosh(), x.sinh() / kappa)
        };
        let next_psi = psi * ch + dpsi * sh_over;
        let next_dpsi = psi * kappa2 * sh_over + dpsi * ch;
        psi = next_psi;
        dpsi = next_dpsi;
    }
    let x = -half_width;
    let slope = dpsi / (i * k);
    let incident = (psi + slope) * 0.5 * (-i * k * x).exp();
    let reflected = (psi - slope) * 0.5 * (i * k * x).exp();
    ((reflected / incident).norm_sqr(), incident.inv().norm_sqr())
}

/// Textbook transmission of a real rectangular barrier of height `v` and
/// full width `width`, 2m = ħ = 1.
pub fn textbook_barrier_transmission(v: f64, width: f64, energy: f64) -> f64 {
    if energy < v {
        let kappa = (v - energy).sqrt();
        1.0 / (1.0 + v * v * (kappa * width).sinh().powi(2) / (4.0 * energy * (v - energy)))
    } else if energy > v {
        let q = (energy - v).sqrt();
        1.0 / (1.0 + v * v * (q * width).sin().powi(2) / (4.0 * energy * (energy - v)))
    } else {
        1.0 / (1.0 + v * width * width / 4.0)
    }
}

/// Outermost |x| on a uniform scan where |V(±x)| still reaches the threshold.
pub fn brute_support_radius(spec: &PotentialSpec, tol: f64, spacing: f64, reach: f64) -> f64 {
    let threshold = tol * spec.v1().abs().max(spec.v2().abs());
    let n = (reach / spacing) as usize;
    (0..=n)
        .rev()
        .map(|j| j as f64 * spacing)
        .find(|&x| spec.evaluate(x).norm() >= threshold || spec.evaluate(-x).norm() >= threshold)
        .unwrap_or(0.0)
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn all_models() -> [Model; 4] {
    Model::ALL
}
