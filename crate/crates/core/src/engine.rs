//! Direct integration of ψ'' = (2m/ħ²)(V − E)ψ across a localized potential.
//!
//! The solution is seeded as a unit outgoing wave on the far side of the
//! barrier and integrated back toward the incidence side with fixed-step
//! classical RK4. At the near edge the state (ψ, ψ') splits into incident
//! and reflected plane waves, which fixes r and t without iteration.
//! Right incidence runs the same code on the mirrored potential V(−x).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::potential::{Approach, Coefficients, Model, PotentialSpec, Side};

/// Largest |T_left − T_right| accepted from a numeric solve.
pub const RECIPROCITY_TOL: f64 = 1e-6;

/// Accuracy target for the opt-in step-halving verification.
const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericOptions {
    /// Integration step (absolute length).
    pub step: f64,
    /// Relative cutoff used to truncate the potential tails.
    pub truncation_tol: f64,
    pub max_steps: usize,
    /// Re-solve at half step and fail with [`ScatterError::StepTooLarge`]
    /// when the Richardson error estimate exceeds 1e-6.
    pub verify_step: bool,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            step: 1e-3,
            truncation_tol: 1e-10,
            max_steps: 20_000_000,
            verify_step: false,
        }
    }
}

impl NumericOptions {
    /// Defaults with the step scaled to the barrier width (h = 1e-3·a).
    pub fn for_spec(spec: &PotentialSpec) -> Self {
        NumericOptions {
            step: 1e-3 * spec.a(),
            ..Self::default()
        }
    }

    pub fn with_step(self, step: f64) -> Self {
        NumericOptions { step, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(ScatterError::InvalidOptions(format!(
                "step must be > 0, got {}",
                self.step
            )));
        }
        if !(self.truncation_tol > 0.0 && self.truncation_tol < 1.0) {
            return Err(ScatterError::InvalidOptions(format!(
                "truncation_tol must lie in (0, 1), got {}",
                self.truncation_tol
            )));
        }
        if self.max_steps < 2 {
            return Err(ScatterError::InvalidOptions(
                "max_steps must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavefunctionSample {
    pub x: f64,
    pub value: Complex64,
}

/// Amplitudes and wavefunction for one energy and side of incidence.
///
/// `psi` is in the physical frame, ordered by increasing x, and normalised to
/// unit incident amplitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringSolution {
    pub energy: f64,
    pub side: Side,
    pub r: Complex64,
    pub t: Complex64,
    pub psi: Vec<WavefunctionSample>,
}

impl ScatteringSolution {
    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }
}

/// The potential as seen from one side, pre-sampled at every RK4 stage of
/// the integration grid. Building one is the expensive part; solving at an
/// energy only does complex arithmetic, so a propagator is reused across a
/// sweep.
#[derive(Debug, Clone)]
pub struct Propagator {
    side: Side,
    half_width: f64,
    coupling: f64,
    mass_times_two: f64,
    hbar: f64,
    /// Grid from +L down to −L in the frame of the (possibly mirrored) potential.
    nodes: Vec<f64>,
    v_start: Vec<Complex64>,
    v_mid: Vec<Complex64>,
    v_end: Vec<Complex64>,
}

impl Propagator {
    pub fn new(spec: &PotentialSpec, side: Side, opts: &NumericOptions) -> Result<Self> {
        opts.validate()?;
        let a = spec.a();
        let half_width = spec.support_radius(opts.truncation_tol).max(a);
        // Even counts keep x = 0 on the grid; for rect the jumps at ±a, 0 are nodes.
        let total = if spec.model() == Model::Rect {
            2 * round_up_even((a / opts.step).ceil())
        } else {
            round_up_even((2.0 * half_width / opts.step).ceil())
        };
        if total > opts.max_steps {
            return Err(ScatterError::StepBudgetExceeded {
                required: total,
                max: opts.max_steps,
            });
        }

        let nodes: Vec<f64> = (0..=total)
            .map(|j| half_width * (1.0 - (2 * j) as f64 / total as f64))
            .collect();
        let mut v_start = Vec::with_capacity(total);
        let mut v_mid = Vec::with_capacity(total);
        let mut v_end = Vec::with_capacity(total);
        for w in nodes.windows(2) {
            let (from, to) = (w[0], w[1]);
            // Each step covers (to, from): take limits from inside that interval.
            v_start.push(spec.evaluate_from(side, from, Approach::FromBelow));
            v_mid.push(spec.evaluate_from(side, 0.5 * (from + to), Approach::FromBelow));
            v_end.push(spec.evaluate_from(side, to, Approach::FromAbove));
        }

        let units = spec.units();
        Ok(Propagator {
            side,
            half_width,
            coupling: units.coupling(),
            mass_times_two: units.mass_times_two,
            hbar: units.hbar,
            nodes,
            v_start,
            v_mid,
            v_end,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn steps(&self) -> usize {
        self.v_start.len()
    }

    fn integrate(
        &self,
        energy: f64,
        mut record: Option<&mut Vec<Complex64>>,
    ) -> Result<(Complex64, Complex64)> {
        if !(energy > 0.0 && energy.is_finite()) {
            return Err(ScatterError::NonPositiveEnergy(energy));
        }
        let i = Complex64::i();
        let k = (self.mass_times_two * energy).sqrt() / self.hbar;
        let l = self.half_width;
        let w = |v: Complex64| (v - energy) * self.coupling;

        let mut psi = (i * k * l).exp();
        let mut dpsi = i * k * psi;
        if let Some(buf) = record.as_deref_mut() {
            buf.push(psi);
        }
        for j in 0..self.steps() {
            let s = self.nodes[j + 1] - self.nodes[j];
            let half = 0.5 * s;
            let (w0, wm, w1) = (w(self.v_start[j]), w(self.v_mid[j]), w(self.v_end[j]));

            let (k1p, k1d) = (dpsi, w0 * psi);
            let (k2p, k2d) = (dpsi + k1d * half, wm * (psi + k1p * half));
            let (k3p, k3d) = (dpsi + k2d * half, wm * (psi + k2p * half));
            let (k4p, k4d) = (dpsi + k3d * s, w1 * (psi + k3p * s));

            psi += (k1p + (k2p + k3p) * 2.0 + k4p) * (s / 6.0);
            dpsi += (k1d + (k2d + k3d) * 2.0 + k4d) * (s / 6.0);
            if let Some(buf) = record.as_deref_mut() {
                buf.push(psi);
            }
        }

        // ψ = c₊ e^{ikx} + c₋ e^{−ikx} at x = −L.
        let x = -l;
        let slope = dpsi / (i * k);
        let incident = (psi + slope) * 0.5 * (-i * k * x).exp();
        let reflected = (psi - slope) * 0.5 * (i * k * x).exp();
        if !(incident.is_finite() && reflected.is_finite()) || incident.norm() == 0.0 {
            return Err(ScatterError::Overflow {
                energy,
                half_width: l,
            });
        }
        Ok((incident, reflected))
    }

    /// (r, t) at `energy`.
    pub fn amplitudes(&self, energy: f64) -> Result<(Complex64, Complex64)> {
        let (incident, reflected) = self.integrate(energy, None)?;
        Ok((reflected / incident, incident.inv()))
    }

    pub fn solve(&self, energy: f64) -> Result<ScatteringSolution> {
        let mut values = Vec::with_capacity(self.nodes.len());
        let (incident, reflected) = self.integrate(energy, Some(&mut values))?;
        let norm = incident.inv();
        let mut psi: Vec<WavefunctionSample> = self
            .nodes
            .iter()
            .zip(&values)
            .map(|(&x, &v)| WavefunctionSample {
                x: match self.side {
                    Side::Left => x,
                    Side::Right => -x,
                },
                value: v * norm,
            })
            .collect();
        if self.side == Side::Left {
            psi.reverse();
        }
        Ok(ScatteringSolution {
            energy,
            side: self.side,
            r: reflected * norm,
            t: norm,
            psi,
        })
    }
}

fn round_up_even(n: f64) -> usize {
    let n = n.max(2.0) as usize;
    n + n % 2
}

fn verify_step(
    spec: &PotentialSpec,
    energy: f64,
    side: Side,
    opts: &NumericOptions,
    coarse: (Complex64, Complex64),
) -> Result<()> {
    let fine_opts = opts.with_step(0.5 * opts.step);
    let fine = Propagator::new(spec, side, &fine_opts)?.amplitudes(energy)?;
    let scaled = |c: f64, f: f64| (c - f).abs() / 15.0 / f.abs().max(1.0);
    let estimate = scaled(coarse.0.norm_sqr(), fine.0.norm_sqr())
        .max(scaled(coarse.1.norm_sqr(), fine.1.norm_sqr()));
    if estimate > VERIFY_TOL {
        return Err(ScatterError::StepTooLarge {
            energy,
            step: opts.step,
            estimate,
        });
    }
    Ok(())
}

/// Amplitudes and wavefunction for one energy and side.
pub fn solve_scattering(
    spec: &PotentialSpec,
    energy: f64,
    side: Side,
    opts: &NumericOptions,
) -> Result<ScatteringSolution> {
    let solution = Propagator::new(spec, side, opts)?.solve(energy)?;
    if opts.verify_step {
        verify_step(spec, energy, side, opts, (solution.r, solution.t))?;
    }
    Ok(solution)
}

/// Both-side solver for repeated evaluation over an energy grid.
#[derive(Debug, Clone)]
pub struct NumericSolver {
    spec: PotentialSpec,
    opts: NumericOptions,
    left: Propagator,
    right: Propagator,
}

impl NumericSolver {
    pub fn new(spec: &PotentialSpec, opts: &NumericOptions) -> Result<Self> {
        Ok(NumericSolver {
            spec: *spec,
            opts: *opts,
            left: Propagator::new(spec, Side::Left, opts)?,
            right: Propagator::new(spec, Side::Right, opts)?,
        })
    }

    pub fn propagator(&self, side: Side) -> &Propagator {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Coefficients plus the reciprocity residual |T_left − T_right|.
    pub fn coefficients(&self, energy: f64) -> Result<(Coefficients, f64)> {
        let (coefficients, residual) = self.coefficients_unchecked(energy)?;
        if residual.is_nan() || residual > RECIPROCITY_TOL {
            return Err(ScatterError::ReciprocityViolation { energy, residual });
        }
        Ok((coefficients, residual))
    }

    /// As [`coefficients`](Self::coefficients) but leaves judging the
    /// reciprocity residual to the caller.
    pub fn coefficients_unchecked(&self, energy: f64) -> Result<(Coefficients, f64)> {
        let left = self.left.amplitudes(energy)?;
        let right = self.right.amplitudes(energy)?;
        if self.opts.verify_step {
            verify_step(&self.spec, energy, Side::Left, &self.opts, left)?;
            verify_step(&self.spec, energy, Side::Right, &self.opts, right)?;
        }
        let t = left.1.norm_sqr();
        let residual = (t - right.1.norm_sqr()).abs();
        Ok((
            Coefficients::new(energy, t, left.0.norm_sqr(), right.0.norm_sqr()),
            residual,
        ))
    }
}

/// Coefficients from both sides of incidence, with T taken from the left
/// solve. The second value is the reciprocity residual |T_left − T_right|;
/// anything above [`RECIPROCITY_TOL`] is reported as an error.
pub fn coefficients_numeric(
    spec: &PotentialSpec,
    energy: f64,
    opts: &NumericOptions,
) -> Result<(Coefficients, f64)> {
    NumericSolver::new(spec, opts)?.coefficients(energy)
}

/// −(2m/ħ²k) ∫ Im V(x) |ψ(x)|² dx over the stored wavefunction samples,
/// by composite Simpson quadrature.
pub fn absorption_integral(spec: &PotentialSpec, solution: &ScatteringSolution) -> Result<f64> {
    let n = solution.psi.len();
    if n < 3 {
        return Err(ScatterError::TooFewSamples(n));
    }
    let integrand: Vec<f64> = solution
        .psi
        .iter()
        .map(|s| spec.evaluate(s.x).im * s.value.norm_sqr())
        .collect();
    let h = (solution.psi[n - 1].x - solution.psi[0].x) / (n - 1) as f64;
    let integral = simpson(&integrand, h);
    let units = spec.units();
    Ok(-units.coupling() / units.wavenumber(solution.energy) * integral)
}

/// Composite Simpson on uniform samples; an even sample count closes with a
/// trapezoid on the last interval.
fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    let odd_len = if n % 2 == 1 { n } else { n - 1 };
    let mut sum = y[0] + y[odd_len - 1];
    for (i, v) in y.iter().enumerate().take(odd_len - 1).skip(1) {
        sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = sum * h / 3.0;
    if odd_len < n {
        total += 0.5 * h * (y[n - 2] + y[n - 1]);
    }
    total
}

/// T and R for one side at steps h, h/2 and h/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepHalving {
    pub steps: [f64; 3],
    pub transmission: [f64; 3],
    pub reflection: [f64; 3],
}

impl StepHalving {
    /// |c(h) − c(h/2)| / |c(h/2) − c(h/4)| for (T, R); tends to 16 for a
    /// fourth-order scheme.
    pub fn ratios(&self) -> (f64, f64) {
        let ratio = |c: &[f64; 3]| (c[0] - c[1]).abs() / (c[1] - c[2]).abs();
        (ratio(&self.transmission), ratio(&self.reflection))
    }
}

pub fn step_halving(
    spec: &PotentialSpec,
    energy: f64,
    side: Side,
    opts: &NumericOptions,
) -> Result<StepHalving> {
    let mut out = StepHalving {
        steps: [0.0; 3],
        transmission: [0.0; 3],
        reflection: [0.0; 3],
    };
    for level in 0..3 {
        let step = opts.step / f64::from(1u32 << level);
        let (r, t) = Propagator::new(spec, side, &opts.with_step(step))?.amplitudes(energy)?;
        out.steps[level] = step;
        out.transmission[level] = t.norm_sqr();
        out.reflection[level] = r.norm_sqr();
    }
    Ok(out)
}
