//! Potential models, unit conventions and the per-energy coefficient record.
//!
//! All smooth models are oriented with the absorptive half (Im V < 0) on the
//! left for `V2 >= 0`. Right incidence is handled by the callers through
//! spatial reflection of the potential, never by flipping the sign of `V2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};

/// Mass and Planck constant in the units the potential is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Units {
    /// 2m
    pub mass_times_two: f64,
    pub hbar: f64,
}

impl Default for Units {
    fn default() -> Self {
        Units {
            mass_times_two: 1.0,
            hbar: 1.0,
        }
    }
}

impl Units {
    pub fn new(mass_times_two: f64, hbar: f64) -> Result<Self> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(mass_times_two) || !positive(hbar) {
            return Err(ScatterError::InvalidSpec(format!(
                "units must be strictly positive (2m = {mass_times_two}, hbar = {hbar})"
            )));
        }
        Ok(Units {
            mass_times_two,
            hbar,
        })
    }

    /// 2m/ħ², the factor in ψ'' = (2m/ħ²)(V − E)ψ.
    pub fn coupling(&self) -> f64 {
        self.mass_times_two / (self.hbar * self.hbar)
    }

    /// Free wavenumber k = sqrt(2mE)/ħ.
    pub fn wavenumber(&self, energy: f64) -> f64 {
        (self.mass_times_two * energy).sqrt() / self.hbar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Two constant segments V1 + i s1 V2 on (−a, 0) and V1 + i s2 V2 on (0, a).
    Rect,
    /// V1 sech²(x/a) + i V2 sech(x/a) tanh(x/a).
    Scarf,
    /// (V1 + i V2 z) / (1 + z²)⁴ with z = x/a.
    RationalOdd,
    /// (V1 + i V2 z) e^{−|z|} with z = x/a.
    ExpLinear,
}

impl Model {
    pub const ALL: [Model; 4] = [
        Model::Rect,
        Model::Scarf,
        Model::RationalOdd,
        Model::ExpLinear,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Rect => "rect",
            Model::Scarf => "scarf",
            Model::RationalOdd => "rational_odd",
            Model::ExpLinear => "exp_linear",
        }
    }

    pub fn has_closed_form(&self) -> bool {
        matches!(self, Model::Rect | Model::Scarf)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = ScatterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rect" => Ok(Model::Rect),
            "scarf" => Ok(Model::Scarf),
            "rational_odd" => Ok(Model::RationalOdd),
            "exp_linear" => Ok(Model::ExpLinear),
            other => Err(ScatterError::UnknownModel(other.to_string())),
        }
    }
}

/// Which one-sided limit to take at a jump of the rectangular potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    FromBelow,
    FromAbove,
}

impl Approach {
    fn mirrored(self) -> Self {
        match self {
            Approach::FromBelow => Approach::FromAbove,
            Approach::FromAbove => Approach::FromBelow,
        }
    }
}

/// Side of incidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Immutable description of one barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSpec {
    model: Model,
    v1: f64,
    v2: f64,
    a: f64,
    s1: i8,
    s2: i8,
    units: Units,
}

impl PotentialSpec {
    /// Generic constructor. `s1`/`s2` are only meaningful for [`Model::Rect`]
    /// and must lie in {−1, 0, 1}.
    pub fn new(
        model: Model,
        v1: f64,
        v2: f64,
        a: f64,
        s1: i8,
        s2: i8,
        units: Units,
    ) -> Result<Self> {
        if !v1.is_finite() || !v2.is_finite() {
            return Err(ScatterError::InvalidSpec(format!(
                "V1 and V2 must be finite (V1 = {v1}, V2 = {v2})"
            )));
        }
        if v2 < 0.0 {
            return Err(ScatterError::InvalidSpec(format!(
                "V2 must be >= 0 (got {v2}); the absorptive side is chosen by the side of incidence"
            )));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(ScatterError::InvalidSpec(format!(
                "width a must be > 0 (got {a})"
            )));
        }
        for s in [s1, s2] {
            if !(-1..=1).contains(&s) {
                return Err(ScatterError::InvalidSpec(format!(
                    "segment sign must be -1, 0 or 1 (got {s})"
                )));
            }
        }
        // Validate units even if constructed by hand.
        Units::new(units.mass_times_two, units.hbar)?;
        Ok(PotentialSpec {
            model,
            v1,
            v2,
            a,
            s1,
            s2,
            units,
        })
    }

    pub fn rect(v1: f64, v2: f64, a: f64, s1: i8, s2: i8) -> Result<Self> {
        Self::new(Model::Rect, v1, v2, a, s1, s2, Units::default())
    }

    pub fn scarf(v1: f64, v2: f64, a: f64) -> Result<Self> {
        Self::new(Model::Scarf, v1, v2, a, 0, 0, Units::default())
    }

    pub fn rational_odd(v1: f64, v2: f64, a: f64) -> Result<Self> {
        Self::new(Model::RationalOdd, v1, v2, a, 0, 0, Units::default())
    }

    pub fn exp_linear(v1: f64, v2: f64, a: f64) -> Result<Self> {
        Self::new(Model::ExpLinear, v1, v2, a, 0, 0, Units::default())
    }

    /// Smooth model of the given kind; rect gets the PT-symmetric
    /// absorptive-left signs (s1 = −1, s2 = +1).
    pub fn pt_symmetric(model: Model, v1: f64, v2: f64, a: f64) -> Result<Self> {
        let (s1, s2) = if model == Model::Rect {
            (-1, 1)
        } else {
            (0, 0)
        };
        Self::new(model, v1, v2, a, s1, s2, Units::default())
    }

    pub fn with_units(self, units: Units) -> Result<Self> {
        Self::new(
            self.model, self.v1, self.v2, self.a, self.s1, self.s2, units,
        )
    }

    pub fn with_v2(self, v2: f64) -> Result<Self> {
        Self::new(
            self.model, self.v1, v2, self.a, self.s1, self.s2, self.units,
        )
    }

    pub fn model(&self) -> Model {
        self.model
    }
    pub fn v1(&self) -> f64 {
        self.v1
    }
    pub fn v2(&self) -> f64 {
        self.v2
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn signs(&self) -> (i8, i8) {
        (self.s1, self.s2)
    }
    pub fn units(&self) -> Units {
        self.units
    }

    /// Natural energy scale ħ²/(2m a²).
    pub fn delta(&self) -> f64 {
        self.units.hbar * self.units.hbar / (self.units.mass_times_two * self.a * self.a)
    }

    fn rect_segment(&self, sign: i8) -> Complex64 {
        Complex64::new(self.v1, f64::from(sign) * self.v2)
    }

    /// V(x). At the jumps of the rectangular potential the mean of the two
    /// one-sided limits is returned.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        match self.model {
            Model::Rect => {
                (self.evaluate_limit(x, Approach::FromBelow)
                    + self.evaluate_limit(x, Approach::FromAbove))
                    * 0.5
            }
            Model::Scarf => {
                let z = x / self.a;
                let sech = 1.0 / z.cosh();
                Complex64::new(self.v1 * sech * sech, self.v2 * sech * z.tanh())
            }
            Model::RationalOdd => {
                let z = x / self.a;
                let d = (1.0 + z * z).powi(4);
                Complex64::new(self.v1 / d, self.v2 * z / d)
            }
            Model::ExpLinear => {
                let z = x / self.a;
                let e = (-z.abs()).exp();
                Complex64::new(self.v1 * e, self.v2 * z * e)
            }
        }
    }

    /// One-sided limit of V at `x`. Identical to [`evaluate`](Self::evaluate)
    /// for the continuous models.
    pub fn evaluate_limit(&self, x: f64, approach: Approach) -> Complex64 {
        if self.model != Model::Rect {
            return self.evaluate(x);
        }
        let a = self.a;
        // Half-open segments chosen so that the limit is taken from inside.
        let (inside_left, inside_right) = match approach {
            Approach::FromBelow => (x > -a && x <= 0.0, x > 0.0 && x <= a),
            Approach::FromAbove => (x >= -a && x < 0.0, x >= 0.0 && x < a),
        };
        if inside_left {
            self.rect_segment(self.s1)
        } else if inside_right {
            self.rect_segment(self.s2)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// V as seen by a particle incident from `side`: the potential itself for
    /// left incidence, its mirror image V(−x) for right incidence.
    pub fn evaluate_from(&self, side: Side, x: f64, approach: Approach) -> Complex64 {
        match side {
            Side::Left => self.evaluate_limit(x, approach),
            Side::Right => self.evaluate_limit(-x, approach.mirrored()),
        }
    }

    /// Smallest L with |V(x)| < tol·max(|V1|, |V2|) for all |x| >= L.
    ///
    /// The rectangular barrier has compact support and always returns `a`.
    /// A vanishing potential returns 0.
    pub fn support_radius(&self, tol: f64) -> f64 {
        debug_assert!(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1)");
        if self.model == Model::Rect {
            return self.a;
        }
        let threshold = tol * self.v1.abs().max(self.v2.abs());
        if threshold == 0.0 {
            return 0.0;
        }
        let magnitude = |x: f64| self.evaluate(x).norm().max(self.evaluate(-x).norm());
        let above = |x: f64| magnitude(x) >= threshold;

        // Push outward until the tail is below threshold and decaying.
        let mut outer = self.a;
        while above(outer) || magnitude(outer * 1.01) > magnitude(outer) {
            outer *= 2.0;
            if outer > 1e6 * self.a {
                break;
            }
        }

        // Walk inward on a grid tied to `a` so results are comparable across tolerances.
        let spacing = self.a / 32.0;
        let mut j = (outer / spacing).ceil() as u64;
        while j > 0 && !above(j as f64 * spacing) {
            j -= 1;
        }
        if j == 0 && !above(0.0) {
            return 0.0;
        }
        let mut lo = j as f64 * spacing;
        let mut hi = lo + spacing;
        while hi - lo > 1e-13 * hi.max(self.a) {
            let mid = 0.5 * (lo + hi);
            if above(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// True iff V(−x) = conj V(x) within 1e-12 at `n_samples` points spread
    /// symmetrically over [−6a, 6a].
    pub fn check_pt_symmetry(&self, n_samples: usize) -> bool {
        let n = n_samples.max(3);
        let span = 6.0 * self.a;
        (0..n).all(|i| {
            let x = -span + 2.0 * span * i as f64 / (n - 1) as f64;
            (self.evaluate(-x) - self.evaluate(x).conj()).norm() <= 1e-12
        })
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} V1={} V2={} a={}",
            self.model, self.v1, self.v2, self.a
        )?;
        if self.model == Model::Rect {
            write!(f, " s1={} s2={}", self.s1, self.s2)?;
        }
        Ok(())
    }
}

/// Scattering probabilities at one energy. Absorption follows from
/// A = 1 − R − T for each side and may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "T")]
    pub transmission: f64,
    #[serde(rename = "R_l")]
    pub reflection_left: f64,
    #[serde(rename = "R_r")]
    pub reflection_right: f64,
    #[serde(rename = "A_l")]
    pub absorption_left: f64,
    #[serde(rename = "A_r")]
    pub absorption_right: f64,
}

impl Coefficients {
    pub fn new(
        energy: f64,
        transmission: f64,
        reflection_left: f64,
        reflection_right: f64,
    ) -> Self {
        Coefficients {
            energy,
            transmission,
            reflection_left,
            reflection_right,
            absorption_left: 1.0 - reflection_left - transmission,
            absorption_right: 1.0 - reflection_right - transmission,
        }
    }

    pub fn reflection(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.reflection_left,
            Side::Right => self.reflection_right,
        }
    }

    pub fn absorption(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.absorption_left,
            Side::Right => self.absorption_right,
        }
    }
}
