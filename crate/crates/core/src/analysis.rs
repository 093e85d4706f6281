//! Energy sweeps, anomaly intervals, handedness and the critical-coupling
//! search.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic;
use crate::engine::{NumericOptions, NumericSolver, Propagator};
use crate::error::{Result, ScatterError};
use crate::potential::{Coefficients, Model, PotentialSpec, Side};

/// Values above 1 + eps (or below −eps) count as anomalous.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Energy resolution of refined interval endpoints.
const REFINE_RESOLUTION: f64 = 1e-4;

/// Gaps R_r − R_l at or below this count as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Analytic,
    Numeric,
}

impl Backend {
    /// Closed form where one exists, numeric integration otherwise.
    pub fn preferred(model: Model) -> Self {
        if model.has_closed_form() {
            Backend::Analytic
        } else {
            Backend::Numeric
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::Analytic => "analytic",
            Backend::Numeric => "numeric",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "analytic" => Ok(Backend::Analytic),
            "numeric" => Ok(Backend::Numeric),
            other => Err(format!(
                "unknown backend `{other}` (expected analytic or numeric)"
            )),
        }
    }
}

/// Coefficient source for one potential.
#[derive(Debug, Clone)]
pub enum Evaluator {
    Analytic(PotentialSpec),
    Numeric(Box<NumericSolver>),
}

impl Evaluator {
    pub fn new(spec: &PotentialSpec, backend: Backend, opts: &NumericOptions) -> Result<Self> {
        match backend {
            Backend::Analytic if spec.model().has_closed_form() => Ok(Evaluator::Analytic(*spec)),
            Backend::Analytic => Err(ScatterError::NoClosedForm(spec.model())),
            Backend::Numeric => Ok(Evaluator::Numeric(Box::new(NumericSolver::new(
                spec, opts,
            )?))),
        }
    }

    /// Coefficients and reciprocity residual (zero for the closed forms).
    pub fn coefficients(&self, energy: f64) -> Result<(Coefficients, f64)> {
        match self {
            Evaluator::Analytic(spec) => Ok((analytic::coefficients(spec, energy)?, 0.0)),
            Evaluator::Numeric(solver) => solver.coefficients(energy),
        }
    }

    pub fn transmission(&self, energy: f64) -> Result<f64> {
        match self {
            Evaluator::Analytic(spec) => match spec.model() {
                Model::Scarf => analytic::scarf_transmission(spec, energy),
                _ => analytic::rect_transmission(spec, energy),
            },
            Evaluator::Numeric(solver) => Ok(solver
                .propagator(Side::Left)
                .amplitudes(energy)?
                .1
                .norm_sqr()),
        }
    }
}

/// `n` evenly spaced points on [lo, hi], endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(ScatterError::InvalidGrid("energy grid is empty".into()));
    }
    if let Some(&e) = grid.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(ScatterError::InvalidGrid(format!(
            "energies must be finite and > 0, got {e}"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ScatterError::InvalidGrid(
            "energies must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub spec: PotentialSpec,
    pub grid: Vec<f64>,
    pub rows: Vec<Coefficients>,
    pub backend: Backend,
    pub options: NumericOptions,
    /// Worst |T_left − T_right|; `None` for the closed forms.
    pub reciprocity_residual: Option<f64>,
}

/// One coefficient row per grid energy. Rows are computed in parallel;
/// the result does not depend on scheduling.
pub fn sweep(
    spec: &PotentialSpec,
    grid: &[f64],
    backend: Backend,
    opts: &NumericOptions,
) -> Result<SweepTable> {
    validate_grid(grid)?;
    let evaluator = Evaluator::new(spec, backend, opts)?;
    let results: Vec<(Coefficients, f64)> = grid
        .par_iter()
        .map(|&e| evaluator.coefficients(e))
        .collect::<Result<_>>()?;
    let residual = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(SweepTable {
        spec: *spec,
        grid: grid.to_vec(),
        rows: results.into_iter().map(|r| r.0).collect(),
        backend,
        options: *opts,
        reciprocity_residual: (backend == Backend::Numeric).then_some(residual),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Column {
    T,
    #[serde(rename = "R_l")]
    RLeft,
    #[serde(rename = "R_r")]
    RRight,
    #[serde(rename = "A_l")]
    ALeft,
    #[serde(rename = "A_r")]
    ARight,
}

impl Column {
    pub const ALL: [Column; 5] = [
        Column::T,
        Column::RLeft,
        Column::RRight,
        Column::ALeft,
        Column::ARight,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Column::T => "T",
            Column::RLeft => "R_l",
            Column::RRight => "R_r",
            Column::ALeft => "A_l",
            Column::ARight => "A_r",
        }
    }

    pub fn value(&self, c: &Coefficients) -> f64 {
        match self {
            Column::T => c.transmission,
            Column::RLeft => c.reflection_left,
            Column::RRight => c.reflection_right,
            Column::ALeft => c.absorption_left,
            Column::ARight => c.absorption_right,
        }
    }
}

fn outside_unit(value: f64, eps: f64) -> bool {
    !(value >= -eps && value <= 1.0 + eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnIntervals {
    pub column: Column,
    pub intervals: Vec<Interval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Handedness {
    LeftAbsorptive,
    RightAbsorptive,
    None,
}

impl Handedness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Handedness::LeftAbsorptive => "left_absorptive",
            Handedness::RightAbsorptive => "right_absorptive",
            Handedness::None => "none",
        }
    }
}

impl fmt::Display for Handedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyReport {
    pub eps: f64,
    /// Energy intervals where each coefficient leaves [−eps, 1 + eps].
    pub anomalous_intervals: Vec<ColumnIntervals>,
    pub physical_left: bool,
    pub physical_right: bool,
    pub handedness: Handedness,
}

impl AnomalyReport {
    pub fn intervals(&self, column: Column) -> &[Interval] {
        self.anomalous_intervals
            .iter()
            .find(|c| c.column == column)
            .map(|c| c.intervals.as_slice())
            .unwrap_or(&[])
    }

    pub fn is_clean(&self) -> bool {
        self.anomalous_intervals
            .iter()
            .all(|c| c.intervals.is_empty())
    }
}

/// Bisect between a normal energy and an anomalous one down to the refinement
/// resolution, returning the midpoint of the final bracket.
fn refine_edge(
    evaluator: Option<&Evaluator>,
    column: Column,
    eps: f64,
    mut normal: f64,
    mut anomalous: f64,
) -> f64 {
    let Some(evaluator) = evaluator else {
        return 0.5 * (normal + anomalous);
    };
    while (anomalous - normal).abs() > REFINE_RESOLUTION {
        let mid = 0.5 * (normal + anomalous);
        match evaluator.coefficients(mid) {
            Ok((c, _)) if outside_unit(column.value(&c), eps) => anomalous = mid,
            Ok(_) => normal = mid,
            Err(_) => break,
        }
    }
    0.5 * (normal + anomalous)
}

pub fn detect_anomalies(table: &SweepTable, eps: f64) -> AnomalyReport {
    let grid = &table.grid;
    let n = grid.len();
    let mut evaluator: Option<Option<Evaluator>> = None;

    let mut anomalous_intervals = Vec::with_capacity(Column::ALL.len());
    for column in Column::ALL {
        let flags: Vec<bool> = table
            .rows
            .iter()
            .map(|r| outside_unit(column.value(r), eps))
            .collect();
        let mut intervals = Vec::new();
        let mut i = 0;
        while i < n {
            if !flags[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i + 1 < n && flags[i + 1] {
                i += 1;
            }
            let end = i;
            let needs_refinement = start > 0 || end + 1 < n;
            if needs_refinement && evaluator.is_none() {
                evaluator = Some(Evaluator::new(&table.spec, table.backend, &table.options).ok());
            }
            let ev = evaluator.as_ref().and_then(|e| e.as_ref());
            let low = if start > 0 {
                refine_edge(ev, column, eps, grid[start - 1], grid[start])
            } else {
                grid[start]
            };
            let high = if end + 1 < n {
                refine_edge(ev, column, eps, grid[end + 1], grid[end])
            } else {
                grid[end]
            };
            intervals.push(Interval { low, high });
            i += 1;
        }
        anomalous_intervals.push(ColumnIntervals { column, intervals });
    }

    let side_ok = |side: Side| {
        table.rows.iter().all(|r| {
            !outside_unit(r.transmission, eps)
                && !outside_unit(r.reflection(side), eps)
                && !outside_unit(r.absorption(side), eps)
        })
    };
    let physical_left = side_ok(Side::Left);
    let physical_right = side_ok(Side::Right);
    let handedness = match (physical_left, physical_right) {
        (true, false) => Handedness::LeftAbsorptive,
        (false, true) => Handedness::RightAbsorptive,
        _ => Handedness::None,
    };
    AnomalyReport {
        eps,
        anomalous_intervals,
        physical_left,
        physical_right,
        handedness,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HandednessSummary {
    /// min over the grid of R_r − R_l
    pub min_gap: f64,
    pub max_gap: f64,
    /// R_l < R_r strictly (beyond 1e-12) at every grid point.
    pub monotone_claim: bool,
}

pub fn handedness_summary(table: &SweepTable) -> HandednessSummary {
    let gaps = table
        .rows
        .iter()
        .map(|r| r.reflection_right - r.reflection_left);
    let (min_gap, max_gap) = gaps.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
        (lo.min(g), hi.max(g))
    });
    HandednessSummary {
        min_gap,
        max_gap,
        monotone_claim: !table.rows.is_empty() && min_gap > TIE_TOL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalResult {
    pub v2_critical: f64,
    /// Predicate false at `.0`, true at `.1`.
    pub bracket: (f64, f64),
    pub predicate_evals: usize,
}

/// 200 energies on [0.2·V1, 3·V1], concentrated around the barrier height.
pub fn default_critical_grid(v1: f64) -> Vec<f64> {
    linspace(0.2 * v1, 3.0 * v1, 200)
}

/// Whether max over `grid` of T exceeds 1 + eps for the PT-symmetric
/// absorptive-left member of `model` with imaginary strength `v2`.
pub fn transmission_anomalous(
    model: Model,
    v1: f64,
    v2: f64,
    a: f64,
    grid: &[f64],
    opts: &NumericOptions,
) -> Result<bool> {
    let spec = PotentialSpec::pt_symmetric(model, v1, v2, a)?;
    let max_t = match Backend::preferred(model) {
        Backend::Analytic => {
            let ev = Evaluator::Analytic(spec);
            grid.iter()
                .map(|&e| ev.transmission(e))
                .try_fold(f64::NEG_INFINITY, |m, t| t.map(|t| m.max(t)))?
        }
        Backend::Numeric => {
            let left = Propagator::new(&spec, Side::Left, opts)?;
            grid.par_iter()
                .map(|&e| left.amplitudes(e).map(|(_, t)| t.norm_sqr()))
                .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))?
        }
    };
    Ok(max_t > 1.0 + DEFAULT_EPS)
}

/// Bisection on V2 for the onset of anomalous transmission.
pub fn find_critical_v2(
    model: Model,
    v1: f64,
    a: f64,
    v2_range: (f64, f64),
    grid: &[f64],
    tol: f64,
    opts: &NumericOptions,
) -> Result<CriticalResult> {
    validate_grid(grid)?;
    let (mut low, mut high) = v2_range;
    if !(low >= 0.0 && high > low && tol > 0.0) {
        return Err(ScatterError::InvalidSpec(format!(
            "critical search needs 0 <= low < high and tol > 0 (range [{low}, {high}], tol {tol})"
        )));
    }
    let predicate = |v2: f64| transmission_anomalous(model, v1, v2, a, grid, opts);
    let mut evals = 2;
    if predicate(low)? || !predicate(high)? {
        return Err(ScatterError::NoCrossing { low, high });
    }
    while high - low > tol {
        let mid = 0.5 * (low + high);
        evals += 1;
        if predicate(mid)? {
            high = mid;
        } else {
            low = mid;
        }
    }
    Ok(CriticalResult {
        v2_critical: 0.5 * (low + high),
        bracket: (low, high),
        predicate_evals: evals,
    })
}
