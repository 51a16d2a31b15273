use crate::matrix::C64;

/// Threshold convention for numerical rank decisions.
///
/// A singular value counts towards the rank when it exceeds the threshold.
/// `Default` uses `max(rows, cols) * eps * sigma_max`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RankTol {
    #[default]
    Default,
    /// Threshold `tol * sigma_max`.
    Relative(f64),
    /// Fixed threshold.
    Absolute(f64),
}

impl RankTol {
    /// Threshold for a matrix of the given shape whose largest singular value
    /// is `sigma_max`.
    pub fn threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match *self {
            RankTol::Default => rows.max(cols) as f64 * f64::EPSILON * sigma_max,
            RankTol::Relative(t) => t * sigma_max,
            RankTol::Absolute(t) => t,
        }
    }

    /// Like [`threshold`](Self::threshold), with `sigma_max` raised to at
    /// least `floor`. Used when a matrix was computed from data of a known
    /// larger scale, so that pure rounding noise is not mistaken for rank.
    pub fn threshold_with_floor(
        &self,
        rows: usize,
        cols: usize,
        sigma_max: f64,
        floor: f64,
    ) -> f64 {
        self.threshold(rows, cols, sigma_max.max(floor))
    }
}

/// Candidate shifts for the regularity search on `A - lambda B`.
///
/// The default ladder is `0, 1, -1, 2, -2, ...`, continued until `n + 1`
/// distinct values have been tried. Explicit shifts are tried first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShiftLadder {
    pub preferred: Vec<C64>,
}

impl ShiftLadder {
    pub fn with_preferred(preferred: Vec<C64>) -> Self {
        Self { preferred }
    }

    /// Shifts to try for a pencil of dimension `n`: the preferred ones, then
    /// enough ladder values to reach `n + 1` distinct candidates.
    pub fn candidates(&self, n: usize) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::with_capacity(n + 1 + self.preferred.len());
        for &s in &self.preferred {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        let mut distinct = out.len();
        let mut step = 0i64;
        while distinct < n + 1 {
            let v = if step == 0 {
                0.0
            } else if step % 2 == 1 {
                ((step + 1) / 2) as f64
            } else {
                -((step / 2) as f64)
            };
            step += 1;
            let s = C64::new(v, 0.0);
            if !out.contains(&s) {
                out.push(s);
                distinct += 1;
            }
        }
        out
    }
}

/// Tolerances and search settings shared by the analysis routines.
///
/// None of these thresholds comes from the underlying mathematics, which is
/// exact; all are configurable.
#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub rank: RankTol,
    /// Relative threshold under which a generalized Schur diagonal entry is
    /// treated as zero, scaled by `max(|A|_F, |B|_F)`.
    pub pencil_zero: f64,
    /// Relative orthogonal-distance threshold for consistent initial
    /// conditions, and the relative residual bound for propagated steps.
    pub consistency: f64,
    /// Eigenvalues with `|lambda| >= 1 - margin` are not counted as stable.
    pub stability_margin: f64,
    /// Upper bound on the condition number of the Drazin core inversion.
    pub drazin_condition: f64,
    /// Relative residual bound for accepting eigenpairs.
    pub eigenpair: f64,
    pub shifts: ShiftLadder,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rank: RankTol::Default,
            pencil_zero: 1e-10,
            consistency: 1e-8,
            stability_margin: 1e-9,
            drazin_condition: 1e12,
            eigenpair: 1e-8,
            shifts: ShiftLadder::default(),
        }
    }
}
