use pencilk::{Options, RankTol, ShiftLadder, C64};

use crate::error::{CliError, CliResult};
use crate::format::NumFmt;

pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Tolerances, shift override and output settings of one CLI run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub options: Options,
    pub precision: usize,
    /// `None` selects the per-command default.
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            options: Options::default(),
            precision: DEFAULT_PRECISION,
            format: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Relative rank threshold, `tol * sigma_max`.
    pub rank_tol: Option<f64>,
    /// Consistency distance and residual bound.
    pub residual_tol: Option<f64>,
    pub stability_margin: Option<f64>,
    /// Shifts tried before the default ladder.
    pub shifts: Vec<C64>,
    pub precision: Option<usize>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_overrides(o: &Overrides) -> CliResult<Self> {
        let mut options = Options::default();
        if let Some(t) = o.rank_tol {
            options.rank = RankTol::Relative(positive("--tol-rank", t)?);
        }
        if let Some(t) = o.residual_tol {
            options.consistency = positive("--tol-residual", t)?;
        }
        if let Some(m) = o.stability_margin {
            options.stability_margin = positive("--stability-margin", m)?;
        }
        if let Some(z) = o
            .shifts
            .iter()
            .find(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(CliError::Config(format!("shift {z} is not finite")));
        }
        options.shifts = ShiftLadder::with_preferred(o.shifts.clone());
        let precision = o.precision.unwrap_or(DEFAULT_PRECISION);
        if !(1..=17).contains(&precision) {
            return Err(CliError::Config(format!(
                "precision {precision} is outside 1..=17"
            )));
        }
        Ok(Self {
            options,
            precision,
            format: o.format,
        })
    }

    pub fn fmt(&self) -> NumFmt {
        NumFmt::new(self.precision)
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn positive(flag: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Config(format!(
            "{flag} must be positive and finite, got {x}"
        )))
    }
}

/// Parses a shift given as `re` or `re,im`.
pub fn parse_shift(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| format!("invalid number '{t}' in shift '{s}'"))
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("shift '{s}' must be 're' or 're,im'")),
    }
}
