//! Bundled worked examples. Each writes its matrices, trajectories and
//! volume traces into a directory and returns a list of checks comparing
//! computed values with the expected ones.

use std::fs;
use std::path::{Path, PathBuf};

use pencilk::linalg::{range_basis, subspace_distance};
use pencilk::matrix::{vec_norm, vec_sub};
use pencilk::{
    analyze, compound_regularity, compound_singular_witness, generalized_eigenvalues, kcompound,
    match_spectra, propagate, stable_subspace_bound, volume_trace, DaeAnalysis, DaeSystem, GenEig,
    Matrix, Trajectory, C64,
};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::format::{real_part, real_part_vec, vector_cells, vector_header, Csv, Json, NumFmt};
use crate::io::{matrix_text, write_file};

pub const NAMES: [&str; 3] = ["periodic", "leslie", "singular"];

/// Leslie parameters `(b1, b2, p1, p2)`.
pub const LESLIE: (f64, f64, f64, f64) = (1.1, 2.3, 0.9, 0.7);

/// One comparison of a computed value against its expected value.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: f64,
    /// Deviation measure compared against `tolerance`.
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `|computed - expected| <= tol`.
    pub fn close(name: &str, expected: f64, computed: f64, tol: f64) -> Self {
        let error = (computed - expected).abs();
        Self {
            name: name.into(),
            expected: format!("{expected}"),
            computed,
            error,
            tolerance: tol,
            pass: error <= tol,
        }
    }

    /// A deviation that should not exceed `tol`; `expected` describes the
    /// exact target.
    pub fn deviation(name: &str, expected: &str, error: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            expected: expected.into(),
            computed: error,
            error,
            tolerance: tol,
            pass: error <= tol,
        }
    }

    pub fn below(name: &str, computed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            expected: format!("< {bound:e}"),
            computed,
            error: computed,
            tolerance: bound,
            pass: computed < bound,
        }
    }

    pub fn count(name: &str, expected: usize, computed: usize) -> Self {
        Self {
            name: name.into(),
            expected: expected.to_string(),
            computed: computed as f64,
            error: (computed as f64 - expected as f64).abs(),
            tolerance: 0.0,
            pass: computed == expected,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleRun {
    pub name: String,
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub checks: Vec<Check>,
}

impl ExampleRun {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary(&self, cfg: &RunConfig) -> String {
        let f = cfg.fmt();
        match cfg.format_or(Format::Json) {
            Format::Json => {
                let checks = self
                    .checks
                    .iter()
                    .map(|c| {
                        Json::obj()
                            .with("name", c.name.as_str())
                            .with("expected", c.expected.as_str())
                            .with("computed", c.computed)
                            .with("error", c.error)
                            .with("tolerance", c.tolerance)
                            .with("pass", c.pass)
                    })
                    .collect();
                Json::obj()
                    .with("example", self.name.as_str())
                    .with("out_dir", self.out_dir.display().to_string())
                    .with(
                        "files",
                        Json::Arr(self.files.iter().map(|s| s.as_str().into()).collect()),
                    )
                    .with("checks", Json::Arr(checks))
                    .with("all_pass", self.all_pass())
                    .render(&f)
            }
            Format::Csv => {
                let mut csv = Csv::new([
                    "check",
                    "expected",
                    "computed",
                    "error",
                    "tolerance",
                    "pass",
                ]);
                for c in &self.checks {
                    csv.push(vec![
                        c.name.clone(),
                        c.expected.clone(),
                        f.num(c.computed),
                        f.num(c.error),
                        f.num(c.tolerance),
                        c.pass.to_string(),
                    ]);
                }
                csv.render()
            }
        }
    }
}

/// Runs example `name`, writing its files into `out_dir`. `steps` overrides
/// the default trajectory length of 4.
pub fn run(
    cfg: &RunConfig,
    name: &str,
    out_dir: &Path,
    steps: Option<usize>,
) -> CliResult<ExampleRun> {
    let steps = steps.unwrap_or(4);
    let mut w = Writer::new(out_dir, cfg.fmt())?;
    let checks = match name {
        "periodic" => periodic(cfg, &mut w, steps)?,
        "leslie" => leslie(cfg, &mut w, steps)?,
        "singular" => singular(cfg, &mut w, steps)?,
        other => return Err(CliError::UnknownExample(other.into())),
    };
    Ok(ExampleRun {
        name: name.into(),
        out_dir: out_dir.to_path_buf(),
        files: w.files,
        checks,
    })
}

pub fn periodic_system() -> DaeSystem {
    DaeSystem::new(
        Matrix::from_rows(&[[0.0, 1.0, 0.0], [-1.0, 0.0, 2.0], [-1.0, 0.0, 1.0]]),
        Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 1.0, 0.0]]),
    )
    .expect("square")
}

pub fn leslie_matrix(b1: f64, b2: f64, p1: f64, p2: f64) -> Matrix {
    Matrix::from_rows(&[[b1, b2, 0.0], [p1, 0.0, 0.0], [0.0, p2, 0.0]])
}

/// `L x(j+1) = x(j)`: the Leslie model run backwards in time.
pub fn leslie_system(b1: f64, b2: f64, p1: f64, p2: f64) -> DaeSystem {
    DaeSystem::new(Matrix::identity(3), leslie_matrix(b1, b2, p1, p2)).expect("square")
}

/// Closed form of the Drazin inverse of the Leslie matrix.
pub fn leslie_drazin_closed_form(b1: f64, b2: f64, p1: f64, p2: f64) -> Matrix {
    let c = b1 * b1 * p2 / (b2 * b2 * p1 * p1) + p2 / (b2 * p1);
    Matrix::from_rows(&[
        [0.0, 1.0 / p1, 0.0],
        [1.0 / b2, -b1 / (b2 * p1), 0.0],
        [-b1 * p2 / (b2 * b2 * p1), c, 0.0],
    ])
}

pub fn singular_system() -> DaeSystem {
    DaeSystem::new(
        Matrix::diag_real(&[0.0, 0.5, 1.0]),
        Matrix::diag_real(&[1.0, 1.0, 0.0]),
    )
    .expect("square")
}

struct Writer {
    dir: PathBuf,
    fmt: NumFmt,
    files: Vec<String>,
}

impl Writer {
    fn new(dir: &Path, fmt: NumFmt) -> CliResult<Self> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            fmt,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, text: &str) -> CliResult<()> {
        write_file(&self.dir.join(name), text)?;
        self.files.push(name.into());
        Ok(())
    }

    fn matrix(&mut self, name: &str, m: &Matrix) -> CliResult<()> {
        let text = matrix_text(m, &self.fmt);
        self.write(name, &text)
    }

    /// `j, x_1..x_n[, p_1..p_r], residual` with `p = Q* x` when a projection
    /// basis `q` is given. Row `j` carries the residual of the step into
    /// `x(j)`, and 0 for `j = 0`.
    fn trajectory(&mut self, name: &str, t: &Trajectory, q: Option<&Matrix>) -> CliResult<()> {
        let n = t.states[0].len();
        let mut header = vec!["j".to_string()];
        header.extend(vector_header("x", n, true));
        if let Some(q) = q {
            header.extend(vector_header("p", q.cols(), true));
        }
        header.push("residual".into());
        let mut csv = Csv::new(header);
        for (j, x) in t.states.iter().enumerate() {
            let x = real_part_vec(x);
            let mut row = vec![j.to_string()];
            row.extend(vector_cells(&x, true, &self.fmt));
            if let Some(q) = q {
                row.extend(vector_cells(
                    &real_part_vec(&q.adjoint().mul_vec(&x)),
                    true,
                    &self.fmt,
                ));
            }
            row.push(self.fmt.num(if j == 0 { 0.0 } else { t.residuals[j - 1] }));
            csv.push(row);
        }
        self.write(name, &csv.render())
    }

    /// `j, volume, y_1..y_m[, projected_y], residual`.
    fn volume(
        &mut self,
        name: &str,
        volumes: &[f64],
        ys: &[Vec<C64>],
        projected: Option<&[f64]>,
        residuals: &[f64],
    ) -> CliResult<()> {
        let m = ys[0].len();
        let mut header = vec!["j".to_string(), "volume".to_string()];
        header.extend(vector_header("y", m, true));
        if projected.is_some() {
            header.push("projected_y".into());
        }
        header.push("residual".into());
        let mut csv = Csv::new(header);
        for (j, y) in ys.iter().enumerate() {
            let mut row = vec![j.to_string(), self.fmt.num(volumes[j])];
            row.extend(vector_cells(&real_part_vec(y), true, &self.fmt));
            if let Some(p) = projected {
                row.push(self.fmt.num(p[j]));
            }
            row.push(self.fmt.num(if j == 0 { 0.0 } else { residuals[j - 1] }));
            csv.push(row);
        }
        self.write(name, &csv.render())
    }
}

fn cv(values: &[f64]) -> Vec<C64> {
    values.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn projected(q: &Matrix, x: &[C64]) -> Vec<f64> {
    q.adjoint().mul_vec(x).iter().map(|z| z.re).collect()
}

/// Signed area `det [Q* x1, Q* x2]` of the projected pair.
fn projected_area(q: &Matrix, x1: &[C64], x2: &[C64]) -> f64 {
    let (u, v) = (projected(q, x1), projected(q, x2));
    u[0] * v[1] - u[1] * v[0]
}

fn tractable(sys: &DaeSystem, cfg: &RunConfig) -> CliResult<DaeAnalysis> {
    let an = analyze(sys, &cfg.options)?;
    if !an.tractable {
        return Err(CliError::Core(pencilk::Error::Untractable));
    }
    Ok(an)
}

fn periodic(cfg: &RunConfig, w: &mut Writer, steps: usize) -> CliResult<Vec<Check>> {
    let sys = periodic_system();
    let opts = &cfg.options;
    let an = tractable(&sys, cfg)?;
    let mut checks = Vec::new();

    let eigs = generalized_eigenvalues(sys.pencil(), opts)?;
    let expected = [
        GenEig::finite(C64::new(0.0, 1.0)),
        GenEig::finite(C64::new(0.0, -1.0)),
        GenEig::infinite(),
    ];
    checks.push(Check::deviation(
        "pencil spectrum {i, -i, inf} (chordal)",
        "0",
        match_spectra(&eigs, &expected, 1.0).unwrap_or(1.0),
        1e-8,
    ));
    let p2 = pencilk::kcompound_pencil(sys.pencil(), 2)?;
    let ceigs = generalized_eigenvalues(&p2, opts)?;
    let cexpected = [
        GenEig::finite(C64::new(1.0, 0.0)),
        GenEig::infinite(),
        GenEig::infinite(),
    ];
    checks.push(Check::deviation(
        "2-compound spectrum {1, inf, inf} (chordal)",
        "0",
        match_spectra(&ceigs, &cexpected, 1.0).unwrap_or(1.0),
        1e-8,
    ));

    // the consistent subspace is x_3 = 0, so (x_1, x_2) are orthonormal coordinates
    let q = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]);
    checks.push(Check::count("dim V1", 2, an.consistent_dim()));
    checks.push(Check::deviation(
        "V1 = {x_3 = 0} (subspace distance)",
        "0",
        subspace_distance(&an.consistency_basis, &q),
        1e-12,
    ));

    w.matrix("A.json", sys.a())?;
    w.matrix("B.json", sys.b())?;
    let starts = [[1.0, 1.0], [1.5, 0.75]];
    let mut trajectories = Vec::new();
    for (i, s) in starts.iter().enumerate() {
        let t = propagate(&an, &q.mul_vec(&cv(s)), steps)?;
        // each step is a clockwise quarter turn (u, v) -> (v, -u)
        let mut point = *s;
        let mut err = 0.0f64;
        for x in &t.states {
            let p = projected(&q, x);
            err = err
                .max((p[0] - point[0]).abs())
                .max((p[1] - point[1]).abs());
            point = [point[1], -point[0]];
        }
        checks.push(Check::deviation(
            &format!("trajectory {} quarter-turn orbit", i + 1),
            "0",
            err,
            1e-9,
        ));
        w.trajectory(&format!("trajectory_{}.csv", i + 1), &t, Some(&q))?;
        trajectories.push(t);
    }

    let x0 = Matrix::from_columns(
        3,
        &[
            trajectories[0].states[0].clone(),
            trajectories[1].states[0].clone(),
        ],
    );
    let vt = volume_trace(&sys, &x0, steps, opts)?;
    let vol_err = vt
        .volumes
        .iter()
        .map(|v| (v - 0.75).abs())
        .fold(0.0, f64::max);
    checks.push(Check::deviation(
        "volume y(j) = 0.75 for all j",
        "0",
        vol_err,
        1e-9,
    ));
    let areas: Vec<f64> = (0..=steps)
        .map(|j| projected_area(&q, &trajectories[0].states[j], &trajectories[1].states[j]))
        .collect();
    checks.push(Check::count(
        "verdict marginal",
        1,
        usize::from(an.verdict.as_str() == "marginal"),
    ));
    w.volume(
        "volume.csv",
        &vt.volumes,
        &vt.compound_states,
        Some(&areas),
        &vt.residuals,
    )?;
    Ok(checks)
}

/// Projected points of the two trajectories and the projected compound
/// solution, as reference values given to four decimals.
const LESLIE_REF_1: [[f64; 2]; 5] = [
    [0.4765, 0.1515],
    [0.2280, 0.0725],
    [0.1091, 0.0347],
    [0.0522, 0.0166],
    [0.0250, 0.0079],
];
const LESLIE_REF_2: [[f64; 2]; 5] = [
    [0.5, 0.14],
    [0.2432, 0.0965],
    [0.1123, 0.0163],
    [0.0578, 0.0380],
    [0.0236, -0.0123],
];
const LESLIE_REF_AREA: [f64; 5] = [0.0091, 0.0044, 0.0021, 0.0010, 0.0005];

fn leslie(cfg: &RunConfig, w: &mut Writer, steps: usize) -> CliResult<Vec<Check>> {
    let (b1, b2, p1, p2) = LESLIE;
    let sys = leslie_system(b1, b2, p1, p2);
    let opts = &cfg.options;
    let an = tractable(&sys, cfg)?;
    let mut checks = vec![Check::count("dim V1", 2, an.consistent_dim())];

    let d = pencilk::drazin_inverse(sys.b(), opts)?;
    let ld = real_part(&d.inverse);
    checks.push(Check::count("index(L)", 1, d.index));
    checks.push(Check::deviation(
        "L^D closed form (max entry error)",
        "0",
        (&ld - &leslie_drazin_closed_form(b1, b2, p1, p2)).max_abs(),
        1e-10,
    ));

    let rate = 2.0 / (b1 + (b1 * b1 + 4.0 * b2 * p1).sqrt());
    let smallest = an
        .finite_eigs
        .iter()
        .map(GenEig::modulus)
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::close(
        "stable eigenvalue 2/(b1 + sqrt(b1^2 + 4 b2 p1))",
        rate,
        smallest,
        1e-10,
    ));

    let bound = stable_subspace_bound(&an, 2)?;
    checks.push(Check::count(
        "guaranteed stable dim (k = 2)",
        1,
        bound.guaranteed_stable_dim,
    ));

    // Gram-Schmidt on the columns (b1, p1, 0), (b2, 0, p2) spanning V1
    let q = range_basis(&Matrix::from_rows(&[[b1, b2], [p1, 0.0], [0.0, p2]]), 2);
    let mut stable = if bound.stable_basis.cols() == 1 {
        bound.stable_basis.col(0)
    } else {
        return Err(CliError::Core(pencilk::Error::HypothesisViolated(
            "no one-dimensional stable subspace found".into(),
        )));
    };
    let pivot = stable
        .iter()
        .copied()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .expect("n > 0");
    let phase = pivot.conj() / pivot.norm();
    let norm = vec_norm(&stable);
    stable = real_part_vec(
        &stable
            .iter()
            .map(|z| z * phase * 0.5 / norm)
            .collect::<Vec<_>>(),
    );

    let long = propagate(&an, &stable, 30)?;
    let norms = long.norms();
    checks.push(Check::below(
        "stable trajectory |x(30)| / |x(0)|",
        norms[30] / norms[0],
        1e-6,
    ));
    checks.push(Check::close(
        "stable decay ratio |x(1)| / |x(0)|",
        rate,
        norms[1] / norms[0],
        1e-10,
    ));

    let t1 = propagate(&an, &stable, steps)?;
    let t2 = propagate(&an, &q.mul_vec(&cv(&[0.5, 0.14])), steps)?;
    for (label, t, reference) in [
        ("trajectory 1", &t1, &LESLIE_REF_1),
        ("trajectory 2", &t2, &LESLIE_REF_2),
    ] {
        let err = t
            .states
            .iter()
            .zip(reference.iter())
            .map(|(x, f)| {
                let p = projected(&q, x);
                (p[0] - f[0]).abs().max((p[1] - f[1]).abs())
            })
            .fold(0.0, f64::max);
        checks.push(Check::deviation(
            &format!("{label} vs reference points (4 decimals)"),
            "0",
            err,
            1e-4,
        ));
    }

    let x0 = Matrix::from_columns(3, &[t1.states[0].clone(), t2.states[0].clone()]);
    let vt = volume_trace(&sys, &x0, steps.max(30), opts)?;
    let areas: Vec<f64> = (0..=steps)
        .map(|j| projected_area(&q, &t1.states[j], &t2.states[j]))
        .collect();
    let area_err = areas
        .iter()
        .zip(LESLIE_REF_AREA.iter())
        .map(|(a, f)| (a.abs() - f).abs())
        .fold(0.0, f64::max);
    checks.push(Check::deviation(
        "projected compound solution vs reference (4 decimals)",
        "0",
        area_err,
        1e-4,
    ));
    checks.push(Check::below(
        "compound volume |y(30)| / |y(0)|",
        vt.volumes[30] / vt.volumes[0],
        1e-6,
    ));

    w.matrix("A.json", sys.a())?;
    w.matrix("B.json", sys.b())?;
    w.matrix("B_drazin.json", &ld)?;
    w.trajectory("trajectory_1.csv", &t1, Some(&q))?;
    w.trajectory("trajectory_2.csv", &t2, Some(&q))?;
    w.volume(
        "volume.csv",
        &vt.volumes[..=steps],
        &vt.compound_states[..=steps],
        Some(&areas),
        &vt.residuals[..steps],
    )?;
    Ok(checks)
}

fn singular(cfg: &RunConfig, w: &mut Writer, steps: usize) -> CliResult<Vec<Check>> {
    let sys = singular_system();
    let opts = &cfg.options;
    let an = tractable(&sys, cfg)?;
    let e12 = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]);
    let mut checks = vec![
        Check::count("dim V1", 2, an.consistent_dim()),
        Check::deviation(
            "V1 = span(e1, e2) (subspace distance)",
            "0",
            subspace_distance(&an.consistency_basis, &e12),
            1e-12,
        ),
    ];

    let t = propagate(&an, &cv(&[1.0, 1.0, 0.0]), steps)?;
    let dyadic_err = t
        .states
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, x)| {
            vec_norm(&vec_sub(
                &real_part_vec(x),
                &cv(&[0.0, 0.5f64.powi(j as i32), 0.0]),
            ))
        })
        .fold(0.0, f64::max);
    checks.push(Check::deviation(
        "x(j) = 2^-j e2 for j >= 1 (max error)",
        "0",
        dyadic_err,
        0.0,
    ));

    let creg = compound_regularity(sys.pencil(), 2, opts)?;
    checks.push(Check::count(
        "2-compound pencil singular",
        1,
        usize::from(!creg.regular),
    ));
    let z = real_part_vec(&compound_singular_witness(&sys, 2, opts)?);
    let a2 = kcompound(sys.a(), 2)?.matrix;
    let b2 = kcompound(sys.b(), 2)?.matrix;
    let residual = vec_norm(&vec_sub(&b2.mul_vec(&z), &a2.mul_vec(&z)));
    let kernel = vec_norm(&a2.mul_vec(&z)).max(vec_norm(&b2.mul_vec(&z)));
    checks.push(Check::close(
        "constant compound solution |z|",
        1.0,
        vec_norm(&z),
        1e-12,
    ));
    checks.push(Check::deviation(
        "|B2 z - A2 z| for constant y(j) = z",
        "0",
        residual,
        1e-12,
    ));
    checks.push(Check::deviation(
        "max(|A2 z|, |B2 z|)",
        "0",
        kernel,
        1e-8 * vec_norm(&z),
    ));

    w.matrix("A.json", sys.a())?;
    w.matrix("B.json", sys.b())?;
    w.trajectory("trajectory.csv", &t, None)?;
    let ys = vec![z.clone(); steps + 1];
    let volumes = vec![vec_norm(&z); steps + 1];
    let residuals = vec![residual; steps];
    w.volume("compound_solution.csv", &volumes, &ys, None, &residuals)?;
    Ok(checks)
}
