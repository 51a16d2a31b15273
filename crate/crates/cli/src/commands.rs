//! The analysis subcommands. Each has a `*_data` form working on matrices,
//! which the file-based form wraps.

use std::path::Path;

use pencilk::{
    analyze, compound_consistency_dim, compound_regularity, compound_singular_witness,
    drazin_inverse, generalized_eigenvalues, is_regular, kcompound, kcompound_pencil, propagate,
    stable_subspace_bound, volume_trace, DaeAnalysis, DaeSystem, Error, GenEig, Matrix, Pencil,
    C64,
};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::format::{
    all_real, matrix_csv, normalized, real_part, real_part_vec, vector_cells, vector_header, Csv,
    Json, NumFmt,
};
use crate::io::{read_matrix, read_vector};

/// Data for stdout plus diagnostics for stderr.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub notes: Vec<String>,
}

impl Output {
    fn data(stdout: String) -> Self {
        Self {
            stdout,
            notes: Vec::new(),
        }
    }
}

fn is_real(m: &Matrix) -> bool {
    all_real(m.as_slice().iter())
}

fn check_pencil_shapes(a: &Matrix, b: &Matrix) -> CliResult<()> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(CliError::Parse(format!(
            "A and B must be square of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

fn check_order(k: usize, n: usize) -> CliResult<()> {
    if k < 1 || k > n {
        return Err(CliError::Core(Error::InvalidOrder { k, n }));
    }
    Ok(())
}

/// Finite eigenvalues ordered by real then imaginary part (after snapping to
/// the output precision), infinite ones last.
pub fn sort_eigenvalues(mut eigs: Vec<GenEig>, f: &NumFmt) -> Vec<GenEig> {
    let key = |e: &GenEig| {
        e.value()
            .map(|z| f.snap(z))
            .map(|z| (f.round(z.re), f.round(z.im)))
    };
    eigs.sort_by(|x, y| match (key(x), key(y)) {
        (Some(a), Some(b)) => a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    eigs
}

fn eigenvalues_json(eigs: &[GenEig], f: &NumFmt) -> Json {
    Json::Arr(eigs.iter().map(|e| Json::eigenvalue(e, f)).collect())
}

fn vector_text(v: &[C64], f: &NumFmt) -> String {
    let parts: Vec<String> = v.iter().map(|&z| f.complex(z)).collect();
    format!("[{}]", parts.join(", "))
}

// ---------------------------------------------------------------- compound

pub fn compound(cfg: &RunConfig, path: &Path, k: usize) -> CliResult<Output> {
    compound_data(cfg, &read_matrix(path)?, k)
}

pub fn compound_data(cfg: &RunConfig, a: &Matrix, k: usize) -> CliResult<Output> {
    check_order(k, a.rows().min(a.cols()))?;
    let c = kcompound(a, k)?.matrix;
    let f = cfg.fmt();
    Ok(Output::data(match cfg.format_or(Format::Json) {
        Format::Json => Json::matrix(&c).render(&f),
        Format::Csv => matrix_csv(&c, &f).render(),
    }))
}

// ---------------------------------------------------------------- pencil-eig

pub fn pencil_eig(cfg: &RunConfig, a: &Path, b: &Path, k: Option<usize>) -> CliResult<Output> {
    pencil_eig_data(cfg, &read_matrix(a)?, &read_matrix(b)?, k)
}

pub fn pencil_eig_data(
    cfg: &RunConfig,
    a: &Matrix,
    b: &Matrix,
    k: Option<usize>,
) -> CliResult<Output> {
    check_pencil_shapes(a, b)?;
    let opts = &cfg.options;
    let f = cfg.fmt();
    let n = a.rows();
    if let Some(k) = k {
        check_order(k, n)?;
    }
    let p = Pencil::new(a.clone(), b.clone())?;
    let report = is_regular(&p, opts);
    if !report.regular {
        let detail = match &report.common_kernel_vector {
            Some(z) => format!("; common kernel vector {}", vector_text(z, &f)),
            None => String::new(),
        };
        return Err(CliError::SingularPencil(format!(
            "det(A - lambda B) vanishes at all {} tested shifts{detail}",
            opts.shifts.candidates(n).len()
        )));
    }
    let eigs = sort_eigenvalues(generalized_eigenvalues(&p, opts)?, &f);

    let compound = match k {
        Some(k) if k >= 2 => {
            let creg = compound_regularity(&p, k, opts)?;
            if !creg.regular {
                let detail = match &creg.common_kernel_vector {
                    Some(z) => format!("; common kernel vector {}", vector_text(z, &f)),
                    None => String::new(),
                };
                return Err(CliError::SingularPencil(format!(
                    "the {k}-compound pencil is singular since det(A) = det(B) = 0{detail}"
                )));
            }
            let cp = kcompound_pencil(&p, k)?;
            Some((k, sort_eigenvalues(generalized_eigenvalues(&cp, opts)?, &f)))
        }
        Some(k) => Some((k, eigs.clone())),
        None => None,
    };

    let stdout = match cfg.format_or(Format::Json) {
        Format::Json => {
            let mut out = Json::obj()
                .with("n", n)
                .with("regular", true)
                .with(
                    "shift",
                    Json::complex(report.witness_lambda.expect("regular"), false),
                )
                .with("eigenvalues", eigenvalues_json(&eigs, &f));
            if let Some((k, ceigs)) = &compound {
                out = out.with(
                    "compound",
                    Json::obj()
                        .with("k", *k)
                        .with("dim", ceigs.len())
                        .with("regular", true)
                        .with("eigenvalues", eigenvalues_json(ceigs, &f)),
                );
            }
            out.render(&f)
        }
        Format::Csv => {
            let mut csv = Csv::new([
                "spectrum",
                "index",
                "lambda_re",
                "lambda_im",
                "alpha_re",
                "alpha_im",
                "beta_re",
                "beta_im",
            ]);
            let mut push = |label: &str, list: &[GenEig]| {
                for (i, e) in list.iter().enumerate() {
                    let (lre, lim) = match e.value() {
                        Some(z) => {
                            let z = f.snap(z);
                            (f.num(z.re), f.num(z.im))
                        }
                        None => ("inf".to_string(), String::new()),
                    };
                    let h = normalized(e);
                    let (al, be) = (f.snap(h.alpha), f.snap(h.beta));
                    csv.push(vec![
                        label.to_string(),
                        (i + 1).to_string(),
                        lre,
                        lim,
                        f.num(al.re),
                        f.num(al.im),
                        f.num(be.re),
                        f.num(be.im),
                    ]);
                }
            };
            push("base", &eigs);
            if let Some((k, ceigs)) = &compound {
                push(&format!("compound_{k}"), ceigs);
            }
            csv.render()
        }
    };
    Ok(Output::data(stdout))
}

// ---------------------------------------------------------------- drazin

pub fn drazin(cfg: &RunConfig, path: &Path) -> CliResult<Output> {
    drazin_data(cfg, &read_matrix(path)?)
}

pub fn drazin_data(cfg: &RunConfig, a: &Matrix) -> CliResult<Output> {
    let d = drazin_inverse(a, &cfg.options)?;
    let inverse = if is_real(a) {
        real_part(&d.inverse)
    } else {
        d.inverse
    };
    let f = cfg.fmt();
    Ok(match cfg.format_or(Format::Json) {
        Format::Json => Output::data(
            Json::obj()
                .with("index", d.index)
                .with(
                    "rank_sequence",
                    Json::Arr(d.rank_sequence.iter().map(|&r| r.into()).collect()),
                )
                .with("inverse", Json::matrix(&inverse))
                .render(&f),
        ),
        Format::Csv => Output {
            stdout: matrix_csv(&inverse, &f).render(),
            notes: vec![format!("index {}", d.index)],
        },
    })
}

// ---------------------------------------------------------------- dae-analyze

fn tractable_analysis(
    cfg: &RunConfig,
    a: &Matrix,
    b: &Matrix,
) -> CliResult<(DaeSystem, DaeAnalysis)> {
    check_pencil_shapes(a, b)?;
    let sys = DaeSystem::new(a.clone(), b.clone())?;
    let an = analyze(&sys, &cfg.options)?;
    if !an.tractable {
        return Err(CliError::Core(Error::Untractable));
    }
    Ok((sys, an))
}

pub fn dae_analyze(cfg: &RunConfig, a: &Path, b: &Path, k: Option<usize>) -> CliResult<Output> {
    dae_analyze_data(cfg, &read_matrix(a)?, &read_matrix(b)?, k)
}

/// Report entries in output order, shared by the JSON and CSV renderings.
fn analysis_report(
    cfg: &RunConfig,
    sys: &DaeSystem,
    an: &DaeAnalysis,
    k: Option<usize>,
) -> CliResult<Json> {
    let f = cfg.fmt();
    let opts = &cfg.options;
    let real = is_real(sys.a()) && is_real(sys.b());
    let basis = if real {
        real_part(&an.consistency_basis)
    } else {
        an.consistency_basis.clone()
    };
    let eigs = sort_eigenvalues(an.finite_eigs.clone(), &f);
    let radius = eigs.iter().map(GenEig::modulus).fold(0.0, f64::max);
    let mut out = Json::obj()
        .with("tractable", true)
        .with("n", sys.dim())
        .with(
            "shift",
            Json::complex(an.shift_lambda.expect("tractable"), false),
        )
        .with("drazin_index", an.drazin_index)
        .with("dim_v1", an.consistent_dim())
        .with("consistency_basis", Json::matrix(&basis))
        .with("finite_eigenvalues", eigenvalues_json(&eigs, &f))
        .with("spectral_radius", radius)
        .with("verdict", an.verdict.as_str());
    let Some(k) = k else {
        return Ok(out);
    };
    check_order(k, sys.dim())?;
    let mut comp = Json::obj().with("k", k);
    match compound_consistency_dim(sys, k, opts) {
        Ok(cc) => {
            comp = comp
                .with("regular", true)
                .with("shift", Json::complex(cc.compound_shift, false))
                .with("dim_vk", cc.dim_vk)
                .with("predicted_dim_vk", cc.predicted)
                .with("matches_prediction", cc.matches_prediction())
                .with("b_hat_nilpotent", cc.b_hat_nilpotent);
        }
        Err(Error::HypothesisViolated(_)) if k >= 2 => {
            let z = compound_singular_witness(sys, k, opts)?;
            let z = if real { real_part_vec(&z) } else { z };
            comp = comp
                .with("regular", false)
                .with("constant_solution", Json::vector(&z));
        }
        Err(e) => return Err(e.into()),
    }
    if k <= an.consistent_dim() {
        let s = stable_subspace_bound(an, k)?;
        comp = comp.with(
            "stable_subspace",
            Json::obj()
                .with("max_eigenvalue_product", s.max_product)
                .with("compound_stable", s.compound_stable)
                .with("guaranteed_stable_dim", s.guaranteed_stable_dim),
        );
    }
    out = out.with("compound", comp);
    Ok(out)
}

pub fn dae_analyze_data(
    cfg: &RunConfig,
    a: &Matrix,
    b: &Matrix,
    k: Option<usize>,
) -> CliResult<Output> {
    let (sys, an) = tractable_analysis(cfg, a, b)?;
    let report = analysis_report(cfg, &sys, &an, k)?;
    let f = cfg.fmt();
    Ok(Output::data(match cfg.format_or(Format::Json) {
        Format::Json => report.render(&f),
        Format::Csv => {
            let mut csv = Csv::new(["key", "value"]);
            flatten("", &report, &f, &mut csv);
            csv.render()
        }
    }))
}

/// Key/value rows: nested keys joined with `.`, array items with their
/// 1-based position, complex values as `a+bi`.
fn flatten(prefix: &str, value: &Json, f: &NumFmt, csv: &mut Csv) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match value {
        Json::Obj(fields) => {
            for (key, v) in fields {
                flatten(&join(key), v, f, csv);
            }
        }
        Json::Arr(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&(i + 1).to_string()), v, f, csv);
            }
        }
        Json::Null => csv.push(vec![prefix.to_string(), String::new()]),
        Json::Bool(b) => csv.push(vec![prefix.to_string(), b.to_string()]),
        Json::Int(i) => csv.push(vec![prefix.to_string(), i.to_string()]),
        Json::Num(x) => csv.push(vec![prefix.to_string(), f.num(*x)]),
        Json::Complex(re, im) => csv.push(vec![prefix.to_string(), f.complex(C64::new(*re, *im))]),
        Json::Str(s) => csv.push(vec![prefix.to_string(), s.clone()]),
    }
}

// ---------------------------------------------------------------- dae-solve

pub fn dae_solve(
    cfg: &RunConfig,
    a: &Path,
    b: &Path,
    x0: &Path,
    steps: usize,
) -> CliResult<Output> {
    dae_solve_data(
        cfg,
        &read_matrix(a)?,
        &read_matrix(b)?,
        &read_vector(x0)?,
        steps,
    )
}

pub fn dae_solve_data(
    cfg: &RunConfig,
    a: &Matrix,
    b: &Matrix,
    x0: &[C64],
    steps: usize,
) -> CliResult<Output> {
    let (sys, an) = tractable_analysis(cfg, a, b)?;
    if x0.len() != sys.dim() {
        return Err(CliError::Parse(format!(
            "initial condition has length {}, expected {}",
            x0.len(),
            sys.dim()
        )));
    }
    let t = propagate(&an, x0, steps)?;
    let real = is_real(a) && is_real(b) && all_real(x0.iter());
    let states: Vec<Vec<C64>> = if real {
        t.states.iter().map(|x| real_part_vec(x)).collect()
    } else {
        t.states.clone()
    };
    let f = cfg.fmt();
    Ok(Output::data(match cfg.format_or(Format::Csv) {
        Format::Csv => {
            let mut header = vec!["j".to_string()];
            header.extend(vector_header("x", sys.dim(), real));
            header.push("residual".into());
            let mut csv = Csv::new(header);
            for (j, x) in states.iter().enumerate() {
                let mut row = vec![j.to_string()];
                row.extend(vector_cells(x, real, &f));
                row.push(f.num(if j == 0 { 0.0 } else { t.residuals[j - 1] }));
                csv.push(row);
            }
            csv.render()
        }
        Format::Json => Json::obj()
            .with("steps", steps)
            .with(
                "states",
                Json::Arr(states.iter().map(|x| Json::vector(x)).collect()),
            )
            .with("residuals", Json::reals(&t.residuals))
            .render(&f),
    }))
}

// ---------------------------------------------------------------- dae-volume

pub fn dae_volume(
    cfg: &RunConfig,
    a: &Path,
    b: &Path,
    x0cols: &Path,
    k: Option<usize>,
    steps: usize,
) -> CliResult<Output> {
    dae_volume_data(
        cfg,
        &read_matrix(a)?,
        &read_matrix(b)?,
        &read_matrix(x0cols)?,
        k,
        steps,
    )
}

pub fn dae_volume_data(
    cfg: &RunConfig,
    a: &Matrix,
    b: &Matrix,
    x0cols: &Matrix,
    k: Option<usize>,
    steps: usize,
) -> CliResult<Output> {
    check_pencil_shapes(a, b)?;
    let n = a.rows();
    if x0cols.rows() != n {
        return Err(CliError::Parse(format!(
            "initial columns have {} rows, expected {n}",
            x0cols.rows()
        )));
    }
    let k = k.unwrap_or(x0cols.cols());
    check_order(k, n)?;
    if k != x0cols.cols() {
        return Err(CliError::InvalidOrder(format!(
            "k = {k} but the initial-condition file has {} columns",
            x0cols.cols()
        )));
    }
    let sys = DaeSystem::new(a.clone(), b.clone())?;
    let trace = volume_trace(&sys, x0cols, steps, &cfg.options)?;
    let real = is_real(a) && is_real(b) && is_real(x0cols);
    let states: Vec<Vec<C64>> = if real {
        trace
            .compound_states
            .iter()
            .map(|y| real_part_vec(y))
            .collect()
    } else {
        trace.compound_states.clone()
    };
    let f = cfg.fmt();
    let m = states.first().map_or(0, Vec::len);
    Ok(Output::data(match cfg.format_or(Format::Csv) {
        Format::Csv => {
            let mut header = vec!["j".to_string(), "volume".to_string()];
            header.extend(vector_header("y", m, real));
            header.push("residual".into());
            let mut csv = Csv::new(header);
            for (j, y) in states.iter().enumerate() {
                let mut row = vec![j.to_string(), f.num(trace.volumes[j])];
                row.extend(vector_cells(y, real, &f));
                row.push(f.num(if j == 0 { 0.0 } else { trace.residuals[j - 1] }));
                csv.push(row);
            }
            csv.render()
        }
        Format::Json => Json::obj()
            .with("k", k)
            .with("steps", steps)
            .with("volumes", Json::reals(&trace.volumes))
            .with(
                "compound_states",
                Json::Arr(states.iter().map(|y| Json::vector(y)).collect()),
            )
            .with("residuals", Json::reals(&trace.residuals))
            .render(&f),
    }))
}
