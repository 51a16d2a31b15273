//! Deterministic text output: numbers rounded to a fixed count of
//! significant digits, a small ordered JSON tree, and CSV tables.

use std::fmt::Write as _;

use pencilk::{GenEig, Matrix, C64};

/// Number formatting at `precision` significant digits (1..=17).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NumFmt {
    pub precision: usize,
}

impl NumFmt {
    pub fn new(precision: usize) -> Self {
        Self { precision }
    }

    /// `x` rounded to the configured number of significant digits.
    pub fn round(&self, x: f64) -> f64 {
        if !x.is_finite() || x == 0.0 {
            return if x == 0.0 { 0.0 } else { x };
        }
        let s = format!("{:.*e}", self.precision - 1, x);
        let r: f64 = s.parse().expect("formatted float parses");
        if r == 0.0 {
            0.0
        } else {
            r
        }
    }

    /// Shortest text that reads back as the rounded value. Plain decimal
    /// notation for moderate magnitudes, exponent notation otherwise.
    pub fn num(&self, x: f64) -> String {
        let r = self.round(x);
        if r.is_nan() {
            return "nan".into();
        }
        if r.is_infinite() {
            return if r > 0.0 { "inf".into() } else { "-inf".into() };
        }
        let a = r.abs();
        if r == 0.0 || (1e-5..1e16).contains(&a) {
            format!("{r}")
        } else {
            format!("{r:e}")
        }
    }

    /// `z` with components below the last kept digit of `|z|` set to zero,
    /// so that a real eigenvalue with a rounding-level imaginary part prints
    /// as real.
    pub fn snap(&self, z: C64) -> C64 {
        let cut = 0.5 * 10f64.powi(1 - self.precision as i32) * z.norm();
        let f = |x: f64| if x.abs() < cut { 0.0 } else { x };
        C64::new(f(z.re), f(z.im))
    }

    /// `a`, `a+bi` or `a-bi`.
    pub fn complex(&self, z: C64) -> String {
        let im = self.round(z.im);
        if im == 0.0 {
            self.num(z.re)
        } else if im < 0.0 {
            format!("{}-{}i", self.num(z.re), self.num(-im))
        } else {
            format!("{}+{}i", self.num(z.re), self.num(im))
        }
    }
}

/// The homogeneous pair scaled to unit length with `beta` real and
/// non-negative (`alpha` real and positive when `beta = 0`).
pub fn normalized(e: &GenEig) -> GenEig {
    let len = e.alpha.norm().hypot(e.beta.norm());
    if len == 0.0 {
        return *e;
    }
    let pivot = if e.beta.norm() > 0.0 { e.beta } else { e.alpha };
    let s = pivot.conj() / (pivot.norm() * len);
    GenEig {
        alpha: e.alpha * s,
        beta: if e.beta.norm() > 0.0 {
            C64::new(e.beta.norm() / len, 0.0)
        } else {
            e.beta
        },
    }
}

/// Whether every value has a zero imaginary part.
pub fn all_real<'a>(values: impl IntoIterator<Item = &'a C64>) -> bool {
    values.into_iter().all(|z| z.im == 0.0)
}

/// Drops imaginary parts. Applied to results computed from real data, where
/// any imaginary part is rounding noise of the complex arithmetic.
pub fn real_part(m: &Matrix) -> Matrix {
    let data = m.as_slice().iter().map(|z| C64::new(z.re, 0.0)).collect();
    Matrix::new(m.rows(), m.cols(), data).expect("same shape")
}

pub fn real_part_vec(v: &[C64]) -> Vec<C64> {
    v.iter().map(|z| C64::new(z.re, 0.0)).collect()
}

/// An ordered JSON value. Numbers are rendered through [`NumFmt`].
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    /// Rendered as the pair `[re, im]`.
    Complex(f64, f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj() -> Self {
        Json::Obj(Vec::new())
    }

    /// Appends a field to an object; no-op on other variants.
    pub fn with(mut self, key: &str, value: impl Into<Json>) -> Self {
        if let Json::Obj(fields) = &mut self {
            fields.push((key.to_string(), value.into()));
        }
        self
    }

    pub fn str(s: impl Into<String>) -> Self {
        Json::Str(s.into())
    }

    /// A complex number: plain when real, `[re, im]` otherwise.
    pub fn complex(z: C64, real: bool) -> Self {
        if real || z.im == 0.0 {
            Json::Num(z.re)
        } else {
            Json::Complex(z.re, z.im)
        }
    }

    pub fn vector(v: &[C64]) -> Self {
        let real = all_real(v.iter());
        Json::Arr(v.iter().map(|&z| Json::complex(z, real)).collect())
    }

    pub fn reals(v: &[f64]) -> Self {
        Json::Arr(v.iter().map(|&x| Json::Num(x)).collect())
    }

    /// A matrix in the `{"rows", "cols", "data"}` file layout.
    pub fn matrix(m: &Matrix) -> Self {
        let real = all_real(m.as_slice().iter());
        let data = (0..m.rows())
            .map(|i| Json::Arr(m.row(i).iter().map(|&z| Json::complex(z, real)).collect()))
            .collect();
        Json::obj()
            .with("rows", m.rows())
            .with("cols", m.cols())
            .with("data", Json::Arr(data))
    }

    /// `{"alpha", "beta", "lambda"}` with `lambda = "inf"` when `beta = 0`.
    /// The pair is [`normalized`] and components are snapped with
    /// [`NumFmt::snap`].
    pub fn eigenvalue(e: &GenEig, f: &NumFmt) -> Self {
        let e = &normalized(e);
        let lambda = match e.value() {
            Some(z) => Json::complex(f.snap(z), false),
            None => Json::str("inf"),
        };
        Json::obj()
            .with("alpha", Json::complex(f.snap(e.alpha), false))
            .with("beta", Json::complex(f.snap(e.beta), false))
            .with("lambda", lambda)
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Json::Arr(_) | Json::Obj(_))
    }

    /// Two-space indented rendering; arrays of scalars stay on one line.
    pub fn render(&self, f: &NumFmt) -> String {
        let mut out = String::new();
        self.write(f, 0, &mut out);
        out.push('\n');
        out
    }

    fn write(&self, f: &NumFmt, indent: usize, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => write!(out, "{i}").unwrap(),
            Json::Num(x) if x.is_finite() => out.push_str(&f.num(*x)),
            Json::Num(x) => out.push_str(&serde_json::to_string(&f.num(*x)).unwrap()),
            Json::Complex(re, im) => {
                out.push('[');
                Json::Num(*re).write(f, indent, out);
                out.push_str(", ");
                Json::Num(*im).write(f, indent, out);
                out.push(']');
            }
            Json::Str(s) => out.push_str(&serde_json::to_string(s).unwrap()),
            Json::Arr(items) if items.is_empty() => out.push_str("[]"),
            Json::Arr(items) if items.iter().all(Json::is_scalar) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.write(f, indent, out);
                }
                out.push(']');
            }
            Json::Arr(items) => {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    pad(out, indent + 1);
                    item.write(f, indent + 1, out);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push(']');
            }
            Json::Obj(fields) if fields.is_empty() => out.push_str("{}"),
            Json::Obj(fields) => {
                out.push_str("{\n");
                for (i, (key, value)) in fields.iter().enumerate() {
                    pad(out, indent + 1);
                    out.push_str(&serde_json::to_string(key).unwrap());
                    out.push_str(": ");
                    value.write(f, indent + 1, out);
                    out.push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push('}');
            }
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

impl From<bool> for Json {
    fn from(b: bool) -> Self {
        Json::Bool(b)
    }
}

impl From<usize> for Json {
    fn from(i: usize) -> Self {
        Json::Int(i as i64)
    }
}

impl From<f64> for Json {
    fn from(x: f64) -> Self {
        Json::Num(x)
    }
}

impl From<&str> for Json {
    fn from(s: &str) -> Self {
        Json::Str(s.to_string())
    }
}

impl From<String> for Json {
    fn from(s: String) -> Self {
        Json::Str(s)
    }
}

impl<T: Into<Json>> From<Option<T>> for Json {
    fn from(v: Option<T>) -> Self {
        v.map_or(Json::Null, Into::into)
    }
}

/// A CSV table with a header row; rendered with `,` separators and LF line
/// endings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Column names for a vector quantity: `x_1..x_n`, or `x_1_re, x_1_im, ...`
/// when complex.
pub fn vector_header(name: &str, n: usize, real: bool) -> Vec<String> {
    (1..=n)
        .flat_map(|i| {
            if real {
                vec![format!("{name}_{i}")]
            } else {
                vec![format!("{name}_{i}_re"), format!("{name}_{i}_im")]
            }
        })
        .collect()
}

pub fn vector_cells(v: &[C64], real: bool, f: &NumFmt) -> Vec<String> {
    v.iter()
        .flat_map(|z| {
            if real {
                vec![f.num(z.re)]
            } else {
                vec![f.num(z.re), f.num(z.im)]
            }
        })
        .collect()
}

/// A matrix as CSV: header `c_1..c_m` (or `c_1_re, c_1_im, ...`), one line per row.
pub fn matrix_csv(m: &Matrix, f: &NumFmt) -> Csv {
    let real = all_real(m.as_slice().iter());
    let mut csv = Csv::new(vector_header("c", m.cols(), real));
    for i in 0..m.rows() {
        csv.push(vector_cells(m.row(i), real, f));
    }
    csv
}
