//! Scenario files, rule expressions and CSV/JSON/SVG artifacts.

use std::fmt::Write as _;
use std::io::{Read, Write};

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::Contour;
use crate::jacobi::ZeroSet;
use crate::params::{parse_float, FiniteParams, PARAM_PREC};

type C = Complex64;

/// Version tag carried by every JSON artifact.
pub const FORMAT: &str = "jacobi-rh/1";

/// Wraps `data` as `{"format": FORMAT, "kind": kind, ...fields}`. Values
/// that do not serialize to an object go under `"data"`.
pub fn envelope<T: Serialize>(kind: &str, data: &T) -> Result<Value> {
    let mut out = Map::new();
    out.insert("format".into(), Value::String(FORMAT.into()));
    out.insert("kind".into(), Value::String(kind.into()));
    match serde_json::to_value(data)? {
        Value::Object(m) => {
            for (k, v) in m {
                out.entry(k).or_insert(v);
            }
        }
        other => {
            out.insert("data".into(), other);
        }
    }
    Ok(Value::Object(out))
}

/// Parses a JSON artifact and checks its format tag.
pub fn read_envelope(text: &str) -> Result<Value> {
    let v: Value = serde_json::from_str(text)?;
    match v.get("format").and_then(Value::as_str) {
        Some(FORMAT) => Ok(v),
        Some(other) => Err(Error::InvalidParameter(format!("unsupported format {other:?}, expected {FORMAT:?}"))),
        None => Err(Error::InvalidParameter("missing \"format\" field".into())),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PointRow {
    index: usize,
    re: f64,
    im: f64,
}

/// Polyline vertices as `index,re,im`. Floats are written in their
/// shortest round-trip form, so reading back gives identical values.
pub fn write_points_csv<W: Write>(w: W, points: &[C]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    if points.is_empty() {
        wr.write_record(["index", "re", "im"])?;
    }
    for (index, p) in points.iter().enumerate() {
        wr.serialize(PointRow { index, re: p.re, im: p.im })?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_points_csv<R: Read>(r: R) -> Result<Vec<C>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        let row: PointRow = row?;
        if row.index != out.len() {
            return Err(Error::InvalidParameter(format!("row index {} out of sequence", row.index)));
        }
        out.push(C::new(row.re, row.im));
    }
    Ok(out)
}

pub fn write_contour_csv<W: Write>(w: W, c: &Contour) -> Result<()> {
    write_points_csv(w, &c.points)
}

#[derive(Debug, Serialize, Deserialize)]
struct ZeroRow {
    index: usize,
    re: f64,
    im: f64,
    re_decimal: String,
    im_decimal: String,
}

/// Zeros as `index,re,im,re_decimal,im_decimal`; the decimal columns carry
/// every digit of the working precision.
pub fn write_zeros_csv<W: Write>(w: W, zs: &ZeroSet) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for (index, z) in zs.zeros_mp.iter().enumerate() {
        wr.serialize(ZeroRow {
            index,
            re: z.real().to_f64(),
            im: z.imag().to_f64(),
            re_decimal: z.real().to_string_radix(10, None),
            im_decimal: z.imag().to_string_radix(10, None),
        })?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads the double-precision columns of a zeros CSV.
pub fn read_zeros_csv<R: Read>(r: R) -> Result<Vec<C>> {
    let mut rd = csv::Reader::from_reader(r);
    rd.deserialize::<ZeroRow>().map(|row| row.map(|z| C::new(z.re, z.im)).map_err(Error::from)).collect()
}

/// JSON summary of a zero set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroSetSummary {
    pub n: u32,
    pub alpha: String,
    pub beta: String,
    pub precision_bits: u32,
    pub residual: f64,
    pub iterations: usize,
    pub zeros: Vec<[f64; 2]>,
}

impl From<&ZeroSet> for ZeroSetSummary {
    fn from(zs: &ZeroSet) -> Self {
        ZeroSetSummary {
            n: zs.n,
            alpha: crate::params::float_string(&zs.alpha),
            beta: crate::params::float_string(&zs.beta),
            precision_bits: zs.precision_bits,
            residual: zs.residual,
            iterations: zs.iterations,
            zeros: zs.zeros().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Contours as polylines and zeros as dots, nothing else.
pub fn svg(contours: &[&Contour], zeros: &[C]) -> String {
    let size = 600.0;
    let pad = 20.0;
    let all: Vec<C> = contours.iter().flat_map(|c| c.points.iter().copied()).chain(zeros.iter().copied()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &all {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    if all.is_empty() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let s = (size - 2.0 * pad) / span;
    let map = |p: C| (pad + (p.re - x0) * s, pad + (y1 - p.im) * s);
    let (w, h) = ((x1 - x0) * s + 2.0 * pad, (y1 - y0) * s + 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#);
    for c in contours {
        let mut pts: Vec<String> = c.points.iter().map(|&p| map(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        if c.closed {
            if let Some(first) = pts.first().cloned() {
                pts.push(first);
            }
        }
        let _ = writeln!(out, r#"<polyline fill="none" stroke="black" stroke-width="1" points="{}"/>"#, pts.join(" "));
    }
    for &z in zeros {
        let (x, y) = map(z);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="red"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

/// A rule over real literals, `n`, `A`, `B`, `+ - * /` and parentheses,
/// evaluated in multiprecision.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Float),
    Var(Var),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    N,
    A,
    B,
}

/// Values bound to the rule variables.
#[derive(Clone, Debug)]
pub struct Bindings {
    pub n: u32,
    pub a: Float,
    pub b: Float,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let toks = tokenize(src)?;
        let mut p = Parser { toks: &toks, pos: 0 };
        let e = p.sum()?;
        if p.pos != toks.len() {
            return Err(Error::Expression(format!("unexpected {:?} in {src:?}", toks[p.pos])));
        }
        Ok(e)
    }

    pub fn eval(&self, env: &Bindings) -> Result<Float> {
        let v = match self {
            Expr::Num(x) => x.clone(),
            Expr::Var(Var::N) => Float::with_val(PARAM_PREC, env.n),
            Expr::Var(Var::A) => env.a.clone(),
            Expr::Var(Var::B) => env.b.clone(),
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.eval(env)?, r.eval(env)?);
                match op {
                    '+' => l + r,
                    '-' => l - r,
                    '*' => l * r,
                    _ => {
                        if r.is_zero() {
                            return Err(Error::Expression("division by zero".into()));
                        }
                        l / r
                    }
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::Expression("rule evaluates to a non-finite value".into()));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Var(Var),
    Op(char),
    Open,
    Close,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' | '-' | '*' | '/' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            // Typographic minus.
            '\u{2212}' => {
                out.push(Tok::Op('-'));
                i += 1;
            }
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            'n' => {
                out.push(Tok::Var(Var::N));
                i += 1;
            }
            'A' => {
                out.push(Tok::Var(Var::A));
                i += 1;
            }
            'B' => {
                out.push(Tok::Var(Var::B));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                out.push(Tok::Num(chars[start..i].iter().collect()));
            }
            _ => return Err(Error::Expression(format!("unexpected character {c:?} in {src:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek() {
            let op = *op;
            self.pos += 1;
            e = Expr::Bin(op, Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek() {
            let op = *op;
            self.pos += 1;
            e = Expr::Bin(op, Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.peek().cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(s)) => {
                parse_float(&s).map(Expr::Num).map_err(|_| Error::Expression(format!("bad number {s:?}")))
            }
            Some(Tok::Var(v)) => Ok(Expr::Var(v)),
            Some(Tok::Open) => {
                let e = self.sum()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(Error::Expression("missing ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(t) => Err(Error::Expression(format!("unexpected {t:?}"))),
            None => Err(Error::Expression("unexpected end of expression".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Degrees {
    One(u32),
    Many(Vec<u32>),
}

impl Degrees {
    pub fn to_vec(&self) -> Vec<u32> {
        match self {
            Degrees::One(n) => vec![*n],
            Degrees::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Zeros,
    Geometry,
    Discrepancy,
    Masses,
    Scaling,
    Svg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub n: Degrees,
    pub alpha_rule: String,
    pub beta_rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default)]
    pub outputs: Vec<OutputKind>,
}

impl Scenario {
    /// Reads and validates a scenario file.
    pub fn from_json(text: &str) -> Result<Scenario> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    /// Rules parse and give finite values for every listed degree.
    pub fn validate(&self) -> Result<()> {
        if self.n.to_vec().is_empty() {
            return Err(Error::InvalidParameter("scenario lists no degrees".into()));
        }
        for n in self.n.to_vec() {
            self.params(n)?;
        }
        Ok(())
    }

    /// A and B as the decimals written in the file, so that a rule like
    /// `A*n - 1e-15` is not polluted by binary rounding of A.
    fn bindings(&self, n: u32) -> Result<Bindings> {
        Ok(Bindings { n, a: parse_float(&format!("{}", self.a))?, b: parse_float(&format!("{}", self.b))? })
    }

    pub fn params(&self, n: u32) -> Result<FiniteParams> {
        let env = self.bindings(n)?;
        let alpha = Expr::parse(&self.alpha_rule)?.eval(&env)?;
        let beta = Expr::parse(&self.beta_rule)?.eval(&env)?;
        FiniteParams::from_floats(n, alpha, beta)
    }
}

/// Built-in scenarios: the degree-100 zero plots for (−1.1, 0.5) and
/// (−0.8, 0.5) with offsets 1e−5 and 1e−15 off the integer lattice.
pub fn figure_scenarios() -> Vec<Scenario> {
    let all = vec![OutputKind::Zeros, OutputKind::Geometry, OutputKind::Discrepancy, OutputKind::Svg];
    let mk = |name: &str, a: f64, b: f64, off: &str| Scenario {
        name: name.into(),
        a,
        b,
        n: Degrees::One(100),
        alpha_rule: format!("A*n - {off}"),
        beta_rule: format!("B*n - {off}"),
        r: None,
        outputs: all.clone(),
    };
    vec![
        mk("c2_n100_offset_1e-5", -1.1, 0.5, "1e-5"),
        mk("c3_n100_offset_1e-5", -0.8, 0.5, "1e-5"),
        mk("c3_n100_offset_1e-15", -0.8, 0.5, "1e-15"),
    ]
}
