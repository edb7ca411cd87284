//! The operator spec file: flat `[section]`s of `key = value` lines.
//!
//! ```text
//! # half Laplacian plus a unit mass term on the line
//! [operator]
//! name = helmholtz
//! kind = fractional_laplacian
//! dim = 1
//! s = 0.6
//!
//! [polynomial]
//! coef[0] = -1
//!
//! [job]
//! kind = classify
//! ```
//!
//! Values are numbers, bare words, `true`/`false`, or bracketed lists
//! (possibly nested). Polynomial coefficients are keyed by multi-index and
//! take a real number or `[re, im]`.

use std::fmt::Write as _;

use nonlocal::error::{Error, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    FractionalLaplacian,
    Anisotropic,
    Relativistic,
    Ilw,
    UserRadial,
}

impl Kind {
    const ALL: [(Kind, &'static str); 5] = [
        (Kind::FractionalLaplacian, "fractional_laplacian"),
        (Kind::Anisotropic, "anisotropic"),
        (Kind::Relativistic, "relativistic"),
        (Kind::Ilw, "ilw"),
        (Kind::UserRadial, "user_radial"),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(k, _)| *k == self).map(|(_, n)| *n).unwrap_or("?")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Job {
    Symbol,
    Apply,
    Classify,
    Check,
    Duality,
}

impl Job {
    const ALL: [(Job, &'static str); 5] = [
        (Job::Symbol, "symbol"),
        (Job::Apply, "apply"),
        (Job::Classify, "classify"),
        (Job::Check, "check"),
        (Job::Duality, "duality"),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(k, _)| *k == self).map(|(_, n)| *n).unwrap_or("?")
    }

    pub fn parse(word: &str) -> Option<Self> {
        Self::ALL.iter().find(|(_, n)| *n == word).map(|(k, _)| *k)
    }
}

/// The angular density of an anisotropic kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum Anisotropy {
    /// Exact harmonic coefficients.
    Coefficients(Vec<f64>),
    /// `1 + ε cos 2θ` on the circle, or `1 + ε P₂(θ₃)` on the sphere.
    Cos2(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub kind: Kind,
    pub dim: usize,
    pub s: Option<f64>,
    pub sigma: Option<f64>,
    pub anisotropy: Option<Anisotropy>,
    /// Tempered user kernel `scale · r^{−N−α} e^{−rate·r}`.
    pub alpha: Option<f64>,
    pub scale: Option<f64>,
    pub rate: Option<f64>,
    pub reflect: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub poly: Vec<(Vec<u32>, f64)>,
    /// `(freq, cos_amp, sin_amp)` triples.
    pub trig: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Options {
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub half_width: Option<f64>,
    pub verify: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub name: String,
    pub measure: MeasureSpec,
    /// `(multi-index, re, im)`.
    pub polynomial: Vec<(Vec<u32>, f64, f64)>,
    pub job: Job,
    /// Frequencies for `symbol`, evaluation points for `apply`.
    pub points: Vec<Vec<f64>>,
    /// Centre and width of the Gaussian test function for `apply` and
    /// `duality`.
    pub center: Option<Vec<f64>>,
    pub width: Option<f64>,
    pub candidate: Option<Candidate>,
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Num(f64),
    Word(String),
    List(Vec<Value>),
}

fn parse_value(text: &str) -> Result<Value, String> {
    let mut chars = text.trim().chars().peekable();
    let v = parse_item(&mut chars)?;
    if chars.any(|c| !c.is_whitespace()) {
        return Err(format!("trailing characters in value `{}`", text.trim()));
    }
    Ok(v)
}

fn parse_item(chars: &mut std::iter::Peekable<std::str::Chars>) -> Result<Value, String> {
    while chars.peek().is_some_and(|c| c.is_whitespace()) {
        chars.next();
    }
    if chars.peek() == Some(&'[') {
        chars.next();
        let mut items = Vec::new();
        loop {
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            match chars.peek() {
                Some(']') => {
                    chars.next();
                    return Ok(Value::List(items));
                }
                None => return Err("unclosed `[`".into()),
                _ => {}
            }
            items.push(parse_item(chars)?);
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            match chars.next() {
                Some(',') => continue,
                Some(']') => return Ok(Value::List(items)),
                other => return Err(format!("expected `,` or `]`, found {other:?}")),
            }
        }
    }
    let mut word = String::new();
    while let Some(&c) = chars.peek() {
        if c == ',' || c == ']' || c == '[' {
            break;
        }
        word.push(c);
        chars.next();
    }
    let word = word.trim().to_string();
    if word.is_empty() {
        return Err("empty value".into());
    }
    Ok(match word.parse::<f64>() {
        Ok(x) => Value::Num(x),
        Err(_) => Value::Word(word),
    })
}

struct Ctx {
    errors: Vec<ParseError>,
}

impl Ctx {
    fn err(&mut self, line: usize, message: impl Into<String>) {
        self.errors.push(ParseError { line, message: message.into() });
    }

    fn num(&mut self, line: usize, key: &str, v: &Value) -> Option<f64> {
        match v {
            Value::Num(x) if x.is_finite() => Some(*x),
            _ => {
                self.err(line, format!("`{key}` must be a finite number"));
                None
            }
        }
    }

    fn positive(&mut self, line: usize, key: &str, v: &Value) -> Option<f64> {
        let x = self.num(line, key, v)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.err(line, format!("`{key}` must be positive, got {x}"));
            None
        }
    }

    fn unit_interval(&mut self, line: usize, key: &str, v: &Value) -> Option<f64> {
        let x = self.num(line, key, v)?;
        if x > 0.0 && x < 1.0 {
            Some(x)
        } else {
            self.err(line, format!("`{key}` must lie in (0, 1), got {x}"));
            None
        }
    }

    fn count(&mut self, line: usize, key: &str, v: &Value) -> Option<usize> {
        let x = self.num(line, key, v)?;
        if x >= 1.0 && x.fract() == 0.0 && x < 1e9 {
            Some(x as usize)
        } else {
            self.err(line, format!("`{key}` must be a positive integer, got {x}"));
            None
        }
    }

    fn list(&mut self, line: usize, key: &str, v: &Value) -> Option<Vec<f64>> {
        match v {
            Value::List(items) => items.iter().map(|i| self.num(line, key, i)).collect(),
            _ => {
                self.err(line, format!("`{key}` must be a list of numbers"));
                None
            }
        }
    }

    fn nested(&mut self, line: usize, key: &str, v: &Value) -> Option<Vec<Vec<f64>>> {
        match v {
            Value::List(items) => items.iter().map(|i| self.list(line, key, i)).collect(),
            _ => {
                self.err(line, format!("`{key}` must be a list of lists"));
                None
            }
        }
    }

    fn boolean(&mut self, line: usize, key: &str, v: &Value) -> Option<bool> {
        match v {
            Value::Word(w) if w == "true" => Some(true),
            Value::Word(w) if w == "false" => Some(false),
            _ => {
                self.err(line, format!("`{key}` must be true or false"));
                None
            }
        }
    }
}

/// `coef[1,0]` → `[1, 0]`.
fn multi_index(key: &str) -> Option<Vec<u32>> {
    let inner = key.strip_prefix("coef[")?.strip_suffix(']')?;
    inner.split(',').map(|p| p.trim().parse().ok()).collect()
}

fn parse_cos2(word: &str) -> Option<f64> {
    word.strip_prefix("cos2(")?.strip_suffix(')')?.trim().parse().ok()
}

pub fn parse_spec(text: &str) -> Result<OperatorSpec, Error> {
    let mut ctx = Ctx { errors: Vec::new() };
    let mut section = String::new();
    let mut seen: Vec<(String, String)> = Vec::new();

    let mut name = None;
    let mut kind = None;
    let mut dim = None;
    let mut dim_line = 0;
    let (mut s, mut sigma, mut anisotropy, mut alpha, mut scale, mut rate) = (None, None, None, None, None, None);
    let mut reflect = false;
    let mut polynomial = Vec::new();
    let mut job = None;
    let mut points = Vec::new();
    let (mut center, mut width) = (None, None);
    let mut candidate: Option<Candidate> = None;
    let mut options = Options::default();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(sec) = content.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            section = sec.trim().to_string();
            if !["operator", "polynomial", "job", "candidate", "options"].contains(&section.as_str()) {
                ctx.err(line, format!("unknown section `[{section}]`"));
            }
            if section == "candidate" && candidate.is_none() {
                candidate = Some(Candidate { poly: Vec::new(), trig: Vec::new() });
            }
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            ctx.err(line, format!("expected `key = value`, found `{content}`"));
            continue;
        };
        let key = key.trim();
        if seen.iter().any(|(s, k)| *s == section && k == key) {
            ctx.err(line, format!("duplicate key `{key}`"));
            continue;
        }
        seen.push((section.clone(), key.to_string()));
        let value = match parse_value(value) {
            Ok(v) => v,
            Err(e) => {
                ctx.err(line, e);
                continue;
            }
        };
        match (section.as_str(), key) {
            ("operator", "name") => match &value {
                Value::Word(w) => name = Some(w.clone()),
                _ => ctx.err(line, "`name` must be a bare word"),
            },
            ("operator", "kind") => match &value {
                Value::Word(w) => match Kind::ALL.iter().find(|(_, n)| n == w) {
                    Some((k, _)) => kind = Some((*k, line)),
                    None => ctx.err(line, format!("unknown measure kind `{w}`")),
                },
                _ => ctx.err(line, "`kind` must be a bare word"),
            },
            ("operator", "dim") => {
                if let Some(d) = ctx.count(line, key, &value) {
                    if (1..=3).contains(&d) {
                        dim = Some(d);
                        dim_line = line;
                    } else {
                        ctx.err(line, format!("`dim` must be 1, 2 or 3, got {d}"));
                    }
                }
            }
            ("operator", "s") => s = ctx.unit_interval(line, key, &value),
            ("operator", "sigma") => sigma = ctx.positive(line, key, &value),
            ("operator", "anisotropy") => match &value {
                Value::List(_) => anisotropy = ctx.list(line, key, &value).map(Anisotropy::Coefficients),
                Value::Word(w) => match parse_cos2(w) {
                    Some(eps) => anisotropy = Some(Anisotropy::Cos2(eps)),
                    None => ctx.err(line, format!("unknown anisotropy `{w}` (expected a list or cos2(eps))")),
                },
                Value::Num(_) => ctx.err(line, "`anisotropy` must be a coefficient list or cos2(eps)"),
            },
            ("operator", "alpha") => {
                if let Some(a) = ctx.num(line, key, &value) {
                    if a > 0.0 && a < 2.0 {
                        alpha = Some(a);
                    } else {
                        ctx.err(line, format!("`alpha` must lie in (0, 2), got {a}"));
                    }
                }
            }
            ("operator", "scale") => scale = ctx.num(line, key, &value),
            ("operator", "rate") => {
                if let Some(r) = ctx.num(line, key, &value) {
                    if r >= 0.0 {
                        rate = Some(r);
                    } else {
                        ctx.err(line, format!("`rate` must be nonnegative, got {r}"));
                    }
                }
            }
            ("operator", "reflect") => reflect = ctx.boolean(line, key, &value).unwrap_or(false),
            ("polynomial", k) | ("candidate", k) if k.starts_with("coef[") => {
                let Some(alpha) = multi_index(k) else {
                    ctx.err(line, format!("malformed multi-index key `{k}`"));
                    continue;
                };
                if alpha.iter().sum::<u32>() > 4 {
                    ctx.err(line, format!("degree of `{k}` exceeds 4"));
                    continue;
                }
                let (re, im) = match &value {
                    Value::Num(x) => (*x, 0.0),
                    Value::List(_) => match ctx.list(line, k, &value).as_deref() {
                        Some([re, im]) => (*re, *im),
                        _ => {
                            ctx.err(line, format!("`{k}` must be a number or [re, im]"));
                            continue;
                        }
                    },
                    _ => {
                        ctx.err(line, format!("`{k}` must be a number or [re, im]"));
                        continue;
                    }
                };
                if section == "polynomial" {
                    polynomial.push((alpha, re, im));
                } else if im != 0.0 {
                    ctx.err(line, "candidate coefficients are real");
                } else if let Some(c) = candidate.as_mut() {
                    c.poly.push((alpha, re));
                }
            }
            ("candidate", "trig") => {
                if let Some(rows) = ctx.nested(line, key, &value) {
                    let mut trig = Vec::new();
                    for row in rows {
                        match row.as_slice() {
                            [f, a, b] => trig.push([*f, *a, *b]),
                            _ => ctx.err(line, "each trig term is [freq, cos_amp, sin_amp]"),
                        }
                    }
                    if let Some(c) = candidate.as_mut() {
                        c.trig = trig;
                    }
                }
            }
            ("job", "kind") => match &value {
                Value::Word(w) => match Job::parse(w) {
                    Some(j) => job = Some(j),
                    None => ctx.err(line, format!("unknown job `{w}`")),
                },
                _ => ctx.err(line, "`kind` must be a bare word"),
            },
            ("job", "points") => points = ctx.nested(line, key, &value).unwrap_or_default(),
            ("job", "center") => center = ctx.list(line, key, &value),
            ("job", "width") => width = ctx.positive(line, key, &value),
            ("options", "tol") => options.tol = ctx.positive(line, key, &value),
            ("options", "grid") => options.grid = ctx.count(line, key, &value),
            ("options", "half_width") => options.half_width = ctx.positive(line, key, &value),
            ("options", "verify") => options.verify = ctx.boolean(line, key, &value),
            ("", _) => ctx.err(line, format!("key `{key}` outside any section")),
            (sec, _) => ctx.err(line, format!("unknown key `{key}` in [{sec}]")),
        }
    }

    if name.is_none() {
        name = Some("operator".to_string());
    }
    let Some((kind, kind_line)) = kind else {
        ctx.err(0, "missing required field `kind` in [operator]");
        return Err(Error::Parse(ctx.errors));
    };
    let dim = match (kind, dim) {
        (Kind::Ilw, None) => 1,
        (Kind::Ilw, Some(d)) if d != 1 => {
            ctx.err(dim_line, "the ilw kernel lives on the line; `dim` must be 1");
            1
        }
        (_, Some(d)) => d,
        (_, None) => {
            ctx.err(0, "missing required field `dim` in [operator]");
            1
        }
    };
    let mut require = |present: bool, field: &str| {
        if !present {
            ctx.err(kind_line, format!("kind `{}` requires `{field}`", kind.name()));
        }
    };
    match kind {
        Kind::FractionalLaplacian | Kind::Relativistic => require(s.is_some(), "s"),
        Kind::Anisotropic => {
            require(s.is_some(), "s");
            require(anisotropy.is_some(), "anisotropy");
        }
        Kind::Ilw => require(sigma.is_some(), "sigma"),
        Kind::UserRadial => {
            require(alpha.is_some(), "alpha");
            require(scale.is_some(), "scale");
        }
    }
    if kind == Kind::Anisotropic && dim == 1 {
        ctx.err(dim_line, "anisotropic kernels need dim 2 or 3");
    }
    if polynomial.iter().any(|(a, _, _)| a.len() != dim) {
        ctx.err(0, format!("polynomial multi-indices must have {dim} entries"));
    }
    if candidate.as_ref().is_some_and(|c| c.poly.iter().any(|(a, _)| a.len() != dim)) {
        ctx.err(0, format!("candidate multi-indices must have {dim} entries"));
    }
    if points.iter().any(|p| p.len() != dim) {
        ctx.err(0, format!("job points must have {dim} coordinates"));
    }
    if center.as_ref().is_some_and(|c| c.len() != dim) {
        ctx.err(0, format!("job center must have {dim} coordinates"));
    }
    let Some(job) = job else {
        ctx.err(0, "missing required field `kind` in [job]");
        return Err(Error::Parse(ctx.errors));
    };
    if !ctx.errors.is_empty() {
        return Err(Error::Parse(ctx.errors));
    }
    Ok(OperatorSpec {
        name: name.unwrap_or_default(),
        measure: MeasureSpec { kind, dim, s, sigma, anisotropy, alpha, scale, rate, reflect },
        polynomial,
        job,
        points,
        center,
        width,
        candidate,
        options,
    })
}

fn list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

fn index(a: &[u32]) -> String {
    let items: Vec<String> = a.iter().map(u32::to_string).collect();
    format!("coef[{}]", items.join(","))
}

/// Writes `spec` back in the file format; `parse_spec(serialize_spec(x)) == x`.
pub fn serialize_spec(spec: &OperatorSpec) -> String {
    let mut out = String::new();
    let m = &spec.measure;
    let _ = writeln!(out, "[operator]");
    let _ = writeln!(out, "name = {}", spec.name);
    let _ = writeln!(out, "kind = {}", m.kind.name());
    let _ = writeln!(out, "dim = {}", m.dim);
    let optional = [("s", m.s), ("sigma", m.sigma), ("alpha", m.alpha), ("scale", m.scale), ("rate", m.rate)];
    for (key, v) in optional {
        if let Some(v) = v {
            let _ = writeln!(out, "{key} = {v:?}");
        }
    }
    match &m.anisotropy {
        Some(Anisotropy::Coefficients(c)) => {
            let _ = writeln!(out, "anisotropy = {}", list(c));
        }
        Some(Anisotropy::Cos2(eps)) => {
            let _ = writeln!(out, "anisotropy = cos2({eps:?})");
        }
        None => {}
    }
    if m.reflect {
        let _ = writeln!(out, "reflect = true");
    }
    if !spec.polynomial.is_empty() {
        let _ = writeln!(out, "\n[polynomial]");
        for (a, re, im) in &spec.polynomial {
            if *im == 0.0 {
                let _ = writeln!(out, "{} = {re:?}", index(a));
            } else {
                let _ = writeln!(out, "{} = [{re:?}, {im:?}]", index(a));
            }
        }
    }
    let _ = writeln!(out, "\n[job]");
    let _ = writeln!(out, "kind = {}", spec.job.name());
    if !spec.points.is_empty() {
        let rows: Vec<String> = spec.points.iter().map(|p| list(p)).collect();
        let _ = writeln!(out, "points = [{}]", rows.join(", "));
    }
    if let Some(c) = &spec.center {
        let _ = writeln!(out, "center = {}", list(c));
    }
    if let Some(w) = spec.width {
        let _ = writeln!(out, "width = {w:?}");
    }
    if let Some(c) = &spec.candidate {
        let _ = writeln!(out, "\n[candidate]");
        for (a, v) in &c.poly {
            let _ = writeln!(out, "{} = {v:?}", index(a));
        }
        if !c.trig.is_empty() {
            let rows: Vec<String> = c.trig.iter().map(|t| list(t)).collect();
            let _ = writeln!(out, "trig = [{}]", rows.join(", "));
        }
    }
    let o = &spec.options;
    if *o != Options::default() {
        let _ = writeln!(out, "\n[options]");
        if let Some(t) = o.tol {
            let _ = writeln!(out, "tol = {t:?}");
        }
        if let Some(g) = o.grid {
            let _ = writeln!(out, "grid = {g}");
        }
        if let Some(h) = o.half_width {
            let _ = writeln!(out, "half_width = {h:?}");
        }
        if let Some(v) = o.verify {
            let _ = writeln!(out, "verify = {v}");
        }
    }
    out
}
