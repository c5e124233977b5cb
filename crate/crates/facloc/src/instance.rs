//! Problem data model, file formats, random generation, and the recourse
//! (dummy facility) transform.
//!
//! An [`Instance`] is immutable after construction and safe to share across
//! solver workers. Assignment costs follow the ORLIB convention: `c[i][j]` is
//! the cost of serving *all* of customer `j`'s demand from facility `i`;
//! fractional assignments pay proportionally.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Problem variant: uncapacitated or capacitated facility location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Uflp,
    Cflp,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Uflp => write!(f, "uflp"),
            Variant::Cflp => write!(f, "cflp"),
        }
    }
}

/// Validation errors for instance data.
#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("instance must have at least one facility and one customer")]
    EmptyDimensions,
    #[error("{path}: length {found}, expected {expected}")]
    LengthMismatch {
        path: String,
        expected: usize,
        found: usize,
    },
    #[error("{path}: value {value} must be finite and >= 0")]
    BadCost { path: String, value: f64 },
    #[error("{path}: value {value} must be finite and > 0")]
    BadPositive { path: String, value: f64 },
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),
    #[error("recourse penalty {penalty} must exceed the largest assignment cost {max_cost}")]
    PenaltyTooSmall { penalty: f64, max_cost: f64 },
    #[error("instance already has a recourse facility")]
    RecourseAlreadyPresent,
    #[error("recourse column malformed: {0}")]
    BadRecourseColumn(String),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
}

/// A facility location instance.
///
/// When `recourse_penalty` is set, the *last* facility is the dummy recourse
/// facility: zero fixed cost, capacity equal to total demand (CFLP), and a
/// uniform service cost equal to the penalty. Solvers pin its location
/// variable open, which keeps the assignment subproblem feasible at every
/// selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n_facilities: usize,
    n_customers: usize,
    fixed_cost: Vec<f64>,
    /// Row-major `n_facilities x n_customers`.
    assign_cost: Vec<f64>,
    capacity: Option<Vec<f64>>,
    demand: Option<Vec<f64>>,
    variant: Variant,
    recourse_penalty: Option<f64>,
}

impl Instance {
    /// Build and validate an instance from row-major assignment costs.
    pub fn new(
        variant: Variant,
        fixed_cost: Vec<f64>,
        assign_cost: Vec<Vec<f64>>,
        capacity: Option<Vec<f64>>,
        demand: Option<Vec<f64>>,
        recourse_penalty: Option<f64>,
    ) -> Result<Self, InstanceError> {
        let n = fixed_cost.len();
        let m = assign_cost.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(InstanceError::EmptyDimensions);
        }
        if assign_cost.len() != n {
            return Err(InstanceError::LengthMismatch {
                path: "assign_cost".into(),
                expected: n,
                found: assign_cost.len(),
            });
        }
        let mut flat = Vec::with_capacity(n * m);
        for (i, row) in assign_cost.iter().enumerate() {
            if row.len() != m {
                return Err(InstanceError::LengthMismatch {
                    path: format!("assign_cost[{i}]"),
                    expected: m,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        let inst = Instance {
            n_facilities: n,
            n_customers: m,
            fixed_cost,
            assign_cost: flat,
            capacity,
            demand,
            variant,
            recourse_penalty,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Uncapacitated instance without recourse.
    pub fn uflp(fixed_cost: Vec<f64>, assign_cost: Vec<Vec<f64>>) -> Result<Self, InstanceError> {
        Self::new(Variant::Uflp, fixed_cost, assign_cost, None, None, None)
    }

    /// Capacitated instance without recourse.
    pub fn cflp(
        fixed_cost: Vec<f64>,
        assign_cost: Vec<Vec<f64>>,
        capacity: Vec<f64>,
        demand: Vec<f64>,
    ) -> Result<Self, InstanceError> {
        Self::new(
            Variant::Cflp,
            fixed_cost,
            assign_cost,
            Some(capacity),
            Some(demand),
            None,
        )
    }

    fn validate(&self) -> Result<(), InstanceError> {
        let (n, m) = (self.n_facilities, self.n_customers);
        for (i, &f) in self.fixed_cost.iter().enumerate() {
            if !f.is_finite() || f < 0.0 {
                return Err(InstanceError::BadCost {
                    path: format!("fixed_cost[{i}]"),
                    value: f,
                });
            }
        }
        for i in 0..n {
            for j in 0..m {
                let c = self.assign_cost[i * m + j];
                if !c.is_finite() || c < 0.0 {
                    return Err(InstanceError::BadCost {
                        path: format!("assign_cost[{i}][{j}]"),
                        value: c,
                    });
                }
            }
        }
        match self.variant {
            Variant::Cflp => {
                let cap = self.capacity.as_ref().ok_or_else(|| {
                    InstanceError::VariantMismatch("cflp requires capacity".into())
                })?;
                let dem = self
                    .demand
                    .as_ref()
                    .ok_or_else(|| InstanceError::VariantMismatch("cflp requires demand".into()))?;
                if cap.len() != n {
                    return Err(InstanceError::LengthMismatch {
                        path: "capacity".into(),
                        expected: n,
                        found: cap.len(),
                    });
                }
                if dem.len() != m {
                    return Err(InstanceError::LengthMismatch {
                        path: "demand".into(),
                        expected: m,
                        found: dem.len(),
                    });
                }
                for (i, &s) in cap.iter().enumerate() {
                    if !s.is_finite() || s <= 0.0 {
                        return Err(InstanceError::BadPositive {
                            path: format!("capacity[{i}]"),
                            value: s,
                        });
                    }
                }
                for (j, &d) in dem.iter().enumerate() {
                    if !d.is_finite() || d <= 0.0 {
                        return Err(InstanceError::BadPositive {
                            path: format!("demand[{j}]"),
                            value: d,
                        });
                    }
                }
            }
            Variant::Uflp => {
                if self.capacity.is_some() {
                    return Err(InstanceError::VariantMismatch(
                        "uflp must not carry capacity".into(),
                    ));
                }
                if self.demand.is_some() {
                    return Err(InstanceError::VariantMismatch(
                        "uflp must not carry demand".into(),
                    ));
                }
            }
        }
        if let Some(p) = self.recourse_penalty {
            if !p.is_finite() || p <= 0.0 {
                return Err(InstanceError::BadPositive {
                    path: "recourse_penalty".into(),
                    value: p,
                });
            }
            if n < 2 {
                return Err(InstanceError::BadRecourseColumn(
                    "recourse instance needs at least one real facility".into(),
                ));
            }
            let d = n - 1;
            if self.fixed_cost[d] != 0.0 {
                return Err(InstanceError::BadRecourseColumn(
                    "dummy facility must have zero fixed cost".into(),
                ));
            }
            for j in 0..m {
                if self.assign_cost[d * m + j] != p {
                    return Err(InstanceError::BadRecourseColumn(format!(
                        "dummy assignment cost [{j}] differs from penalty"
                    )));
                }
            }
            if let Some(cap) = &self.capacity {
                if cap[d] != self.total_demand() {
                    return Err(InstanceError::BadRecourseColumn(
                        "dummy capacity must equal total demand".into(),
                    ));
                }
            }
            let max_real = self.max_real_assign_cost();
            if p <= max_real {
                return Err(InstanceError::PenaltyTooSmall {
                    penalty: p,
                    max_cost: max_real,
                });
            }
        }
        Ok(())
    }

    pub fn n_facilities(&self) -> usize {
        self.n_facilities
    }

    pub fn n_customers(&self) -> usize {
        self.n_customers
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn fixed_costs(&self) -> &[f64] {
        &self.fixed_cost
    }

    pub fn assign_cost(&self, facility: usize, customer: usize) -> f64 {
        self.assign_cost[facility * self.n_customers + customer]
    }

    /// Assignment costs of one facility across all customers.
    pub fn assign_row(&self, facility: usize) -> &[f64] {
        let m = self.n_customers;
        &self.assign_cost[facility * m..(facility + 1) * m]
    }

    pub fn capacities(&self) -> Option<&[f64]> {
        self.capacity.as_deref()
    }

    pub fn demands(&self) -> Option<&[f64]> {
        self.demand.as_deref()
    }

    pub fn recourse_penalty(&self) -> Option<f64> {
        self.recourse_penalty
    }

    pub fn has_recourse(&self) -> bool {
        self.recourse_penalty.is_some()
    }

    /// Index of the dummy recourse facility, when present (always the last).
    pub fn dummy_index(&self) -> Option<usize> {
        self.recourse_penalty.map(|_| self.n_facilities - 1)
    }

    /// Number of facilities excluding the dummy recourse column.
    pub fn n_real_facilities(&self) -> usize {
        self.n_facilities - usize::from(self.has_recourse())
    }

    pub fn total_demand(&self) -> f64 {
        self.demand.as_ref().map_or(0.0, |d| d.iter().sum())
    }

    /// Largest assignment cost over non-dummy facilities.
    pub fn max_real_assign_cost(&self) -> f64 {
        let m = self.n_customers;
        let n_real = self.n_real_facilities();
        self.assign_cost[..n_real * m]
            .iter()
            .fold(0.0_f64, |a, &c| a.max(c))
    }

    /// A penalty comfortably above any sensible solution cost, suitable for
    /// [`add_recourse`]. Large enough that optimal solutions of feasible
    /// instances do not route demand through the dummy in practice.
    pub fn recommended_recourse_penalty(&self) -> f64 {
        let fixed: f64 = self.fixed_cost.iter().sum();
        let worst_assign: f64 = (0..self.n_customers)
            .map(|j| {
                (0..self.n_real_facilities())
                    .map(|i| self.assign_cost(i, j))
                    .fold(0.0_f64, f64::max)
            })
            .sum();
        2.0 * (fixed + worst_assign) + 1.0
    }
}

/// Append a dummy recourse facility: zero fixed cost, capacity equal to total
/// demand (CFLP), and service cost `penalty` for every customer. The dummy's
/// location variable is pinned open by the solvers, so the assignment
/// subproblem stays feasible for every selection.
pub fn add_recourse(inst: &Instance, penalty: f64) -> Result<Instance, InstanceError> {
    if inst.has_recourse() {
        return Err(InstanceError::RecourseAlreadyPresent);
    }
    let max_cost = inst.max_real_assign_cost();
    if !penalty.is_finite() || penalty <= max_cost {
        return Err(InstanceError::PenaltyTooSmall {
            penalty,
            max_cost,
        });
    }
    let (n, m) = (inst.n_facilities, inst.n_customers);
    let mut fixed = inst.fixed_cost.clone();
    fixed.push(0.0);
    let mut assign = inst.assign_cost.clone();
    assign.extend(std::iter::repeat_n(penalty, m));
    let capacity = inst.capacity.as_ref().map(|cap| {
        let mut cap = cap.clone();
        cap.push(inst.total_demand());
        cap
    });
    let out = Instance {
        n_facilities: n + 1,
        n_customers: m,
        fixed_cost: fixed,
        assign_cost: assign,
        capacity,
        demand: inst.demand.clone(),
        variant: inst.variant,
        recourse_penalty: Some(penalty),
    };
    out.validate()?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// ORLIB cap format
// ---------------------------------------------------------------------------

/// Parse errors carrying 1-based line and token positions.
#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {detail}")]
    MalformedHeader { line: usize, detail: String },
    #[error("line {line}, token {token}: expected {expected}")]
    TokenCountMismatch {
        line: usize,
        token: usize,
        expected: String,
    },
    #[error("line {line}, token {token}: negative value {value}")]
    NegativeValue {
        line: usize,
        token: usize,
        value: f64,
    },
    #[error("line {line}, token {token}: not a number: {text:?}")]
    InvalidToken {
        line: usize,
        token: usize,
        text: String,
    },
    #[error("schema error at {path}: {detail}")]
    Schema { path: String, detail: String },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

struct Tokens<'a> {
    toks: Vec<(usize, usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut toks = Vec::new();
        for (li, line) in text.lines().enumerate() {
            for (ti, tok) in line.split_whitespace().enumerate() {
                toks.push((li + 1, ti + 1, tok));
            }
        }
        Tokens { toks, pos: 0 }
    }

    fn next_f64(&mut self, expected: &str) -> Result<(usize, usize, f64), ParseError> {
        let Some(&(line, token, text)) = self.toks.get(self.pos) else {
            let (line, token) = self
                .toks
                .last()
                .map(|&(l, t, _)| (l, t + 1))
                .unwrap_or((1, 1));
            return Err(ParseError::TokenCountMismatch {
                line,
                token,
                expected: expected.to_string(),
            });
        };
        self.pos += 1;
        let value: f64 = text.parse().map_err(|_| ParseError::InvalidToken {
            line,
            token,
            text: text.to_string(),
        })?;
        if value < 0.0 {
            return Err(ParseError::NegativeValue { line, token, value });
        }
        Ok((line, token, value))
    }

    fn remaining(&self) -> Option<(usize, usize)> {
        self.toks.get(self.pos).map(|&(l, t, _)| (l, t))
    }
}

/// Parse the ORLIB capacitated-warehouse layout: a header line `n m`, then
/// `n` lines of `capacity fixed_cost`, then per customer its demand followed
/// by `n` allocation costs. Token layout after the header is free-form.
pub fn parse_orlib(text: &str) -> Result<Instance, ParseError> {
    let header_line = text
        .lines()
        .enumerate()
        .find(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l));
    let Some((hline, header)) = header_line else {
        return Err(ParseError::MalformedHeader {
            line: 1,
            detail: "empty input".into(),
        });
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(ParseError::MalformedHeader {
            line: hline,
            detail: format!("expected `n m`, found {} tokens", fields.len()),
        });
    }
    let parse_dim = |tok: &str, what: &str| -> Result<usize, ParseError> {
        tok.parse::<usize>()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| ParseError::MalformedHeader {
                line: hline,
                detail: format!("{what} must be a positive integer, found {tok:?}"),
            })
    };
    let n = parse_dim(fields[0], "facility count")?;
    let m = parse_dim(fields[1], "customer count")?;

    // Blank the header in place so token line numbers stay 1-based and true.
    let body: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| if i + 1 == hline { "" } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    let mut toks = Tokens::new(&body);

    let mut capacity = Vec::with_capacity(n);
    let mut fixed = Vec::with_capacity(n);
    for i in 0..n {
        let (.., cap) = toks.next_f64(&format!("capacity of facility {}", i + 1))?;
        let (.., fc) = toks.next_f64(&format!("fixed cost of facility {}", i + 1))?;
        capacity.push(cap);
        fixed.push(fc);
    }
    let mut demand = Vec::with_capacity(m);
    // Customer-major allocation costs; transpose into facility-major rows.
    let mut assign = vec![vec![0.0; m]; n];
    for j in 0..m {
        let (.., d) = toks.next_f64(&format!("demand of customer {}", j + 1))?;
        demand.push(d);
        for (i, row) in assign.iter_mut().enumerate() {
            let (.., c) = toks.next_f64(&format!(
                "allocation cost of customer {} at facility {}",
                j + 1,
                i + 1
            ))?;
            row[j] = c;
        }
    }
    if let Some((line, token)) = toks.remaining() {
        return Err(ParseError::TokenCountMismatch {
            line,
            token,
            expected: "end of file".into(),
        });
    }
    Ok(Instance::cflp(fixed, assign, capacity, demand)?)
}

// ---------------------------------------------------------------------------
// Native format
// ---------------------------------------------------------------------------

const NATIVE_HEADER: &str = "facloc-instance v1";

fn fmt_f64(x: f64) -> String {
    // 17 significant digits: exact f64 round trip.
    format!("{x:.16e}")
}

/// Emit the native line-oriented format. Keys appear in a fixed order and
/// floats carry 17 significant digits, so emission is byte-deterministic and
/// `parse_native(emit_native(x)) == x` field-for-field.
pub fn emit_native(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(NATIVE_HEADER);
    out.push('\n');
    out.push_str(&format!("variant {}\n", inst.variant));
    out.push_str(&format!("n {}\n", inst.n_facilities));
    out.push_str(&format!("m {}\n", inst.n_customers));
    let join = |xs: &[f64]| {
        xs.iter()
            .map(|&x| fmt_f64(x))
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.push_str(&format!("fixed_cost {}\n", join(&inst.fixed_cost)));
    if let Some(cap) = &inst.capacity {
        out.push_str(&format!("capacity {}\n", join(cap)));
    }
    if let Some(dem) = &inst.demand {
        out.push_str(&format!("demand {}\n", join(dem)));
    }
    if let Some(p) = inst.recourse_penalty {
        out.push_str(&format!("recourse_penalty {}\n", fmt_f64(p)));
    }
    out.push_str("assign_cost\n");
    for i in 0..inst.n_facilities {
        out.push_str(&join(inst.assign_row(i)));
        out.push('\n');
    }
    out
}

struct NativeLines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> NativeLines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .map(|l| {
                let l = l.split('#').next().unwrap_or("");
                l.trim()
            })
            .filter(|l| !l.is_empty())
            .collect();
        NativeLines { lines, pos: 0 }
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    fn next_line(&mut self, path: &str) -> Result<&'a str, ParseError> {
        let line = self.lines.get(self.pos).copied().ok_or(ParseError::Schema {
            path: path.to_string(),
            detail: "missing".into(),
        })?;
        self.pos += 1;
        Ok(line)
    }

    fn take_key(&mut self, key: &str) -> Result<&'a str, ParseError> {
        let line = self.next_line(key)?;
        let rest = line.strip_prefix(key).ok_or_else(|| ParseError::Schema {
            path: key.to_string(),
            detail: format!("expected key {key:?}, found line {line:?}"),
        })?;
        if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
            return Err(ParseError::Schema {
                path: key.to_string(),
                detail: format!("expected key {key:?}, found line {line:?}"),
            });
        }
        Ok(rest.trim())
    }
}

fn parse_floats(text: &str, path: &str, expected: usize) -> Result<Vec<f64>, ParseError> {
    let vals: Result<Vec<f64>, _> = text.split_whitespace().map(str::parse::<f64>).collect();
    let vals = vals.map_err(|e| ParseError::Schema {
        path: path.to_string(),
        detail: e.to_string(),
    })?;
    if vals.len() != expected {
        return Err(ParseError::Schema {
            path: path.to_string(),
            detail: format!("expected {expected} values, found {}", vals.len()),
        });
    }
    Ok(vals)
}

/// Parse the native format (see [`emit_native`] and the README for the
/// schema). Comment lines starting with `#` and blank lines are ignored.
pub fn parse_native(text: &str) -> Result<Instance, ParseError> {
    let mut lines = NativeLines::new(text);
    let header = lines.next_line("header")?;
    if header != NATIVE_HEADER {
        return Err(ParseError::Schema {
            path: "header".into(),
            detail: format!("expected {NATIVE_HEADER:?}, found {header:?}"),
        });
    }
    let variant = match lines.take_key("variant")? {
        "uflp" => Variant::Uflp,
        "cflp" => Variant::Cflp,
        other => {
            return Err(ParseError::Schema {
                path: "variant".into(),
                detail: format!("unknown variant {other:?}"),
            })
        }
    };
    let parse_usize = |text: &str, path: &str| -> Result<usize, ParseError> {
        text.parse().map_err(|_| ParseError::Schema {
            path: path.to_string(),
            detail: format!("expected integer, found {text:?}"),
        })
    };
    let n = parse_usize(lines.take_key("n")?, "n")?;
    let m = parse_usize(lines.take_key("m")?, "m")?;
    let fixed = parse_floats(lines.take_key("fixed_cost")?, "fixed_cost", n)?;

    let mut capacity = None;
    let mut demand = None;
    if matches!(lines.peek(), Some(l) if l.starts_with("capacity")) {
        if variant == Variant::Uflp {
            return Err(ParseError::Instance(InstanceError::VariantMismatch(
                "uflp must not carry capacity".into(),
            )));
        }
        capacity = Some(parse_floats(lines.take_key("capacity")?, "capacity", n)?);
    }
    if matches!(lines.peek(), Some(l) if l.starts_with("demand")) {
        if variant == Variant::Uflp {
            return Err(ParseError::Instance(InstanceError::VariantMismatch(
                "uflp must not carry demand".into(),
            )));
        }
        demand = Some(parse_floats(lines.take_key("demand")?, "demand", m)?);
    }
    let mut recourse = None;
    if matches!(lines.peek(), Some(l) if l.starts_with("recourse_penalty")) {
        let vals = parse_floats(lines.take_key("recourse_penalty")?, "recourse_penalty", 1)?;
        recourse = Some(vals[0]);
    }
    let marker = lines.next_line("assign_cost")?;
    if marker != "assign_cost" {
        return Err(ParseError::Schema {
            path: "assign_cost".into(),
            detail: format!("expected marker line `assign_cost`, found {marker:?}"),
        });
    }
    let mut assign = Vec::with_capacity(n);
    for i in 0..n {
        let path = format!("assign_cost[{i}]");
        let row = lines.next_line(&path)?;
        assign.push(parse_floats(row, &path, m)?);
    }
    if let Some(extra) = lines.peek() {
        return Err(ParseError::Schema {
            path: "end".into(),
            detail: format!("unexpected trailing line {extra:?}"),
        });
    }
    Ok(Instance::new(variant, fixed, assign, capacity, demand, recourse)?)
}

// ---------------------------------------------------------------------------
// File loading
// ---------------------------------------------------------------------------

/// On-disk format; detected from the extension (`.cap` ORLIB, `.fl` native)
/// unless overridden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    Orlib,
    Native,
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: unknown extension (expected .cap or .fl, or pass an explicit format)")]
    UnknownExtension { path: String },
}

/// Load an instance from disk.
pub fn read_file(
    path: &std::path::Path,
    format: Option<FileFormat>,
) -> Result<Instance, ReadError> {
    let display = path.display().to_string();
    let format = match format {
        Some(f) => f,
        None => match path.extension().and_then(|e| e.to_str()) {
            Some("cap") => FileFormat::Orlib,
            Some("fl") => FileFormat::Native,
            _ => return Err(ReadError::UnknownExtension { path: display }),
        },
    };
    let text = std::fs::read_to_string(path).map_err(|source| ReadError::Io {
        path: display.clone(),
        source,
    })?;
    let parsed = match format {
        FileFormat::Orlib => parse_orlib(&text),
        FileFormat::Native => parse_native(&text),
    };
    parsed.map_err(|source| ReadError::Parse {
        path: display,
        source,
    })
}

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

/// Assignment costs are `demand * euclidean distance * ASSIGN_COST_SCALE`
/// with sites i.i.d. uniform on the unit square (UFLP demand is 1).
pub const ASSIGN_COST_SCALE: f64 = 10.0;
/// Fixed costs are uniform in `[FIXED_COST_LO, FIXED_COST_HI)`.
pub const FIXED_COST_LO: f64 = 1.0;
pub const FIXED_COST_HI: f64 = 10.0;
/// CFLP demands are uniform in `[DEMAND_LO, DEMAND_HI)`.
pub const DEMAND_LO: f64 = 1.0;
pub const DEMAND_HI: f64 = 10.0;

/// Generate a reproducible random instance. Identical `(seed, n, m, variant,
/// ratio)` yield bit-identical instances. For CFLP, raw capacities are drawn
/// uniform and rescaled so that total capacity = `ratio` * total demand
/// (`ratio > 1` required).
pub fn generate(
    seed: u64,
    n: usize,
    m: usize,
    variant: Variant,
    ratio: Option<f64>,
) -> Result<Instance, InstanceError> {
    if n < 1 || m < 1 {
        return Err(InstanceError::InvalidParams(
            "need n >= 1 and m >= 1".into(),
        ));
    }
    if variant == Variant::Cflp {
        match ratio {
            Some(r) if r > 1.0 && r.is_finite() => {}
            _ => {
                return Err(InstanceError::InvalidParams(
                    "cflp requires a finite capacity ratio > 1".into(),
                ))
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| -> (f64, f64) {
        (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))
    };
    let facilities: Vec<(f64, f64)> = (0..n).map(|_| point(&mut rng)).collect();
    let customers: Vec<(f64, f64)> = (0..m).map(|_| point(&mut rng)).collect();
    let fixed: Vec<f64> = (0..n)
        .map(|_| rng.random_range(FIXED_COST_LO..FIXED_COST_HI))
        .collect();

    let (capacity, demand) = if variant == Variant::Cflp {
        let demand: Vec<f64> = (0..m)
            .map(|_| rng.random_range(DEMAND_LO..DEMAND_HI))
            .collect();
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..2.0)).collect();
        let total_d: f64 = demand.iter().sum();
        let total_raw: f64 = raw.iter().sum();
        let scale = ratio.unwrap() * total_d / total_raw;
        let capacity = raw.iter().map(|&c| c * scale).collect();
        (Some(capacity), Some(demand))
    } else {
        (None, None)
    };

    let mut assign = Vec::with_capacity(n);
    for &(fx, fy) in &facilities {
        let mut row = Vec::with_capacity(m);
        for (j, &(cx, cy)) in customers.iter().enumerate() {
            let dist = ((fx - cx).powi(2) + (fy - cy).powi(2)).sqrt();
            let dem = demand.as_ref().map_or(1.0, |d| d[j]);
            row.push(dem * dist * ASSIGN_COST_SCALE);
        }
        assign.push(row);
    }
    Instance::new(variant, fixed, assign, capacity, demand, None)
}
