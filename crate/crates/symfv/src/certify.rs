//! Certificate tables: a small expression language for table entries, the
//! table data files, and the machine verification of every cell.
//!
//! A certificate at a root `r` consists of typed polytopes at prescribed
//! offsets from `r`:
//!
//! | kind | entries |
//! |------|---------|
//! | `RL` | `P_R` right type at `r`, `P_L` left type at `r + (n,2n)` |
//! | `LR` | `P_L` left type at `r`, `P_R` right type at `r + (2n,n)` |
//! | `Tri` | `P` at `r`, `P_L` left at `r + (n,2n)`, `P_R` right at `r + (2n,n)`, `Q` at `r + (3n,3n)` |
//! | `B` | `P_B` of base type at `r`, or `P_L` left and `P_R` right, both at `r` |
//!
//! Table cells are stored as data exactly as they are printed, including
//! cells that do not verify literally; such cells carry alternative
//! readings, and the verifier reports which reading (if any) validates.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::catalog::{self, CatalogKey};
use crate::classify::{class_roots, clause};
use crate::group::{standard_group, Family, Group, GroupError, GroupSpec};
use crate::hull::{FVector, Polytope};
use crate::ops::{apply, OpKind, OpTag};
use crate::polytope::{classify_type, is_symmetric, polar_dual, TypeFlags};

/// Errors from parsing, validating and loading certificate data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    /// Malformed expression or record.
    #[error("cannot parse {input:?}: {reason}")]
    Parse {
        /// Offending text.
        input: String,
        /// What went wrong.
        reason: String,
    },
    /// Structurally invalid certificate.
    #[error("invalid certificate {cell}: {reason}")]
    Invalid {
        /// Cell label.
        cell: String,
        /// What went wrong.
        reason: String,
    },
    /// Missing or unreadable table data.
    #[error("table data: {0}")]
    Table(String),
    /// No table is registered for the group.
    #[error("no certificate table for {0}")]
    NoTable(String),
    /// Group construction failed.
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Errors from evaluating a construction expression inside a cell.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    /// `*` used where no companion entry is available.
    #[error("{cell}: '*' has no companion entry")]
    UnboundStar {
        /// Cell label.
        cell: String,
    },
    /// `∅` cannot be materialized.
    #[error("{cell}: the empty entry cannot be evaluated")]
    Empty {
        /// Cell label.
        cell: String,
    },
    /// A parameter evaluated to an unusable value.
    #[error("{cell}: parameter out of range in {expr}")]
    Parameter {
        /// Cell label.
        cell: String,
        /// Offending expression.
        expr: String,
    },
    /// Catalog or operation failure.
    #[error("{cell}: {expr}: {reason}")]
    Construction {
        /// Cell label.
        cell: String,
        /// Sub-expression that failed.
        expr: String,
        /// Underlying error.
        reason: String,
    },
}

// ---------------------------------------------------------------------------
// Parameter expressions.

/// An integer-affine expression `a·n + b·d + c` in the group parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ParamExpr {
    /// Coefficient of `n` (the modulus, which is the group order).
    pub n: i64,
    /// Coefficient of `d` (the axial parameter).
    pub d: i64,
    /// Constant term.
    pub c: i64,
}

impl ParamExpr {
    /// A constant.
    pub fn constant(c: i64) -> ParamExpr {
        ParamExpr { n: 0, d: 0, c }
    }

    /// Evaluate under bindings.
    pub fn eval(&self, b: Bindings) -> i64 {
        self.n * b.n + self.d * b.d + self.c
    }

    /// Whether the expression is a constant.
    pub fn is_constant(&self) -> bool {
        self.n == 0 && self.d == 0
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (coef, var) in [(self.n, "n"), (self.d, "d"), (self.c, "")] {
            if coef == 0 {
                continue;
            }
            let sign = if coef < 0 { "-" } else if out.is_empty() { "" } else { "+" };
            let mag = coef.unsigned_abs();
            let body = match (mag, var) {
                (1, v) if !v.is_empty() => v.to_string(),
                (m, v) => format!("{m}{v}"),
            };
            out.push_str(sign);
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl FromStr for ParamExpr {
    type Err = CertifyError;

    /// Parse sums of terms `[±][k]n`, `[±][k]d`, `[±]k`, e.g. `2n+d+2`.
    fn from_str(s: &str) -> Result<ParamExpr, CertifyError> {
        let err = |reason: &str| CertifyError::Parse { input: s.to_string(), reason: reason.to_string() };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err("empty parameter"));
        }
        let mut e = ParamExpr::default();
        let chars: Vec<char> = t.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let mut sign = 1;
            if chars[i] == '+' || chars[i] == '-' {
                if chars[i] == '-' {
                    sign = -1;
                }
                i += 1;
            } else if i > 0 {
                return Err(err("expected '+' or '-'"));
            }
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let coef = if digits.is_empty() { None } else { Some(digits.parse::<i64>().map_err(|_| err("number too large"))?) };
            let var = if i < chars.len() && (chars[i] == 'n' || chars[i] == 'd') {
                i += 1;
                Some(chars[i - 1])
            } else {
                None
            };
            match (coef, var) {
                (None, None) => return Err(err("expected a term")),
                (c, Some('n')) => e.n += sign * c.unwrap_or(1),
                (c, Some(_)) => e.d += sign * c.unwrap_or(1),
                (Some(c), None) => e.c += sign * c,
            }
        }
        Ok(e)
    }
}

/// Values of the symbols `n` and `d` for a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bindings {
    /// The modulus of the classification (the group order).
    pub n: i64,
    /// The axial parameter (`n` itself for `C_n`; `0` for `T`, `O`, `I`).
    pub d: i64,
}

impl Bindings {
    /// Bindings for a group.
    pub fn for_spec(spec: GroupSpec) -> Bindings {
        let n = clause(spec).modulus as i64;
        let d = match spec.family {
            Family::T | Family::O | Family::I => 0,
            _ => spec.param as i64,
        };
        Bindings { n, d }
    }
}

/// A pair of parameter expressions, written `(a,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairExpr(pub ParamExpr, pub ParamExpr);

impl PairExpr {
    /// Evaluate both components.
    pub fn eval(&self, b: Bindings) -> (i64, i64) {
        (self.0.eval(b), self.1.eval(b))
    }
}

impl fmt::Display for PairExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

impl FromStr for PairExpr {
    type Err = CertifyError;
    fn from_str(s: &str) -> Result<PairExpr, CertifyError> {
        let err = || CertifyError::Parse { input: s.to_string(), reason: "expected (a,b)".into() };
        let inner = s.trim().strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(err)?;
        let (a, b) = inner.split_once(',').ok_or_else(err)?;
        Ok(PairExpr(a.parse()?, b.parse()?))
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(ParamExpr);
string_serde!(PairExpr);

// ---------------------------------------------------------------------------
// Construction expressions.

/// A table entry: catalog references, operations, duals, the companion
/// reference `*` and the empty placeholder `∅`.
///
/// Textual syntax: `Name`, `Name[p,q]`, `OP(k,m)(X)`, `OP(k,m)^e(X)`,
/// composition `A∘B(X)` (sugar for `A(B(X))`), `dual(X)`, `*`, `∅`.
/// Parameters are affine expressions in `n` and `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConstructionExpr {
    /// A catalog polytope.
    Catalog {
        /// Registered name.
        name: String,
        /// Parameters.
        params: Vec<ParamExpr>,
    },
    /// An operation applied `power` times.
    Op {
        /// Operation family.
        tag: OpTag,
        /// Degree selector.
        k: ParamExpr,
        /// Orbit size.
        m: ParamExpr,
        /// Number of repetitions (at least 1).
        power: u32,
        /// Operand.
        arg: Box<ConstructionExpr>,
    },
    /// A symmetric polar dual.
    Dual(Box<ConstructionExpr>),
    /// The companion polytope of the cell.
    Star,
    /// No polytope (only in the `P` slot of a triangle certificate).
    Empty,
}

impl ConstructionExpr {
    /// Whether `*` occurs anywhere in the expression.
    pub fn contains_star(&self) -> bool {
        match self {
            ConstructionExpr::Star => true,
            ConstructionExpr::Op { arg, .. } | ConstructionExpr::Dual(arg) => arg.contains_star(),
            _ => false,
        }
    }

    /// Whether `∅` occurs anywhere in the expression.
    pub fn contains_empty(&self) -> bool {
        match self {
            ConstructionExpr::Empty => true,
            ConstructionExpr::Op { arg, .. } | ConstructionExpr::Dual(arg) => arg.contains_empty(),
            _ => false,
        }
    }

    /// Replace every `*` by `with`.
    pub fn substitute_star(&self, with: &ConstructionExpr) -> ConstructionExpr {
        match self {
            ConstructionExpr::Star => with.clone(),
            ConstructionExpr::Op { tag, k, m, power, arg } => ConstructionExpr::Op {
                tag: *tag,
                k: *k,
                m: *m,
                power: *power,
                arg: Box::new(arg.substitute_star(with)),
            },
            ConstructionExpr::Dual(a) => ConstructionExpr::Dual(Box::new(a.substitute_star(with))),
            other => other.clone(),
        }
    }

    /// Replace every parameter by its value under `b`.
    pub fn instantiate(&self, b: Bindings) -> ConstructionExpr {
        let c = |p: &ParamExpr| ParamExpr::constant(p.eval(b));
        match self {
            ConstructionExpr::Catalog { name, params } => {
                ConstructionExpr::Catalog { name: name.clone(), params: params.iter().map(c).collect() }
            }
            ConstructionExpr::Op { tag, k, m, power, arg } => ConstructionExpr::Op {
                tag: *tag,
                k: c(k),
                m: c(m),
                power: *power,
                arg: Box::new(arg.instantiate(b)),
            },
            ConstructionExpr::Dual(a) => ConstructionExpr::Dual(Box::new(a.instantiate(b))),
            other => other.clone(),
        }
    }
}

impl fmt::Display for ConstructionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionExpr::Catalog { name, params } => {
                f.write_str(name)?;
                if !params.is_empty() {
                    let p: Vec<String> = params.iter().map(|x| x.to_string()).collect();
                    write!(f, "[{}]", p.join(","))?;
                }
                Ok(())
            }
            ConstructionExpr::Op { tag, k, m, power, arg } => {
                write!(f, "{}({},{})", tag.name(), k, m)?;
                if *power != 1 {
                    write!(f, "^{power}")?;
                }
                write!(f, "({arg})")
            }
            ConstructionExpr::Dual(a) => write!(f, "dual({a})"),
            ConstructionExpr::Star => f.write_str("*"),
            ConstructionExpr::Empty => f.write_str("∅"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: impl Into<String>) -> CertifyError {
        CertifyError::Parse { input: self.src.to_string(), reason: format!("{} at position {}", reason.into(), self.pos) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), CertifyError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<String, CertifyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        if start == self.pos || !self.chars[start].is_ascii_alphabetic() {
            return Err(self.err("expected a name"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    /// Text up to (not including) the next `,`, `)` or `]`.
    fn param(&mut self) -> Result<ParamExpr, CertifyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && !matches!(self.chars[self.pos], ',' | ')' | ']') {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
    }

    fn op_head(&mut self, tag: OpTag) -> Result<(OpTag, ParamExpr, ParamExpr, u32), CertifyError> {
        self.expect('(')?;
        let k = self.param()?;
        self.expect(',')?;
        let m = self.param()?;
        self.expect(')')?;
        let mut power = 1;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits: String = self.chars[start..self.pos].iter().collect();
            power = digits.parse().map_err(|_| self.err("expected an exponent"))?;
            if power == 0 {
                return Err(self.err("exponent must be positive"));
            }
        }
        Ok((tag, k, m, power))
    }

    fn expr(&mut self) -> Result<ConstructionExpr, CertifyError> {
        match self.peek() {
            None => Err(self.err("unexpected end")),
            Some('*') => {
                self.pos += 1;
                Ok(ConstructionExpr::Star)
            }
            Some('∅') => {
                self.pos += 1;
                Ok(ConstructionExpr::Empty)
            }
            Some(_) => {
                let name = self.ident()?;
                if name == "dual" {
                    self.expect('(')?;
                    let a = self.expr()?;
                    self.expect(')')?;
                    return Ok(ConstructionExpr::Dual(Box::new(a)));
                }
                match (name.parse::<OpTag>(), self.peek()) {
                    (Ok(tag), Some('(')) => {
                        let mut chain = vec![self.op_head(tag)?];
                        while self.peek() == Some('∘') {
                            self.pos += 1;
                            let n = self.ident()?;
                            let t = n.parse::<OpTag>().map_err(|e| self.err(e))?;
                            chain.push(self.op_head(t)?);
                        }
                        self.expect('(')?;
                        let mut e = self.expr()?;
                        self.expect(')')?;
                        for (tag, k, m, power) in chain.into_iter().rev() {
                            e = ConstructionExpr::Op { tag, k, m, power, arg: Box::new(e) };
                        }
                        Ok(e)
                    }
                    _ => {
                        let mut params = Vec::new();
                        if self.peek() == Some('[') {
                            self.pos += 1;
                            loop {
                                params.push(self.param()?);
                                match self.peek() {
                                    Some(',') => self.pos += 1,
                                    Some(']') => {
                                        self.pos += 1;
                                        break;
                                    }
                                    _ => return Err(self.err("expected ',' or ']'")),
                                }
                            }
                        }
                        Ok(ConstructionExpr::Catalog { name, params })
                    }
                }
            }
        }
    }
}

impl FromStr for ConstructionExpr {
    type Err = CertifyError;
    fn from_str(s: &str) -> Result<ConstructionExpr, CertifyError> {
        let mut p = Parser { src: s, chars: s.chars().collect(), pos: 0 };
        let e = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

string_serde!(ConstructionExpr);

// ---------------------------------------------------------------------------
// Certificates.

/// Certificate kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// Right type at the root, left type one `(n,2n)` step up.
    RL,
    /// Left type at the root, right type one `(2n,n)` step up.
    LR,
    /// Triangle certificate.
    Tri,
    /// Base certificate.
    B,
}

/// Root slot `v1`, `v2`, `v3` of a residue class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    /// First cone point.
    V1,
    /// Second cone point.
    V2,
    /// Third cone point.
    V3,
}

impl Slot {
    /// Zero-based index.
    pub fn index(self) -> usize {
        match self {
            Slot::V1 => 0,
            Slot::V2 => 1,
            Slot::V3 => 2,
        }
    }

    /// All slots in order.
    pub const ALL: [Slot; 3] = [Slot::V1, Slot::V2, Slot::V3];
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.index() + 1)
    }
}

/// Role of an entry in a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    /// Left type entry.
    #[serde(rename = "P_L")]
    PL,
    /// Right type entry.
    #[serde(rename = "P_R")]
    PR,
    /// Triangle apex at the root.
    P,
    /// Triangle top at `root + (3n,3n)`.
    Q,
    /// Base polytope.
    #[serde(rename = "P_B")]
    PB,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::PL => "P_L",
            Role::PR => "P_R",
            Role::P => "P",
            Role::Q => "Q",
            Role::PB => "P_B",
        })
    }
}

/// Type requirement of a role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeReq {
    /// No requirement.
    None,
    /// Left type.
    Left,
    /// Right type.
    Right,
    /// Base type.
    Base,
}

impl TypeReq {
    /// Whether the flags meet the requirement.
    pub fn met_by(self, t: TypeFlags) -> bool {
        match self {
            TypeReq::None => true,
            TypeReq::Left => t.left,
            TypeReq::Right => t.right,
            TypeReq::Base => t.base,
        }
    }
}

/// One certificate: kind, residue class, slot, stated root and entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSpec {
    /// Residue class `(p, q)`.
    pub class: PairExpr,
    /// Cone-point slot.
    pub slot: Slot,
    /// Certificate kind.
    pub kind: Kind,
    /// Stated root.
    pub root: PairExpr,
    /// Entries by role.
    pub entries: BTreeMap<Role, ConstructionExpr>,
}

impl CertificateSpec {
    /// Short label such as `(0,d+2) v3`.
    pub fn label(&self) -> String {
        format!("{} {}", self.class, self.slot)
    }

    /// Offset from the root (as multiples of `n`) and type requirement of
    /// each role.
    pub fn role_layout(&self) -> Vec<(Role, (i64, i64), TypeReq)> {
        let has = |r: Role| self.entries.contains_key(&r);
        match self.kind {
            Kind::RL => vec![(Role::PR, (0, 0), TypeReq::Right), (Role::PL, (1, 2), TypeReq::Left)],
            Kind::LR => vec![(Role::PL, (0, 0), TypeReq::Left), (Role::PR, (2, 1), TypeReq::Right)],
            Kind::Tri => vec![
                (Role::P, (0, 0), TypeReq::None),
                (Role::PL, (1, 2), TypeReq::Left),
                (Role::PR, (2, 1), TypeReq::Right),
                (Role::Q, (3, 3), TypeReq::None),
            ],
            Kind::B if has(Role::PB) => vec![(Role::PB, (0, 0), TypeReq::Base)],
            Kind::B => vec![(Role::PL, (0, 0), TypeReq::Left), (Role::PR, (0, 0), TypeReq::Right)],
        }
    }

    /// The expression `*` stands for in the entry of `role`, if any.
    pub fn star_binding(&self, role: Role) -> Option<&ConstructionExpr> {
        let other = match (self.kind, role) {
            (Kind::RL | Kind::LR, Role::PL) => Role::PR,
            (Kind::RL | Kind::LR, Role::PR) => Role::PL,
            (Kind::Tri, Role::P) => return None,
            (Kind::Tri, _) => Role::P,
            _ => return None,
        };
        self.entries.get(&other)
    }

    /// Check the structural invariants: the role set matches the kind,
    /// `∅` only in the `P` slot of a triangle, and every `*` resolves to a
    /// concrete companion.
    pub fn validate(&self) -> Result<(), CertifyError> {
        let invalid = |reason: String| CertifyError::Invalid { cell: self.label(), reason };
        let roles: Vec<Role> = self.entries.keys().copied().collect();
        let mut want: Vec<Role> = self.role_layout().iter().map(|r| r.0).collect();
        want.sort();
        if roles != want {
            return Err(invalid(format!("roles {roles:?} do not match kind {:?}", self.kind)));
        }
        for (role, e) in &self.entries {
            let empty_ok = self.kind == Kind::Tri && *role == Role::P && *e == ConstructionExpr::Empty;
            if e.contains_empty() && !empty_ok {
                return Err(invalid(format!("∅ not allowed in {role}")));
            }
            if e.contains_star() {
                match self.star_binding(*role) {
                    Some(b) if !b.contains_star() && !b.contains_empty() => {}
                    _ => return Err(invalid(format!("'*' in {role} has no concrete companion"))),
                }
            }
        }
        Ok(())
    }
}

/// An alternative reading of a table cell: replacement entries plus an
/// explanation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reading {
    /// Why this reading is considered.
    pub note: String,
    /// Entries that replace the printed ones.
    pub entries: BTreeMap<Role, ConstructionExpr>,
}

/// A table cell: the certificate as printed plus alternative readings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCell {
    /// The printed certificate.
    #[serde(flatten)]
    pub cert: CertificateSpec,
    /// Alternative readings, tried in order when the printed one fails.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternates: Vec<Reading>,
}

impl TableCell {
    /// The certificate under alternative reading `i`.
    pub fn reading(&self, i: usize) -> CertificateSpec {
        let mut c = self.cert.clone();
        for (r, e) in &self.alternates[i].entries {
            c.entries.insert(*r, e.clone());
        }
        c
    }
}

/// One certificate table (one group or parametric family).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateTable {
    /// Table key: `C1`, `C`, `C2`, `D`, `D2`, `T`, `O`, `I`, `G`, `G2`, `G1`.
    pub table: String,
    /// Human-readable scope.
    pub description: String,
    /// Data format version.
    pub version: u32,
    /// Cells in table order.
    pub cells: Vec<TableCell>,
}

impl CertificateTable {
    /// Parse and validate a table from JSON.
    pub fn from_json(s: &str) -> Result<CertificateTable, CertifyError> {
        let t: CertificateTable = serde_json::from_str(s).map_err(|e| CertifyError::Table(e.to_string()))?;
        for c in &t.cells {
            c.cert.validate()?;
            for i in 0..c.alternates.len() {
                c.reading(i).validate()?;
            }
        }
        Ok(t)
    }

    /// Serialize to pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}

/// Keys of all tables.
pub const TABLE_KEYS: [&str; 11] = ["C1", "C", "C2", "D", "D2", "T", "O", "I", "G", "G2", "G1"];

fn builtin_json(key: &str) -> Option<&'static str> {
    Some(match key {
        "C1" => include_str!("../data/tables/C1.json"),
        "C" => include_str!("../data/tables/C.json"),
        "C2" => include_str!("../data/tables/C2.json"),
        "D" => include_str!("../data/tables/D.json"),
        "D2" => include_str!("../data/tables/D2.json"),
        "T" => include_str!("../data/tables/T.json"),
        "O" => include_str!("../data/tables/O.json"),
        "I" => include_str!("../data/tables/I.json"),
        "G" => include_str!("../data/tables/G.json"),
        "G2" => include_str!("../data/tables/G2.json"),
        "G1" => include_str!("../data/tables/G1.json"),
        _ => return None,
    })
}

/// The table key responsible for a group.
pub fn table_key(spec: GroupSpec) -> Option<&'static str> {
    Some(match (spec.family, spec.param) {
        (Family::C, 1) => "C1",
        (Family::C, 2) => "C2",
        (Family::C, _) => "C",
        (Family::D, 2) => "D2",
        (Family::D, _) => "D",
        (Family::T, _) => "T",
        (Family::O, _) => "O",
        (Family::I, _) => "I",
        (Family::G, 1) => "G1",
        (Family::G, 2) => "G2",
        (Family::G, _) => "G",
    })
}

/// A set of certificate tables by key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSet {
    tables: BTreeMap<String, CertificateTable>,
}

impl TableSet {
    /// The tables shipped with the crate.
    pub fn builtin() -> TableSet {
        let tables = TABLE_KEYS
            .iter()
            .map(|k| {
                let t = CertificateTable::from_json(builtin_json(k).expect("builtin table"))
                    .unwrap_or_else(|e| panic!("builtin table {k} is invalid: {e}"));
                (k.to_string(), t)
            })
            .collect();
        TableSet { tables }
    }

    /// Load `<KEY>.json` files from a directory; keys without a file fall
    /// back to the shipped tables.
    pub fn from_dir(dir: &Path) -> Result<TableSet, CertifyError> {
        if !dir.is_dir() {
            return Err(CertifyError::Table(format!("{} is not a directory", dir.display())));
        }
        let mut set = TableSet::builtin();
        for k in TABLE_KEYS {
            let path = dir.join(format!("{k}.json"));
            if path.exists() {
                let s = std::fs::read_to_string(&path).map_err(|e| CertifyError::Table(format!("{}: {e}", path.display())))?;
                let t = CertificateTable::from_json(&s)
                    .map_err(|e| CertifyError::Table(format!("{}: {e}", path.display())))?;
                set.tables.insert(k.to_string(), t);
            }
        }
        Ok(set)
    }

    /// Table by key.
    pub fn get(&self, key: &str) -> Option<&CertificateTable> {
        self.tables.get(key)
    }

    /// Table responsible for a group.
    pub fn for_spec(&self, spec: GroupSpec) -> Option<&CertificateTable> {
        table_key(spec).and_then(|k| self.get(k))
    }

    /// All tables in key order.
    pub fn iter(&self) -> impl Iterator<Item = &CertificateTable> {
        self.tables.values()
    }
}

// ---------------------------------------------------------------------------
// Evaluation.

/// Context of an evaluation: the cell label (for errors), the parameter
/// bindings and the companion expression `*` stands for.
#[derive(Debug, Clone)]
pub struct CellContext {
    /// Label used in error messages.
    pub label: String,
    /// Parameter values.
    pub bindings: Bindings,
    /// Companion expression for `*`.
    pub star: Option<ConstructionExpr>,
}

impl CellContext {
    /// A context for a group with no companion.
    pub fn new(spec: GroupSpec) -> CellContext {
        CellContext { label: spec.to_string(), bindings: Bindings::for_spec(spec), star: None }
    }

    /// Set the companion.
    pub fn with_star(mut self, star: ConstructionExpr) -> CellContext {
        self.star = Some(star);
        self
    }
}

/// Evaluates expressions, memoizing sub-results by their instantiated text.
pub struct Evaluator<'g> {
    group: &'g Group,
    memo: HashMap<String, Arc<Polytope>>,
}

impl<'g> Evaluator<'g> {
    /// A fresh evaluator for a group.
    pub fn new(group: &'g Group) -> Evaluator<'g> {
        Evaluator { group, memo: HashMap::new() }
    }

    /// Evaluate an expression in a cell context.
    pub fn eval(&mut self, expr: &ConstructionExpr, ctx: &CellContext) -> Result<Arc<Polytope>, EvalError> {
        let e = match &ctx.star {
            Some(s) if expr.contains_star() => expr.substitute_star(s),
            _ => expr.clone(),
        };
        self.eval_inner(&e.instantiate(ctx.bindings), &ctx.label)
    }

    fn eval_inner(&mut self, e: &ConstructionExpr, cell: &str) -> Result<Arc<Polytope>, EvalError> {
        let text = e.to_string();
        if let Some(p) = self.memo.get(&text) {
            return Ok(p.clone());
        }
        let construction = |reason: String| EvalError::Construction { cell: cell.to_string(), expr: text.clone(), reason };
        let param = |p: &ParamExpr| -> Result<usize, EvalError> {
            usize::try_from(p.c)
                .ok()
                .filter(|&v| v > 0 && p.is_constant())
                .ok_or_else(|| EvalError::Parameter { cell: cell.to_string(), expr: text.clone() })
        };
        let out = match e {
            ConstructionExpr::Star => return Err(EvalError::UnboundStar { cell: cell.to_string() }),
            ConstructionExpr::Empty => return Err(EvalError::Empty { cell: cell.to_string() }),
            ConstructionExpr::Catalog { name, params } => {
                let key = CatalogKey::new(name, &params.iter().map(|p| p.c).collect::<Vec<_>>());
                catalog::build(&key, self.group).map_err(|err| construction(err.to_string()))?
            }
            ConstructionExpr::Dual(a) => {
                let p = self.eval_inner(a, cell)?;
                Arc::new(polar_dual(&p))
            }
            ConstructionExpr::Op { tag, k, m, power, arg } => {
                let op = OpKind::new(*tag, param(k)?, param(m)?);
                let mut p = self.eval_inner(arg, cell)?;
                for _ in 0..*power {
                    p = Arc::new(apply(&op, &p, self.group).map_err(|err| construction(err.to_string()))?);
                }
                p
            }
        };
        let out = Arc::new((*out).clone().with_provenance(text.clone()));
        self.memo.insert(text, out.clone());
        Ok(out)
    }
}

/// Evaluate a construction expression for a group in a cell context.
pub fn evaluate(expr: &ConstructionExpr, g: &Group, ctx: &CellContext) -> Result<Arc<Polytope>, EvalError> {
    Evaluator::new(g).eval(expr, ctx)
}

// ---------------------------------------------------------------------------
// Verification.

/// Outcome of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    /// Verified as printed.
    Pass,
    /// Verified under a recorded alternative reading.
    PassWithReading,
    /// No reading verifies.
    Fail,
}

/// Result of checking one entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryCheck {
    /// Role.
    pub role: Role,
    /// Instantiated expression (with `*` resolved).
    pub expr: String,
    /// Required f-vector.
    pub target: FVector,
    /// Required type.
    pub required: TypeReq,
    /// Actual f-vector, when the construction succeeded.
    pub actual: Option<FVector>,
    /// Actual type flags.
    pub flags: Option<TypeFlags>,
    /// Whether the polytope is symmetric under the group.
    pub symmetric: Option<bool>,
    /// True for the `∅` placeholder, which is not checked.
    pub skipped: bool,
    /// Construction error, if any.
    pub error: Option<String>,
    /// Whether every check passed.
    pub pass: bool,
}

impl EntryCheck {
    /// One-line description of the failure (empty when passing).
    pub fn failure(&self) -> String {
        if self.pass {
            return String::new();
        }
        if let Some(e) = &self.error {
            return format!("{}: {}", self.role, e);
        }
        let mut why = Vec::new();
        if self.actual != Some(self.target) {
            why.push(format!("f = {} instead of {}", self.actual.map_or("?".into(), |f| f.to_string()), self.target));
        }
        if self.symmetric == Some(false) {
            why.push("not symmetric".into());
        }
        if let Some(t) = self.flags {
            if !self.required.met_by(t) {
                why.push(format!("type {t:?} does not meet {:?}", self.required));
            }
        }
        format!("{} = {}: {}", self.role, self.expr, why.join(", "))
    }
}

/// Verification result of one certificate under one reading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    /// Stated root, evaluated.
    pub root: FVector,
    /// Root computed from the cone points of the class.
    pub expected_root: Option<FVector>,
    /// Per-entry checks in role-layout order.
    pub entries: Vec<EntryCheck>,
    /// Whether the root and all entries pass.
    pub pass: bool,
}

/// Report for one table cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellReport {
    /// Group.
    pub group: String,
    /// Table key.
    pub table: String,
    /// Residue class `(p, q)`.
    pub class: (u64, u64),
    /// Slot.
    pub slot: Slot,
    /// Kind.
    pub kind: Kind,
    /// Outcome.
    pub status: CellStatus,
    /// The reading that verified, if not the printed one.
    pub reading: Option<String>,
    /// The printed certificate's check.
    pub printed: CertificateCheck,
    /// The verifying alternative's check, if any.
    pub alternate: Option<CertificateCheck>,
    /// Entries of the `∅` placeholder, recorded as exclusions.
    pub skipped: Vec<Role>,
}

impl CellReport {
    /// Label such as `T (0,2) v3`.
    pub fn label(&self) -> String {
        format!("{} ({},{}) {}", self.group, self.class.0, self.class.1, self.slot)
    }
}

fn to_fvector(p: (i64, i64)) -> Option<FVector> {
    (p.0 >= 0 && p.1 >= 0).then(|| FVector::new(p.0 as u64, p.1 as u64))
}

fn check_certificate(cert: &CertificateSpec, spec: GroupSpec, g: &Group, ev: &mut Evaluator) -> CertificateCheck {
    let b = Bindings::for_spec(spec);
    let (rf0, rf2) = cert.root.eval(b);
    let root = to_fvector((rf0, rf2)).unwrap_or(FVector::new(0, 0));
    let (p, q) = cert.class.eval(b);
    let c = clause(spec);
    let expected_root = c
        .classes
        .iter()
        .find(|r| r.p as i64 == p && r.q as i64 == q)
        .map(|r| class_roots(r.p, r.q, c.modulus, r.bound)[cert.slot.index()]);
    let n = b.n;
    let label = format!("{spec} {}", cert.label());
    let mut entries = Vec::new();
    for (role, (x, y), required) in cert.role_layout() {
        let expr = &cert.entries[&role];
        let target = to_fvector((rf0 + x * n, rf2 + y * n)).unwrap_or(FVector::new(0, 0));
        let mut check = EntryCheck {
            role,
            expr: expr.instantiate(b).to_string(),
            target,
            required,
            actual: None,
            flags: None,
            symmetric: None,
            skipped: false,
            error: None,
            pass: false,
        };
        if *expr == ConstructionExpr::Empty {
            check.skipped = true;
            check.pass = true;
            entries.push(check);
            continue;
        }
        let mut ctx = CellContext { label: label.clone(), bindings: b, star: None };
        if let Some(s) = cert.star_binding(role) {
            ctx.star = Some(s.clone());
            check.expr = expr.substitute_star(s).instantiate(b).to_string();
        }
        match ev.eval(expr, &ctx) {
            Err(e) => check.error = Some(e.to_string()),
            Ok(poly) => {
                check.actual = Some(poly.f_vector());
                let sym = is_symmetric(&poly, g).unwrap_or(false);
                check.symmetric = Some(sym);
                if sym {
                    match classify_type(&poly, g) {
                        Ok(t) => check.flags = Some(t),
                        Err(e) => check.error = Some(e.to_string()),
                    }
                }
                check.pass = check.actual == Some(target)
                    && sym
                    && check.flags.is_some_and(|t| required.met_by(t));
            }
        }
        entries.push(check);
    }
    let pass = expected_root == Some(root) && entries.iter().all(|e| e.pass);
    CertificateCheck { root, expected_root, entries, pass }
}

/// Verify a single certificate (one reading) for a group.
pub fn verify_certificate(cert: &CertificateSpec, spec: GroupSpec) -> Result<CertificateCheck, CertifyError> {
    cert.validate()?;
    let g = standard_group(spec)?;
    let mut ev = Evaluator::new(&g);
    Ok(check_certificate(cert, spec, &g, &mut ev))
}

fn verify_cell_with(cell: &TableCell, table: &str, spec: GroupSpec, g: &Group) -> CellReport {
    let mut ev = Evaluator::new(g);
    let b = Bindings::for_spec(spec);
    let (p, q) = cell.cert.class.eval(b);
    let printed = check_certificate(&cell.cert, spec, g, &mut ev);
    let skipped = printed.entries.iter().filter(|e| e.skipped).map(|e| e.role).collect();
    let mut report = CellReport {
        group: spec.to_string(),
        table: table.to_string(),
        class: (p.max(0) as u64, q.max(0) as u64),
        slot: cell.cert.slot,
        kind: cell.cert.kind,
        status: if printed.pass { CellStatus::Pass } else { CellStatus::Fail },
        reading: None,
        printed,
        alternate: None,
        skipped,
    };
    if report.status == CellStatus::Pass {
        return report;
    }
    for (i, alt) in cell.alternates.iter().enumerate() {
        let check = check_certificate(&cell.reading(i), spec, g, &mut ev);
        if check.pass {
            report.status = CellStatus::PassWithReading;
            report.reading = Some(alt.note.clone());
            report.alternate = Some(check);
            break;
        }
    }
    report
}

/// Verify one table cell (printed reading first, then alternates).
pub fn verify_cell(cell: &TableCell, table: &str, spec: GroupSpec) -> Result<CellReport, CertifyError> {
    let g = standard_group(spec)?;
    Ok(verify_cell_with(cell, table, spec, &g))
}

/// Verification report of one group's table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    /// Group.
    pub group: String,
    /// Table key.
    pub table: String,
    /// Cell reports in table order.
    pub cells: Vec<CellReport>,
    /// Cells verified as printed.
    pub passed: usize,
    /// Cells verified under an alternative reading.
    pub passed_with_reading: usize,
    /// Cells that failed.
    pub failed: usize,
}

impl TableReport {
    fn new(spec: GroupSpec, table: &str, cells: Vec<CellReport>) -> TableReport {
        let count = |s: CellStatus| cells.iter().filter(|c| c.status == s).count();
        TableReport {
            group: spec.to_string(),
            table: table.to_string(),
            passed: count(CellStatus::Pass),
            passed_with_reading: count(CellStatus::PassWithReading),
            failed: count(CellStatus::Fail),
            cells,
        }
    }

    /// Whether every cell verified (as printed or under a reading).
    pub fn all_verified(&self) -> bool {
        self.failed == 0
    }
}

/// Verify every cell of the table responsible for `spec`.
pub fn verify_group_tables(spec: GroupSpec, tables: &TableSet) -> Result<TableReport, CertifyError> {
    Ok(verify_specs(&[spec], tables, None)?.remove(0))
}

/// Verify the tables of many groups, running cells concurrently on a pool
/// of `jobs` workers (all cores when `None`). Reports keep input order.
pub fn verify_specs(specs: &[GroupSpec], tables: &TableSet, jobs: Option<usize>) -> Result<Vec<TableReport>, CertifyError> {
    let mut work = Vec::new();
    let mut groups = Vec::new();
    for &spec in specs {
        let table = tables.for_spec(spec).ok_or_else(|| CertifyError::NoTable(spec.to_string()))?;
        let g = Arc::new(standard_group(spec)?);
        for (i, _) in table.cells.iter().enumerate() {
            work.push((groups.len(), i));
        }
        groups.push((spec, table, g));
    }
    let run = || -> Vec<CellReport> {
        work.par_iter()
            .map(|&(gi, ci)| {
                let (spec, table, g) = &groups[gi];
                verify_cell_with(&table.cells[ci], &table.table, *spec, g)
            })
            .collect()
    };
    let cells = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| CertifyError::Table(e.to_string()))?
            .install(run),
        None => run(),
    };
    let mut it = cells.into_iter();
    Ok(groups
        .iter()
        .map(|(spec, table, _)| {
            let mine: Vec<CellReport> = it.by_ref().take(table.cells.len()).collect();
            TableReport::new(*spec, &table.table, mine)
        })
        .collect())
}

/// The default sweep: `C_1`, `C_2`, `C_3..C_max`, `D_2`, `D_3..D_max`, `T`, `O`,
/// `I`, `G_1`, `G_2`, `G_3..G_max`.
pub fn default_specs(max_param: u64) -> Vec<GroupSpec> {
    let mut v = vec![GroupSpec::c(1), GroupSpec::c(2)];
    v.extend((3..=max_param).map(GroupSpec::c));
    v.push(GroupSpec::d(2));
    v.extend((3..=max_param).map(GroupSpec::d));
    v.extend([GroupSpec::t(), GroupSpec::o(), GroupSpec::i(), GroupSpec::g(1), GroupSpec::g(2)]);
    v.extend((3..=max_param).map(GroupSpec::g));
    v
}

/// One errata entry: a cell that does not verify as printed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrataEntry {
    /// Group.
    pub group: String,
    /// Table key.
    pub table: String,
    /// Residue class.
    pub class: (u64, u64),
    /// Slot.
    pub slot: Slot,
    /// Outcome.
    pub status: CellStatus,
    /// Failures of the printed certificate.
    pub printed_failures: Vec<String>,
    /// Root mismatch, if any.
    pub root_mismatch: Option<String>,
    /// The reading that verified instead, if any.
    pub reading: Option<String>,
    /// The replacement entries of that reading.
    pub replacement: Vec<String>,
}

/// Machine-readable list of every cell that does not verify as printed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrataReport {
    /// Entries in sweep order.
    pub entries: Vec<ErrataEntry>,
}

impl ErrataReport {
    /// Collect the errata of a sweep.
    pub fn from_reports(reports: &[TableReport]) -> ErrataReport {
        let mut entries = Vec::new();
        for r in reports {
            for c in &r.cells {
                if c.status == CellStatus::Pass {
                    continue;
                }
                let root_mismatch = (c.printed.expected_root != Some(c.printed.root)).then(|| {
                    format!(
                        "stated root {} but cone point {}",
                        c.printed.root,
                        c.printed.expected_root.map_or("(none)".into(), |f| f.to_string())
                    )
                });
                let replacement = c
                    .alternate
                    .iter()
                    .flat_map(|a| a.entries.iter().zip(&c.printed.entries))
                    .filter(|(a, p)| a.expr != p.expr)
                    .map(|(a, _)| format!("{} = {}", a.role, a.expr))
                    .collect();
                entries.push(ErrataEntry {
                    group: c.group.clone(),
                    table: c.table.clone(),
                    class: c.class,
                    slot: c.slot,
                    status: c.status,
                    printed_failures: c.printed.entries.iter().filter(|e| !e.pass).map(|e| e.failure()).collect(),
                    root_mismatch,
                    reading: c.reading.clone(),
                    replacement,
                });
            }
        }
        ErrataReport { entries }
    }

    /// Whether any cell failed under every reading.
    pub fn has_failures(&self) -> bool {
        self.entries.iter().any(|e| e.status == CellStatus::Fail)
    }

    /// Serialize to pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("errata serialize")
    }
}
