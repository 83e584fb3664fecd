//! Explicit witnesses: for an admissible f-vector, build a `G`-symmetric
//! polytope with exactly that f-vector.
//!
//! The construction follows the cone argument. The f-vector is written as
//! `root + a·(n,2n) + b·(2n,n)` for a certificate root; an entry of the
//! certificate is materialized, and the remaining steps are careful
//! stackings `CS(3,n)` (each adding `(n,2n)` on a triangle orbit with
//! trivial stabilizer) and careful cuttings `CC(3,n)` (each adding `(2n,n)`
//! on a simple vertex orbit with trivial stabilizer). A left type polytope
//! accepts stackings, a right type polytope accepts cuttings, and one
//! stacking (cutting) turns a left (right) type polytope into a base
//! polytope, which accepts both. Vectors matched only through the diamond
//! are synthesized for the swapped vector and dualized.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::certify::{
    verify_cell, Bindings, CellContext, CellStatus, CertificateSpec, CertifyError, ConstructionExpr, Evaluator, Kind,
    Role, Slot, TableSet,
};
use crate::classify::{class_roots, clause, decompose, in_FG, Decision};
use crate::group::{standard_group, Group, GroupSpec};
use crate::hull::{FVector, Polytope};
use crate::ops::{apply, OpKind, OpTag};
use crate::polytope::{is_symmetric, polar_dual};

/// Errors from synthesis.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    /// The f-vector is not in `F(G)`; nothing is constructed.
    #[error("{f} is not the f-vector of a {group}-symmetric polytope ({})", .decision.clause)]
    NotAMember {
        /// Group.
        group: String,
        /// Requested f-vector.
        f: FVector,
        /// The classifier's decision.
        decision: Decision,
    },
    /// No certificate cell covers the vector.
    #[error("no certificate covers {0}")]
    NoCertificate(String),
    /// The certificate cell does not verify under any reading.
    #[error("certificate cell {0} does not verify")]
    UnverifiedCell(String),
    /// A construction step failed.
    #[error("construction failed: {0}")]
    Construction(String),
    /// The result does not satisfy the postcondition (a bug guard).
    #[error("internal verification failed: {0}")]
    InternalVerificationFailed(String),
    /// Table or group error.
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

/// One repeated operation in a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Operation, e.g. `CS(3,12)`.
    pub op: String,
    /// Number of applications.
    pub count: u64,
}

/// Everything needed to rebuild a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    /// Group.
    pub group: String,
    /// Requested f-vector.
    pub f: FVector,
    /// Whether the witness is the dual of a witness for `swap(f)`.
    pub dual: bool,
    /// Table key of the certificate.
    pub table: String,
    /// Residue class of the (possibly swapped) vector.
    pub class: (u64, u64),
    /// Cone-point slot.
    pub slot: Slot,
    /// Certificate kind.
    pub kind: Kind,
    /// Root of the certificate.
    pub root: FVector,
    /// Number of `(n,2n)` steps.
    pub a: u64,
    /// Number of `(2n,n)` steps.
    pub b: u64,
    /// Alternative reading of the cell, if the printed one does not verify.
    pub reading: Option<String>,
    /// Certificate entry the construction starts from.
    pub entry: Role,
    /// That entry's expression (parameters and `*` resolved).
    pub expr: String,
    /// Operations applied to the entry, in order.
    pub steps: Vec<TraceStep>,
}

impl Trace {
    /// Serialize to pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// A verified certificate with its entries materialized.
struct Materialized {
    table: String,
    cert: CertificateSpec,
    reading: Option<String>,
    exprs: BTreeMap<Role, ConstructionExpr>,
    polys: BTreeMap<Role, Arc<Polytope>>,
}

type CellKey = (GroupSpec, usize);

/// Synthesizer over a set of certificate tables, caching groups and
/// materialized certificate cells.
pub struct Synthesizer {
    tables: TableSet,
    groups: Mutex<HashMap<GroupSpec, Arc<Group>>>,
    cells: Mutex<HashMap<CellKey, Arc<Materialized>>>,
}

impl Synthesizer {
    /// A synthesizer using the given tables.
    pub fn new(tables: TableSet) -> Synthesizer {
        Synthesizer { tables, groups: Mutex::new(HashMap::new()), cells: Mutex::new(HashMap::new()) }
    }

    /// The tables in use.
    pub fn tables(&self) -> &TableSet {
        &self.tables
    }

    fn group(&self, spec: GroupSpec) -> Result<Arc<Group>, SynthError> {
        if let Some(g) = self.groups.lock().expect("group cache poisoned").get(&spec) {
            return Ok(g.clone());
        }
        let g = Arc::new(standard_group(spec).map_err(CertifyError::from)?);
        self.groups.lock().expect("group cache poisoned").insert(spec, g.clone());
        Ok(g)
    }

    fn materialize(&self, spec: GroupSpec, index: usize) -> Result<Arc<Materialized>, SynthError> {
        if let Some(m) = self.cells.lock().expect("cell cache poisoned").get(&(spec, index)) {
            return Ok(m.clone());
        }
        let table = self.tables.for_spec(spec).ok_or_else(|| CertifyError::NoTable(spec.to_string()))?;
        let cell = &table.cells[index];
        let report = verify_cell(cell, &table.table, spec)?;
        let (cert, reading) = match report.status {
            CellStatus::Pass => (cell.cert.clone(), None),
            CellStatus::PassWithReading => {
                let i = cell
                    .alternates
                    .iter()
                    .position(|a| Some(&a.note) == report.reading.as_ref())
                    .expect("verified reading is one of the alternates");
                (cell.reading(i), report.reading.clone())
            }
            CellStatus::Fail => return Err(SynthError::UnverifiedCell(report.label())),
        };
        let g = self.group(spec)?;
        let b = Bindings::for_spec(spec);
        let mut ev = Evaluator::new(&g);
        let mut exprs = BTreeMap::new();
        let mut polys = BTreeMap::new();
        for (role, e) in &cert.entries {
            if *e == ConstructionExpr::Empty {
                continue;
            }
            let resolved = match cert.star_binding(*role) {
                Some(s) => e.substitute_star(s),
                None => e.clone(),
            }
            .instantiate(b);
            let ctx = CellContext { label: format!("{spec} {}", cert.label()), bindings: b, star: None };
            let p = ev.eval(&resolved, &ctx).map_err(|e| SynthError::Construction(e.to_string()))?;
            exprs.insert(*role, resolved);
            polys.insert(*role, p);
        }
        let m = Arc::new(Materialized { table: table.table.clone(), cert, reading, exprs, polys });
        self.cells.lock().expect("cell cache poisoned").insert((spec, index), m.clone());
        Ok(m)
    }

    /// Build a `G`-symmetric polytope with f-vector `f`, or refuse when
    /// `f ∉ F(G)`. The result is checked (exact f-vector and symmetry)
    /// before it is returned.
    pub fn synthesize(&self, spec: GroupSpec, f: FVector) -> Result<(Polytope, Trace), SynthError> {
        let decision = in_FG(spec, f);
        if !decision.member {
            return Err(SynthError::NotAMember { group: spec.to_string(), f, decision });
        }
        let target = if decision.via_swap { f.swap() } else { f };
        let (index, class, slot, root, a, b) = self.locate(spec, target)?;
        let m = self.materialize(spec, index)?;
        let n = clause(spec).modulus as usize;
        let g = self.group(spec)?;
        let (entry, steps) = plan(&m.cert, a, b, n);
        let mut trace = Trace {
            group: spec.to_string(),
            f,
            dual: decision.via_swap,
            table: m.table.clone(),
            class,
            slot,
            kind: m.cert.kind,
            root,
            a,
            b,
            reading: m.reading.clone(),
            entry,
            expr: m.exprs[&entry].to_string(),
            steps: Vec::new(),
        };
        let mut p = (*m.polys[&entry]).clone();
        for (op, count) in steps {
            if count == 0 {
                continue;
            }
            for _ in 0..count {
                p = apply(&op, &p, &g).map_err(|e| SynthError::Construction(format!("{op} on {}: {e}", p.f_vector())))?;
            }
            trace.steps.push(TraceStep { op: op.to_string(), count });
        }
        if trace.dual {
            p = polar_dual(&p);
        }
        let p = p.with_provenance(provenance(&trace));
        postcondition(&p, &g, f)?;
        Ok((p, trace))
    }

    /// Find the lexicographically smallest (class, slot) whose root
    /// decomposes `f` with nonnegative coefficients.
    #[allow(clippy::type_complexity)]
    fn locate(&self, spec: GroupSpec, f: FVector) -> Result<(usize, (u64, u64), Slot, FVector, u64, u64), SynthError> {
        let c = clause(spec);
        let table = self.tables.for_spec(spec).ok_or_else(|| CertifyError::NoTable(spec.to_string()))?;
        let bind = Bindings::for_spec(spec);
        let mut rules = c.classes.clone();
        rules.sort_by_key(|r| (r.p, r.q));
        for r in rules {
            let roots = class_roots(r.p, r.q, c.modulus, r.bound);
            for slot in Slot::ALL {
                let root = roots[slot.index()];
                if let Some((a, b)) = decompose(f, root, c.modulus) {
                    let index = table
                        .cells
                        .iter()
                        .position(|cell| {
                            cell.cert.class.eval(bind) == (r.p as i64, r.q as i64) && cell.cert.slot == slot
                        })
                        .ok_or_else(|| SynthError::NoCertificate(format!("{spec} ({},{}) {slot}", r.p, r.q)))?;
                    return Ok((index, (r.p, r.q), slot, root, a, b));
                }
            }
        }
        Err(SynthError::NoCertificate(format!("{spec} {f}")))
    }

    /// Rebuild the witness described by a trace.
    pub fn replay(&self, trace: &Trace) -> Result<Polytope, SynthError> {
        let spec: GroupSpec = trace
            .group
            .parse()
            .map_err(|e| SynthError::Construction(format!("bad group in trace: {e:?}")))?;
        let g = self.group(spec)?;
        let expr: ConstructionExpr = trace.expr.parse()?;
        let ctx = CellContext::new(spec);
        let mut p = (*Evaluator::new(&g).eval(&expr, &ctx).map_err(|e| SynthError::Construction(e.to_string()))?).clone();
        for s in &trace.steps {
            let op = parse_op(&s.op)?;
            for _ in 0..s.count {
                p = apply(&op, &p, &g).map_err(|e| SynthError::Construction(e.to_string()))?;
            }
        }
        if trace.dual {
            p = polar_dual(&p);
        }
        let p = p.with_provenance(provenance(trace));
        postcondition(&p, &g, trace.f)?;
        Ok(p)
    }
}

fn provenance(t: &Trace) -> String {
    let mut s = t.expr.clone();
    for step in &t.steps {
        s = if step.count == 1 { format!("{}({s})", step.op) } else { format!("{}^{}({s})", step.op, step.count) };
    }
    if t.dual {
        s = format!("dual({s})");
    }
    s
}

fn parse_op(s: &str) -> Result<OpKind, SynthError> {
    let bad = || SynthError::Construction(format!("bad operation {s:?} in trace"));
    let (name, rest) = s.split_once('(').ok_or_else(bad)?;
    let (k, m) = rest.strip_suffix(')').and_then(|r| r.split_once(',')).ok_or_else(bad)?;
    let tag: OpTag = name.parse().map_err(|_| bad())?;
    Ok(OpKind::new(tag, k.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?))
}

fn postcondition(p: &Polytope, g: &Group, f: FVector) -> Result<(), SynthError> {
    if p.f_vector() != f {
        return Err(SynthError::InternalVerificationFailed(format!("built {} instead of {f}", p.f_vector())));
    }
    if !is_symmetric(p, g).unwrap_or(false) {
        return Err(SynthError::InternalVerificationFailed(format!("{f} witness is not {}-symmetric", g.spec())));
    }
    Ok(())
}

/// Which entry to start from and which stackings/cuttings to apply to reach
/// `root + a(n,2n) + b(2n,n)`.
fn plan(cert: &CertificateSpec, a: u64, b: u64, n: usize) -> (Role, Vec<(OpKind, u64)>) {
    let cs = OpKind::new(OpTag::CS, 3, n);
    let cc = OpKind::new(OpTag::CC, 3, n);
    let pair = cert.entries.contains_key(&Role::PL);
    match cert.kind {
        Kind::B if !pair => (Role::PB, vec![(cs, a), (cc, b)]),
        Kind::B => match (a, b) {
            (_, 0) => (Role::PL, vec![(cs, a)]),
            (0, _) => (Role::PR, vec![(cc, b)]),
            _ => (Role::PL, vec![(cs, a), (cc, b)]),
        },
        Kind::RL => match (a, b) {
            (0, 0) => (Role::PR, vec![]),
            (_, 0) => (Role::PL, vec![(cs, a - 1)]),
            _ => (Role::PR, vec![(cc, 1), (cs, a), (cc, b - 1)]),
        },
        Kind::LR => match (a, b) {
            (0, 0) => (Role::PL, vec![]),
            (0, _) => (Role::PR, vec![(cc, b - 1)]),
            _ => (Role::PL, vec![(cs, a), (cc, b)]),
        },
        Kind::Tri => match (a, b) {
            (0, 0) => (Role::P, vec![]),
            (1, 1) => (Role::Q, vec![]),
            (_, 0) => (Role::PL, vec![(cs, a - 1)]),
            (0, _) => (Role::PR, vec![(cc, b - 1)]),
            (1, _) => (Role::PR, vec![(cc, 1), (cs, 1), (cc, b - 2)]),
            _ => (Role::PL, vec![(cs, a - 1), (cc, b)]),
        },
    }
}

fn default_synthesizer() -> &'static Synthesizer {
    static S: OnceLock<Synthesizer> = OnceLock::new();
    S.get_or_init(|| Synthesizer::new(TableSet::builtin()))
}

/// [`Synthesizer::synthesize`] with the shipped tables.
pub fn synthesize(spec: GroupSpec, f: FVector) -> Result<(Polytope, Trace), SynthError> {
    default_synthesizer().synthesize(spec, f)
}

/// [`Synthesizer::replay`] with the shipped tables.
pub fn replay(trace: &Trace) -> Result<Polytope, SynthError> {
    default_synthesizer().replay(trace)
}

/// All members `f ∈ F(G)` with `max(f0, f2) ≤ bound`, sorted.
pub fn enumerate_members(spec: GroupSpec, bound: u64) -> Vec<FVector> {
    let mut out = Vec::new();
    for f0 in 4..=bound {
        for f2 in 4..=bound {
            let f = FVector::new(f0, f2);
            if in_FG(spec, f).member {
                out.push(f);
            }
        }
    }
    out
}
