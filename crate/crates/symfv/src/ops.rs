//! Symmetry-preserving operations on `G`-symmetric polytopes.
//!
//! Every facet operation builds a small configuration of new points over a
//! representative facet `F` (invariant under the stabilizer `H` of `F`),
//! takes its orbit under `G`, and re-hulls. The new points are placed at
//! `c + s(x − c) + δa` where `c` is the vertex centroid of `F`, `a` its
//! outward Newell normal, `s` a shrink factor and `δ` a lift. The
//! parameters are guessed from shrinking sequences and the result is
//! accepted only when its exact f-vector change, symmetry and type flags
//! match the operation's contract.
//!
//! Vertex operations (careful cutting and the dual prism) are realized
//! directly by cutting the vertex with a plane orthogonal to the sum of the
//! incident facet normals; the dual twisted prism is computed literally as
//! `dual ∘ TP ∘ dual`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::group::Group;
use crate::hull::{convex_hull_in, FVector, HullError, Polytope};
use crate::linalg::{cross, dot, Vec3};
use crate::polytope::{barycenter, classify_type_with, polar_dual, Action, PolytopeError, TypeFlags};
use crate::scalar::Scalar;

/// Maximum number of parameter guesses per operation.
pub const MAX_ATTEMPTS: usize = 64;

/// Errors raised by operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpError {
    /// No facet/vertex with the requested degree and orbit size.
    #[error("no matching target for {0}")]
    NoMatchingTarget(String),
    /// Every parameter guess failed verification.
    #[error("placement failed for {0} after {1} attempts")]
    PlacementFailed(String, usize),
    /// The facet stabilizer does not allow the operation.
    #[error("stabilizer incompatible with {0}: {1}")]
    StabilizerIncompatible(String, String),
    /// The explicit target does not match the operation.
    #[error("target does not match {0}: {1}")]
    TargetMismatch(String, String),
    /// Input polytope is not symmetric.
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    /// Hull failure.
    #[error(transparent)]
    Hull(#[from] HullError),
}

/// The nine operation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpTag {
    /// Careful stacking on a facet.
    CS,
    /// Careful cutting of a vertex.
    CC,
    /// Regular prism over a facet.
    RP,
    /// Dual of the regular prism, at a vertex.
    RPdual,
    /// Twisted prism over a facet.
    TP,
    /// Dual of the twisted prism, at a vertex.
    TPdual,
    /// Half prism over a `2k`-gon facet.
    HP,
    /// Twisted half prism over a `2k`-gon facet.
    THP,
    /// Big prism (`2k`-gon stacked on a `k`-gon).
    BP,
}

impl OpTag {
    /// All tags.
    pub const ALL: [OpTag; 9] =
        [OpTag::CS, OpTag::CC, OpTag::RP, OpTag::RPdual, OpTag::TP, OpTag::TPdual, OpTag::HP, OpTag::THP, OpTag::BP];

    /// Textual name used in construction expressions.
    pub fn name(self) -> &'static str {
        match self {
            OpTag::CS => "CS",
            OpTag::CC => "CC",
            OpTag::RP => "RP",
            OpTag::RPdual => "RPv",
            OpTag::TP => "TP",
            OpTag::TPdual => "TPv",
            OpTag::HP => "HP",
            OpTag::THP => "THP",
            OpTag::BP => "BP",
        }
    }

    /// Whether the operation acts on a vertex rather than a facet.
    pub fn is_vertex_op(self) -> bool {
        matches!(self, OpTag::CC | OpTag::RPdual | OpTag::TPdual)
    }
}

impl FromStr for OpTag {
    type Err = String;
    fn from_str(s: &str) -> Result<OpTag, String> {
        OpTag::ALL.iter().copied().find(|t| t.name() == s).ok_or_else(|| format!("unknown operation {s:?}"))
    }
}

/// An operation with its degree selector `k` and orbit size `m`.
///
/// `k` is the degree of the facet (or vertex) the operation acts on, except
/// for `HP`/`THP` where the facet has `k` vertices and `k` is even (the
/// usual `HP_{2k', m}` notation). For `BP`, `k` is the degree of the input
/// facet; the output facet has `2k` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OpKind {
    /// Operation family.
    pub tag: OpTag,
    /// Degree selector.
    pub k: usize,
    /// Orbit size `|G|/|H|`.
    pub m: usize,
}

impl OpKind {
    /// Build an operation descriptor.
    pub fn new(tag: OpTag, k: usize, m: usize) -> OpKind {
        OpKind { tag, k, m }
    }

    /// Exact change of `(f0, f2)`.
    pub fn delta(&self) -> (i64, i64) {
        let (k, m) = (self.k as i64, self.m as i64);
        let (a, b) = match self.tag {
            OpTag::CS => (1, k - 1),
            OpTag::CC => (k - 1, 1),
            OpTag::RP | OpTag::RPdual => (k, k),
            OpTag::TP => (k, 2 * k),
            OpTag::TPdual => (2 * k, k),
            OpTag::HP => (k / 2, k),
            OpTag::THP => (k / 2, 3 * k / 2),
            OpTag::BP => (2 * k, 2 * k),
        };
        (m * a, m * b)
    }

    /// Whether the output type satisfies the operation's contract given
    /// the input type.
    pub fn type_ok(&self, input: TypeFlags, output: TypeFlags) -> bool {
        match self.tag {
            OpTag::CS | OpTag::TP | OpTag::HP | OpTag::THP | OpTag::RPdual => {
                output.left && (self.tag != OpTag::RPdual || !input.right || output.base)
            }
            OpTag::CC | OpTag::TPdual => output.right,
            OpTag::RP => output.right && (!input.left || output.base),
            OpTag::BP => output.base,
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.tag.name(), self.k, self.m)
    }
}

/// Which facet or vertex to operate on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Target {
    /// The orbit (with matching degree and size) containing the facet or
    /// vertex with the lexicographically smallest vertex-index set.
    #[default]
    Auto,
    /// An explicit facet index.
    Facet(usize),
    /// An explicit vertex index.
    Vertex(usize),
}

fn pow2_inv(j: usize) -> Scalar {
    Scalar::frac(1, 1i64 << j.min(62))
}

/// The largest `2^{-j}` (with `j ≥ 1`) strictly below the positive bound.
fn dyadic_below(bound: &Scalar) -> usize {
    debug_assert!(bound.sign() > 0);
    let mut j = 1;
    while (bound - &pow2_inv(j)).sign() <= 0 {
        j += 1;
    }
    j
}

/// Guess sequence: pairs `(i, j)` enumerated along anti-diagonals.
fn guesses() -> impl Iterator<Item = (usize, usize)> {
    (0..).flat_map(|s| (0..=s).map(move |i| (i, s - i))).take(MAX_ATTEMPTS)
}

fn select_facet(p: &Polytope, act: &Action, op: &OpKind, target: Target) -> Result<usize, OpError> {
    let n = act.fperm.len();
    let matches = |f: usize| p.facet_degree(f) == op.k && act.facet_stabilizer(f) * op.m == n;
    match target {
        Target::Facet(f) => {
            if f < p.facets().len() && matches(f) {
                Ok(f)
            } else {
                Err(OpError::TargetMismatch(op.to_string(), format!("facet {f}")))
            }
        }
        Target::Vertex(_) => Err(OpError::TargetMismatch(op.to_string(), "vertex target for facet op".into())),
        Target::Auto => {
            let key = |f: usize| {
                let mut s = p.facets()[f].clone();
                s.sort_unstable();
                s
            };
            (0..p.facets().len())
                .filter(|&f| matches(f))
                .min_by_key(|&f| key(f))
                .ok_or_else(|| OpError::NoMatchingTarget(op.to_string()))
        }
    }
}

fn select_vertex(p: &Polytope, act: &Action, op: &OpKind, target: Target) -> Result<usize, OpError> {
    let n = act.vperm.len();
    let deg = p.vertex_degrees();
    let matches = |v: usize| deg[v] == op.k && act.vertex_stabilizer(v) * op.m == n;
    match target {
        Target::Vertex(v) => {
            if v < p.vertices().len() && matches(v) {
                Ok(v)
            } else {
                Err(OpError::TargetMismatch(op.to_string(), format!("vertex {v}")))
            }
        }
        Target::Facet(_) => Err(OpError::TargetMismatch(op.to_string(), "facet target for vertex op".into())),
        Target::Auto => (0..p.vertices().len())
            .find(|&v| matches(v))
            .ok_or_else(|| OpError::NoMatchingTarget(op.to_string())),
    }
}

/// Apply an operation, choosing the target orbit automatically.
pub fn apply(op: &OpKind, p: &Polytope, g: &Group) -> Result<Polytope, OpError> {
    apply_at(op, p, g, Target::Auto)
}

/// Apply an operation to an explicit target.
pub fn apply_at(op: &OpKind, p: &Polytope, g: &Group, target: Target) -> Result<Polytope, OpError> {
    if op.tag == OpTag::TPdual {
        let d = polar_dual(p);
        let t = match target {
            Target::Vertex(v) => {
                // Dual facet of vertex v: the facet whose index set is the
                // set of facets of P at v.
                let mut want = p.facets_at(v);
                want.sort_unstable();
                let f = (0..d.facets().len())
                    .find(|&f| {
                        let mut s = d.facets()[f].clone();
                        s.sort_unstable();
                        s == want
                    })
                    .expect("dual facet of a vertex");
                Target::Facet(f)
            }
            Target::Facet(_) => {
                return Err(OpError::TargetMismatch(op.to_string(), "facet target for vertex op".into()))
            }
            Target::Auto => Target::Auto,
        };
        let inner = apply_at(&OpKind::new(OpTag::TP, op.k, op.m), &d, g, t)?;
        let out = polar_dual(&inner);
        let act = Action::new(&out, g)?;
        let flags = classify_type_with(&out, &act);
        let expect = p.f_vector().offset(op.delta().0, op.delta().1);
        if Some(out.f_vector()) != expect || !flags.right {
            return Err(OpError::PlacementFailed(op.to_string(), 1));
        }
        return Ok(out.with_provenance(format!("{}({})", op, p.provenance)));
    }
    let act = Action::new(p, g)?;
    let in_flags = classify_type_with(p, &act);
    let expect = p
        .f_vector()
        .offset(op.delta().0, op.delta().1)
        .expect("operations only increase f-vectors");
    let out = if op.tag.is_vertex_op() {
        let v = select_vertex(p, &act, op, target)?;
        let orbit = act.vertex_orbit(v);
        let keep = (0..p.facets().len())
            .filter(|&f| !p.facets()[f].iter().any(|u| orbit.contains(u)))
            .map(|f| facet_key(p, f))
            .collect();
        let mut anchor: Vec<Vec3> = p
            .edges()
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .map(|u| p.vertices()[u].clone())
            .collect();
        anchor.push(p.vertices()[v].clone());
        vertex_op(&Ctx { p, g, op, in_flags, expect, keep, anchor }, &act, v)?
    } else {
        let f = select_facet(p, &act, op, target)?;
        let orbit = act.facet_orbit(f);
        let keep = (0..p.facets().len()).filter(|h| !orbit.contains(h)).map(|h| facet_key(p, h)).collect();
        let anchor = p.facet_points(f);
        facet_op(&Ctx { p, g, op, in_flags, expect, keep, anchor }, &act, f)?
    };
    Ok(out.with_provenance(format!("{}({})", op, p.provenance)))
}

struct Ctx<'a> {
    p: &'a Polytope,
    g: &'a Group,
    op: &'a OpKind,
    in_flags: TypeFlags,
    expect: FVector,
    /// Facets (as sorted vertex lists) that the operation must leave
    /// untouched; losing one means an unintended incidence.
    keep: Vec<Vec<Vec3>>,
    /// Old vertices the new points of the representative configuration may
    /// be adjacent to (the target facet, or the target vertex's
    /// neighbours).
    anchor: Vec<Vec3>,
}

/// Images of the new points under the group, each with the set of points it
/// may be adjacent to: its own configuration, the image of the anchor and,
/// for vertex operations (`center` = the target vertex), the configurations
/// of anchor vertices that are themselves replaced.
fn placed_points(g: &Group, pts: &[Vec3], anchor: &[Vec3], center: Option<&Vec3>) -> HashMap<Vec3, HashSet<Vec3>> {
    let mut config: HashMap<Vec3, HashSet<Vec3>> = HashMap::new();
    let mut images = Vec::with_capacity(g.order());
    for e in g.elements() {
        let img: Vec<Vec3> = pts.iter().map(|x| crate::linalg::matvec(e, x)).collect();
        let anc: Vec<Vec3> = anchor.iter().map(|x| crate::linalg::matvec(e, x)).collect();
        if let Some(c) = center {
            config.entry(crate::linalg::matvec(e, c)).or_default().extend(img.iter().cloned());
        }
        images.push((img, anc));
    }
    let mut out: HashMap<Vec3, HashSet<Vec3>> = HashMap::new();
    for (img, anc) in images {
        let mut allowed: HashSet<Vec3> = img.iter().cloned().chain(anc.iter().cloned()).collect();
        for u in &anc {
            if let Some(c) = config.get(u) {
                allowed.extend(c.iter().cloned());
            }
        }
        for y in img {
            out.entry(y).or_default().extend(allowed.iter().cloned());
        }
    }
    out
}

/// Whether every edge at a new point stays inside that point's own
/// configuration (no unintended incidences between different copies).
fn careful(q: &Polytope, placed: &HashMap<Vec3, HashSet<Vec3>>) -> bool {
    let v = q.vertices();
    q.edges().iter().all(|&(a, b)| {
        let ok = |x: &Vec3, y: &Vec3| placed.get(x).map_or(true, |allowed| allowed.contains(y));
        ok(&v[a], &v[b]) && ok(&v[b], &v[a])
    })
}

/// Hull `base ∪ placed` and check the operation's contract.
fn verify_candidate(ctx: &Ctx<'_>, base: &[Vec3], pts: &[Vec3], center: Option<&Vec3>) -> Result<Option<Polytope>, OpError> {
    let placed = placed_points(ctx.g, pts, &ctx.anchor, center);
    let mut all: Vec<Vec3> = base.to_vec();
    let mut seen: HashSet<Vec3> = all.iter().cloned().collect();
    for y in placed.keys() {
        if seen.insert(y.clone()) {
            all.push(y.clone());
        }
    }
    // Deterministic point order regardless of hash iteration.
    all[base.len()..].sort_by(|a, b| a.lex_cmp(b));
    let q = convex_hull_in(&all, Some(ctx.p.field()))?;
    if q.f_vector() != ctx.expect || !keeps_facets(&q, &ctx.keep) || !careful(&q, &placed) {
        return Ok(None);
    }
    let act = match Action::new(&q, ctx.g) {
        Ok(a) => a,
        Err(PolytopeError::NotSymmetric(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let flags = classify_type_with(&q, &act);
    Ok(ctx.op.type_ok(ctx.in_flags, flags).then_some(q))
}

fn facet_key(p: &Polytope, f: usize) -> Vec<Vec3> {
    let mut k = p.facet_points(f);
    k.sort_by(|a, b| a.lex_cmp(b));
    k
}

/// Whether every facet listed in `keep` is still a facet of `q`.
fn keeps_facets(q: &Polytope, keep: &[Vec<Vec3>]) -> bool {
    let have: std::collections::HashSet<Vec<Vec3>> = (0..q.facets().len()).map(|f| facet_key(q, f)).collect();
    keep.iter().all(|k| have.contains(k))
}

impl Ctx<'_> {
    /// Hull `P ∪ G·pts` and verify the contract.
    fn try_points(&self, pts: &[Vec3]) -> Result<Option<Polytope>, OpError> {
        verify_candidate(self, self.p.vertices(), pts, None)
    }
}

/// Largest admissible lift: every point `q + δμa` (with its own factor
/// `μ > 0`) must stay strictly below every facet plane other than `F`'s.
fn lift_bound(p: &Polytope, f: usize, a: &Vec3, base_pts: &[Vec3], mu: &[Scalar]) -> Option<Scalar> {
    let mut best: Option<Scalar> = None;
    for gi in 0..p.facets().len() {
        if gi == f {
            continue;
        }
        let ag = p.facet_normal(gi);
        let cg = p.facet_offset(gi);
        let slope = dot(&ag, a);
        if slope.sign() <= 0 {
            continue;
        }
        for (q, m) in base_pts.iter().zip(mu) {
            let room = &(&cg - &dot(&ag, q)) / &(&slope * m);
            if best.as_ref().map_or(true, |b| room < *b) {
                best = Some(room);
            }
        }
    }
    best
}

fn centroid(pts: &[Vec3]) -> Vec3 {
    let mut s = Vec3::zero();
    for x in pts {
        s = &s + x;
    }
    s.scale(&Scalar::frac(1, pts.len() as i64))
}

/// Intersection of the coplanar lines `x0 + α(x1 − x0)` and `y0 + β(y1 − y0)`.
fn line_intersection(x0: &Vec3, x1: &Vec3, y0: &Vec3, y1: &Vec3) -> Option<Vec3> {
    let e1 = x1 - x0;
    let e2 = y1 - y0;
    let n = cross(&e1, &e2);
    let nn = dot(&n, &n);
    if nn.is_zero() {
        return None;
    }
    let alpha = &dot(&cross(&(y0 - x0), &e2), &n) / &nn;
    Some(x0 + &e1.scale(&alpha))
}

/// A projective change of coordinates fixing the plane of a facet and its
/// centroid `c`: `Φ(x) = c + y/(1 + g·y)` with `y = x − c` and `g` parallel
/// to the plane. It maps lines to lines, so incidences (coplanar quads,
/// parallel edges becoming concurrent ones) are preserved when a cap built
/// in the chart is mapped back with `Φ⁻¹(w) = c + w/(1 − g·w)`.
struct Chart {
    c: Vec3,
    g: Vec3,
}

impl Chart {
    fn to_chart(&self, x: &Vec3) -> Vec3 {
        let y = x - &self.c;
        let psi = &Scalar::one() + &dot(&self.g, &y);
        &self.c + &y.scale(&psi.checked_inv().expect("chart denominator is positive on the facet"))
    }

    /// `Φ⁻¹` applied to `c + w`, returned as the image point together with
    /// the factor `1/(1 − g·w)` by which heights over the plane are scaled.
    fn from_chart(&self, w: &Vec3) -> (Vec3, Scalar) {
        let y = w - &self.c;
        let mu = (&Scalar::one() - &dot(&self.g, &y)).checked_inv().expect("chart denominator is positive on the facet");
        (&self.c + &y.scale(&mu), mu)
    }
}

/// Chart in which the lines through the alternating edges `edges` of a
/// facet bound a polygon around it. `None` when they already do (the
/// identity chart), otherwise `g` is the mean of the lines' polar points
/// with respect to the centroid, which lies strictly inside their convex
/// hull.
fn alternating_chart(c: &Vec3, a: &Vec3, edges: &[(&Vec3, &Vec3)]) -> Option<Chart> {
    let n = edges.len();
    let orient = {
        let (x0, x1) = edges[0];
        dot(&cross(&(x1 - x0), &(c - x0)), a).sign()
    };
    let turns_left = (0..n).all(|j| {
        let (x0, x1) = edges[j];
        let (y0, y1) = edges[(j + 1) % n];
        dot(&cross(&(x1 - x0), &(y1 - y0)), a).sign() == orient
    });
    if turns_left {
        return None;
    }
    let mut g = Vec3::zero();
    for &(x0, x1) in edges {
        // Inward in-plane normal β and distance α of the centroid: the line
        // is {y : α + β·y = 0}, with polar point β/α.
        let mut beta = cross(a, &(x1 - x0));
        if dot(&beta, &(c - x0)).sign() < 0 {
            beta = -&beta;
        }
        let alpha = dot(&beta, &(c - x0));
        g = &g + &beta.scale(&alpha.checked_inv().expect("centroid is interior"));
    }
    Some(Chart { c: c.clone(), g: g.scale(&Scalar::frac(1, n as i64)) })
}

/// Whether every point lies strictly inside the convex polygon `poly`
/// (in the plane with normal `a`, vertices in cyclic order).
fn strictly_inside(poly: &[Vec3], a: &Vec3, pts: &[Vec3]) -> bool {
    let k = poly.len();
    let orient = dot(&cross(&(&poly[1] - &poly[0]), &(&poly[2] - &poly[1])), a).sign();
    pts.iter().all(|q| {
        (0..k).all(|i| dot(&cross(&(&poly[(i + 1) % k] - &poly[i]), &(q - &poly[i])), a).sign() == orient)
    })
}

fn facet_op(ctx: &Ctx<'_>, act: &Action, f: usize) -> Result<Polytope, OpError> {
    let p = ctx.p;
    let op = ctx.op;
    let real_verts = p.facet_points(f);
    let k = real_verts.len();
    let c = centroid(&real_verts);
    let a = p.facet_normal(f);
    let stab = act.facet_stabilizer(f);
    // For half prisms the cap is built in a chart where the alternating
    // edge lines enclose the facet; every other operation uses the facet as is.
    let mut chart: Option<Chart> = None;
    let mut verts = real_verts.clone();
    // Planar polygon F' whose shrunken, lifted copy is stacked over F.
    let polygon: Vec<Vec3> = match op.tag {
        OpTag::CS => vec![c.clone()],
        OpTag::RP => verts.clone(),
        OpTag::TP => (0..k).map(|i| (&verts[i] + &verts[(i + 1) % k]).scale(&Scalar::frac(1, 2))).collect(),
        OpTag::BP => Vec::new(), // depends on the cut parameter, built below
        OpTag::HP | OpTag::THP => {
            if k % 2 != 0 || k < 6 {
                return Err(OpError::StabilizerIncompatible(op.to_string(), format!("facet has {k} vertices")));
            }
            let half = k / 2;
            if half % stab != 0 {
                return Err(OpError::StabilizerIncompatible(
                    op.to_string(),
                    format!("stabilizer order {stab} does not divide {half}"),
                ));
            }
            if act
                .facet_stabilizer_elements(f)
                .iter()
                .any(|&e| ctx.g.det_of(e) < 0)
            {
                return Err(OpError::StabilizerIncompatible(op.to_string(), "stabilizer is not rotational".into()));
            }
            // Alternating edges starting at the lexicographically smallest vertex.
            let start = (0..k).min_by(|&i, &j| real_verts[i].lex_cmp(&real_verts[j])).unwrap();
            let alternating: Vec<(&Vec3, &Vec3)> =
                (0..half).map(|j| (&real_verts[(start + 2 * j) % k], &real_verts[(start + 2 * j + 1) % k])).collect();
            chart = alternating_chart(&c, &a, &alternating);
            if let Some(ch) = &chart {
                verts = real_verts.iter().map(|x| ch.to_chart(x)).collect();
            }
            let e = |j: usize| (&verts[(start + 2 * j) % k], &verts[(start + 2 * j + 1) % k]);
            let mut w = Vec::with_capacity(half);
            for j in 0..half {
                let (x0, x1) = e(j);
                let (y0, y1) = e((j + 1) % half);
                let pt = line_intersection(x0, x1, y0, y1).ok_or_else(|| {
                    OpError::StabilizerIncompatible(op.to_string(), "alternating edges are parallel".into())
                })?;
                w.push(pt);
            }
            w
        }
        _ => unreachable!("vertex operation routed to facet_op"),
    };
    // Smallest shrink index putting the (chart) half-prism polygon inside F.
    let shrink_at = |i: usize| pow2_inv(i + 1);
    let first_i = if matches!(op.tag, OpTag::HP | OpTag::THP) {
        (0..)
            .find(|&i| {
                let s = shrink_at(i);
                let base: Vec<Vec3> = polygon.iter().map(|x| &c + &(x - &c).scale(&s)).collect();
                strictly_inside(&verts, &a, &base)
            })
            .unwrap()
    } else {
        0
    };
    let mut attempts = 0;
    for (i, j) in guesses() {
        let i = i + first_i;
        if op.tag == OpTag::CS && i > 0 {
            // Only the lift matters for stacking; skip redundant shrink values.
            continue;
        }
        attempts += 1;
        let s = shrink_at(i);
        let mut poly = polygon.clone();
        if op.tag == OpTag::BP {
            let t = Scalar::frac(1, 3 << i.min(40));
            poly = (0..k)
                .flat_map(|idx| {
                    let x = &verts[idx];
                    let prev = &verts[(idx + k - 1) % k];
                    let next = &verts[(idx + 1) % k];
                    [x + &(prev - x).scale(&t), x + &(next - x).scale(&t)]
                })
                .collect();
        }
        if op.tag == OpTag::THP {
            // Similarity rotation about the facet axis by a small angle.
            let l1 = a.0.iter().map(Scalar::abs).fold(Scalar::zero(), |x, y| &x + &y);
            let tau = &pow2_inv(3 + i) / &l1;
            poly = poly
                .iter()
                .map(|x| {
                    let r = x - &c;
                    &c + &(&r + &cross(&a, &r).scale(&tau))
                })
                .collect();
        }
        let shrink = if op.tag == OpTag::CS { Scalar::one() } else { s.clone() };
        let base: Vec<Vec3> = poly.iter().map(|x| &c + &(x - &c).scale(&shrink)).collect();
        // Real base points and the factors by which a chart lift is scaled.
        let (base, mu): (Vec<Vec3>, Vec<Scalar>) = match &chart {
            None => {
                let n = base.len();
                (base, vec![Scalar::one(); n])
            }
            Some(ch) => base.iter().map(|x| ch.from_chart(x)).unzip(),
        };
        let delta = match lift_bound(p, f, &a, &base, &mu) {
            // Some base point lies outside the polytope: shrink further.
            Some(b) if b.sign() <= 0 => continue,
            Some(b) => pow2_inv(dyadic_below(&b) + j),
            None => pow2_inv(1 + j),
        };
        let lifted: Vec<Vec3> = base.iter().zip(&mu).map(|(x, m)| x + &a.scale(&(&delta * m))).collect();
        if let Some(q) = ctx.try_points(&lifted)? {
            return Ok(q);
        }
    }
    Err(OpError::PlacementFailed(op.to_string(), attempts))
}

fn vertex_op(ctx: &Ctx<'_>, _act: &Action, v: usize) -> Result<Polytope, OpError> {
    let p = ctx.p;
    let op = ctx.op;
    let x = &p.vertices()[v];
    let mut n = Vec3::zero();
    for f in p.facets_at(v) {
        n = &n + &p.facet_normal(f);
    }
    let nbrs: Vec<usize> = p
        .edges()
        .iter()
        .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
        .collect();
    let heights: Vec<Scalar> = nbrs.iter().map(|&u| dot(&n, &(x - &p.vertices()[u]))).collect();
    let min_h = heights.iter().min().expect("vertex has neighbours").clone();
    let j0 = dyadic_below(&min_h) + 1;
    let b = barycenter(p);
    let hb = dot(&n, &(x - &b));
    let mut attempts = 0;
    for (_, j) in guesses().filter(|(i, _)| *i == 0).take(MAX_ATTEMPTS) {
        attempts += 1;
        let eps = pow2_inv(j0 + j);
        let mut pts: Vec<Vec3> = nbrs
            .iter()
            .zip(&heights)
            .map(|(&u, h)| x + &(&p.vertices()[u] - x).scale(&(&eps / h)))
            .collect();
        if op.tag == OpTag::RPdual {
            let sigma = &(&eps / &hb) / &Scalar::from_int(2);
            pts.push(x + &(&b - x).scale(&sigma));
        }
        // Replace the whole orbit of v: hull of the remaining vertices plus
        // the orbit of the cut points.
        let orbit: std::collections::HashSet<Vec3> = ctx.g.orbit(x).into_iter().collect();
        let rest: Vec<Vec3> = p.vertices().iter().filter(|y| !orbit.contains(*y)).cloned().collect();
        let reduced = CutCtx { rest, center: x.clone(), ctx };
        if let Some(q) = reduced.try_points(&pts)? {
            return Ok(q);
        }
    }
    Err(OpError::PlacementFailed(op.to_string(), attempts))
}

struct CutCtx<'a, 'b> {
    rest: Vec<Vec3>,
    center: Vec3,
    ctx: &'a Ctx<'b>,
}

impl CutCtx<'_, '_> {
    fn try_points(&self, pts: &[Vec3]) -> Result<Option<Polytope>, OpError> {
        verify_candidate(self.ctx, &self.rest, pts, Some(&self.center))
    }
}

/// `CS_{k,m}`: careful stacking.
pub fn careful_stack(p: &Polytope, g: &Group, k: usize, m: usize) -> Result<Polytope, OpError> {
    apply(&OpKind::new(OpTag::CS, k, m), p, g)
}

/// `CC_{k,m}`: careful cutting.
pub fn careful_cut(p: &Polytope, g: &Group, k: usize, m: usize) -> Result<Polytope, OpError> {
    apply(&OpKind::new(OpTag::CC, k, m), p, g)
}

/// `RP_{k,m}`: regular prism.
pub fn regular_prism(p: &Polytope, g: &Group, k: usize, m: usize) -> Result<Polytope, OpError> {
    apply(&OpKind::new(OpTag::RP, k, m), p, g)
}

/// `RP∨_{k,m}`: dual regular prism.
pub fn regular_prism_dual(p: &Polytope, g: &Group, k: usize, m: usize) -> Result<Polytope, OpError> {
    apply(&OpKind::new(OpTag::RPdual, k, m), p, g)
}

/// `TP_{k,m}`: twisted prism.
pub fn twisted_prism(p: &Polytope, g: &Group, k: usize, m: usize) -> Result<Polytope, OpError> {
    apply(&OpKind::new(OpTag::TP, k, m), p, g)
}

/// `TP∨_{k,m}`: dual twisted prism.
pub fn twisted_prism_dual(p: &Polytope, g: &Group, k: usize, m: usize) -> Result<Polytope, OpError> {
    apply(&OpKind::new(OpTag::TPdual, k, m), p, g)
}

/// `BP_{k,m}`: big prism over a `k`-gon (the new facet has `2k` vertices).
pub fn big_prism(p: &Polytope, g: &Group, k: usize, m: usize) -> Result<Polytope, OpError> {
    apply(&OpKind::new(OpTag::BP, k, m), p, g)
}

/// `HP_{k,m}`: half prism over a `k`-gon, `k` even.
pub fn half_prism(p: &Polytope, g: &Group, k: usize, m: usize) -> Result<Polytope, OpError> {
    apply(&OpKind::new(OpTag::HP, k, m), p, g)
}

/// `THP_{k,m}`: twisted half prism over a `k`-gon, `k` even.
pub fn twisted_half_prism(p: &Polytope, g: &Group, k: usize, m: usize) -> Result<Polytope, OpError> {
    apply(&OpKind::new(OpTag::THP, k, m), p, g)
}
