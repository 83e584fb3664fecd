//! Exact convex hulls in 3-space with maximal (merged) facets.
//!
//! The hull is built incrementally with conflict lists: every pending point
//! is attached to one triangle it sees, and inserting a point replaces the
//! connected region of triangles it sees by a fan over the horizon. All
//! predicates are exact, so the only subtlety is degeneracy: points are
//! inserted only when *strictly* outside, and afterwards coplanar adjacent
//! triangles are merged into maximal facets and vertices that ended up in
//! the relative interior of an edge or facet are dropped.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{cross, dot, Vec3};
use crate::scalar::{field_from_json, field_rationals, field_to_json, Field, Scalar, ScalarError};

/// Errors from hull construction and (de)serialization.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HullError {
    /// The points do not affinely span 3-space.
    #[error("degenerate input: points span only a {0}-dimensional affine subspace")]
    Degenerate(usize),
    /// Points from two different irrational fields.
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    /// Malformed serialized polytope.
    #[error("malformed polytope data: {0}")]
    Format(String),
}

/// The pair `(f0, f2)` of vertex and facet counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FVector {
    /// Number of vertices.
    pub f0: u64,
    /// Number of facets.
    pub f2: u64,
}

impl FVector {
    /// Build from the two counts.
    pub const fn new(f0: u64, f2: u64) -> FVector {
        FVector { f0, f2 }
    }

    /// Exchange vertices and facets (the f-vector of the dual).
    pub const fn swap(self) -> FVector {
        FVector { f0: self.f2, f2: self.f0 }
    }

    /// Edge count implied by Euler's relation.
    pub fn f1(self) -> u64 {
        (self.f0 + self.f2).saturating_sub(2)
    }

    /// Componentwise sum with a signed offset; `None` when negative.
    pub fn offset(self, d0: i64, d2: i64) -> Option<FVector> {
        let f0 = self.f0 as i64 + d0;
        let f2 = self.f2 as i64 + d2;
        (f0 >= 0 && f2 >= 0).then(|| FVector::new(f0 as u64, f2 as u64))
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.f0, self.f2)
    }
}

impl std::str::FromStr for FVector {
    type Err = String;

    /// Parse `"f0,f2"` (optionally wrapped in parentheses).
    fn from_str(s: &str) -> Result<FVector, String> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = t.split_once(',').ok_or_else(|| format!("expected f0,f2 but got {s:?}"))?;
        let a = a.trim().parse().map_err(|_| format!("bad f0 in {s:?}"))?;
        let b = b.trim().parse().map_err(|_| format!("bad f2 in {s:?}"))?;
        Ok(FVector::new(a, b))
    }
}

/// A 3-polytope with exact vertices and its face lattice.
#[derive(Clone)]
pub struct Polytope {
    field: Field,
    vertices: Vec<Vec3>,
    facets: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    fvec: FVector,
    /// Human-readable construction trace.
    pub provenance: String,
}

impl fmt::Debug for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polytope{} [{}]", self.fvec, self.provenance)
    }
}

impl Polytope {
    /// Field containing all coordinates.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Vertices (all extreme).
    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    /// Facets as vertex-index cycles, counterclockwise seen from outside.
    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// Edges as sorted index pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Cached `(f0, f2)`.
    pub fn f_vector(&self) -> FVector {
        self.fvec
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of vertices of facet `i`.
    pub fn facet_degree(&self, i: usize) -> usize {
        self.facets[i].len()
    }

    /// Number of edges at vertex `v`.
    pub fn vertex_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|(a, b)| *a == v || *b == v).count()
    }

    /// Degrees of all vertices.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// Vertex coordinates of facet `i`.
    pub fn facet_points(&self, i: usize) -> Vec<Vec3> {
        self.facets[i].iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Outward (Newell) normal `Σ v_j × v_{j+1}` of facet `i`; it is
    /// equivariant under every orthogonal map, including those with
    /// determinant −1.
    pub fn facet_normal(&self, i: usize) -> Vec3 {
        let f = &self.facets[i];
        let mut n = Vec3::zero();
        for j in 0..f.len() {
            let a = &self.vertices[f[j]];
            let b = &self.vertices[f[(j + 1) % f.len()]];
            n = &n + &cross(a, b);
        }
        n
    }

    /// Offset `c` of facet `i`'s supporting plane `n·x = c` with `n` the
    /// Newell normal.
    pub fn facet_offset(&self, i: usize) -> Scalar {
        dot(&self.facet_normal(i), &self.vertices[self.facets[i][0]])
    }

    /// Indices of the facets containing vertex `v`.
    pub fn facets_at(&self, v: usize) -> Vec<usize> {
        (0..self.facets.len()).filter(|&i| self.facets[i].contains(&v)).collect()
    }

    /// Replace the provenance string.
    pub fn with_provenance(mut self, s: impl Into<String>) -> Polytope {
        self.provenance = s.into();
        self
    }

    /// Render as an OFF file with `digits` fractional digits per coordinate.
    pub fn to_off(&self, digits: usize) -> String {
        let mut s = String::from("OFF\n");
        s.push_str(&format!("{} {} {}\n", self.vertices.len(), self.facets.len(), self.edges.len()));
        for v in &self.vertices {
            s.push_str(&format!(
                "{} {} {}\n",
                v.x().to_decimal(digits),
                v.y().to_decimal(digits),
                v.z().to_decimal(digits)
            ));
        }
        for f in &self.facets {
            s.push_str(&f.len().to_string());
            for i in f {
                s.push(' ');
                s.push_str(&i.to_string());
            }
            s.push('\n');
        }
        s
    }

    /// Exact JSON: the field descriptor, vertex coefficient vectors and
    /// facet cycles.
    pub fn to_json(&self) -> serde_json::Value {
        let coeff = |s: &Scalar| {
            serde_json::Value::Array(
                s.coeffs_in(&self.field)
                    .expect("coordinate outside the polytope field")
                    .iter()
                    .map(|c| serde_json::Value::String(c.to_string()))
                    .collect(),
            )
        };
        serde_json::json!({
            "field": field_to_json(&self.field),
            "f_vector": [self.fvec.f0, self.fvec.f2],
            "vertices": self.vertices.iter().map(|v| v.0.iter().map(coeff).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "facets": self.facets,
            "provenance": self.provenance,
        })
    }

    /// Parse [`Polytope::to_json`] output; the hull is recomputed from the
    /// vertices and must reproduce the stored facets.
    pub fn from_json(v: &serde_json::Value) -> Result<Polytope, HullError> {
        let bad = |m: &str| HullError::Format(m.to_string());
        let field = field_from_json(v.get("field").ok_or_else(|| bad("missing field"))?)?;
        let verts = v.get("vertices").and_then(|x| x.as_array()).ok_or_else(|| bad("missing vertices"))?;
        let mut pts = Vec::new();
        for p in verts {
            let comps = p.as_array().filter(|c| c.len() == 3).ok_or_else(|| bad("vertex must have 3 coordinates"))?;
            let mut xs = Vec::new();
            for c in comps {
                let wrapped = serde_json::json!({ "coeffs": c });
                xs.push(Scalar::from_json(&wrapped, &field)?);
            }
            let z = xs.pop().unwrap();
            let y = xs.pop().unwrap();
            let x = xs.pop().unwrap();
            pts.push(Vec3::new(x, y, z));
        }
        let mut p = convex_hull(&pts)?;
        if let Some(prov) = v.get("provenance").and_then(|x| x.as_str()) {
            p.provenance = prov.to_string();
        }
        if let Some(f) = v.get("facets") {
            let stored: Vec<Vec<usize>> =
                serde_json::from_value(f.clone()).map_err(|e| HullError::Format(e.to_string()))?;
            if stored != p.facets {
                return Err(bad("stored facets do not match the hull of the vertices"));
            }
        }
        Ok(p)
    }
}

struct Tri {
    v: [usize; 3],
    normal: Vec3,
    off: Scalar,
    alive: bool,
    outside: Vec<usize>,
}

impl Tri {
    fn new(pts: &[Vec3], v: [usize; 3]) -> Tri {
        let normal = cross(&(&pts[v[1]] - &pts[v[0]]), &(&pts[v[2]] - &pts[v[0]]));
        let off = dot(&normal, &pts[v[0]]);
        Tri { v, normal, off, alive: true, outside: Vec::new() }
    }

    /// Sign of the signed height of `p` above the plane.
    fn side(&self, p: &Vec3) -> i32 {
        (&dot(&self.normal, p) - &self.off).sign()
    }
}

fn common_field(points: &[Vec3]) -> Result<Field, HullError> {
    let mut field: Option<Field> = None;
    for p in points {
        for c in &p.0 {
            if let Some(f) = c.field() {
                match &field {
                    None => field = Some(f.clone()),
                    Some(g) if g.same_as(f) => {}
                    Some(g) => return Err(ScalarError::FieldMismatch(g.label().into(), f.label().into()).into()),
                }
            }
        }
    }
    Ok(field.unwrap_or_else(field_rationals))
}

/// Exact convex hull of a point set spanning 3-space.
pub fn convex_hull(points: &[Vec3]) -> Result<Polytope, HullError> {
    convex_hull_in(points, None)
}

/// Convex hull tagged with an explicit field (used when all coordinates
/// happen to be rational but the polytope belongs to a larger field).
pub fn convex_hull_in(points: &[Vec3], field: Option<&Field>) -> Result<Polytope, HullError> {
    let detected = common_field(points)?;
    let field = match field {
        Some(f) if detected.is_rational() || detected.same_as(f) => f.clone(),
        Some(f) => return Err(ScalarError::FieldMismatch(f.label().into(), detected.label().into()).into()),
        None => detected,
    };
    // Deduplicate, preserving first-occurrence order.
    let mut seen = HashSet::new();
    let pts: Vec<Vec3> = points.iter().filter(|p| seen.insert((*p).clone())).cloned().collect();

    let simplex = initial_simplex(&pts)?;
    let mut tris: Vec<Tri> = Vec::new();
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    let [a, b, c, d] = simplex;
    let (b, c) = if orient(&pts, a, b, c, d) > 0 { (c, b) } else { (b, c) };
    // Now d is below plane (a,b,c) with its right-hand normal.
    for f in [[a, b, c], [a, d, b], [b, d, c], [c, d, a]] {
        let idx = tris.len();
        let t = Tri::new(&pts, f);
        debug_assert!(t.side(&pts[[a, b, c, d].iter().copied().find(|x| !f.contains(x)).unwrap()]) < 0);
        for k in 0..3 {
            owner.insert((f[k], f[(k + 1) % 3]), idx);
        }
        tris.push(t);
    }
    for i in 0..pts.len() {
        if simplex.contains(&i) {
            continue;
        }
        if let Some(t) = tris.iter().position(|t| t.side(&pts[i]) > 0) {
            tris[t].outside.push(i);
        }
    }

    let mut stack: Vec<usize> = (0..tris.len()).filter(|&t| !tris[t].outside.is_empty()).collect();
    while let Some(start) = stack.pop() {
        if !tris[start].alive || tris[start].outside.is_empty() {
            continue;
        }
        let p = tris[start].outside[0];
        // Visible region by flood fill.
        let mut visible = vec![start];
        let mut vis_set: HashSet<usize> = HashSet::from([start]);
        let mut qi = 0;
        while qi < visible.len() {
            let t = visible[qi];
            qi += 1;
            let v = tris[t].v;
            for k in 0..3 {
                let nb = owner[&(v[(k + 1) % 3], v[k])];
                if !vis_set.contains(&nb) && tris[nb].side(&pts[p]) > 0 {
                    vis_set.insert(nb);
                    visible.push(nb);
                }
            }
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &t in &visible {
            let v = tris[t].v;
            for k in 0..3 {
                let (x, y) = (v[k], v[(k + 1) % 3]);
                if !vis_set.contains(&owner[&(y, x)]) {
                    horizon.push((x, y));
                }
            }
        }
        let mut orphans: Vec<usize> = Vec::new();
        for &t in &visible {
            tris[t].alive = false;
            let v = tris[t].v;
            for k in 0..3 {
                let key = (v[k], v[(k + 1) % 3]);
                if owner.get(&key) == Some(&t) {
                    owner.remove(&key);
                }
            }
            orphans.extend(std::mem::take(&mut tris[t].outside).into_iter().filter(|&q| q != p));
        }
        let first_new = tris.len();
        for (x, y) in horizon {
            let idx = tris.len();
            let f = [x, y, p];
            for k in 0..3 {
                owner.insert((f[k], f[(k + 1) % 3]), idx);
            }
            tris.push(Tri::new(&pts, f));
        }
        for q in orphans {
            let hit = (first_new..tris.len())
                .find(|&t| tris[t].side(&pts[q]) > 0)
                .or_else(|| (0..first_new).find(|&t| tris[t].alive && tris[t].side(&pts[q]) > 0));
            if let Some(t) = hit {
                tris[t].outside.push(q);
            }
        }
        for t in first_new..tris.len() {
            if !tris[t].outside.is_empty() {
                stack.push(t);
            }
        }
    }

    Ok(assemble(&pts, &tris, &owner, field))
}

fn orient(pts: &[Vec3], a: usize, b: usize, c: usize, d: usize) -> i32 {
    crate::linalg::orient3d(&pts[a], &pts[b], &pts[c], &pts[d])
}

fn initial_simplex(pts: &[Vec3]) -> Result<[usize; 4], HullError> {
    if pts.is_empty() {
        return Err(HullError::Degenerate(0));
    }
    let a = 0;
    let b = (1..pts.len()).find(|&i| pts[i] != pts[a]).ok_or(HullError::Degenerate(0))?;
    let ab = &pts[b] - &pts[a];
    let c = (1..pts.len())
        .find(|&i| !cross(&ab, &(&pts[i] - &pts[a])).is_zero())
        .ok_or(HullError::Degenerate(1))?;
    let d = (1..pts.len()).find(|&i| orient(pts, a, b, c, i) != 0).ok_or(HullError::Degenerate(2))?;
    Ok([a, b, c, d])
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let n = parent[y];
        parent[y] = r;
        y = n;
    }
    r
}

fn assemble(pts: &[Vec3], tris: &[Tri], owner: &HashMap<(usize, usize), usize>, field: Field) -> Polytope {
    let alive: Vec<usize> = (0..tris.len()).filter(|&t| tris[t].alive).collect();
    let mut parent: Vec<usize> = (0..tris.len()).collect();
    for &t in &alive {
        let v = tris[t].v;
        for k in 0..3 {
            let nb = owner[&(v[(k + 1) % 3], v[k])];
            if nb < t {
                continue;
            }
            let opp = tris[nb].v.iter().copied().find(|x| !v.contains(x)).unwrap();
            if tris[t].side(&pts[opp]) == 0 {
                let (ra, rb) = (find(&mut parent, t), find(&mut parent, nb));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for &t in &alive {
        let r = find(&mut parent, t);
        groups.entry(r).or_default().push(t);
    }
    let mut roots: Vec<usize> = groups.keys().copied().collect();
    roots.sort_unstable();
    let mut raw_facets: Vec<Vec<usize>> = Vec::new();
    for r in roots {
        let members = &groups[&r];
        let member_set: HashSet<usize> = members.iter().copied().collect();
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &t in members {
            let v = tris[t].v;
            for k in 0..3 {
                let (x, y) = (v[k], v[(k + 1) % 3]);
                if !member_set.contains(&owner[&(y, x)]) {
                    next.insert(x, y);
                }
            }
        }
        let start = *next.keys().min().unwrap();
        let mut cycle = vec![start];
        let mut cur = next[&start];
        while cur != start {
            cycle.push(cur);
            cur = next[&cur];
        }
        debug_assert_eq!(cycle.len(), next.len(), "facet boundary is not a single cycle");
        // Drop vertices in the relative interior of a boundary edge.
        let n = cycle.len();
        let keep: Vec<usize> = (0..n)
            .filter(|&i| {
                let prev = &pts[cycle[(i + n - 1) % n]];
                let cur = &pts[cycle[i]];
                let nxt = &pts[cycle[(i + 1) % n]];
                !cross(&(cur - prev), &(nxt - cur)).is_zero()
            })
            .map(|i| cycle[i])
            .collect();
        raw_facets.push(keep);
    }
    // Reindex vertices by input order.
    let mut used: Vec<usize> = raw_facets.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let remap: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let vertices: Vec<Vec3> = used.iter().map(|&v| pts[v].clone()).collect();
    let facets = raw_facets.into_iter().map(|f| f.iter().map(|v| remap[v]).collect()).collect();
    Polytope::from_parts(field, vertices, facets)
}

impl Polytope {
    /// Assemble a polytope from already-known combinatorics: facet cycles
    /// are rotated to start at their smallest index and sorted, and the edge
    /// list is derived. The caller guarantees that the data describes a
    /// convex polytope with outward-oriented facets.
    pub(crate) fn from_parts(field: Field, vertices: Vec<Vec3>, facets: Vec<Vec<usize>>) -> Polytope {
        let mut facets: Vec<Vec<usize>> = facets
            .into_iter()
            .map(|mut g| {
                let m = g.iter().enumerate().min_by_key(|(_, v)| **v).unwrap().0;
                g.rotate_left(m);
                g
            })
            .collect();
        facets.sort();
        let mut edges: Vec<(usize, usize)> = facets
            .iter()
            .flat_map(|f| (0..f.len()).map(move |i| (f[i].min(f[(i + 1) % f.len()]), f[i].max(f[(i + 1) % f.len()]))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let fvec = FVector::new(vertices.len() as u64, facets.len() as u64);
        debug_assert_eq!(fvec.f0 + fvec.f2, edges.len() as u64 + 2, "Euler relation violated");
        Polytope { field, vertices, facets, edges, fvec, provenance: String::new() }
    }
}
