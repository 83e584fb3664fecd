//! Symmetry-aware predicates on polytopes: symmetry verification, the group
//! action on vertices and facets, stabilizers, polar duals and the
//! left/right/base type flags.

use std::collections::{HashMap, HashSet};

use crate::group::Group;
use crate::hull::Polytope;
use crate::linalg::{dot, matvec, Vec3};
use crate::scalar::{Scalar, ScalarError};

/// Errors from symmetry-aware predicates.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    /// The polytope is not invariant under the group.
    #[error("polytope is not symmetric under {0}")]
    NotSymmetric(String),
    /// Group and polytope live in incompatible fields.
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Left/right/base type of a symmetric polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub struct TypeFlags {
    /// Has a triangular facet with trivial stabilizer.
    pub left: bool,
    /// Has a simple (degree-3) vertex with trivial stabilizer.
    pub right: bool,
    /// Both of the above.
    pub base: bool,
}

impl TypeFlags {
    /// Build from the two defining flags.
    pub fn new(left: bool, right: bool) -> TypeFlags {
        TypeFlags { left, right, base: left && right }
    }

    /// Flags of the dual polytope.
    pub fn swapped(self) -> TypeFlags {
        TypeFlags::new(self.right, self.left)
    }
}

fn check_fields(p: &Polytope, g: &Group) -> Result<(), PolytopeError> {
    let (a, b) = (p.field(), g.field());
    if a.is_rational() || b.is_rational() || a.same_as(b) {
        Ok(())
    } else {
        Err(ScalarError::FieldMismatch(a.label().into(), b.label().into()).into())
    }
}

/// True iff every generator maps the vertex set onto itself.
pub fn is_symmetric(p: &Polytope, g: &Group) -> Result<bool, PolytopeError> {
    check_fields(p, g)?;
    let set: HashSet<&Vec3> = p.vertices().iter().collect();
    Ok(g
        .generators()
        .iter()
        .all(|a| p.vertices().iter().all(|v| set.contains(&matvec(a, v)))))
}

/// Average of the vertices.
pub fn barycenter(p: &Polytope) -> Vec3 {
    let mut s = Vec3::zero();
    for v in p.vertices() {
        s = &s + v;
    }
    s.scale(&Scalar::frac(1, p.vertices().len() as i64))
}

/// The deduplicated union of the orbits `G·s` over the seeds.
pub fn orbit_points(g: &Group, seeds: &[Vec3]) -> Vec<Vec3> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for s in seeds {
        for q in g.orbit(s) {
            if seen.insert(q.clone()) {
                out.push(q);
            }
        }
    }
    out
}

/// The action of a group on the vertices and facets of a symmetric polytope.
#[derive(Debug, Clone)]
pub struct Action {
    /// `vperm[g][v]` is the image of vertex `v` under element `g`.
    pub vperm: Vec<Vec<usize>>,
    /// `fperm[g][f]` is the image of facet `f` under element `g`.
    pub fperm: Vec<Vec<usize>>,
}

impl Action {
    /// Compute the action; errors when `P` is not `G`-symmetric.
    pub fn new(p: &Polytope, g: &Group) -> Result<Action, PolytopeError> {
        check_fields(p, g)?;
        let index: HashMap<&Vec3, usize> = p.vertices().iter().enumerate().map(|(i, v)| (v, i)).collect();
        let facet_index: HashMap<Vec<usize>, usize> = p
            .facets()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let mut k = f.clone();
                k.sort_unstable();
                (k, i)
            })
            .collect();
        let mut vperm = Vec::with_capacity(g.order());
        let mut fperm = Vec::with_capacity(g.order());
        let not_sym = || PolytopeError::NotSymmetric(g.spec().to_string());
        for a in g.elements() {
            let mut perm = Vec::with_capacity(p.vertices().len());
            for v in p.vertices() {
                perm.push(*index.get(&matvec(a, v)).ok_or_else(not_sym)?);
            }
            let mut fp = Vec::with_capacity(p.facets().len());
            for f in p.facets() {
                let mut k: Vec<usize> = f.iter().map(|&v| perm[v]).collect();
                k.sort_unstable();
                fp.push(*facet_index.get(&k).ok_or_else(not_sym)?);
            }
            vperm.push(perm);
            fperm.push(fp);
        }
        Ok(Action { vperm, fperm })
    }

    /// Order of the stabilizer of vertex `v`.
    pub fn vertex_stabilizer(&self, v: usize) -> usize {
        self.vperm.iter().filter(|p| p[v] == v).count()
    }

    /// Order of the set-wise stabilizer of facet `f`.
    pub fn facet_stabilizer(&self, f: usize) -> usize {
        self.fperm.iter().filter(|p| p[f] == f).count()
    }

    /// Element indices stabilizing facet `f`.
    pub fn facet_stabilizer_elements(&self, f: usize) -> Vec<usize> {
        (0..self.fperm.len()).filter(|&g| self.fperm[g][f] == f).collect()
    }

    /// Element indices stabilizing vertex `v`.
    pub fn vertex_stabilizer_elements(&self, v: usize) -> Vec<usize> {
        (0..self.vperm.len()).filter(|&g| self.vperm[g][v] == v).collect()
    }

    /// The orbit of facet `f`, sorted.
    pub fn facet_orbit(&self, f: usize) -> Vec<usize> {
        let mut o: Vec<usize> = self.fperm.iter().map(|p| p[f]).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    /// The orbit of vertex `v`, sorted.
    pub fn vertex_orbit(&self, v: usize) -> Vec<usize> {
        let mut o: Vec<usize> = self.vperm.iter().map(|p| p[v]).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    /// Partition of the facets into orbits (each sorted, ordered by first
    /// member).
    pub fn facet_orbits(&self, nf: usize) -> Vec<Vec<usize>> {
        orbits(nf, |i| self.facet_orbit(i))
    }

    /// Partition of the vertices into orbits.
    pub fn vertex_orbits(&self, nv: usize) -> Vec<Vec<usize>> {
        orbits(nv, |i| self.vertex_orbit(i))
    }
}

fn orbits(n: usize, orbit_of: impl Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if !seen[i] {
            let o = orbit_of(i);
            for &j in &o {
                seen[j] = true;
            }
            out.push(o);
        }
    }
    out
}

/// Left/right/base flags of a `G`-symmetric polytope.
pub fn classify_type(p: &Polytope, g: &Group) -> Result<TypeFlags, PolytopeError> {
    let act = Action::new(p, g)?;
    Ok(classify_type_with(p, &act))
}

/// [`classify_type`] with a precomputed action.
pub fn classify_type_with(p: &Polytope, act: &Action) -> TypeFlags {
    let left = (0..p.facets().len()).any(|f| p.facet_degree(f) == 3 && act.facet_stabilizer(f) == 1);
    let degrees = p.vertex_degrees();
    let right = (0..p.vertices().len()).any(|v| degrees[v] == 3 && act.vertex_stabilizer(v) == 1);
    TypeFlags::new(left, right)
}

/// Center used by [`polar_dual`]: a short dyadic point next to the
/// barycenter that is still strictly interior.
///
/// Zero coordinates of the barycenter stay zero. The fixed subspace of every
/// supported group (the origin, the z-axis, or all of space for the trivial
/// group) is spanned by coordinate axes, so the center is fixed by every
/// symmetry that fixes the barycenter. Short coordinates matter: duals of
/// duals would otherwise inherit the common denominator of all vertices at
/// every step.
pub fn dual_center(p: &Polytope) -> Vec3 {
    let b = barycenter(p);
    if b.is_zero() {
        return b;
    }
    let planes: Vec<(Vec3, Scalar)> = (0..p.facets().len()).map(|i| (p.facet_normal(i), p.facet_offset(i))).collect();
    let approx = b.to_f64();
    for k in 0..=40 {
        let scale = (1i64 << k) as f64;
        let coord = |i: usize| {
            if b.get(i).is_zero() {
                Scalar::zero()
            } else {
                Scalar::frac((approx[i] * scale).round() as i64, 1i64 << k)
            }
        };
        let cand = Vec3::new(coord(0), coord(1), coord(2));
        if planes.iter().all(|(a, c)| (c - &dot(a, &cand)).sign() > 0) {
            return cand;
        }
    }
    b
}

/// The centered polar dual `P* = {x : ⟨x, y⟩ ≤ 1 for all y ∈ P − b}` with
/// `b` the [`dual_center`].
///
/// Built combinatorially: facet `F` with outward normal `a` and plane
/// `a·x = c` gives the dual vertex `a / (c − a·b)`, and the facets around
/// each vertex of `P` (in cyclic order) form a dual facet. The dual vertex
/// of facet `i` has index `i`, and the dual facet of vertex `v` is the one
/// whose sorted index set is the sorted set of facets at `v`.
pub fn polar_dual(p: &Polytope) -> Polytope {
    let b = dual_center(p);
    let nf = p.facets().len();
    let mut verts = Vec::with_capacity(nf);
    for i in 0..nf {
        let a = p.facet_normal(i);
        let c = &p.facet_offset(i) - &dot(&a, &b);
        debug_assert!(c.sign() > 0);
        verts.push(a.scale(&c.checked_inv().expect("dual center lies on a facet plane")));
    }
    // Directed edge -> facet.
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, f) in p.facets().iter().enumerate() {
        for k in 0..f.len() {
            owner.insert((f[k], f[(k + 1) % f.len()]), i);
        }
    }
    let mut succ_in: Vec<HashMap<usize, usize>> = vec![HashMap::new(); nf];
    for (i, f) in p.facets().iter().enumerate() {
        for k in 0..f.len() {
            succ_in[i].insert(f[k], f[(k + 1) % f.len()]);
        }
    }
    let mut facets = Vec::with_capacity(p.vertices().len());
    for v in 0..p.vertices().len() {
        let start = *owner.iter().find(|((x, _), _)| *x == v).map(|(_, f)| f).unwrap();
        let mut cyc = vec![start];
        let mut cur = start;
        loop {
            let w = succ_in[cur][&v];
            let next = owner[&(w, v)];
            if next == start {
                break;
            }
            cyc.push(next);
            cur = next;
        }
        // Orient counterclockwise seen from outside: outward direction of
        // the dual facet is v − b.
        let out = &p.vertices()[v] - &b;
        let mut n = Vec3::zero();
        for k in 0..cyc.len() {
            n = &n + &crate::linalg::cross(&verts[cyc[k]], &verts[cyc[(k + 1) % cyc.len()]]);
        }
        if dot(&n, &out).sign() < 0 {
            cyc.reverse();
        }
        facets.push(cyc);
    }
    Polytope::from_parts(p.field().clone(), verts, facets).with_provenance(format!("dual({})", p.provenance))
}
