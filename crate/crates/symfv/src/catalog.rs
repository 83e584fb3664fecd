//! Exact constructions of the named seed polytopes.
//!
//! Parametric families (pyramids, prisms, tents, belts, …) are built in the
//! frame of the group they are requested for: polygons are unions of group
//! orbits of rational points on the circle around the group axis, so the
//! result is exactly symmetric in the group's own field. Fixed solids are
//! built as orbit hulls under their natural rotation group and then checked
//! against the requested group.
//!
//! Every build verifies the registered f-vector and the symmetry; results
//! are memoized in a process-wide read-mostly cache.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use crate::group::{circle_point, standard_group, Family, Group, GroupError, GroupSpec};
use crate::hull::{convex_hull, FVector, Polytope};
use crate::linalg::{cross, Vec3};
use crate::ops::{apply, OpKind, OpTag};
use crate::polytope::{is_symmetric, orbit_points, polar_dual};
use crate::scalar::{field_golden, Scalar};

/// Errors from the catalog.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    /// Name not registered or wrong number of parameters.
    #[error("unknown catalog key {0}")]
    UnknownKey(String),
    /// Parameters outside the admissible range.
    #[error("parameter out of range for {0}")]
    ParameterOutOfRange(String),
    /// The requested group cannot host the construction.
    #[error("{0} cannot be built with {1} symmetry")]
    Incompatible(String, String),
    /// The construction did not produce the registered polytope.
    #[error("construction of {0} failed: {1}")]
    Construction(String, String),
    /// Group construction failed.
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A catalog entry name with its integer parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CatalogKey {
    /// Registered name.
    pub name: String,
    /// Parameters (arity depends on the name).
    pub params: Vec<i64>,
}

impl CatalogKey {
    /// Build a key.
    pub fn new(name: &str, params: &[i64]) -> CatalogKey {
        CatalogKey { name: name.to_string(), params: params.to_vec() }
    }
}

impl fmt::Display for CatalogKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", p.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for CatalogKey {
    type Err = CatalogError;

    /// Parse `Name`, `Name[p1,p2]` or `Name:p1,p2`.
    fn from_str(s: &str) -> Result<CatalogKey, CatalogError> {
        let s = s.trim();
        let bad = || CatalogError::UnknownKey(s.to_string());
        let (name, rest) = if let Some(i) = s.find('[') {
            let inner = s[i + 1..].strip_suffix(']').ok_or_else(bad)?;
            (&s[..i], Some(inner))
        } else if let Some((n, p)) = s.split_once(':') {
            (n, Some(p))
        } else {
            (s, None)
        };
        let params = match rest {
            None => Vec::new(),
            Some(p) => p
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?,
        };
        let key = CatalogKey { name: name.trim().to_string(), params };
        registered_expectation(&key)?;
        Ok(key)
    }
}

/// Description of a registered name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryInfo {
    /// Name.
    pub name: &'static str,
    /// Number of parameters.
    pub arity: usize,
    /// Human-readable description.
    pub description: &'static str,
}

const ENTRIES: &[EntryInfo] = &[
    EntryInfo { name: "Pyr", arity: 1, description: "pyramid over a k-gon, (k+1,k+1), C_k" },
    EntryInfo { name: "Pri", arity: 1, description: "prism over a k-gon, (2k,k+2), D_k" },
    EntryInfo { name: "TPri", arity: 1, description: "twisted prism (antiprism) over a k-gon, (2k,2k+2), D_k" },
    EntryInfo { name: "DPri", arity: 1, description: "double prism over a k-gon, (3k,2k+2), D_k" },
    EntryInfo { name: "Dia", arity: 1, description: "diamond of order k, (4k+2,3k), D_k" },
    EntryInfo { name: "RT", arity: 1, description: "regular tent over an m-gon (m even), (m+2,m+1), C_2" },
    EntryInfo { name: "TT", arity: 1, description: "twisted tent over a k-gon, (k+2,k+3), C_2 (k even) or C_1" },
    EntryInfo { name: "EB", arity: 2, description: "edge belt of l 2k-gons, (2l(k-1), 2floor((k-1)/2)l+l+2), D_l" },
    EntryInfo { name: "B", arity: 2, description: "vertex belt of l 2k-gons, ((2k-1)l, (1+2floor(k/2))l+2), D_l" },
    EntryInfo { name: "ST", arity: 0, description: "scattered tent, (6,6), C_2" },
    EntryInfo { name: "DT", arity: 0, description: "double tent, (8,8), C_2" },
    EntryInfo { name: "Dih2", arity: 2, description: "explicit D_2 orbit polytopes (10,10),(10,14),(12,12),(14,14),(18,18)" },
    EntryInfo { name: "Rot2", arity: 2, description: "G_2-symmetric base polytope (12,12)" },
    EntryInfo { name: "Tet", arity: 0, description: "tetrahedron, (4,4), T" },
    EntryInfo { name: "TrTet", arity: 0, description: "truncated tetrahedron, (12,8), T" },
    EntryInfo { name: "Oc", arity: 0, description: "octahedron, (6,8), O" },
    EntryInfo { name: "Cub", arity: 0, description: "cube, (8,6), O" },
    EntryInfo { name: "CubOc", arity: 0, description: "cuboctahedron, (12,14), O" },
    EntryInfo { name: "RDo", arity: 0, description: "rhombic dodecahedron, (14,12), O" },
    EntryInfo { name: "TrCub", arity: 0, description: "truncated cube, (24,14), O" },
    EntryInfo { name: "RCubOc", arity: 0, description: "rhombicuboctahedron, (24,26), O" },
    EntryInfo { name: "SnCub", arity: 0, description: "snub cube, (24,38), O" },
    EntryInfo { name: "TrCubOc", arity: 0, description: "truncated cuboctahedron, (48,26), O" },
    EntryInfo { name: "Ico", arity: 0, description: "icosahedron, (12,20), I" },
    EntryInfo { name: "ID", arity: 0, description: "icosidodecahedron, (30,32), I" },
    EntryInfo { name: "TrI", arity: 0, description: "truncated icosahedron, (60,32), I" },
    EntryInfo { name: "RID", arity: 0, description: "rhombicosidodecahedron, (60,62), I" },
    EntryInfo { name: "SnDo", arity: 0, description: "snub dodecahedron, (60,92), I" },
    EntryInfo { name: "TrID", arity: 0, description: "truncated icosidodecahedron, (120,62), I" },
    EntryInfo { name: "Oct", arity: 2, description: "explicit O orbit polytopes (72,50),(30,44),(32,42),(60,38),(54,32)" },
    EntryInfo { name: "Ico", arity: 2, description: "explicit I orbit polytopes (72,50),(72,110),(80,42),(150,92),(180,122)" },
    EntryInfo { name: "PRefl", arity: 2, description: "explicit G_1 orbit polytopes (8,10),(10,10)" },
    EntryInfo { name: "J28", arity: 0, description: "square orthobicupola, (16,18), G_2" },
];

/// All registered names with arity and description.
pub fn list() -> &'static [EntryInfo] {
    ENTRIES
}

const DIH2: &[(i64, i64)] = &[(10, 10), (10, 14), (12, 12), (14, 14), (18, 18)];
const OCT: &[(i64, i64)] = &[(72, 50), (30, 44), (32, 42), (60, 38), (54, 32)];
const ICO: &[(i64, i64)] = &[(72, 50), (72, 110), (80, 42), (150, 92), (180, 122)];
const PREFL: &[(i64, i64)] = &[(8, 10), (10, 10)];

fn fv(a: i64, b: i64) -> FVector {
    FVector::new(a as u64, b as u64)
}

/// The registered f-vector and natural symmetry group of a key.
pub fn registered_expectation(key: &CatalogKey) -> Result<(FVector, GroupSpec), CatalogError> {
    let unknown = || CatalogError::UnknownKey(key.to_string());
    let range = || CatalogError::ParameterOutOfRange(key.to_string());
    let p = &key.params;
    let arity_ok = ENTRIES.iter().any(|e| e.name == key.name && e.arity == p.len());
    if !arity_ok {
        return Err(unknown());
    }
    let pair = |table: &[(i64, i64)], g: GroupSpec| {
        if table.contains(&(p[0], p[1])) {
            Ok((fv(p[0], p[1]), g))
        } else {
            Err(range())
        }
    };
    let c = |n: i64| GroupSpec::c(n as u64);
    let d = |n: i64| GroupSpec::d(n as u64);
    Ok(match (key.name.as_str(), p.as_slice()) {
        ("Pyr", &[k]) if k >= 3 => (fv(k + 1, k + 1), c(k)),
        ("Pri", &[k]) if k >= 3 => (fv(2 * k, k + 2), d(k)),
        ("TPri", &[k]) if k >= 3 => (fv(2 * k, 2 * k + 2), d(k)),
        ("DPri", &[k]) if k >= 3 => (fv(3 * k, 2 * k + 2), d(k)),
        ("Dia", &[k]) if k >= 3 => (fv(4 * k + 2, 3 * k), d(k)),
        ("RT", &[m]) if m >= 4 && m % 2 == 0 => (fv(m + 2, m + 1), c(2)),
        ("TT", &[k]) if k >= 3 => (fv(k + 2, k + 3), if k % 2 == 0 { c(2) } else { c(1) }),
        ("EB", &[k2, l]) if k2 >= 4 && k2 % 2 == 0 && l >= 3 => {
            let k = k2 / 2;
            (fv(2 * l * (k - 1), 2 * ((k - 1) / 2) * l + l + 2), d(l))
        }
        ("B", &[k2, l]) if k2 >= 4 && k2 % 2 == 0 && l >= 3 => {
            let k = k2 / 2;
            (fv((2 * k - 1) * l, (1 + 2 * (k / 2)) * l + 2), d(l))
        }
        ("ST", []) | ("DT", []) => {
            let f = if key.name == "ST" { fv(6, 6) } else { fv(8, 8) };
            (f, c(2))
        }
        ("Dih2", &[_, _]) => pair(DIH2, d(2))?,
        ("Rot2", &[12, 12]) => (fv(12, 12), GroupSpec::g(2)),
        ("Tet", []) => (fv(4, 4), GroupSpec::t()),
        ("TrTet", []) => (fv(12, 8), GroupSpec::t()),
        ("Oc", []) => (fv(6, 8), GroupSpec::o()),
        ("Cub", []) => (fv(8, 6), GroupSpec::o()),
        ("CubOc", []) => (fv(12, 14), GroupSpec::o()),
        ("RDo", []) => (fv(14, 12), GroupSpec::o()),
        ("TrCub", []) => (fv(24, 14), GroupSpec::o()),
        ("RCubOc", []) => (fv(24, 26), GroupSpec::o()),
        ("SnCub", []) => (fv(24, 38), GroupSpec::o()),
        ("TrCubOc", []) => (fv(48, 26), GroupSpec::o()),
        ("Ico", []) => (fv(12, 20), GroupSpec::i()),
        ("ID", []) => (fv(30, 32), GroupSpec::i()),
        ("TrI", []) => (fv(60, 32), GroupSpec::i()),
        ("RID", []) => (fv(60, 62), GroupSpec::i()),
        ("SnDo", []) => (fv(60, 92), GroupSpec::i()),
        ("TrID", []) => (fv(120, 62), GroupSpec::i()),
        ("Oct", &[_, _]) => pair(OCT, GroupSpec::o())?,
        ("Ico", &[_, _]) => pair(ICO, GroupSpec::i())?,
        ("PRefl", &[_, _]) => pair(PREFL, GroupSpec::g(1))?,
        ("J28", []) => (fv(16, 18), GroupSpec::g(2)),
        _ => return Err(range()),
    })
}

type CacheKey = (CatalogKey, GroupSpec, String);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<Polytope>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<Polytope>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Build a catalog polytope symmetric under its registered group.
pub fn build_default(key: &CatalogKey) -> Result<Arc<Polytope>, CatalogError> {
    let (_, spec) = registered_expectation(key)?;
    let g = standard_group(spec)?;
    build(key, &g)
}

/// Build a catalog polytope that is symmetric under `g`.
///
/// Parametric families are constructed in the frame of `g`; fixed solids
/// are constructed under their natural group and must be `g`-symmetric.
pub fn build(key: &CatalogKey, g: &Group) -> Result<Arc<Polytope>, CatalogError> {
    let (expect, _) = registered_expectation(key)?;
    let ck: CacheKey = (key.clone(), g.spec(), format!("{:?}", g.generators()));
    if let Some(p) = cache().read().expect("catalog cache poisoned").get(&ck) {
        return Ok(p.clone());
    }
    let p = construct(key, g)?;
    if p.f_vector() != expect {
        return Err(CatalogError::Construction(
            key.to_string(),
            format!("f-vector {} instead of {}", p.f_vector(), expect),
        ));
    }
    if !is_symmetric(&p, g).unwrap_or(false) {
        return Err(CatalogError::Incompatible(key.to_string(), g.spec().to_string()));
    }
    let p = Arc::new(p.with_provenance(key.to_string()));
    cache().write().expect("catalog cache poisoned").insert(ck, p.clone());
    Ok(p)
}

// ---------------------------------------------------------------------------
// Frame helpers for the axial families.

/// In-plane symmetry of an axial group: rotation order `q` about the axis
/// and whether some element reverses the axis together with a reflection of
/// the plane (dihedral flips).
fn planar(g: &Group) -> Option<(usize, bool)> {
    let d = g.spec().param as usize;
    match g.spec().family {
        Family::C => Some((d, false)),
        Family::D => Some((d, true)),
        Family::G => Some((2 * d, false)),
        _ => None,
    }
}

fn rationalize(x: f64) -> Scalar {
    Scalar::frac((x * 256.0).round() as i64, 256)
}

fn axis_norm(g: &Group) -> f64 {
    g.axis().to_f64().iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Point at polar angle `theta` (measured from the group's perpendicular
/// `w`), radius factor `r` (relative to `|w|`) and height `h` (in units of
/// the axis vector).
fn polar(g: &Group, theta: f64, r: &Scalar, h: &Scalar) -> Vec3 {
    let t = if theta == 0.0 { Scalar::zero() } else { rationalize((theta / 2.0).tan() / axis_norm(g)) };
    &circle_point(g, &t).scale(r) + &g.axis().scale(h)
}

/// Angle of a point in the plane orthogonal to the axis (for sorting).
fn angle_of(g: &Group, p: &Vec3) -> f64 {
    let w = g.perp().to_f64();
    let e = cross(g.axis(), g.perp()).to_f64();
    let x = p.to_f64();
    let a: f64 = (0..3).map(|i| x[i] * w[i]).sum();
    let b: f64 = (0..3).map(|i| x[i] * e[i]).sum();
    b.atan2(a).rem_euclid(2.0 * PI)
}

fn incompatible(key: &str, g: &Group) -> CatalogError {
    CatalogError::Incompatible(key.to_string(), g.spec().to_string())
}

/// Seed angles of a near-regular `k`-gon invariant under the in-plane
/// symmetry of `g`; the polygon is the orbit of the seeds.
fn ring_seeds(g: &Group, k: usize) -> Option<Vec<f64>> {
    let (q, flip) = planar(g)?;
    if k % q != 0 {
        return None;
    }
    let m = k / q;
    let step = 2.0 * PI / k as f64;
    Some(if !flip {
        (0..m).map(|i| step * i as f64).collect()
    } else if m % 2 == 1 {
        (0..=(m - 1) / 2).map(|i| step * i as f64).collect()
    } else {
        (1..=m / 2).map(|i| step * (i as f64 - 0.5)).collect()
    })
}

/// Orbit of seeds given by angle, radius and height; sorted by angle.
fn orbit_of(g: &Group, seeds: &[(f64, Scalar, Scalar)]) -> Vec<Vec3> {
    let pts: Vec<Vec3> = seeds.iter().map(|(t, r, h)| polar(g, *t, r, h)).collect();
    let mut out = orbit_points(g, &pts);
    out.sort_by(|a, b| angle_of(g, a).total_cmp(&angle_of(g, b)));
    out
}

/// A `g`-invariant `k`-gon at height `h` with radius factor `r`. The ring
/// is generated in the plane through the origin and then translated, so it
/// is an exact translate of the ring at height zero.
fn ring(g: &Group, k: usize, r: &Scalar, h: &Scalar, name: &str) -> Result<Vec<Vec3>, CatalogError> {
    let seeds = ring_seeds(g, k).ok_or_else(|| incompatible(name, g))?;
    let s: Vec<_> = seeds.into_iter().map(|t| (t, r.clone(), Scalar::zero())).collect();
    let pts = orbit_of(g, &s);
    if pts.len() != k {
        return Err(incompatible(name, g));
    }
    let lift = g.axis().scale(h);
    Ok(pts.iter().map(|p| p + &lift).collect())
}

fn int(v: i64) -> Scalar {
    Scalar::from_int(v)
}

fn half() -> Scalar {
    Scalar::frac(1, 2)
}

fn hull(name: &str, pts: &[Vec3]) -> Result<Polytope, CatalogError> {
    convex_hull(pts).map_err(|e| CatalogError::Construction(name.to_string(), e.to_string()))
}

/// Antiprism-style ring pair: top and bottom `k`-gons at heights `±h`,
/// radius `r`, rotated against each other. Returns all `2k` points.
fn twisted_pair(g: &Group, k: usize, r: &Scalar, h: &Scalar, name: &str) -> Result<Vec<Vec3>, CatalogError> {
    let (q, flip) = planar(g).ok_or_else(|| incompatible(name, g))?;
    let step = 2.0 * PI / k as f64;
    let neg_h = -h;
    let pts = match g.spec().family {
        // No element reverses the axis: both rings are explicit.
        Family::C => {
            if k % q != 0 {
                return Err(incompatible(name, g));
            }
            let m = k / q;
            let mut s: Vec<_> = (0..m).map(|i| (step * i as f64, r.clone(), h.clone())).collect();
            s.extend((0..m).map(|i| (step * (i as f64 + 0.5), r.clone(), neg_h.clone())));
            orbit_of(g, &s)
        }
        // Flips map angle θ at +h to −θ at −h.
        Family::D if flip => {
            if k % q != 0 {
                return Err(incompatible(name, g));
            }
            let m = k / q;
            let s: Vec<_> = (0..m).map(|i| (step * (i as f64 + 0.25), r.clone(), h.clone())).collect();
            orbit_of(g, &s)
        }
        // Rotary reflection maps θ at +h to θ + π/d at −h.
        _ => {
            let d = q / 2;
            if k % d != 0 {
                return Err(incompatible(name, g));
            }
            let m = k / d;
            let s: Vec<_> = (0..m)
                .map(|i| {
                    let rad = if m % 2 == 0 && i % 2 == 1 { r * &Scalar::frac(3, 4) } else { r.clone() };
                    (step * i as f64, rad, h.clone())
                })
                .collect();
            orbit_of(g, &s)
        }
    };
    if pts.len() != 2 * k {
        return Err(incompatible(name, g));
    }
    Ok(pts)
}

// ---------------------------------------------------------------------------
// Constructions.

fn construct(key: &CatalogKey, g: &Group) -> Result<Polytope, CatalogError> {
    let name = key.to_string();
    let p = &key.params;
    let one = Scalar::one();
    match (key.name.as_str(), p.as_slice()) {
        ("Pyr", &[k]) => {
            let mut pts = ring(g, k as usize, &one, &Scalar::zero(), &name)?;
            pts.push(g.axis().clone());
            hull(&name, &pts)
        }
        ("Pri", &[k]) => {
            let mut pts = ring(g, k as usize, &one, &one, &name)?;
            pts.extend(ring(g, k as usize, &one, &-&one, &name)?);
            hull(&name, &pts)
        }
        ("TPri", &[k]) => hull(&name, &twisted_pair(g, k as usize, &one, &one, &name)?),
        ("DPri", &[k]) => {
            let mut pts = ring(g, k as usize, &one, &Scalar::zero(), &name)?;
            pts.extend(ring(g, k as usize, &half(), &one, &name)?);
            pts.extend(ring(g, k as usize, &half(), &-&one, &name)?);
            hull(&name, &pts)
        }
        ("Dia", &[k]) => {
            let mut pts = ring(g, k as usize, &one, &Scalar::zero(), &name)?;
            pts.extend(twisted_pair(g, k as usize, &half(), &one, &name)?);
            Ok(polar_dual(&hull(&name, &pts)?))
        }
        ("RT", &[m]) => tent(g, m as usize, true, &name),
        ("TT", &[k]) => tent(g, k as usize, false, &name),
        ("EB", &[k2, l]) => belt(g, (k2 / 2) as usize, l as usize, true, &name),
        ("B", &[k2, l]) => belt(g, (k2 / 2) as usize, l as usize, false, &name),
        ("DT", []) if g.spec() == GroupSpec::g(2) => {
            // Twisted double tent: top edge along x, bottom edge along y.
            let pts = [
                Vec3::ints(1, 0, 1),
                Vec3::ints(-1, 0, 1),
                Vec3::ints(0, 1, -1),
                Vec3::ints(0, -1, -1),
                Vec3::ints(2, 2, 0),
                Vec3::ints(-2, 2, 0),
                Vec3::ints(2, -2, 0),
                Vec3::ints(-2, -2, 0),
            ];
            hull(&name, &pts)
        }
        _ => fixed(key, &name),
    }
}

/// Tent over an `m`-gon: a short edge stacked above the polygon, parallel to
/// two polygon edges (regular tent) or to none (twisted tent).
fn tent(g: &Group, m: usize, regular: bool, name: &str) -> Result<Polytope, CatalogError> {
    let poly = ring(g, m, &Scalar::one(), &Scalar::zero(), name)?;
    let v0 = &poly[1] - &poly[0];
    let dir = if regular {
        v0
    } else {
        // Rotate within the plane by a generic rational amount.
        let perp = cross(g.axis(), &v0);
        &v0 + &perp.scale(&Scalar::frac(2, 7))
    };
    for j in 2..12 {
        let eps = Scalar::frac(1, 1 << j);
        let top = g.axis().clone();
        let mut pts = poly.clone();
        pts.push(&top + &dir.scale(&eps));
        pts.push(&top - &dir.scale(&eps));
        let p = hull(name, &pts)?;
        if p.f_vector() == FVector::new(m as u64 + 2, m as u64 + 1 + u64::from(!regular) * 2) {
            return Ok(p);
        }
    }
    Err(CatalogError::Construction(name.to_string(), "no tent placement found".into()))
}

/// Belt of `l` polygons with `2k` vertices in the vertical planes over the
/// sides of an `l`-gon. Neighbours share a vertical edge (edge belt) or a
/// single vertex (vertex belt). The polygon profile is a concave parabola,
/// which makes the stacked rings of equal height convex.
fn belt(g: &Group, k: usize, l: usize, edge: bool, name: &str) -> Result<Polytope, CatalogError> {
    let corners = ring(g, l, &Scalar::one(), &Scalar::zero(), name)?;
    // Profile points (λ, z) of one polygon, λ along the side.
    let mut profile: Vec<(Scalar, Scalar)> = Vec::new();
    let arc = |lam: &Scalar, base: &Scalar| base + &(&int(4) * &(lam * &(&Scalar::one() - lam)));
    if edge {
        let base = Scalar::one();
        for j in 0..k {
            let lam = Scalar::frac(j as i64, k as i64 - 1);
            let z = arc(&lam, &base);
            profile.push((lam.clone(), z.clone()));
            profile.push((lam, -&z));
        }
    } else {
        let base = Scalar::zero();
        for j in 0..=k {
            let lam = Scalar::frac(j as i64, k as i64);
            let z = arc(&lam, &base);
            profile.push((lam.clone(), z.clone()));
            if !z.is_zero() {
                profile.push((lam, -&z));
            }
        }
    }
    let mut pts = Vec::new();
    for i in 0..l {
        let a = &corners[i];
        let b = &corners[(i + 1) % l];
        let side = b - a;
        for (lam, z) in &profile {
            pts.push(&(a + &side.scale(lam)) + &g.axis().scale(z));
        }
    }
    let mut seen = std::collections::HashSet::new();
    pts.retain(|p| seen.insert(p.clone()));
    hull(name, &pts)
}

fn phi() -> Scalar {
    field_golden().theta()
}

fn s(x: i64) -> Scalar {
    int(x)
}

fn q(a: i64, b: i64) -> Scalar {
    Scalar::frac(a, b)
}

/// `a + bΦ` with rational coefficients.
fn gold(a: (i64, i64), b: (i64, i64)) -> Scalar {
    &q(a.0, a.1) + &(&q(b.0, b.1) * &phi())
}

fn v(x: Scalar, y: Scalar, z: Scalar) -> Vec3 {
    Vec3::new(x, y, z)
}

fn orbit_hull(spec: GroupSpec, seeds: &[Vec3], name: &str) -> Result<Polytope, CatalogError> {
    let g = standard_group(spec)?;
    hull(name, &orbit_points(&g, seeds))
}

fn fixed(key: &CatalogKey, name: &str) -> Result<Polytope, CatalogError> {
    let t = GroupSpec::t();
    let o = GroupSpec::o();
    let i = GroupSpec::i();
    let d2 = GroupSpec::d(2);
    let c2 = GroupSpec::c(2);
    let g1 = GroupSpec::g(1);
    let vi = Vec3::ints;
    let p = &key.params;
    match (key.name.as_str(), p.as_slice()) {
        ("ST", []) => orbit_hull(c2, &[vi(-1, 0, 1), vi(1, 1, 0), vi(1, -2, -1)], name),
        ("DT", []) => orbit_hull(c2, &[vi(1, 0, 1), vi(2, 2, 0), vi(2, -2, 0), vi(1, 0, -1)], name),
        ("Dih2", &[10, 10]) => orbit_hull(d2, &[vi(6, 0, 0), vi(1, 1, 1), vi(2, 1, -2)], name),
        ("Dih2", &[10, 14]) => orbit_hull(d2, &[vi(2, 0, 0), vi(1, 1, 1), v(q(3, 4), s(1), q(3, 2))], name),
        ("Dih2", &[12, 12]) => orbit_hull(d2, &[vi(2, 1, 1), vi(-2, 1, 1), vi(1, 0, 2)], name),
        ("Dih2", &[14, 14]) => orbit_hull(d2, &[vi(4, 0, 0), vi(1, 3, 0), vi(2, 0, 1), vi(0, 2, 1)], name),
        ("Dih2", &[18, 18]) => orbit_hull(
            d2,
            &[vi(4, 0, 0), vi(1, 3, 0), vi(2, 0, 1), vi(0, 2, 1), v(q(1, 8), q(23, 8), q(1, 2))],
            name,
        ),
        ("Rot2", &[12, 12]) => orbit_hull(GroupSpec::g(2), &[vi(-3, -1, -3), vi(-3, -1, 1), vi(0, 4, 4)], name),
        ("Tet", []) => orbit_hull(t, &[vi(1, 1, 1)], name),
        ("TrTet", []) => orbit_hull(t, &[vi(3, 1, 1)], name),
        ("Oc", []) => orbit_hull(o, &[vi(1, 0, 0)], name),
        ("Cub", []) => orbit_hull(o, &[vi(1, 1, 1)], name),
        ("CubOc", []) => orbit_hull(o, &[vi(1, 1, 0)], name),
        ("RDo", []) => orbit_hull(o, &[vi(1, 1, 1), vi(2, 0, 0)], name),
        ("TrCub", []) => orbit_hull(o, &[v(q(1, 2), s(1), s(1))], name),
        ("RCubOc", []) => orbit_hull(o, &[vi(1, 1, 2)], name),
        ("SnCub", []) => orbit_hull(o, &[v(s(1), q(1, 2), s(2))], name),
        ("TrCubOc", []) => orbit_hull(o, &[vi(1, 2, 3), vi(2, 1, 3)], name),
        ("Ico", []) => orbit_hull(i, &[v(s(0), s(1), phi())], name),
        ("ID", []) => orbit_hull(i, &[vi(0, 0, 1)], name),
        ("TrI", []) => orbit_hull(i, &[v(s(0), q(1, 3), phi())], name),
        ("RID", []) => orbit_hull(i, &[v(s(1), s(1), gold((1, 1), (2, 1)))], name),
        ("SnDo", []) => orbit_hull(i, &[v(phi(), &phi() * &half(), phi())], name),
        ("TrID", []) => {
            let a = gold((-1, 1), (1, 1));
            let b = gold((1, 1), (-1, 1));
            let c = gold((3, 1), (1, 1));
            orbit_hull(i, &[v(a.clone(), a.clone(), c.clone()), v(b, a, c)], name)
        }
        ("Oct", &[72, 50]) => orbit_hull(o, &[vi(1, 2, 3), vi(3, 2, 1), vi(1, 0, 4)], name),
        ("Oct", &[30, 44]) => orbit_hull(o, &[vi(4, 0, 0), vi(-1, 2, 2)], name),
        ("Oct", &[32, 42]) => orbit_hull(o, &[vi(2, 2, 2), vi(0, 1, 3)], name),
        ("Oct", &[60, 38]) => orbit_hull(o, &[v(q(13, 2), q(13, 2), s(0)), vi(1, 7, 5), vi(1, 7, -5)], name),
        ("Oct", &[54, 32]) => {
            let g = standard_group(o)?;
            let sn = build(&CatalogKey::new("SnCub", &[]), &g)?;
            let st = apply(&OpKind::new(OpTag::CS, 3, 8), &sn, &g)
                .map_err(|e| CatalogError::Construction(name.to_string(), e.to_string()))?;
            Ok(polar_dual(&st))
        }
        ("Ico", &[72, 50]) => orbit_hull(
            i,
            &[vi(1, 0, 1), v(gold((-1, 2), (-1, 2)), s(0), gold((0, 1), (-1, 2)))],
            name,
        ),
        ("Ico", &[72, 110]) => orbit_hull(
            i,
            &[v(s(0), s(1), phi()), v(q(-1, 4), gold((1, 4), (3, 4)), gold((-1, 2), (3, 4)))],
            name,
        ),
        ("Ico", &[80, 42]) => orbit_hull(
            i,
            &[vi(1, 0, 1), v(q(-1, 2), s(0), gold((-1, 2), (-1, 2)))],
            name,
        ),
        ("Ico", &[150, 92]) => orbit_hull(
            i,
            &[
                vi(0, 0, 1),
                v(q(1, 6), gold((-2, 3), (2, 3)), gold((2, 3), (1, 6))),
                v(q(1, 12), gold((-7, 12), (7, 12)), gold((5, 6), (1, 12))),
            ],
            name,
        ),
        ("Ico", &[180, 122]) => orbit_hull(
            i,
            &[
                v(gold((1, 4), (1, 2)), gold((1, 4), (-1, 4)), gold((1, 2), (1, 4))),
                v(gold((1, 1), (-1, 6)), q(-1, 6), gold((5, 6), (1, 6))),
                v(gold((1, 1), (-1, 3)), q(-1, 3), gold((2, 3), (1, 3))),
            ],
            name,
        ),
        ("PRefl", &[8, 10]) => orbit_hull(g1, &[vi(5, 0, 0), vi(0, 5, 0), vi(0, 0, 5), v(s(3), q(-1, 2), q(5, 2))], name),
        ("PRefl", &[10, 10]) => orbit_hull(
            g1,
            &[vi(4, 0, 0), vi(0, 4, 0), vi(-1, 1, 4), vi(1, -1, 4), vi(2, -3, 2)],
            name,
        ),
        ("J28", []) => {
            let pts = [
                v(s(1), q(1, 2), s(0)),
                v(q(1, 2), s(1), s(0)),
                v(q(1, 2), q(1, 2), s(1)),
                v(q(1, 2), q(-1, 2), s(1)),
            ];
            orbit_hull(GroupSpec::g(2), &pts, name)
        }
        _ => Err(CatalogError::UnknownKey(name.to_string())),
    }
}
