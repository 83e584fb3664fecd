//! The finite groups of rotations and rotary reflections as explicit exact
//! matrix groups, together with their ray-orbit analysis.
//!
//! Every group carries a *frame*: a rotation axis `u` and a perpendicular
//! vector `w` (for dihedral groups, one of the two-fold flip axes). Catalog
//! constructions for the axial families place their polygons in the plane
//! spanned by `w` and `u × w`, so they work unchanged whether the group is
//! realized about the z-axis or about the body diagonal `(1,1,1)`.
//!
//! Orders 3 and 6 are realized about `(1,1,1)`, where the rotation matrices
//! are rational; all other axial groups whose rotation angle is not a
//! multiple of `π/2` are realized about the z-axis over the smallest
//! cyclotomic field containing their cosines and sines.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::linalg::{cross, det, dot, matmul, matvec, rot_z, Mat3, Vec3};
use crate::scalar::{cos_sin, field_for_rotation, field_golden, field_rationals, Field, Scalar, ScalarError};

/// Default cap on the order of a generated group.
pub const DEFAULT_GROUP_CAP: usize = 240;

/// Errors from group construction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    /// Closure exceeded the size cap.
    #[error("group closure exceeds {0} elements")]
    Explosion(usize),
    /// A generator is not orthogonal.
    #[error("generator {0} is not orthogonal")]
    NotOrthogonal(usize),
    /// Bad family parameter.
    #[error("invalid group parameter: {0}")]
    InvalidParameter(String),
    /// Field construction failed.
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Group family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Cyclic rotation group `C_n`.
    C,
    /// Dihedral rotation group `D_d`.
    D,
    /// Tetrahedral rotation group `T`.
    T,
    /// Octahedral rotation group `O`.
    O,
    /// Icosahedral rotation group `I`.
    I,
    /// Rotary-reflection group `G_d`.
    G,
}

/// A group family together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSpec {
    /// Family tag.
    pub family: Family,
    /// `n` for `C`, `d` for `D` and `G`; ignored (stored as 0) for `T`, `O`, `I`.
    pub param: u64,
}

impl GroupSpec {
    /// `C_n`.
    pub fn c(n: u64) -> GroupSpec {
        GroupSpec { family: Family::C, param: n }
    }
    /// `D_d`.
    pub fn d(d: u64) -> GroupSpec {
        GroupSpec { family: Family::D, param: d }
    }
    /// `G_d`.
    pub fn g(d: u64) -> GroupSpec {
        GroupSpec { family: Family::G, param: d }
    }
    /// The tetrahedral group.
    pub fn t() -> GroupSpec {
        GroupSpec { family: Family::T, param: 0 }
    }
    /// The octahedral group.
    pub fn o() -> GroupSpec {
        GroupSpec { family: Family::O, param: 0 }
    }
    /// The icosahedral group.
    pub fn i() -> GroupSpec {
        GroupSpec { family: Family::I, param: 0 }
    }

    /// Check the parameter range of the family.
    pub fn validate(&self) -> Result<(), GroupError> {
        let ok = match self.family {
            Family::C => self.param >= 1,
            Family::D => self.param >= 2,
            Family::G => self.param >= 1,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(GroupError::InvalidParameter(self.to_string()))
        }
    }

    /// The group order given by the family formula.
    pub fn order(&self) -> u64 {
        match self.family {
            Family::C => self.param,
            Family::D | Family::G => 2 * self.param,
            Family::T => 12,
            Family::O => 24,
            Family::I => 60,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::C => write!(f, "C:{}", self.param),
            Family::D => write!(f, "D:{}", self.param),
            Family::G => write!(f, "G:{}", self.param),
            Family::T => f.write_str("T"),
            Family::O => f.write_str("O"),
            Family::I => f.write_str("I"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    /// Parse `C:n`, `D:d`, `G:d`, `T`, `O` or `I`.
    fn from_str(s: &str) -> Result<GroupSpec, GroupError> {
        let s = s.trim();
        let bad = || GroupError::InvalidParameter(format!("cannot parse group {s:?}"));
        let spec = match s {
            "T" => GroupSpec::t(),
            "O" => GroupSpec::o(),
            "I" => GroupSpec::i(),
            _ => {
                let (fam, p) = s.split_once(':').ok_or_else(bad)?;
                let p: u64 = p.trim().parse().map_err(|_| bad())?;
                match fam.trim() {
                    "C" => GroupSpec::c(p),
                    "D" => GroupSpec::d(p),
                    "G" => GroupSpec::g(p),
                    _ => return Err(bad()),
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A finite orthogonal matrix group.
#[derive(Clone)]
pub struct Group {
    spec: GroupSpec,
    elements: Vec<Mat3>,
    dets: Vec<i32>,
    generators: Vec<Mat3>,
    field: Field,
    axis: Vec3,
    perp: Vec3,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({}, order {})", self.spec, self.elements.len())
    }
}

/// Close a generating set under multiplication.
///
/// The result is tagged with `spec` and `field`; callers that only need the
/// element list can pass any spec.
pub fn generate(generators: &[Mat3]) -> Result<Vec<Mat3>, GroupError> {
    generate_capped(generators, DEFAULT_GROUP_CAP)
}

/// [`generate`] with an explicit size cap.
pub fn generate_capped(generators: &[Mat3], cap: usize) -> Result<Vec<Mat3>, GroupError> {
    for (i, g) in generators.iter().enumerate() {
        if !g.is_orthogonal() {
            return Err(GroupError::NotOrthogonal(i));
        }
    }
    let id = Mat3::identity();
    let mut seen: HashSet<Mat3> = HashSet::new();
    let mut out = vec![id.clone()];
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(a) = queue.pop_front() {
        for g in generators {
            let b = matmul(g, &a);
            if seen.insert(b.clone()) {
                if out.len() >= cap {
                    return Err(GroupError::Explosion(cap));
                }
                out.push(b.clone());
                queue.push_back(b);
            }
        }
    }
    Ok(out)
}

fn v3(x: Scalar, y: Scalar, z: Scalar) -> Vec3 {
    Vec3::new(x, y, z)
}

/// Rational rotation by 60° about `(1,1,1)`.
fn rat_rot6() -> Mat3 {
    Mat3::ints([[2, -1, 2], [2, 2, -1], [-1, 2, 2]]).scale(&Scalar::frac(1, 3))
}

/// Rational rotation by 120° about `(1,1,1)` (cyclic coordinate shift).
fn rat_rot3() -> Mat3 {
    Mat3::ints([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
}

/// Half-turn about `(1,−1,0)`.
fn rat_flip_diag() -> Mat3 {
    Mat3::ints([[0, -1, 0], [-1, 0, 0], [0, 0, -1]])
}

/// Reflection in the plane orthogonal to `(1,1,1)`.
fn rat_reflect_diag() -> Mat3 {
    Mat3::ints([[1, -2, -2], [-2, 1, -2], [-2, -2, 1]]).scale(&Scalar::frac(1, 3))
}

/// Rotation about the z-axis by `2π/n` in the given field.
fn z_rotation(field: &Field, n: u64) -> Result<Mat3, GroupError> {
    let (c, s) = cos_sin(field, 1, n)?;
    Ok(rot_z(&c, &s))
}

/// The field in which `standard_group(spec)` is realized.
pub fn group_field(spec: &GroupSpec) -> Result<Field, GroupError> {
    spec.validate()?;
    let rot_order = match spec.family {
        Family::C => spec.param,
        Family::D => spec.param,
        Family::G => 2 * spec.param,
        Family::T | Family::O => return Ok(field_rationals()),
        Family::I => return Ok(field_golden()),
    };
    if matches!(rot_order, 1 | 2 | 3 | 4 | 6) {
        Ok(field_rationals())
    } else {
        Ok(field_for_rotation(rot_order)?)
    }
}

/// Build the standard realization of a group family.
pub fn standard_group(spec: GroupSpec) -> Result<Group, GroupError> {
    spec.validate()?;
    let field = group_field(&spec)?;
    let z_axis = Vec3::ints(0, 0, 1);
    let x_axis = Vec3::ints(1, 0, 0);
    let diag = Vec3::ints(1, 1, 1);
    let anti = Vec3::ints(1, -1, 0);
    let flip_x = Mat3::ints([[1, 0, 0], [0, -1, 0], [0, 0, -1]]);
    let sigma_z = Mat3::ints([[1, 0, 0], [0, 1, 0], [0, 0, -1]]);
    let (generators, axis, perp) = match spec.family {
        Family::C => match spec.param {
            3 => (vec![rat_rot3()], diag, anti),
            6 => (vec![rat_rot6()], diag, anti),
            n => (vec![z_rotation(&field, n)?], z_axis, x_axis),
        },
        Family::D => match spec.param {
            3 => (vec![rat_rot3(), rat_flip_diag()], diag, anti),
            6 => (vec![rat_rot6(), rat_flip_diag()], diag, anti),
            d => (vec![z_rotation(&field, d)?, flip_x], z_axis, x_axis),
        },
        Family::G => match spec.param {
            3 => (vec![matmul(&rat_rot6(), &rat_reflect_diag())], diag, anti),
            d => (vec![matmul(&z_rotation(&field, 2 * d)?, &sigma_z)], z_axis, x_axis),
        },
        Family::T => (
            vec![Mat3::ints([[-1, 0, 0], [0, -1, 0], [0, 0, 1]]), rat_rot3()],
            z_axis,
            x_axis,
        ),
        Family::O => (
            vec![
                Mat3::ints([[0, -1, 0], [1, 0, 0], [0, 0, 1]]),
                Mat3::ints([[1, 0, 0], [0, 0, -1], [0, 1, 0]]),
            ],
            z_axis,
            x_axis,
        ),
        Family::I => (icosahedral_generators(&field), z_axis, x_axis),
    };
    let elements = generate(&generators)?;
    debug_assert_eq!(elements.len() as u64, spec.order());
    let dets = elements.iter().map(|e| det(e).sign()).collect();
    Ok(Group { spec, elements, dets, generators, field, axis, perp })
}

fn icosahedral_generators(phi_field: &Field) -> Vec<Mat3> {
    let phi = phi_field.theta();
    let h = Scalar::frac(1, 2);
    let hp = &h * &phi;
    let a = &hp - &h; // Φ/2 − 1/2
    let m = Mat3::from_rows(
        v3(h.clone(), a.clone(), -&hp),
        v3(-&a, -&hp, -&h),
        v3(-&hp, h.clone(), -&a),
    );
    vec![
        Mat3::ints([[-1, 0, 0], [0, -1, 0], [0, 0, 1]]),
        Mat3::ints([[0, 0, 1], [1, 0, 0], [0, 1, 0]]),
        m,
    ]
}

impl Group {
    /// Wrap an arbitrary closed element list (for tests and ad-hoc groups).
    pub fn from_generators(spec: GroupSpec, generators: Vec<Mat3>, field: Field) -> Result<Group, GroupError> {
        let elements = generate(&generators)?;
        let dets = elements.iter().map(|e| det(e).sign()).collect();
        Ok(Group {
            spec,
            elements,
            dets,
            generators,
            field,
            axis: Vec3::ints(0, 0, 1),
            perp: Vec3::ints(1, 0, 0),
        })
    }

    /// The family and parameter.
    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    /// All elements; the identity comes first.
    pub fn elements(&self) -> &[Mat3] {
        &self.elements
    }

    /// Generators used to build the group.
    pub fn generators(&self) -> &[Mat3] {
        &self.generators
    }

    /// Group order `|G|`.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Field containing all matrix entries.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Determinant sign of element `i`.
    pub fn det_of(&self, i: usize) -> i32 {
        self.dets[i]
    }

    /// Main rotation axis of the frame.
    pub fn axis(&self) -> &Vec3 {
        &self.axis
    }

    /// Frame vector perpendicular to the axis (a flip axis for `D_d`).
    pub fn perp(&self) -> &Vec3 {
        &self.perp
    }

    /// Apply element `i` to a point.
    pub fn apply(&self, i: usize, p: &Vec3) -> Vec3 {
        matvec(&self.elements[i], p)
    }

    /// Indices of elements mapping the point set onto itself.
    pub fn set_stabilizer_elements(&self, points: &[Vec3]) -> Vec<usize> {
        let set: HashSet<&Vec3> = points.iter().collect();
        (0..self.order())
            .filter(|&i| points.iter().all(|p| set.contains(&self.apply(i, p))))
            .collect()
    }

    /// Order of the set-wise stabilizer of the point set.
    pub fn set_stabilizer(&self, points: &[Vec3]) -> usize {
        self.set_stabilizer_elements(points).len()
    }

    /// The deduplicated orbit `G·p`, in element order.
    pub fn orbit(&self, p: &Vec3) -> Vec<Vec3> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for e in &self.elements {
            let q = matvec(e, p);
            if seen.insert(q.clone()) {
                out.push(q);
            }
        }
        out
    }
}

/// Free-function form of [`Group::set_stabilizer`].
pub fn set_stabilizer(group: &Group, points: &[Vec3]) -> usize {
    group.set_stabilizer(points)
}

/// How a non-regular ray orbit sits in the group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Carrier {
    /// Rays on rotation axes of the given order.
    Axis {
        /// Order of the rotation subgroup fixing each ray.
        fold: usize,
    },
    /// Anything else.
    FreeForm,
}

/// An orbit of rays under the group.
#[derive(Debug, Clone)]
pub struct RayOrbit {
    /// A vector spanning one ray of the orbit.
    pub representative: Vec3,
    /// Number of rays in the orbit.
    pub size: usize,
    /// Order of the stabilizer of one ray.
    pub stabilizer_order: usize,
    /// Stabilizer is the identity plus a single half-turn.
    pub is_flip: bool,
    /// Axis description.
    pub carrier: Carrier,
}

/// Canonical representative of the ray through `v`: scaled so that the
/// first nonzero coordinate has absolute value one.
pub fn ray_key(v: &Vec3) -> Vec3 {
    let lead = v.0.iter().find(|c| !c.is_zero()).expect("zero vector has no ray").abs();
    Vec3([&v.0[0] / &lead, &v.0[1] / &lead, &v.0[2] / &lead])
}

/// Ray equality: `cross(r,s) = 0` and `dot(r,s) > 0`.
pub fn same_ray(r: &Vec3, s: &Vec3) -> bool {
    cross(r, s).is_zero() && dot(r, s).sign() > 0
}

/// Fixed axis of a non-identity rotation (nonzero solution of `(A−I)x = 0`).
pub fn rotation_axis(a: &Mat3) -> Vec3 {
    let m = a - &Mat3::identity();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = cross(m.row(i), m.row(j));
        if !c.is_zero() {
            return c;
        }
    }
    panic!("rotation_axis called on the identity");
}

/// All non-regular ray orbits: the orbits of rays on rotation axes.
pub fn nonregular_ray_orbits(group: &Group) -> Vec<RayOrbit> {
    let id = Mat3::identity();
    let mut rays: Vec<Vec3> = Vec::new();
    let mut seen: HashSet<Vec3> = HashSet::new();
    for (i, e) in group.elements().iter().enumerate() {
        if group.det_of(i) < 0 || *e == id {
            continue;
        }
        let ax = rotation_axis(e);
        for r in [ax.clone(), -&ax] {
            let k = ray_key(&r);
            if seen.insert(k.clone()) {
                rays.push(k);
            }
        }
    }
    let mut assigned: HashMap<Vec3, usize> = HashMap::new();
    let mut out: Vec<RayOrbit> = Vec::new();
    for r in &rays {
        if assigned.contains_key(r) {
            continue;
        }
        let idx = out.len();
        let mut orbit: HashSet<Vec3> = HashSet::new();
        let mut stab: Vec<usize> = Vec::new();
        for (i, e) in group.elements().iter().enumerate() {
            let img = ray_key(&matvec(e, r));
            if img == *r {
                stab.push(i);
            }
            orbit.insert(img);
        }
        for k in &orbit {
            assigned.insert(k.clone(), idx);
        }
        let is_flip = stab.len() == 2
            && stab.iter().all(|&i| group.det_of(i) > 0)
            && stab.iter().any(|&i| group.elements()[i] != id);
        out.push(RayOrbit {
            representative: r.clone(),
            size: orbit.len(),
            stabilizer_order: stab.len(),
            is_flip,
            carrier: Carrier::Axis { fold: stab.len() },
        });
    }
    out.sort_by(|a, b| (a.size, !a.is_flip).cmp(&(b.size, !b.is_flip)).then(a.representative.lex_cmp(&b.representative)));
    out
}

/// A set of residue pairs modulo `n`, closed under swapping coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClassSet {
    /// The modulus `n`.
    pub modulus: u64,
    /// Residue pairs `(p, q)` with `0 ≤ p, q < n`, closed under swap.
    pub classes: BTreeSet<(u64, u64)>,
}

impl ResidueClassSet {
    /// Build from a list of pairs, reducing mod `n` and closing under swap.
    pub fn from_pairs(modulus: u64, pairs: &[(u64, u64)]) -> ResidueClassSet {
        let mut classes = BTreeSet::new();
        for &(p, q) in pairs {
            let (p, q) = (p % modulus, q % modulus);
            classes.insert((p, q));
            classes.insert((q, p));
        }
        ResidueClassSet { modulus, classes }
    }

    /// True when `(f0, f2) mod n` is one of the classes.
    pub fn contains(&self, f0: u64, f2: u64) -> bool {
        self.classes.contains(&(f0 % self.modulus, f2 % self.modulus))
    }

    /// Canonical representatives `p ≤ q` of the classes.
    pub fn representatives(&self) -> Vec<(u64, u64)> {
        self.classes.iter().copied().filter(|(p, q)| p <= q).collect()
    }
}

/// Residues of `f(P) mod |G|` allowed by the non-regular ray orbits: the
/// Minkowski sum of `{(|X|,0)}^⋄` over non-flip orbits `X` and of
/// `{(0,0),(|X|,0)}^⋄` over flip orbits, reduced mod `|G|`.
pub fn residue_set(group: &Group) -> ResidueClassSet {
    let n = group.order() as u64;
    let mut acc: BTreeSet<(u64, u64)> = BTreeSet::from([(0, 0)]);
    for orbit in nonregular_ray_orbits(group) {
        let s = orbit.size as u64 % n;
        let mut summand = vec![(s, 0), (0, s)];
        if orbit.is_flip {
            summand.push((0, 0));
        }
        let mut next = BTreeSet::new();
        for &(a, b) in &acc {
            for &(c, d) in &summand {
                next.insert(((a + c) % n, (b + d) % n));
            }
        }
        acc = next;
    }
    let pairs: Vec<(u64, u64)> = acc.into_iter().collect();
    ResidueClassSet::from_pairs(n, &pairs)
}

/// The points `p(t)` on the circle through `w` in the plane orthogonal to
/// the group axis `u`, parametrized rationally:
/// `p(t) = ((1 − c t²) w + 2t e) / (1 + c t²)` with `e = u × w` and
/// `c = |e|²/|w|²`. All such points have `|p| = |w|`.
pub fn circle_point(group: &Group, t: &Scalar) -> Vec3 {
    let w = group.perp();
    let e = cross(group.axis(), w);
    let c = &e.norm2() / &w.norm2();
    let ct2 = &c * &(t * t);
    let one = Scalar::one();
    let den = &one + &ct2;
    let a = &(&one - &ct2) / &den;
    let b = &(&Scalar::from_int(2) * t) / &den;
    &w.scale(&a) + &e.scale(&b)
}
