//! Membership in the Steinitz set `F` and in the set `F(G)` of f-vectors of
//! `G`-symmetric polytopes, cone decompositions, and the cross-check of the
//! congruence skeleton against the residue engine.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::group::{residue_set, standard_group, Family, GroupError, GroupSpec};
pub use crate::group::ResidueClassSet;
use crate::hull::FVector;

/// `f ∈ F`: `2f0 − f2 ≥ 4` and `2f2 − f0 ≥ 4`.
#[allow(non_snake_case)]
pub fn in_F(f: FVector) -> bool {
    let (a, b) = (f.f0 as i64, f.f2 as i64);
    2 * a - b >= 4 && 2 * b - a >= 4
}

/// One congruence class of a classification clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRule {
    /// Residue of `f0`.
    pub p: u64,
    /// Residue of `f2`.
    pub q: u64,
    /// Optional refinement `2f0 − f2 ≥ bound`.
    pub bound: Option<i64>,
}

/// The classification clause of a group: congruence classes modulo `n`
/// (closed under the diamond at query time), refinements and exclusions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    /// Modulus.
    pub modulus: u64,
    /// Classes `(p, q)` with `p ≤ q`.
    pub classes: Vec<ClassRule>,
    /// Whether the diamond (swap) closure applies.
    pub diamond: bool,
    /// Excluded f-vectors.
    pub exclusions: Vec<FVector>,
}

fn rule(p: u64, q: u64) -> ClassRule {
    ClassRule { p, q, bound: None }
}

fn refined(p: u64, q: u64, bound: i64) -> ClassRule {
    ClassRule { p, q, bound: Some(bound) }
}

/// The classification clause for a group.
pub fn clause(spec: GroupSpec) -> Clause {
    let fv = FVector::new;
    let (modulus, classes, diamond, exclusions) = match (spec.family, spec.param) {
        (Family::C, 1) => (1, vec![rule(0, 0)], true, vec![]),
        (Family::C, 2) => (2, vec![rule(0, 0), rule(0, 1), rule(1, 1)], true, vec![]),
        (Family::C, n) => (n, vec![rule(1, 1), refined(0, 2, 2 * n as i64 - 2)], true, vec![]),
        (Family::D, 2) => (4, vec![rule(0, 0), rule(0, 2), rule(2, 2)], true, vec![fv(6, 6)]),
        (Family::D, d) => {
            let b = 3 * d as i64 - 2;
            (2 * d, vec![rule(0, 2), rule(2, d), refined(0, d + 2, b), refined(d, d + 2, b)], true, vec![])
        }
        (Family::T, _) => (12, vec![rule(0, 2), rule(0, 8), rule(4, 4), rule(4, 10), rule(6, 8)], true, vec![]),
        (Family::O, _) => (
            24,
            vec![rule(0, 2), rule(0, 14), rule(6, 8), rule(6, 20), rule(8, 18), rule(12, 14)],
            true,
            vec![],
        ),
        (Family::I, _) => (
            60,
            vec![rule(0, 2), rule(0, 32), rule(12, 20), rule(12, 50), rule(20, 42), rule(30, 32)],
            true,
            vec![],
        ),
        (Family::G, 1) => (2, vec![rule(0, 0)], false, vec![fv(4, 4), fv(6, 6)]),
        (Family::G, 2) => (4, vec![rule(0, 0), rule(0, 2)], true, vec![]),
        (Family::G, d) => (2 * d, vec![rule(0, 2)], true, vec![]),
    };
    Clause { modulus, classes, diamond, exclusions }
}

/// Result of a membership query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    /// Whether `f ∈ F(G)`.
    pub member: bool,
    /// Human-readable description of the matching (or failing) clause.
    pub clause: String,
    /// The matching class `(p, q)`, if any.
    pub class: Option<(u64, u64)>,
    /// Whether the match was through the swapped vector.
    pub via_swap: bool,
    /// Exclusion that removed `f`, if any.
    pub exclusion: Option<String>,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", if self.member { "member" } else { "non-member" }, self.clause)
    }
}

/// The class rule matched by `f` itself (no swap), if any.
pub fn matching_rule(c: &Clause, f: FVector) -> Option<ClassRule> {
    let n = c.modulus;
    c.classes.iter().copied().find(|r| {
        f.f0 % n == r.p
            && f.f2 % n == r.q
            && r.bound.map_or(true, |b| 2 * f.f0 as i64 - f.f2 as i64 >= b)
    })
}

/// Decide `f ∈ F(G)`.
#[allow(non_snake_case)]
pub fn in_FG(spec: GroupSpec, f: FVector) -> Decision {
    let c = clause(spec);
    let non = |clause: String, exclusion: Option<String>| Decision {
        member: false,
        clause,
        class: None,
        via_swap: false,
        exclusion,
    };
    if !in_F(f) {
        return non(format!("{f} violates 2f0-f2>=4 or 2f2-f0>=4"), None);
    }
    if c.exclusions.contains(&f) {
        return non(format!("{f} is excluded for {spec}"), Some(f.to_string()));
    }
    let describe = |r: &ClassRule, swapped: bool| {
        let mut s = format!("({},{}) mod {}", r.p, r.q, c.modulus);
        if let Some(b) = r.bound {
            s.push_str(&format!(" with 2f0-f2>={b}"));
        }
        if swapped {
            s.push_str(" via swap");
        }
        s
    };
    if let Some(r) = matching_rule(&c, f) {
        return Decision { member: true, clause: describe(&r, false), class: Some((r.p, r.q)), via_swap: false, exclusion: None };
    }
    if c.diamond {
        if let Some(r) = matching_rule(&c, f.swap()) {
            return Decision { member: true, clause: describe(&r, true), class: Some((r.p, r.q)), via_swap: true, exclusion: None };
        }
    }
    non(format!("{f} matches no class of {spec}"), None)
}

/// Cone points of the residue class `(p, q)` modulo `n`: returns `m` and
/// `v1, v2, v3` such that `{f ∈ F : f ≡ (p,q)} = (p,q) + {v1,v2,v3} + nC`
/// with `C` the cone spanned by `(n,2n)` and `(2n,n)`. Here `m` is the
/// smallest multiple of `n` with `m ≥ 4 + p − 2q`.
pub fn cone_points(p: u64, q: u64, n: u64) -> (i64, FVector, FVector, FVector) {
    cone_points_bounded(p, q, n, 4)
}

/// [`cone_points`] for the region `F ∩ {2f0 − f2 ≥ bound}` (`bound ≥ 4`):
/// each `v_k` is shifted by `(2n, n)` until `(p,q) + v_k` satisfies the
/// bound. With `bound = 4` this is exactly the three-case formula.
pub fn cone_points_bounded(p: u64, q: u64, n: u64, bound: i64) -> (i64, FVector, FVector, FVector) {
    let (p, q, n) = (p as i64, q as i64, n as i64);
    let lo = 4 + p - 2 * q;
    let m = lo.div_euclid(n) * n + if lo.rem_euclid(n) == 0 { 0 } else { n };
    let v = |s: i64| {
        let (mut x, mut y) = (s, s);
        while 2 * (p + x) - (q + y) < bound {
            x += 2 * n;
            y += n;
        }
        FVector::new(x as u64, y as u64)
    };
    (m, v(m), v(m + n), v(m + 2 * n))
}

/// The three roots `(p,q) + v_k` of a (possibly refined) class, in slot
/// order `k = 1, 2, 3`.
pub fn class_roots(p: u64, q: u64, n: u64, bound: Option<i64>) -> [FVector; 3] {
    let (_, v1, v2, v3) = cone_points_bounded(p, q, n, bound.unwrap_or(4).max(4));
    let add = |v: FVector| FVector::new(v.f0 + p, v.f2 + q);
    [add(v1), add(v2), add(v3)]
}

/// The class roots of every class of a group's clause, in clause order.
pub fn roots_of(spec: GroupSpec) -> Vec<(ClassRule, [FVector; 3])> {
    let c = clause(spec);
    c.classes.iter().map(|r| (*r, class_roots(r.p, r.q, c.modulus, r.bound))).collect()
}

/// Decompose `f = root + a·(n,2n) + b·(2n,n)` with nonnegative integers:
/// for `x = f − root`, `a = (2x2 − x1)/(3n)` and `b = (2x1 − x2)/(3n)`.
pub fn decompose(f: FVector, root: FVector, n: u64) -> Option<(u64, u64)> {
    let x1 = f.f0 as i64 - root.f0 as i64;
    let x2 = f.f2 as i64 - root.f2 as i64;
    let d = 3 * n as i64;
    let (a, b) = (2 * x2 - x1, 2 * x1 - x2);
    if a < 0 || b < 0 || a % d != 0 || b % d != 0 {
        return None;
    }
    Some(((a / d) as u64, (b / d) as u64))
}

/// Comparison of the clause's congruence skeleton with the residue engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueReport {
    /// The group.
    pub group: String,
    /// Modulus.
    pub modulus: u64,
    /// Classes from the classification clause (swap-closed).
    pub theorem: Vec<(u64, u64)>,
    /// Classes derived from the ray-orbit structure of the group.
    pub engine: Vec<(u64, u64)>,
    /// Whether they agree.
    pub equal: bool,
}

/// Swap-closed congruence skeleton of the clause (refinements and
/// exclusions ignored).
pub fn skeleton(spec: GroupSpec) -> ResidueClassSet {
    let c = clause(spec);
    let pairs: Vec<(u64, u64)> = c.classes.iter().map(|r| (r.p, r.q)).collect();
    ResidueClassSet::from_pairs(c.modulus, &pairs)
}

/// Cross-check the clause skeleton against the residue engine.
pub fn verify_residue_engine(spec: GroupSpec) -> Result<ResidueReport, GroupError> {
    let g = standard_group(spec)?;
    let engine = residue_set(&g);
    let theorem = skeleton(spec);
    Ok(ResidueReport {
        group: spec.to_string(),
        modulus: theorem.modulus,
        equal: engine == theorem,
        theorem: theorem.representatives(),
        engine: engine.representatives(),
    })
}
