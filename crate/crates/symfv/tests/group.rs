use std::collections::BTreeSet;

use symfv::group::*;
use symfv::linalg::{det, matmul, matvec, transpose, Mat3, Vec3};
use symfv::scalar::Scalar;

fn sizes(g: &Group) -> Vec<(usize, bool)> {
    let mut v: Vec<(usize, bool)> = nonregular_ray_orbits(g).iter().map(|o| (o.size, o.is_flip)).collect();
    v.sort();
    v
}

fn pairs(list: &[(u64, u64)], n: u64) -> ResidueClassSet {
    ResidueClassSet::from_pairs(n, list)
}

fn all_specs() -> Vec<GroupSpec> {
    let mut v = vec![GroupSpec::t(), GroupSpec::o(), GroupSpec::i(), GroupSpec::c(1), GroupSpec::c(2)];
    for n in 3..=10 {
        v.push(GroupSpec::c(n));
    }
    for d in 2..=8 {
        v.push(GroupSpec::d(d));
    }
    for d in 1..=8 {
        v.push(GroupSpec::g(d));
    }
    v
}

#[test]
fn octahedral_and_icosahedral_generators_close_to_the_right_orders() {
    let o = standard_group(GroupSpec::o()).unwrap();
    assert_eq!(o.order(), 24);
    assert_eq!(det(&o.generators()[0]), Scalar::one());
    let i = standard_group(GroupSpec::i()).unwrap();
    assert_eq!(i.order(), 60);
    for g in i.generators() {
        assert_eq!(matmul(g, &transpose(g)), Mat3::identity());
    }
    assert_eq!(generate(&[Mat3::identity()]).unwrap().len(), 1);
}

#[test]
fn every_standard_group_is_orthogonal_with_the_family_order() {
    for spec in all_specs() {
        let g = standard_group(spec).unwrap();
        assert_eq!(g.order() as u64, spec.order(), "{spec}");
        let neg = (0..g.order()).filter(|&i| g.det_of(i) < 0).count();
        for e in g.elements() {
            assert!(e.is_orthogonal(), "{spec}");
        }
        if spec.family == Family::G {
            assert_eq!(2 * neg, g.order(), "{spec}");
        } else {
            assert_eq!(neg, 0, "{spec}");
        }
    }
}

#[test]
fn point_reflection_group() {
    let g = standard_group(GroupSpec::g(1)).unwrap();
    let els: BTreeSet<String> = g.elements().iter().map(|e| format!("{e:?}")).collect();
    let want: BTreeSet<String> =
        [Mat3::identity(), -&Mat3::identity()].iter().map(|e| format!("{e:?}")).collect();
    assert_eq!(els, want);
}

#[test]
fn dihedral_three_has_order_six_and_c2_squares_to_identity() {
    assert_eq!(standard_group(GroupSpec::d(3)).unwrap().order(), 6);
    let c2 = standard_group(GroupSpec::c(2)).unwrap();
    let r = &c2.generators()[0];
    assert_eq!(matmul(r, r), Mat3::identity());
}

#[test]
fn explosion_cap() {
    let o = standard_group(GroupSpec::o()).unwrap();
    assert_eq!(generate_capped(o.generators(), 10), Err(GroupError::Explosion(10)));
}

#[test]
fn ray_orbit_structure() {
    let d3 = standard_group(GroupSpec::d(3)).unwrap();
    assert_eq!(sizes(&d3), vec![(2, false), (3, true), (3, true)]);
    for d in 3..=8 {
        let g = standard_group(GroupSpec::g(d)).unwrap();
        assert_eq!(sizes(&g), vec![(2, false)], "G_{d}");
    }
    let c2 = standard_group(GroupSpec::c(2)).unwrap();
    assert_eq!(sizes(&c2), vec![(1, true), (1, true)]);
    let t = standard_group(GroupSpec::t()).unwrap();
    assert_eq!(sizes(&t), vec![(4, false), (4, false), (6, true)]);
    let o = standard_group(GroupSpec::o()).unwrap();
    assert_eq!(sizes(&o), vec![(6, false), (8, false), (12, true)]);
    let i = standard_group(GroupSpec::i()).unwrap();
    assert_eq!(sizes(&i), vec![(12, false), (20, false), (30, true)]);
    for spec in all_specs() {
        let g = standard_group(spec).unwrap();
        for orb in nonregular_ray_orbits(&g) {
            assert_eq!(orb.size * orb.stabilizer_order, g.order(), "{spec}");
        }
    }
}

#[test]
fn residue_sets_match_the_classification() {
    let d3 = standard_group(GroupSpec::d(3)).unwrap();
    assert_eq!(residue_set(&d3), pairs(&[(0, 2), (0, 5), (2, 3), (3, 5)], 6));
    let t = standard_group(GroupSpec::t()).unwrap();
    assert_eq!(residue_set(&t), pairs(&[(0, 2), (0, 8), (4, 4), (4, 10), (6, 8)], 12));
    let o = standard_group(GroupSpec::o()).unwrap();
    assert_eq!(residue_set(&o), pairs(&[(0, 2), (0, 14), (6, 8), (6, 20), (8, 18), (12, 14)], 24));
    let i = standard_group(GroupSpec::i()).unwrap();
    assert_eq!(residue_set(&i), pairs(&[(0, 2), (0, 32), (12, 20), (12, 50), (20, 42), (30, 32)], 60));
    for d in 3..=8 {
        let g = standard_group(GroupSpec::g(d)).unwrap();
        assert_eq!(residue_set(&g), pairs(&[(0, 2)], 2 * d), "G_{d}");
    }
    let c2 = standard_group(GroupSpec::c(2)).unwrap();
    assert_eq!(residue_set(&c2).classes.len(), 4);
}

#[test]
fn set_stabilizers_obey_orbit_stabilizer() {
    let o = standard_group(GroupSpec::o()).unwrap();
    let face: Vec<Vec3> = [(1, 1, 1), (1, -1, 1), (-1, -1, 1), (-1, 1, 1)]
        .iter()
        .map(|&(x, y, z)| Vec3::ints(x, y, z))
        .collect();
    let stab = set_stabilizer(&o, &face);
    // Six faces of the cube form one orbit.
    assert_eq!(stab * 6, 24);
    assert_eq!(set_stabilizer(&o, &[Vec3::ints(1, 2, 3)]), 1);
    for d in 2..=6 {
        let g = standard_group(GroupSpec::d(d)).unwrap();
        let u = g.axis().clone();
        let pair = vec![u.clone(), -&u];
        let stab = set_stabilizer(&g, &pair);
        let orbit_size = {
            let mut sets: BTreeSet<String> = BTreeSet::new();
            for e in g.elements() {
                let mut img: Vec<String> = pair.iter().map(|p| format!("{:?}", matvec(e, p))).collect();
                img.sort();
                sets.insert(img.join("|"));
            }
            sets.len()
        };
        assert_eq!(stab * orbit_size, g.order());
        assert_eq!(stab, g.order());
    }
}

#[test]
fn circle_points_lie_on_the_circle_and_rotate_exactly() {
    for spec in [GroupSpec::c(3), GroupSpec::c(5), GroupSpec::d(6), GroupSpec::d(8)] {
        let g = standard_group(spec).unwrap();
        let w2 = g.perp().norm2();
        for (p, q) in [(0, 1), (1, 7), (-3, 5)] {
            let pt = circle_point(&g, &Scalar::frac(p, q));
            assert_eq!(pt.norm2(), w2);
            assert!(symfv::linalg::dot(&pt, g.axis()).is_zero());
        }
    }
}

#[test]
fn spec_syntax_round_trips() {
    for s in ["C:5", "D:2", "T", "O", "I", "G:1"] {
        let spec: GroupSpec = s.parse().unwrap();
        assert_eq!(spec.to_string(), s);
    }
    assert!("D:1".parse::<GroupSpec>().is_err());
    assert!("X:3".parse::<GroupSpec>().is_err());
    assert!("C:0".parse::<GroupSpec>().is_err());
}
