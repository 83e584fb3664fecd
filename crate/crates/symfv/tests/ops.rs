use symfv::group::{standard_group, GroupSpec};
use symfv::hull::{convex_hull, FVector, Polytope};
use symfv::linalg::Vec3;
use symfv::ops::{apply, OpError, OpKind, OpTag};
use symfv::polytope::{classify_type, is_symmetric, orbit_points};

fn cube() -> Polytope {
    let g = standard_group(GroupSpec::o()).unwrap();
    convex_hull(&orbit_points(&g, &[Vec3::ints(1, 1, 1)])).unwrap()
}

fn tet() -> Polytope {
    let g = standard_group(GroupSpec::t()).unwrap();
    convex_hull(&orbit_points(&g, &[Vec3::ints(1, 1, 1)])).unwrap()
}

#[test]
fn all_operations_on_cube_under_o() {
    let g = standard_group(GroupSpec::o()).unwrap();
    let p = cube();
    let cases = [
        (OpTag::CS, 4, 6),
        (OpTag::CC, 3, 8),
        (OpTag::RP, 4, 6),
        (OpTag::RPdual, 3, 8),
        (OpTag::TP, 4, 6),
        (OpTag::TPdual, 3, 8),
        (OpTag::BP, 4, 6),
    ];
    for (tag, k, m) in cases {
        let op = OpKind::new(tag, k, m);
        let q = apply(&op, &p, &g).unwrap_or_else(|e| panic!("{op}: {e}"));
        let (d0, d2) = op.delta();
        assert_eq!(Some(q.f_vector()), p.f_vector().offset(d0, d2), "{op}");
        assert!(is_symmetric(&q, &g).unwrap());
        let flags = classify_type(&q, &g).unwrap();
        assert!(op.type_ok(classify_type(&p, &g).unwrap(), flags), "{op}");
    }
}

#[test]
fn half_prisms_on_truncated_tetrahedron() {
    let g = standard_group(GroupSpec::t()).unwrap();
    let p = convex_hull(&orbit_points(&g, &[Vec3::ints(3, 1, 1)])).unwrap();
    assert_eq!(p.f_vector(), FVector::new(12, 8));
    for tag in [OpTag::HP, OpTag::THP] {
        let op = OpKind::new(tag, 6, 4);
        let q = apply(&op, &p, &g).unwrap_or_else(|e| panic!("{op}: {e}"));
        let (d0, d2) = op.delta();
        assert_eq!(Some(q.f_vector()), p.f_vector().offset(d0, d2));
    }
}

#[test]
fn half_prisms_when_alternating_edges_do_not_enclose_the_facet() {
    // Hexagonal prisms whose alternating edge lines are antiparallel
    // (first) or diverge (second), so no triangle circumscribes the hexagon.
    let g = standard_group(GroupSpec::c(1)).unwrap();
    for hexagon in [
        [(0, 0), (4, 0), (5, 1), (5, 3), (4, 4), (0, 4)],
        [(0, 0), (4, 0), (5, 1), (5, 3), (4, 4), (0, 5)],
    ] {
        let pts: Vec<Vec3> = [0, 1].iter().flat_map(|&z| hexagon.iter().map(move |&(x, y)| Vec3::ints(x, y, z))).collect();
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.f_vector(), FVector::new(12, 8));
        for tag in [OpTag::HP, OpTag::THP] {
            let op = OpKind::new(tag, 6, 1);
            let q = apply(&op, &p, &g).unwrap_or_else(|e| panic!("{op}: {e}"));
            let (d0, d2) = op.delta();
            assert_eq!(Some(q.f_vector()), p.f_vector().offset(d0, d2), "{op}");
            assert!(is_symmetric(&q, &g).unwrap());
        }
    }
}

#[test]
fn regular_prism_cubed_on_tetrahedron() {
    let g = standard_group(GroupSpec::t()).unwrap();
    let mut p = tet();
    for _ in 0..3 {
        p = apply(&OpKind::new(OpTag::RP, 3, 4), &p, &g).unwrap();
    }
    assert_eq!(p.f_vector(), FVector::new(40, 40));
}

#[test]
fn missing_target_is_reported() {
    let g = standard_group(GroupSpec::o()).unwrap();
    let err = apply(&OpKind::new(OpTag::CS, 5, 6), &cube(), &g).unwrap_err();
    assert!(matches!(err, OpError::NoMatchingTarget(_)));
}
