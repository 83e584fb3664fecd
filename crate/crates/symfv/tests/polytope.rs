use proptest::prelude::*;
use symfv::catalog::{build_default, CatalogKey};
use symfv::group::{standard_group, GroupSpec};
use symfv::hull::{convex_hull, FVector, Polytope};
use symfv::linalg::Vec3;
use symfv::polytope::{classify_type, is_symmetric, orbit_points, polar_dual, Action, TypeFlags};

fn solid(name: &str) -> Polytope {
    (*build_default(&name.parse::<CatalogKey>().unwrap()).unwrap()).clone()
}

fn orbit_hull(spec: GroupSpec, (x, y, z): (i64, i64, i64)) -> Option<Polytope> {
    let g = standard_group(spec).unwrap();
    convex_hull(&orbit_points(&g, &[Vec3::ints(x, y, z), Vec3::ints(z, x + 1, y)])).ok()
}

#[test]
fn cube_and_octahedron_are_dual() {
    let o = standard_group(GroupSpec::o()).unwrap();
    let cube = solid("Cub");
    let oc = polar_dual(&cube);
    assert_eq!(oc.f_vector(), FVector::new(6, 8));
    assert!(is_symmetric(&oc, &o).unwrap());
    // The dual of the centered cube has its vertices on the coordinate axes.
    for v in oc.vertices() {
        assert_eq!((0..3).filter(|&i| !v.get(i).is_zero()).count(), 1, "{v:?}");
    }
}

#[test]
fn dual_is_an_involution_on_the_catalog() {
    for (name, spec) in [
        ("Tet", GroupSpec::t()),
        ("TrTet", GroupSpec::t()),
        ("CubOc", GroupSpec::o()),
        ("SnCub", GroupSpec::o()),
        ("Ico", GroupSpec::i()),
        ("Pri:5", GroupSpec::d(5)),
        ("TT:4", GroupSpec::c(2)),
    ] {
        let g = standard_group(spec).unwrap();
        let p = solid(name);
        let d = polar_dual(&p);
        assert_eq!(d.f_vector(), p.f_vector().swap(), "{name}");
        assert!(is_symmetric(&d, &g).unwrap(), "{name}");
        let dd = polar_dual(&d);
        assert_eq!(dd.f_vector(), p.f_vector(), "{name}");
        assert_eq!(classify_type(&d, &g).unwrap(), classify_type(&p, &g).unwrap().swapped(), "{name}");
    }
}

#[test]
fn type_flags_of_small_examples() {
    let c1 = standard_group(GroupSpec::c(1)).unwrap();
    let t = standard_group(GroupSpec::t()).unwrap();
    let tet = solid("Tet");
    assert_eq!(classify_type(&tet, &c1).unwrap(), TypeFlags::new(true, true));
    assert_eq!(classify_type(&tet, &t).unwrap(), TypeFlags::new(false, false));
    // Truncated tetrahedron: simple vertices in a free orbit, triangles fixed by a 3-fold rotation.
    assert_eq!(classify_type(&solid("TrTet"), &t).unwrap(), TypeFlags::new(false, true));
    let c5 = standard_group(GroupSpec::c(5)).unwrap();
    let flags = classify_type(&solid("Pyr:5"), &c5).unwrap();
    assert!(flags.base && flags.left && flags.right);
}

#[test]
fn symmetry_detects_missing_elements() {
    let o = standard_group(GroupSpec::o()).unwrap();
    let t = standard_group(GroupSpec::t()).unwrap();
    assert!(is_symmetric(&solid("Cub"), &t).unwrap());
    assert!(!is_symmetric(&solid("TrTet"), &o).unwrap());
    assert!(!is_symmetric(&solid("Tet"), &o).unwrap());
}

#[test]
fn orbit_stabilizer_on_facets_and_vertices() {
    for (name, spec) in [("TrCubOc", GroupSpec::o()), ("RCubOc", GroupSpec::o()), ("ID", GroupSpec::i())] {
        let g = standard_group(spec).unwrap();
        let p = solid(name);
        let act = Action::new(&p, &g).unwrap();
        for v in 0..p.vertices().len() {
            assert_eq!(act.vertex_orbit(v).len() * act.vertex_stabilizer(v), g.order(), "{name}");
        }
        for f in 0..p.facets().len() {
            assert_eq!(act.facet_orbit(f).len() * act.facet_stabilizer(f), g.order(), "{name}");
        }
        let covered: usize = act.facet_orbits(p.facets().len()).iter().map(Vec::len).sum();
        assert_eq!(covered, p.facets().len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn orbit_polytopes_behave(x in 1i64..7, y in 0i64..7, z in 0i64..7, fam in 0u8..3) {
        let spec = [GroupSpec::t(), GroupSpec::o(), GroupSpec::d(2)][fam as usize];
        let p = orbit_hull(spec, (x, y, z));
        prop_assume!(p.is_some(), "flat point set");
        let p = p.unwrap();
        let g = standard_group(spec).unwrap();
        let f = p.f_vector();
        prop_assert_eq!(f.f0 as i64 - p.edge_count() as i64 + f.f2 as i64, 2);
        prop_assert!(is_symmetric(&p, &g).unwrap());
        let d = polar_dual(&p);
        prop_assert_eq!(d.f_vector(), f.swap());
        prop_assert!(is_symmetric(&d, &g).unwrap());
        prop_assert_eq!(polar_dual(&d).f_vector(), f);
        prop_assert_eq!(classify_type(&d, &g).unwrap(), classify_type(&p, &g).unwrap().swapped());
        // Hull idempotence.
        let again = convex_hull(p.vertices()).unwrap();
        prop_assert_eq!(again.f_vector(), f);
        prop_assert_eq!(again.vertices().len(), p.vertices().len());
    }
}
