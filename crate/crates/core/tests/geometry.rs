use helixforms::geometry::{build_mesh, connecting_path, Circle, DomainM, QuadratureSettings};
use proptest::prelude::*;

/// Outer radius 3 with two holes placed on either side of the y-axis.
fn domain() -> impl Strategy<Value = DomainM> {
    (-0.5..0.5f64, 0.3..0.8f64, -0.5..0.5f64, 0.3..0.8f64).prop_map(|(y1, r1, y2, r2)| {
        DomainM::new(Circle::new([0.0, 0.0], 3.0), vec![Circle::new([-1.3, y1], r1), Circle::new([1.3, y2], r2)]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mesh_area_matches_the_domain(dom in domain()) {
        let mesh = build_mesh(&dom, QuadratureSettings { level: 2, ..Default::default() }).unwrap();
        prop_assert!((mesh.area() - dom.area()).abs() < 1e-5 * dom.area());
        prop_assert!(mesh.points().iter().all(|p| dom.contains(*p, 1e-12)));
        prop_assert!(mesh.weights().iter().all(|w| *w > 0.0));
    }

    #[test]
    fn connecting_paths_stay_inside(dom in domain()) {
        for (i, k) in [(1, 2), (1, 3), (2, 3), (3, 1)] {
            let path = connecting_path(&dom, i, k).unwrap();
            prop_assert!(path.start() == dom.anchor(i).unwrap());
            prop_assert!(path.end() == dom.anchor(k).unwrap());
            for p in path.sample(400) {
                prop_assert!(dom.contains(p, 1e-9));
            }
        }
    }

    #[test]
    fn boundary_orientation_signs_area(dom in domain()) {
        let signed: f64 = dom.boundary_circles().iter().map(|c| c.signed_area()).sum();
        prop_assert!((signed - dom.area()).abs() < 1e-10);
    }
}

#[test]
fn invalid_domains_are_rejected() {
    let outer = Circle::new([0.0, 0.0], 2.0);
    assert!(DomainM::new(outer, vec![Circle::new([1.8, 0.0], 0.5)]).is_err());
    assert!(DomainM::new(outer, vec![Circle::new([0.0, 0.0], 0.5), Circle::new([0.6, 0.0], 0.5)]).is_err());
    assert!(DomainM::annulus(2.0, 1.0).is_err());
    assert!(DomainM::annulus(1.0, 2.0).unwrap().with_anchors(vec![[2.0, 0.0], [0.9, 0.0]]).is_err());
}
