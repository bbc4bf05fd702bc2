use proptest::prelude::*;

use torus_orbit_core::linalg::{self, Vec2};
use torus_orbit_core::mcg_algebra::{lefschetz_number, IntMatrix2};
use torus_orbit_core::rotation::{
    convex_hull, hull_contains, normalize_irrotational, orbit_displacement, rho_mu, EmpiricalMeasure,
    Irrotationality,
};
use torus_orbit_core::surfaces::{product_map, CircleLift, CircleTerm};
use torus_orbit_core::torus_maps::{check_equivariance, validate_diffeo, FourierMap, FourierTerm, TorusMap, Validation};

fn unimodular() -> impl Strategy<Value = IntMatrix2> {
    let letters = [
        IntMatrix2::new(1, 1, 0, 1).unwrap(),
        IntMatrix2::new(1, 0, 1, 1).unwrap(),
        IntMatrix2::new(0, 1, 1, 0).unwrap(),
        IntMatrix2::MINUS_IDENTITY,
    ];
    prop::collection::vec((0usize..4, any::<bool>()), 0..6).prop_map(move |word| {
        word.into_iter().fold(IntMatrix2::IDENTITY, |acc, (i, inv)| {
            let g = if inv { letters[i].inverse() } else { letters[i] };
            acc.checked_mul(&g).unwrap()
        })
    })
}

fn term() -> impl Strategy<Value = FourierTerm> {
    ((-2i64..=2, -2i64..=2), prop::array::uniform4(-0.04f64..0.04))
        .prop_filter("nonzero frequency", |((a, b), _)| *a != 0 || *b != 0)
        .prop_map(|((a, b), c)| FourierTerm { k: [a, b], cos: [c[0], c[1]], sin: [c[2], c[3]] })
}

fn torus_map(class: impl Strategy<Value = IntMatrix2>) -> impl Strategy<Value = TorusMap> {
    (class, prop::array::uniform2(-1.0f64..1.0), prop::collection::vec(term(), 0..3))
        .prop_map(|(m, t, terms)| FourierMap::new(m, t, terms).unwrap().into())
}

fn point() -> impl Strategy<Value = Vec2> {
    prop::array::uniform2(0.0f64..1.0)
}

fn measure() -> impl Strategy<Value = EmpiricalMeasure> {
    prop::collection::vec((point(), 0.1f64..1.0), 1..8).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let (points, weights): (Vec<_>, Vec<_>) = atoms.into_iter().map(|(p, w)| (p, w / total)).unzip();
        EmpiricalMeasure::new(points, weights).unwrap()
    })
}

fn circle_lift(degree: i8) -> impl Strategy<Value = CircleLift> {
    (-1.0f64..1.0, -0.1f64..0.1).prop_map(move |(t, s)| {
        CircleLift::new(degree, t, vec![CircleTerm { k: 1, cos: 0.0, sin: s }]).unwrap()
    })
}

proptest! {
    #[test]
    fn lefschetz_is_one_minus_trace_plus_det(m in unimodular()) {
        prop_assert_eq!(lefschetz_number(&m), 1 - m.trace() + m.det());
    }

    #[test]
    fn displacements_add_over_horizons(f in torus_map(Just(IntMatrix2::IDENTITY)), x in point(), n in 1usize..40, k in 1usize..40) {
        let (whole, end) = orbit_displacement(&f, x, n + k).unwrap();
        let (first, mid) = orbit_displacement(&f, x, n).unwrap();
        let (second, end2) = orbit_displacement(&f, mid, k).unwrap();
        prop_assert!(linalg::norm(linalg::sub(whole, linalg::add(first, second))) < 1e-10);
        prop_assert!(linalg::torus_distance(end, end2) < 1e-10);
    }

    #[test]
    fn rotation_vector_is_affine_in_the_measure(f in torus_map(Just(IntMatrix2::IDENTITY)), a in measure(), b in measure(), s in 0.0f64..1.0) {
        let mix = EmpiricalMeasure::mixture(&[(s, &a), (1.0 - s, &b)]).unwrap();
        let expected = linalg::add(linalg::scale(s, rho_mu(&f, &a).unwrap()), linalg::scale(1.0 - s, rho_mu(&f, &b).unwrap()));
        prop_assert!(linalg::norm(linalg::sub(rho_mu(&f, &mix).unwrap(), expected)) < 1e-12);
    }

    #[test]
    fn normalized_lifts_have_small_rotation(v in (-5i64..=5, -5i64..=5), eps in prop::array::uniform2(-4e-4f64..4e-4), mu in measure()) {
        let f = TorusMap::translation([v.0 as f64 + eps[0], v.1 as f64 + eps[1]]);
        let tol = 1e-3;
        match normalize_irrotational(&f, std::slice::from_ref(&mu), tol).unwrap() {
            Irrotationality::Normalized { map, shift } => {
                prop_assert_eq!(shift, [v.0, v.1]);
                prop_assert!(linalg::norm(rho_mu(&map, &mu).unwrap()) <= tol);
            }
            Irrotationality::NotIrrotational { .. } => prop_assert!(false, "not normalized"),
        }
    }

    #[test]
    fn product_map_lefschetz(g1 in prop_oneof![circle_lift(1), circle_lift(-1)], g2 in prop_oneof![circle_lift(1), circle_lift(-1)]) {
        use torus_orbit_core::surfaces::CircleMap;
        let p = product_map(&g1, &g2);
        let expected = (1 - g1.degree() as i64) * (1 - g2.degree() as i64);
        prop_assert_eq!(lefschetz_number(&p.class()), expected);
    }

    #[test]
    fn composition_multiplies_classes(f in torus_map(unimodular()), g in torus_map(unimodular()), x in point()) {
        let fg = f.compose(&g);
        let class = f.class().checked_mul(&g.class()).unwrap();
        prop_assert_eq!(fg.class(), class);
        for e in [[1.0, 0.0], [0.0, 1.0]] {
            let d = linalg::sub(fg.evaluate(linalg::add(x, e)).unwrap(), fg.evaluate(x).unwrap());
            prop_assert!(linalg::norm(linalg::sub(d, class.apply_f64(e))) < 1e-9);
        }
    }

    #[test]
    fn lifts_are_equivariant(f in torus_map(unimodular())) {
        prop_assert!(check_equivariance(&f, 8, 0).unwrap() < 1e-9);
        let diffeo = matches!(validate_diffeo(&f, 32).unwrap(), Validation::Valid { min_abs_det } if min_abs_det > 0.05);
        prop_assume!(diffeo);
        prop_assert!(check_equivariance(&f.inverse(), 4, 1).unwrap() < 1e-9);
    }

    #[test]
    fn hulls_grow_with_their_point_sets(pts in prop::collection::vec(prop::array::uniform2(-3.0f64..3.0), 1..20), extra in prop::collection::vec(prop::array::uniform2(-3.0f64..3.0), 0..10)) {
        let small = convex_hull(&pts);
        let mut all = pts.clone();
        all.extend(extra);
        let big = convex_hull(&all);
        for p in &pts {
            prop_assert!(hull_contains(&small, *p, 1e-9));
        }
        for v in &small {
            prop_assert!(hull_contains(&big, *v, 1e-9));
        }
    }
}
