use halfspace::hyperbolic::{chordal_distance, dist_h3, MobiusMap, PointH3, SpherePoint};
use halfspace::quasi::{
    boundary_of_bl, compose_bl, distortion_range, estimate_boundary_extension, make_stretch, BLMap,
};
use halfspace::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn random_point(rng: &mut ChaCha8Rng) -> PointH3<f64> {
    PointH3::from_xyt(
        rng.random_range(-4.0..4.0),
        rng.random_range(-4.0..4.0),
        rng.random_range(-4.0f64..3.0).exp(),
    )
    .unwrap()
}

fn rotation(theta: f64) -> MobiusMap<f64> {
    MobiusMap::affine(Complex::from_polar(1.0, theta), c(0.0, 0.0)).unwrap()
}

fn test_maps() -> Vec<BLMap<f64>> {
    let d21 = make_stretch::<f64>([[2.0, 0.0], [0.0, 1.0]]).unwrap();
    let shear = make_stretch::<f64>([[1.0, 0.8], [0.0, 1.0]]).unwrap();
    let third = make_stretch::<f64>([[1.0 / 3.0, 0.0], [0.0, 1.0]]).unwrap();
    let mob = MobiusMap::new(c(1.0, 1.0), c(0.5, 0.0), c(0.3, 0.0), c(1.0, -0.2)).unwrap();
    vec![
        BLMap::identity(),
        d21.clone(),
        shear.clone(),
        third,
        compose_bl(&[d21.clone(), BLMap::isometry(rotation(0.7)), d21.clone()]).unwrap(),
        shear.conjugated(&mob, &mob.inverse()),
        compose_bl(&[
            BLMap::isometry(mob),
            make_stretch::<f64>([[1.5, -0.4], [0.2, 0.7]]).unwrap(),
        ])
        .unwrap(),
    ]
}

#[test]
fn stretch_constants() {
    assert_eq!(
        make_stretch::<f64>([[1.0, 0.0], [0.0, 1.0]]).unwrap().k(),
        1.0
    );
    assert!((make_stretch::<f64>([[2.0, 0.0], [0.0, 1.0]]).unwrap().k() - 2.0).abs() < 1e-15);
    assert!(
        (make_stretch::<f64>([[1.0 / 3.0, 0.0], [0.0, 1.0]])
            .unwrap()
            .k()
            - 3.0)
            .abs()
            < 1e-12
    );
    assert!(make_stretch::<f64>([[1.0, 2.0], [0.5, 1.0]]).is_err());
    let iso = BLMap::isometry(rotation(0.3));
    assert_eq!(compose_bl(&[iso.clone(), iso]).unwrap().k(), 1.0);
    let d21 = make_stretch::<f64>([[2.0, 0.0], [0.0, 1.0]]).unwrap();
    assert!((compose_bl(&[d21.clone(), d21.inverse()]).unwrap().k() - 4.0).abs() < 1e-12);
    assert!(compose_bl::<f64>(&[]).is_err());
}

#[test]
fn stretch_action() {
    let d21 = make_stretch::<f64>([[2.0, 0.0], [0.0, 1.0]]).unwrap();
    let q = d21.apply(&PointH3::new(c(1.0, 1.0), 3.0).unwrap());
    assert_eq!((q.z(), q.t()), (c(2.0, 1.0), 3.0));
}

/// `K⁻¹ d(p, q) ≤ d(Hp, Hq) ≤ K d(p, q)` on 10⁵ seeded pairs per map.
#[test]
fn bl_sandwich_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for h in test_maps() {
        let pairs: Vec<_> = (0..100_000)
            .map(|_| (random_point(&mut rng), random_point(&mut rng)))
            .collect();
        let (lo, hi) = distortion_range(&h, &pairs);
        let slack = 1.0 + 1e-9;
        assert!(
            hi <= h.k() * slack && lo >= 1.0 / (h.k() * slack),
            "K = {}: observed [{lo}, {hi}]",
            h.k()
        );
    }
}

#[test]
fn sandwich_is_nearly_sharp_for_a_single_stretch() {
    // Short horizontal displacements along the stretched axis approach the constant.
    let h = make_stretch::<f64>([[2.0, 0.0], [0.0, 1.0]]).unwrap();
    let (p, q) = (
        PointH3::new(c(0.0, 0.0), 1.0).unwrap(),
        PointH3::new(c(1e-4, 0.0), 1.0).unwrap(),
    );
    let r = dist_h3(&h.apply(&p), &h.apply(&q)) / dist_h3(&p, &q);
    assert!((r - 2.0).abs() < 1e-6);
}

#[test]
fn boundary_extension_respects_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let maps = test_maps();
    for a in &maps {
        for b in &maps {
            let composed = boundary_of_bl(&compose_bl(&[a.clone(), b.clone()]).unwrap());
            let (ba, bb) = (boundary_of_bl(a), boundary_of_bl(b));
            for _ in 0..1000 {
                let z =
                    SpherePoint::finite(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
                let lhs = composed.apply(z);
                let rhs = bb.apply(ba.apply(z));
                assert!(chordal_distance(&lhs, &rhs) < 1e-10, "{lhs:?} vs {rhs:?}");
            }
        }
    }
}

#[test]
fn boundary_extension_examples() {
    let d21 = make_stretch::<f64>([[2.0, 0.0], [0.0, 1.0]]).unwrap();
    assert_eq!(boundary_of_bl(&d21).eval(c(1.0, 1.0)), Some(c(2.0, 1.0)));
    let g = MobiusMap::new(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)).unwrap();
    let z = c(0.4, -0.3);
    let w = boundary_of_bl(&BLMap::isometry(g)).eval(z).unwrap();
    assert!((w - g.apply_complex(z).unwrap()).norm() < 1e-15);
    assert_eq!(boundary_of_bl(&BLMap::<f64>::identity()).eval(z), Some(z));
}

#[test]
fn estimated_extension_converges() {
    let heights: Vec<f64> = (0..=12).map(|k| 10f64.powi(-k / 2)).collect();
    let d21 = make_stretch::<f64>([[2.0, 0.0], [0.0, 1.0]]).unwrap();
    let est = estimate_boundary_extension(&d21, SpherePoint::real(1.0), &heights).unwrap();
    assert!(est.iter().all(|e| *e == SpherePoint::real(2.0)));
    let id = BLMap::<f64>::identity();
    let zeta = SpherePoint::finite(0.3, 0.2);
    assert!(estimate_boundary_extension(&id, zeta, &heights)
        .unwrap()
        .iter()
        .all(|e| *e == zeta));
    let shift = BLMap::isometry(MobiusMap::translation(c(1.0, 0.0)));
    let last = estimate_boundary_extension(&shift, SpherePoint::real(0.0), &[1e-6]).unwrap()[0];
    assert!(chordal_distance(&last, &SpherePoint::real(1.0)) < 1e-6);

    // Errors shrink as the height decreases, up to a factor 2 of noise.
    for h in test_maps() {
        let boundary = boundary_of_bl(&h);
        for zeta in [
            SpherePoint::finite(0.5, -0.25),
            SpherePoint::real(-1.5),
            SpherePoint::Infinity,
        ] {
            let exact = boundary.apply(zeta);
            let errors: Vec<f64> = estimate_boundary_extension(&h, zeta, &heights)
                .unwrap()
                .iter()
                .map(|e| chordal_distance(e, &exact))
                .collect();
            for w in errors.windows(2) {
                assert!(w[1] <= 2.0 * w[0] + 1e-12, "{errors:?}");
            }
            assert!(errors[errors.len() - 1] < 1e-4, "{errors:?}");
        }
    }
}
