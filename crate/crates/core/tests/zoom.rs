use halfspace::hyperbolic::{MobiusMap, PointH3};
use halfspace::quasi::{make_stretch, BLMap};
use halfspace::zoom::{
    asterisk_scan, asterisk_test, conformal_fit, default_directions, default_schedule,
    directional_derivative, disk_ratio, good_line_test, tameness_probe, two_direction_check,
    zoom_step, BoundaryHomeo, DerivativeOptions, Disk, IsometrySequence, Line, RealAffine,
    ScanGrid, ShearProfile,
};
use halfspace::Complex;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn affine(m: [[f64; 2]; 2], b: Complex<f64>) -> BoundaryHomeo<f64> {
    BoundaryHomeo::real_affine(RealAffine::new(m, b).unwrap())
}

fn mobius(a: f64, b: f64, cc: f64, d: f64) -> BoundaryHomeo<f64> {
    BoundaryHomeo::mobius(MobiusMap::new(c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0)).unwrap())
}

#[test]
fn zoom_examples() {
    let id = BoundaryHomeo::<f64>::identity();
    assert_eq!(
        zoom_step(&id, c(0.3, 0.1), 17, c(-1.0, 2.0)).unwrap(),
        c(-1.0, 2.0)
    );
    let h = mobius(0.0, 1.0, -1.0, 1.0); // 1/(1 − z)
    let w = zoom_step(&h, c(0.0, 0.0), 1000, c(0.5, 0.0)).unwrap();
    // Direct evaluation: h_n(w) = 1 + n(1/(1 − w/n) − 1).
    let direct = 1.0 + 1000.0 * (1.0 / (1.0 - 0.5 / 1000.0) - 1.0);
    assert!((w.re - direct).abs() < 1e-9 && w.im.abs() < 1e-12);
    assert!((w - c(1.5, 0.0)).norm() < 5e-3);
}

#[test]
fn derivative_examples() {
    let opts = DerivativeOptions::default();
    let sched = default_schedule::<f64>();
    let sq = BoundaryHomeo::radial_power(2.0).unwrap();
    let d = directional_derivative(&sq, c(1.0, 0.0), c(1.0, 0.0), &sched, &opts).unwrap();
    assert!(d.converged && (d.value.unwrap() - c(2.0, 0.0)).norm() < 1e-6);
    for v in default_directions::<f64>() {
        let d = directional_derivative(&sq, c(0.0, 0.0), v, &sched, &opts).unwrap();
        assert!(d.value.unwrap().norm() < 1e-6);
    }
    let dirs = default_directions();
    assert!(
        !asterisk_test(&sq, c(0.0, 0.0), &dirs, 1e-3, &opts)
            .unwrap()
            .is_asterisk
    );
    assert!(
        asterisk_test(&sq, c(1.0, 0.0), &dirs, 1e-3, &opts)
            .unwrap()
            .is_asterisk
    );
}

#[test]
fn asterisk_scans() {
    let opts = DerivativeOptions::default();
    let dirs = default_directions();
    let grid = ScanGrid {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
        spacing: 0.25,
    };
    let id = asterisk_scan(&BoundaryHomeo::identity(), &grid, &dirs, 1e-3, &opts).unwrap();
    assert_eq!(id.len(), 25);
    assert!(id.iter().all(|r| r.is_asterisk));

    let sq = BoundaryHomeo::radial_power(2.0).unwrap();
    let grid = ScanGrid {
        x0: -0.5,
        x1: 0.5,
        y0: -0.5,
        y1: 0.5,
        spacing: 0.5,
    };
    for r in asterisk_scan(&sq, &grid, &dirs, 1e-3, &opts).unwrap() {
        assert_eq!(r.is_asterisk, r.z != c(0.0, 0.0), "{}", r.z);
    }

    let kink = BoundaryHomeo::shear(ShearProfile::Abs);
    let grid = ScanGrid {
        x0: -1.0,
        x1: 1.0,
        y0: -1.0,
        y1: 1.0,
        spacing: 0.5,
    };
    for r in asterisk_scan(&kink, &grid, &dirs, 1e-3, &opts).unwrap() {
        assert_eq!(r.is_asterisk, r.z.re != 0.0, "{}", r.z);
    }
}

#[test]
fn lines_and_conformality() {
    let kink = BoundaryHomeo::shear(ShearProfile::Abs);
    let real_axis = Line {
        point: c(0.0, 0.0),
        direction: c(1.0, 0.0),
    };
    let fit = good_line_test(&kink, &real_axis, 65, 1e-9).unwrap();
    assert!(!fit.good && fit.max_residual > 0.1);
    let vertical = Line {
        point: c(0.7, 0.0),
        direction: c(0.0, 1.0),
    };
    assert!(good_line_test(&kink, &vertical, 65, 1e-9).unwrap().good);

    let m = MobiusMap::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    let pts: Vec<_> = (0..12)
        .map(|k| Complex::from_polar(0.5, k as f64 * 0.5))
        .collect();
    let fit = conformal_fit(&BoundaryHomeo::mobius(m), &pts).unwrap();
    assert!(fit.max_residual < 1e-9);
    let [a, b, cc, d] = fit.mobius.coefficients();
    let [a0, b0, c0, d0] = m.coefficients();
    let sign = if (a - a0).norm() < 1e-6 { 1.0 } else { -1.0 };
    for (x, y) in [(a, a0), (b, b0), (cc, c0), (d, d0)] {
        assert!((x - y * sign).norm() < 1e-6);
    }

    // Two good transverse directions: conformal members pass, non-conformal ones are rejected.
    let offsets = [-0.5, 0.0, 0.5];
    let rot = affine([[0.6, -0.8], [0.8, 0.6]], c(1.0, -2.0));
    let r = two_direction_check(
        &rot,
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(0.0, 1.0),
        &offsets,
        33,
        1e-9,
        1e-6,
    )
    .unwrap();
    assert!(r.first_good && r.second_good && r.is_conformal);
    let d21 = affine([[2.0, 0.0], [0.0, 1.0]], c(0.0, 0.0));
    let r = two_direction_check(
        &d21,
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(0.0, 1.0),
        &offsets,
        33,
        1e-9,
        1e-6,
    )
    .unwrap();
    assert!(r.first_good && r.second_good && !r.is_conformal);
    assert!(r.conformal.unwrap().max_residual >= 0.1);
}

#[test]
fn disk_ratios() {
    let disk = Disk {
        center: c(0.2, -0.1),
        radius: 0.7,
    };
    for (s1, s2) in [(2.0, 1.0), (3.0, 1.5), (1.0, 4.0)] {
        let r = disk_ratio(&affine([[s1, 0.0], [0.0, s2]], c(0.0, 0.0)), &disk, 1000).unwrap();
        let want = f64::max(s1, s2) / f64::min(s1, s2);
        assert!(
            (r.ratio - want).abs() <= 0.01 * want,
            "{} vs {want}",
            r.ratio
        );
    }
    for h in [
        mobius(2.0, 1.0, 1.0, 1.0),
        mobius(1.0, 0.0, 1.0, 3.0),
        mobius(0.0, -1.0, 1.0, 2.0),
    ] {
        let r = disk_ratio(&h, &disk, 1000).unwrap();
        assert!(r.ratio <= 1.0 + 1e-6, "{}", r.ratio);
    }
}

#[test]
fn tameness_examples() {
    let p = PointH3::new(c(0.2, 0.3), 0.8).unwrap();
    let id = BLMap::<f64>::identity();
    assert!(
        tameness_probe(
            &IsometrySequence::Identity,
            &IsometrySequence::Identity,
            &id,
            &p,
            1024,
            5.0
        )
        .unwrap()
        .bounded
    );
    let grow = IsometrySequence::Homothety {
        center: c(0.0, 0.0),
        exponent: 1.0,
    };
    let origin = PointH3::new(c(0.0, 0.0), 1.0).unwrap();
    let r = tameness_probe(&grow, &IsometrySequence::Identity, &id, &origin, 1024, 5.0).unwrap();
    assert!(!r.bounded && (r.sup_distance - 1024f64.ln()).abs() < 1e-9);
    // Zoom of an affine boundary map realized in H³: g_n shrinks by 1/n about 0 and f_n expands
    // by n about h(0), so f_n ∘ H ∘ g_n = H for every n.
    let h = make_stretch([[2.0, 0.5], [0.0, 1.0]]).unwrap();
    let pre = IsometrySequence::Homothety {
        center: c(0.0, 0.0),
        exponent: -1.0,
    };
    let post = IsometrySequence::Homothety {
        center: c(0.0, 0.0),
        exponent: 1.0,
    };
    let r = tameness_probe(&post, &pre, &h, &p, 1024, 5.0).unwrap();
    assert!(r.bounded && r.late_growth < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn zoom_fixes_the_center(
        n in 1u64..100_000,
        z in (-2.0f64..2.0, -2.0f64..2.0),
        kind in 0usize..4,
    ) {
        let h = match kind {
            0 => mobius(0.0, 1.0, -1.0, 1.0),
            1 => BoundaryHomeo::radial_power(1.5).unwrap(),
            2 => BoundaryHomeo::shear(ShearProfile::Sin),
            _ => affine([[1.0, 2.0], [-0.5, 1.0]], c(0.3, 0.0)),
        };
        let z = c(z.0, z.1);
        prop_assume!(h.eval(z).is_some());
        prop_assert_eq!(zoom_step(&h, z, n, z).unwrap(), h.eval(z).unwrap());
    }

    #[test]
    fn affine_zoom_is_scale_free(m in prop::array::uniform4(-2.0f64..2.0), b in (-1.0f64..1.0, -1.0f64..1.0), z in (-1.0f64..1.0, -1.0f64..1.0), w in (-1.0f64..1.0, -1.0f64..1.0)) {
        let Ok(a) = RealAffine::new([[m[0], m[1]], [m[2], m[3]]], c(b.0, b.1)) else { return Ok(()) };
        let h = BoundaryHomeo::real_affine(a);
        let (z, w) = (c(z.0, z.1), c(w.0, w.1));
        let base = zoom_step(&h, z, 1, w).unwrap();
        for n in [10, 1000] {
            prop_assert!((zoom_step(&h, z, n, w).unwrap() - base).norm() < 1e-12 * base.norm().max(1.0));
        }
        let d = directional_derivative(&h, z, c(1.0, 0.0), &default_schedule(), &DerivativeOptions::default()).unwrap();
        prop_assert!(d.converged);
        prop_assert!((d.value.unwrap() - c(m[0], m[2])).norm() < 1e-9 * (1.0 + c(m[0], m[2]).norm()));
    }

    /// Reparametrizing the line (moving its base point along it, rescaling the direction)
    /// keeps the verdict.
    #[test]
    fn line_verdict_is_reparametrization_invariant(shift in -0.5f64..0.5, scale in 0.5f64..2.0, x in -1.0f64..1.0, vertical in any::<bool>()) {
        let h = BoundaryHomeo::shear(ShearProfile::Abs);
        let dir = if vertical { c(0.0, 1.0) } else { c(1.0, 0.0) };
        let base = Line { point: c(x, 0.0), direction: dir };
        let moved = Line { point: c(x, 0.0) + dir * shift, direction: dir * scale };
        let a = good_line_test(&h, &base, 65, 1e-9).unwrap();
        let b = good_line_test(&h, &moved, 65, 1e-9).unwrap();
        // The lines cover different stretches of the same line; only the kink decides.
        let hits_kink = |l: &Line<f64>| !vertical && l.point.re - l.direction.re.abs() < 0.0 && 0.0 < l.point.re + l.direction.re.abs();
        prop_assert_eq!(a.good, !hits_kink(&base));
        prop_assert_eq!(b.good, !hits_kink(&moved));
        // Same segment, reversed parametrization.
        let reversed = good_line_test(&h, &Line { point: moved.point, direction: -moved.direction }, 65, 1e-9).unwrap();
        prop_assert_eq!(reversed.good, b.good);
        prop_assert!((reversed.max_residual - b.max_residual).abs() < 1e-12);
    }
}
