use super::*;

fn spec(id: u32) -> ProblemSpec {
    builtin_problem(id, &ProblemParams::default()).unwrap()
}

fn all_specs() -> Vec<ProblemSpec> {
    let mut v: Vec<ProblemSpec> = BUILTIN_IDS.map(spec).collect();
    v.push(
        builtin_problem(
            2,
            &ProblemParams {
                kappa: Some(8.0),
                ..Default::default()
            },
        )
        .unwrap(),
    );
    v
}

// deterministic points in the domain
fn lattice(domain: &Rect, n: usize) -> Vec<Point2> {
    let mut pts = Vec::new();
    let mut s = 0.123_f64;
    for _ in 0..n {
        s = (s * 997.0 + 0.297).fract();
        let t = (s * 613.0 + 0.711).fract();
        pts.push(Point2::new(
            domain.x_min + domain.width() * (0.02 + 0.96 * s),
            domain.y_min + domain.height() * (0.02 + 0.96 * t),
        ));
        s = t;
    }
    pts
}

fn fd_gradient(f: &ScalarField, p: &Point2) -> Vector2 {
    let h = 1e-5;
    let d = |e: Vector2| {
        (-f(&(p + 2.0 * e)) + 8.0 * f(&(p + e)) - 8.0 * f(&(p - e)) + f(&(p - 2.0 * e)))
            / (12.0 * h)
    };
    Vector2::new(d(Vector2::new(h, 0.0)), d(Vector2::new(0.0, h)))
}

fn away_from_trouble(s: &ProblemSpec, p: &Point2) -> bool {
    // kinks of the piecewise solutions and the singular point
    (p.x + p.y).abs() > 1e-3 && p.coords.norm() > 1e-2 && s.interface.distance_estimate(p) > 1e-3
}

#[test]
fn circular_outer_solution_value() {
    let u = spec(1).exact(RegionId::Region1, &Point2::new(0.6, 0.0));
    let expected = -(0.25 * (1.0 - 1.0 / 80.0 - 1.0 / 10.0) + (0.6f64.powi(4) / 2.0 + 0.36)) / 10.0;
    assert!((u - expected).abs() < 1e-15);
    assert_eq!(spec(1).region_of(&Point2::new(0.6, 0.0)), RegionId::Region1);
    assert_eq!(spec(1).region_of(&Point2::new(0.4, 0.0)), RegionId::Region2);
}

#[test]
fn graph_problem_branch_values() {
    let s = spec(5);
    assert_eq!(s.exact(RegionId::Region2, &Point2::new(0.5, 0.5)), 1.0);
    assert_eq!(s.region_of(&Point2::new(0.5, 0.5)), RegionId::Region2);
    assert_eq!(s.region_of(&Point2::new(-0.5, 0.5)), RegionId::Region1);
    let s = spec(8);
    for p in lattice(&s.domain, 20) {
        assert_eq!(
            s.exact_gradient(RegionId::Region1, &p).unwrap(),
            Vector2::zeros()
        );
    }
}

#[test]
fn unknown_problem_is_rejected() {
    assert!(matches!(
        builtin_problem(11, &ProblemParams::default()),
        Err(Error::UnknownProblem(11))
    ));
    assert!(builtin_problem(0, &ProblemParams::default()).is_err());
}

#[test]
fn hand_derived_forcing_values() {
    let s = spec(1);
    for p in lattice(&s.domain, 20) {
        // inside: -∇·(2∇(1 - r²)) = 8
        assert!((s.forcing(RegionId::Region2, &p).unwrap() - 8.0).abs() < 1e-7);
        let r2 = p.coords.norm_squared();
        assert!((s.forcing(RegionId::Region1, &p).unwrap() - (8.0 * r2 + 4.0)).abs() < 1e-7);
    }
    for id in 5..=10 {
        let s = spec(id);
        for p in lattice(&s.domain, 10) {
            assert!(s.forcing(RegionId::Region1, &p).unwrap().abs() < 1e-9);
        }
    }
}

#[test]
fn ellipse_forcing_matches_independent_derivation() {
    for b in [10.0, 1000.0] {
        let s = builtin_problem(
            3,
            &ProblemParams {
                b: Some(b),
                ..Default::default()
            },
        )
        .unwrap();
        for p in lattice(&s.domain, 20) {
            let r2 = p.coords.norm_squared();
            let f1 = 20.0 * (-r2).exp() * (1.0 - r2);
            assert!((s.forcing(RegionId::Region1, &p).unwrap() - f1).abs() <= 1e-7);
            // e^x cos y is harmonic
            assert!(s.forcing(RegionId::Region2, &p).unwrap().abs() <= 1e-7 * b);
        }
    }
}

#[test]
fn helmholtz_forcing_matches_independent_derivation() {
    for k in [2.0f64, 8.0] {
        let s = builtin_problem(
            2,
            &ProblemParams {
                kappa: Some(k),
                ..Default::default()
            },
        )
        .unwrap();
        for p in lattice(&s.domain, 20) {
            let f1 = 8.0 * k * k * (k * p.x).sin() * (k * p.y).cos();
            let f2 = 40.0 + k * k * p.coords.norm_squared();
            assert!((s.forcing(RegionId::Region1, &p).unwrap() - f1).abs() <= 1e-7 * k * k);
            assert!((s.forcing(RegionId::Region2, &p).unwrap() - f2).abs() <= 1e-7 * k * k);
        }
    }
}

#[test]
fn finite_difference_and_analytic_forcing_agree() {
    for s in all_specs() {
        let analytic = s.clone().with_forcing(ForcingMode::Analytic);
        for p in lattice(&s.domain, 40) {
            if !away_from_trouble(&s, &p) {
                continue;
            }
            for r in [RegionId::Region1, RegionId::Region2] {
                let fd = s.forcing(r, &p).unwrap();
                let an = analytic.forcing(r, &p).unwrap();
                assert!(
                    (fd - an).abs() <= 1e-7 * (1.0 + an.abs()),
                    "{}: {r:?} at {p:?}: {fd} vs {an}",
                    s.name
                );
            }
        }
    }
}

#[test]
fn exact_gradients_match_differences() {
    for s in all_specs() {
        for p in lattice(&s.domain, 40) {
            if !away_from_trouble(&s, &p) {
                continue;
            }
            for r in [RegionId::Region1, RegionId::Region2] {
                let g = s.exact_gradient(r, &p).unwrap();
                let fd = fd_gradient(&s.data(r).solution, &p);
                assert!(
                    (g - fd).norm() <= 1e-7 * (1.0 + g.norm()),
                    "{} {r:?} {p:?}",
                    s.name
                );
            }
        }
    }
}

fn interface_samples(s: &ProblemSpec, n: usize) -> Vec<(Point2, Vector2)> {
    s.interface
        .sample(&s.domain, n)
        .points
        .into_iter()
        .filter(|p| p.coords.norm() > 1e-2 && s.domain.contains(p, -1e-3))
        .map(|p| {
            let g = s.interface.level_set_gradient(&p);
            // level set grows into Region1, so its gradient points inward
            (p, -g / g.norm())
        })
        .collect()
}

#[test]
fn jump_data_is_consistent() {
    for s in all_specs() {
        for (p, n1) in interface_samples(&s, 50) {
            let (phi, psi) = s.jump_data(&p, &n1).unwrap();
            let direct = s.exact(RegionId::Region1, &p) - s.exact(RegionId::Region2, &p);
            assert_eq!(phi, direct);
            let fd_flux = |r: RegionId| fd_gradient(&s.data(r).solution, &p) * s.coefficient(r, &p);
            let psi_fd = fd_flux(RegionId::Region1).dot(&n1) - fd_flux(RegionId::Region2).dot(&n1);
            assert!((psi - psi_fd).abs() <= 1e-6, "{} at {p:?}", s.name);
        }
    }
}

#[test]
fn circular_jumps_are_constant() {
    let s = spec(1);
    for (p, n1) in interface_samples(&s, 50) {
        let (phi, psi) = s.jump_data(&p, &n1).unwrap();
        // u(0.5) - v(0.5) and (A1 u_r - A2 v_r)(-1) at r = 1/2
        let u = -(0.25 * (1.0 - 1.0 / 80.0 - 1.0 / 10.0) + (0.0625 / 2.0 + 0.25)) / 10.0;
        assert!((phi - (u - 0.75)).abs() < 1e-12);
        assert!((psi + 0.75).abs() < 1e-12);
    }
}

#[test]
fn region_predicate_agrees_with_interface_normals() {
    for s in all_specs() {
        for (p, n1) in interface_samples(&s, 50) {
            let q = s.interface.project(&p);
            assert_eq!(
                s.region_of(&(q - 1e-6 * n1)),
                RegionId::Region1,
                "{}",
                s.name
            );
            assert_eq!(
                s.region_of(&(q + 1e-6 * n1)),
                RegionId::Region2,
                "{}",
                s.name
            );
        }
    }
}

#[test]
fn singular_point_is_guarded() {
    for id in [7, 10] {
        let s = spec(id);
        assert!(s.forcing(RegionId::Region2, &Point2::origin()).is_err());
        assert!(s
            .exact_gradient(RegionId::Region2, &Point2::new(1e-13, 0.0))
            .is_err());
        assert!(s
            .forcing(RegionId::Region2, &Point2::new(0.01, -0.3))
            .is_ok());
    }
}

#[test]
fn homogeneous_and_scaled_variants() {
    let s = spec(3);
    let h = s.homogeneous();
    let n1 = Vector2::new(1.0, 0.0);
    for p in lattice(&s.domain, 10) {
        for r in [RegionId::Region1, RegionId::Region2] {
            assert_eq!(h.forcing(r, &p).unwrap(), 0.0);
            assert_eq!(h.boundary_value(r, &p), 0.0);
        }
        assert_eq!(h.jump_data(&p, &n1).unwrap(), (0.0, 0.0));
    }
    let s = spec(1).with_forcing(ForcingMode::Analytic);
    let scaled = s.with_scaled_coefficients(10.0);
    for p in lattice(&s.domain, 10) {
        let r = RegionId::Region1;
        assert_eq!(scaled.exact(r, &p), s.exact(r, &p));
        let ratio = scaled.forcing(r, &p).unwrap() / s.forcing(r, &p).unwrap();
        assert!((ratio - 10.0).abs() < 1e-12);
    }
}
