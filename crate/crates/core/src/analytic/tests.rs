use super::*;
use crate::params::{Damper, Forcing, StringParams};
use num_complex::Complex64;

fn paper_params() -> (StringParams, Damper) {
    (
        StringParams::new(10.0, 0.08, 1.0).unwrap(),
        Damper::new(4.5, 10.0).unwrap(),
    )
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

// Reference values computed with a 60-digit multiprecision evaluation of the
// closed-form expressions, frozen here.
const AUX_Z: Complex64 = Complex64::new(0.039968089263537475, 1.0007984053541343);
const AUX_BETA1: Complex64 = Complex64::new(-8.2809378311366984, -5.0950414086178378);
const AUX_BETA2: Complex64 = Complex64::new(-2.6020434066421990, -3.3586980315076119);
const AUX_GAMMA: Complex64 = Complex64::new(-22.066288774425381, -13.081848360806464);
const AUX_ETA: Complex64 = Complex64::new(1.8804145439553656, -7.5782560216072977);
const H_UNI_HALF_I: Complex64 = Complex64::new(3.8738386902674567, -4.3299272871397155);
const H_BND_2I: Complex64 = Complex64::new(0.16680050528978594, -0.097852397444194724);
const H_UNI_1_1: Complex64 = Complex64::new(0.10033416297835327, -0.38978752932115009);
const G_BND_X7: Complex64 = Complex64::new(8.6633158760723264e-5, -7.8475904852018145e-5);
const G_UNI_X2: Complex64 = Complex64::new(-0.14536144155549928, -0.15402572579734353);
// series region (|z|*l = 0.0938), switch point (0.1) and direct region (0.1058)
const H_UNI_SEAM_BELOW: Complex64 = Complex64::new(8.3285368971900833, -0.17565553729826255);
const H_BND_SEAM_BELOW: Complex64 = Complex64::new(0.49978654329715071, -0.0078476420105765317);
const H_UNI_SEAM_AT: Complex64 = Complex64::new(8.3271424717067200, -0.19954044661089342);
const H_BND_SEAM_AT: Complex64 = Complex64::new(0.49972448695598354, -0.0089147380773249046);
const H_UNI_SEAM_ABOVE: Complex64 = Complex64::new(8.3255675652673391, -0.22345720796156254);
const H_BND_SEAM_ABOVE: Complex64 = Complex64::new(0.49965439866315295, -0.0099832596216766435);
// deep right half-plane, Re(z)*l = 2000.4 and 10000.4
const H_UNI_S200: Complex64 = Complex64::new(2.4944198845259188e-5, 0.0);
const H_BND_S200: Complex64 = Complex64::new(0.00049990002999000350, 0.0);
const H_UNI_S1000: Complex64 = Complex64::new(9.9955338483936995e-7, 0.0);
const H_BND_S1000: Complex64 = Complex64::new(9.9996000239984001e-5, 0.0);
// z ~ 0 with a = g*s far from zero (the other removable point, s near -d)
const H_UNI_NEAR_MINUS_D: Complex64 = Complex64::new(-4.1679417868530636, -0.0015691208846634622);
const H_BND_NEAR_MINUS_D: Complex64 = Complex64::new(-0.055612227517169158, -6.9914687647056338e-5);

#[test]
fn aux_matches_multiprecision_reference() {
    let (params, damper) = paper_params();
    let aux = aux_quantities(Complex64::new(0.0, 1.0), &params, &damper);
    assert!(rel(aux.z, AUX_Z) < 1e-15);
    assert!(rel(aux.beta1.value(), AUX_BETA1) < 1e-13);
    assert!(rel(aux.beta2.value(), AUX_BETA2) < 1e-13);
    assert!(rel(aux.gamma.value(), AUX_GAMMA) < 1e-13);
    assert!(rel(aux.eta.value(), AUX_ETA) < 1e-13);
}

#[test]
fn aux_vanishes_at_s_zero() {
    let (params, damper) = paper_params();
    let aux = aux_quantities(Complex64::new(0.0, 0.0), &params, &damper);
    assert_eq!(aux.z, Complex64::new(0.0, 0.0));
    assert_eq!(aux.beta1.value(), Complex64::new(0.0, 0.0));
    assert_eq!(aux.beta2.value(), Complex64::new(0.0, 0.0));
    assert_eq!(aux.gamma.value(), Complex64::new(0.0, 0.0));
    assert_eq!(aux.eta.value(), Complex64::new(0.0, 0.0));
}

#[test]
fn aux_gain_zero_reduces_eta_to_internal_term() {
    let (params, _) = paper_params();
    let damper = Damper::new(4.5, 0.0).unwrap();
    let s = Complex64::new(0.3, 2.0);
    let aux = aux_quantities(s, &params, &damper);
    let z = aux.z;
    let expect = params.stiffness * z * (z * params.length).sinh();
    assert!(rel(aux.eta.value(), expect) < 1e-13);
}

#[test]
fn aux_parity_in_z() {
    // beta1, beta2, gamma are odd in z; eta is even (so the H ratios are even)
    let (params, damper) = paper_params();
    for s in [Complex64::new(0.0, 0.7), Complex64::new(1.0, 3.0)] {
        let a = aux_quantities(s, &params, &damper);
        let b = aux_quantities_negated_root(s, &params, &damper);
        assert!(rel(a.beta1.value(), -b.beta1.value()) < 1e-12);
        assert!(rel(a.beta2.value(), -b.beta2.value()) < 1e-12);
        assert!(rel(a.gamma.value(), -b.gamma.value()) < 1e-12);
        assert!(rel(a.eta.value(), b.eta.value()) < 1e-12);
    }
}

#[test]
fn uniform_h_matches_reference_points() {
    let (params, damper) = paper_params();
    let h = uniform_h(Complex64::new(0.0, 0.5), &params, &damper).unwrap();
    assert!(rel(h, H_UNI_HALF_I) < 1e-12);
    let h = uniform_h(Complex64::new(1.0, 1.0), &params, &damper).unwrap();
    assert!(rel(h, H_UNI_1_1) < 1e-12);
}

#[test]
fn boundary_h_matches_reference_points() {
    let (params, damper) = paper_params();
    let h = boundary_h(Complex64::new(0.0, 2.0), &params, &damper).unwrap();
    assert!(rel(h, H_BND_2I) < 1e-12);
}

#[test]
fn h_static_limits() {
    let (params, damper) = paper_params();
    // exact values at s = 0 through the series path
    let h = uniform_h(Complex64::new(0.0, 0.0), &params, &damper).unwrap();
    assert!((h.re - 100.0 / 12.0).abs() < 1e-10);
    let h = boundary_h(Complex64::new(0.0, 0.0), &params, &damper).unwrap();
    assert!((h.re - 0.5).abs() < 1e-10);
    // boundary limit is 1/2 independent of the parameters
    let odd_params = StringParams::new(3.7, 0.33, 2.1).unwrap();
    let odd_damper = Damper::new(1.2, 55.0).unwrap();
    let h = boundary_h(Complex64::new(0.0, 0.0), &odd_params, &odd_damper).unwrap();
    assert!((h.re - 0.5).abs() < 1e-12);
}

#[test]
fn series_and_direct_paths_agree_across_the_seam() {
    let (params, damper) = paper_params();
    for (s, expect_u, expect_b) in [
        (Complex64::new(0.0, 0.0011), H_UNI_SEAM_BELOW, H_BND_SEAM_BELOW),
        (
            Complex64::new(0.0, 0.00124984747726446338928631),
            H_UNI_SEAM_AT,
            H_BND_SEAM_AT,
        ),
        (Complex64::new(0.0, 0.0014), H_UNI_SEAM_ABOVE, H_BND_SEAM_ABOVE),
    ] {
        let hu = uniform_h(s, &params, &damper).unwrap();
        let hb = boundary_h(s, &params, &damper).unwrap();
        assert!(rel(hu, expect_u) < 1e-11, "uniform at {s}: {}", rel(hu, expect_u));
        assert!(rel(hb, expect_b) < 1e-11, "boundary at {s}: {}", rel(hb, expect_b));
    }
}

#[test]
fn removable_point_near_minus_d() {
    let (params, damper) = paper_params();
    let s = Complex64::new(-0.08, 1e-5);
    let h = uniform_h(s, &params, &damper).unwrap();
    assert!(rel(h, H_UNI_NEAR_MINUS_D) < 1e-11);
    let h = boundary_h(s, &params, &damper).unwrap();
    assert!(rel(h, H_BND_NEAR_MINUS_D) < 1e-11);
}

#[test]
fn deep_right_half_plane_does_not_overflow() {
    let (params, damper) = paper_params();
    for (s, expect_u, expect_b) in [
        (Complex64::new(200.0, 0.0), H_UNI_S200, H_BND_S200),
        (Complex64::new(1000.0, 0.0), H_UNI_S1000, H_BND_S1000),
    ] {
        let hu = uniform_h(s, &params, &damper).unwrap();
        let hb = boundary_h(s, &params, &damper).unwrap();
        assert!(rel(hu, expect_u) < 1e-12, "uniform at {s}");
        assert!(rel(hb, expect_b) < 1e-12, "boundary at {s}");
    }
}

#[test]
fn uniform_g_dirichlet_boundaries() {
    let (params, damper) = paper_params();
    for s in [Complex64::new(0.0, 1.3), Complex64::new(0.5, 2.0)] {
        let g0 = uniform_g(0.0, s, &params, &damper).unwrap();
        let gl = uniform_g(10.0, s, &params, &damper).unwrap();
        assert!(g0.norm() < 1e-14, "G(0) = {g0}");
        assert!(gl.norm() < 1e-14, "G(l) = {gl}");
    }
}

#[test]
fn boundary_g_boundary_values() {
    let (params, damper) = paper_params();
    let s = Complex64::new(0.4, 1.7);
    let g0 = boundary_g(0.0, s, &params, &damper).unwrap();
    let gl = boundary_g(10.0, s, &params, &damper).unwrap();
    assert!(rel(g0, Complex64::new(1.0, 0.0)) < 1e-13, "G(0) = {g0}");
    assert!(gl.norm() < 1e-13, "G(l) = {gl}");
}

#[test]
fn uniform_g_continuous_at_damper() {
    let (params, damper) = paper_params();
    let s = Complex64::new(1.0, 2.0);
    let left = uniform_g(4.5, s, &params, &damper).unwrap();
    // nudge just past p to force the right branch; the step is small
    // enough that the derivative term stays below the tolerance
    let right = uniform_g(4.5 + 5e-14, s, &params, &damper).unwrap();
    assert!(rel(left, right) < 1e-12, "{}", rel(left, right));
    let g2 = uniform_g(2.0, s, &params, &damper).unwrap();
    assert!(rel(g2, G_UNI_X2) < 1e-12);
}

#[test]
fn boundary_g_right_branch_reference() {
    let (params, damper) = paper_params();
    let g = boundary_g(7.0, Complex64::new(1.0, 1.0), &params, &damper).unwrap();
    assert!(rel(g, G_BND_X7) < 1e-12);
}

#[test]
fn g_singular_at_zero_and_minus_d() {
    let (params, damper) = paper_params();
    for s in [Complex64::new(0.0, 0.0), Complex64::new(-0.08, 0.0)] {
        assert!(matches!(
            uniform_g(3.0, s, &params, &damper),
            Err(EvalError::SingularPoint { .. })
        ));
        assert!(matches!(
            boundary_g(3.0, s, &params, &damper),
            Err(EvalError::SingularPoint { .. })
        ));
    }
}

#[test]
fn eta_cancellation_reported_as_pole() {
    // real pole of the damped system: k z sinh(z l) and g s sinh(z p)
    // sinh(z q) cancel exactly (root located by multiprecision search)
    let (params, damper) = paper_params();
    let s = Complex64::new(-0.039869241923625689, 0.0);
    assert!(matches!(
        uniform_h(s, &params, &damper),
        Err(EvalError::PoleEncountered { .. })
    ));
    assert!(matches!(
        boundary_h(s, &params, &damper),
        Err(EvalError::PoleEncountered { .. })
    ));
    assert!(matches!(
        uniform_g(3.0, s, &params, &damper),
        Err(EvalError::SingularPoint { .. })
    ));
}

#[test]
fn undamped_resonance_blows_up_finitely() {
    // d = g = 0 puts true poles at irrational frequencies; the nearest
    // representable point evaluates to a finite but astronomical value,
    // which the norm layer (not the point evaluation) flags as divergence
    let params = StringParams::new(10.0, 0.0, 1.0).unwrap();
    let damper = Damper::new(4.5, 0.0).unwrap();
    let s = Complex64::new(0.0, std::f64::consts::PI / 10.0);
    let h = uniform_h(s, &params, &damper).unwrap();
    assert!(h.is_finite());
    assert!(h.norm() > 1e10, "|H| = {}", h.norm());
}

#[test]
fn limit_at_zero_values() {
    let (params, damper) = paper_params();
    let s = Complex64::new(0.123, 4.0); // ignored
    let u = limit_h(s, &params, &damper, Forcing::Uniform, LimitCase::AtZero).unwrap();
    assert!((u.re - 100.0 / 12.0).abs() < 1e-13 && u.im == 0.0);
    let b = limit_h(s, &params, &damper, Forcing::BoundaryLeft, LimitCase::AtZero).unwrap();
    assert!(b.re == 0.5 && b.im == 0.0);
}

#[test]
fn gain_zero_matches_no_damping_limit() {
    let (params, _) = paper_params();
    let damper = Damper::new(4.5, 0.0).unwrap();
    for omega in [0.1, 1.0, 7.7, 50.0] {
        let s = Complex64::new(0.0, omega);
        let direct = uniform_h(s, &params, &damper).unwrap();
        let limit = limit_h(s, &params, &damper, Forcing::Uniform, LimitCase::NoDamping).unwrap();
        assert!(rel(direct, limit) < 1e-12, "omega = {omega}: {}", rel(direct, limit));
        let direct = boundary_h(s, &params, &damper).unwrap();
        let limit =
            limit_h(s, &params, &damper, Forcing::BoundaryLeft, LimitCase::NoDamping).unwrap();
        assert!(rel(direct, limit) < 1e-12, "omega = {omega}");
    }
}

#[test]
fn huge_gain_approaches_infinite_gain_limit() {
    let (params, _) = paper_params();
    let damper = Damper::new(4.5, 1e9).unwrap();
    let s = Complex64::new(0.0, 1.0);
    for forcing in [Forcing::Uniform, Forcing::BoundaryLeft] {
        let finite = transfer_h(s, &params, &damper, forcing).unwrap();
        let limit = limit_h(s, &params, &damper, forcing, LimitCase::InfiniteGain).unwrap();
        assert!(rel(finite, limit) < 1e-6, "{forcing}: {}", rel(finite, limit));
    }
}

#[test]
fn no_damping_limit_singular_on_undamped_resonance() {
    let params = StringParams::new(10.0, 0.0, 1.0).unwrap();
    let damper = Damper::new(4.5, 0.0).unwrap();
    // odd resonance of tanh(z l / 2): z l = i pi
    let s = Complex64::new(0.0, std::f64::consts::PI / 10.0);
    assert!(matches!(
        limit_h(s, &params, &damper, Forcing::BoundaryLeft, LimitCase::NoDamping),
        Err(EvalError::SingularPoint { .. })
    ));
}

#[test]
fn limit_series_paths_cross_check() {
    // inside the series region the tanh-series limits must agree with the
    // convolution-series general path
    let (params, _) = paper_params();
    let s = Complex64::new(0.0, 1e-4);
    let free = Damper::new(4.5, 0.0).unwrap();
    let a = limit_h(s, &params, &free, Forcing::Uniform, LimitCase::NoDamping).unwrap();
    let b = uniform_h(s, &params, &free).unwrap();
    assert!(rel(a, b) < 1e-12, "{}", rel(a, b));
    let a = limit_h(s, &params, &free, Forcing::BoundaryLeft, LimitCase::NoDamping).unwrap();
    let b = boundary_h(s, &params, &free).unwrap();
    assert!(rel(a, b) < 1e-12);

    let pinned = Damper::new(4.5, 1e12).unwrap();
    let a = limit_h(s, &params, &pinned, Forcing::Uniform, LimitCase::InfiniteGain).unwrap();
    let b = uniform_h(s, &params, &pinned).unwrap();
    assert!(rel(a, b) < 1e-6, "{}", rel(a, b));
    let a = limit_h(s, &params, &pinned, Forcing::BoundaryLeft, LimitCase::InfiniteGain).unwrap();
    let b = boundary_h(s, &params, &pinned).unwrap();
    assert!(rel(a, b) < 1e-6);
}

#[test]
fn quadrature_identity_spot_checks() {
    let (params, damper) = paper_params();
    let s = Complex64::new(1.0, 1.0);
    let q = h_from_g_quadrature(s, &params, &damper, Forcing::Uniform, 64).unwrap();
    let h = uniform_h(s, &params, &damper).unwrap();
    assert!((q - h).norm() < 1e-10, "uniform: {}", (q - h).norm());

    let s = Complex64::new(0.0, 2.0);
    let q = h_from_g_quadrature(s, &params, &damper, Forcing::BoundaryLeft, 64).unwrap();
    let h = boundary_h(s, &params, &damper).unwrap();
    assert!((q - h).norm() < 1e-10, "boundary: {}", (q - h).norm());

    // chained identity: g = 0 quadrature equals the no-damping limit
    let free = Damper::new(4.5, 0.0).unwrap();
    let s = Complex64::new(0.0, 1.0);
    let q = h_from_g_quadrature(s, &params, &free, Forcing::Uniform, 64).unwrap();
    let lim = limit_h(s, &params, &free, Forcing::Uniform, LimitCase::NoDamping).unwrap();
    assert!((q - lim).norm() < 1e-10);
}

#[test]
fn h_conjugate_symmetry() {
    let (params, damper) = paper_params();
    for forcing in [Forcing::Uniform, Forcing::BoundaryLeft] {
        for s in [Complex64::new(0.0, 2.3), Complex64::new(0.7, 5.0)] {
            let h = transfer_h(s, &params, &damper, forcing).unwrap();
            let hc = transfer_h(s.conj(), &params, &damper, forcing).unwrap();
            assert!(rel(hc, h.conj()) < 1e-13);
        }
    }
}

#[test]
fn h_is_even_in_z() {
    let (params, damper) = paper_params();
    for s in [Complex64::new(0.0, 0.9), Complex64::new(2.0, 1.0)] {
        let z = principal_root(s, &params);
        let a = uniform_h_with_root(s, z, &params, &damper).unwrap();
        let b = uniform_h_with_root(s, -z, &params, &damper).unwrap();
        assert!(rel(a, b) < 1e-12);
        let a = boundary_h_with_root(s, z, &params, &damper).unwrap();
        let b = boundary_h_with_root(s, -z, &params, &damper).unwrap();
        assert!(rel(a, b) < 1e-12);
    }
}

#[test]
fn damper_at_endpoint_is_inert() {
    let (params, _) = paper_params();
    let end = Damper::new(0.0, 50.0).unwrap();
    let free = Damper::new(4.5, 0.0).unwrap();
    let s = Complex64::new(0.0, 1.7);
    let a = uniform_h(s, &params, &end).unwrap();
    let b = uniform_h(s, &params, &free).unwrap();
    assert!(rel(a, b) < 1e-12);
}
