use super::*;
use crate::fields::{HamiltonianField, VectorFieldSpec};
use crate::sampling::{sample_points, SampleBox};

const EXAMPLE: &str = "0.5*(p1^2+(p1*x1+p2)^2)";

fn example() -> HamiltonianSpec {
    HamiltonianSpec::parse("example", 2, EXAMPLE).unwrap()
}

fn free() -> HamiltonianSpec {
    HamiltonianSpec::parse("free", 2, "0.5*(p1^2+p2^2)").unwrap()
}

fn at(z: [f64; 4]) -> PhasePoint {
    PhasePoint::from_coords(&z).unwrap()
}

fn base_point() -> LocalGeometry {
    LocalGeometry::new(&example(), &at([1.0, 0.0, 1.0, 1.0])).unwrap()
}

fn samples(count: usize) -> Vec<PhasePoint> {
    let b = SampleBox::uniform(2, (-2.0, 2.0), (0.2, 2.0)).unwrap();
    sample_points(&b, count, 11)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn assert_matrix(got: &Matrix, want: &[&[f64]], tol: f64) {
    for (i, row) in want.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            assert!(
                close(got[i][j], *w, tol),
                "[{i}][{j}]: {} vs {w}",
                got[i][j]
            );
        }
    }
}

fn assert_zero(m: &Matrix, tol: f64) {
    assert!(max_abs_matrix(m) <= tol, "{m:?}");
}

#[test]
fn metric_at_base_point() {
    let g = base_point();
    let (gu, gl) = g.metric();
    assert_matrix(&gu, &[&[2.0, 1.0], &[1.0, 1.0]], 1e-15);
    assert_matrix(&gl, &[&[1.0, -1.0], &[-1.0, 2.0]], 1e-15);
}

#[test]
fn singular_hessian_is_an_error() {
    let h = HamiltonianSpec::parse("lin", 2, "p1").unwrap();
    let err = LocalGeometry::new(&h, &at([1.0, 0.0, 1.0, 1.0])).unwrap_err();
    assert!(matches!(err, Error::Singular { .. }), "{err}");
    let h = HamiltonianSpec::parse("rank1", 2, "0.5*(p1+p2)^2").unwrap();
    assert!(LocalGeometry::new(&h, &at([1.0, 0.0, 1.0, 1.0])).is_err());
}

#[test]
fn hamiltonian_field_and_connection_at_base_point() {
    let g = base_point();
    assert_eq!(
        g.hamiltonian_vector_field(),
        (vec![3.0, 2.0], vec![-2.0, 0.0])
    );
    assert_matrix(&g.connection(), &[&[-2.0, 2.0], &[2.0, -3.0]], 1e-14);
}

#[test]
fn adapted_derivatives_at_base_point() {
    let g = base_point();
    let z = Jet::seed(&[1.0, 0.0, 1.0, 1.0], 2);
    let dp1 = g.adapted_derivative(&z[2]);
    assert!(
        close(dp1[0], -2.0, 1e-14) && close(dp1[1], 2.0, 1e-14),
        "{dp1:?}"
    );
    let dx = g.adapted_derivative(&z[0]);
    assert_eq!(dx, vec![1.0, 0.0]);
    let h = jet_lift(&example().expr, g.point(), 2).unwrap();
    let dh = g.adapted_derivative(&h);
    assert!(max_abs(&dh) < 1e-14, "{dh:?}");
}

#[test]
fn curvature_at_base_point() {
    // R_121 = p1 x1 + p2, R_212 = p1 + p1 x1² + p2 x1, antisymmetric partners
    let r = base_point().curvature();
    let want = [[[0.0, 0.0], [2.0, -3.0]], [[-2.0, 3.0], [0.0, 0.0]]];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                assert!(
                    close(r[i][j][k], want[i][j][k], 1e-13),
                    "R[{i}][{j}][{k}] = {}",
                    r[i][j][k]
                );
            }
        }
    }
}

#[test]
fn jacobi_at_base_point() {
    let g = base_point();
    assert_matrix(
        &g.jacobi_endomorphism(),
        &[&[-4.0, 6.0], &[6.0, -9.0]],
        1e-13,
    );
    assert_matrix(
        &g.jacobi_via_curvature(),
        &[&[-4.0, 6.0], &[6.0, -9.0]],
        1e-13,
    );
}

#[test]
fn nabla_at_base_point() {
    let (nh, nv) = base_point().nabla_coefficients();
    assert!(close(nv[0][0], 1.0, 1e-14), "{nv:?}");
    for i in 0..2 {
        for j in 0..2 {
            assert!(close(nh[i][j], -nv[j][i], 1e-14));
        }
    }
}

#[test]
fn horizontality_at_base_point() {
    let h = base_point().is_horizontal(1e-10);
    assert!(h.horizontal);
    assert!(max_abs(&h.residual) < 1e-14);
}

#[test]
fn free_particle_is_flat() {
    let g = LocalGeometry::new(&free(), &at([0.3, -1.0, 0.7, 2.0])).unwrap();
    let (gu, gl) = g.metric();
    assert_matrix(&gu, &[&[1.0, 0.0], &[0.0, 1.0]], 0.0);
    assert_matrix(&gl, &[&[1.0, 0.0], &[0.0, 1.0]], 0.0);
    assert_eq!(
        g.hamiltonian_vector_field(),
        (vec![0.7, 2.0], vec![0.0, 0.0])
    );
    assert_zero(&g.connection(), 0.0);
    assert!(g.curvature().iter().flatten().flatten().all(|&v| v == 0.0));
    assert_zero(&g.jacobi_endomorphism(), 0.0);
    assert_zero(&g.jacobi_via_curvature(), 0.0);
    let (nh, nv) = g.nabla_coefficients();
    assert_zero(&nh, 0.0);
    assert_zero(&nv, 0.0);
    let b = g.berwald_coefficients();
    for fam in [&b.hh, &b.hv, &b.vh, &b.vv] {
        assert!(fam.iter().flatten().flatten().all(|&v| v == 0.0));
    }
    assert_zero(&g.nabla_metric_residual(), 0.0);
    assert_zero(&g.nabla_vertical_metric_residual(), 0.0);
    assert_zero(&g.nabla_j_residual(&g.connection()).unwrap(), 0.0);
}

#[test]
fn example_metric_is_position_only() {
    let b = base_point().berwald_coefficients();
    assert!(b.vv.iter().flatten().flatten().all(|&v| v == 0.0));
    assert!(b.vh.iter().flatten().flatten().all(|&v| v == 0.0));
}

#[test]
fn sampled_identities_on_example() {
    let h = example();
    for p in samples(100) {
        let g = LocalGeometry::new(&h, &p).unwrap();
        let (x1, p1, p2) = (p.x()[0], p.p()[0], p.p()[1]);
        let (gu, gl) = g.metric();
        assert_matrix(&gu, &[&[1.0 + x1 * x1, x1], &[x1, 1.0]], 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                let prod: f64 = (0..2).map(|k| gu[i][k] * gl[k][j]).sum();
                assert!((prod - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        let s = p1 * x1 + p2;
        let n = g.connection();
        let want = [
            [-s, x1 * s],
            [x1 * s, -x1 * (p1 * (1.0 + x1 * x1) + p2 * x1)],
        ];
        assert_matrix(&n, &[&want[0], &want[1]], 1e-12);

        let r = g.curvature();
        let r121 = p1 * x1 + p2;
        let r212 = p1 + p1 * x1 * x1 + p2 * x1;
        assert!(close(r[0][1][0], r121, 1e-11) && close(r[1][0][0], -r121, 1e-11));
        assert!(close(r[1][0][1], r212, 1e-11) && close(r[0][1][1], -r212, 1e-11));
        assert!(r[0][0].iter().chain(&r[1][1]).all(|v| v.abs() < 1e-11));

        assert!(max_abs(&g.horizontal_residual()) < 1e-12);
        let (a, b) = (g.jacobi_endomorphism(), g.jacobi_via_curvature());
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(a[i][j], b[i][j], 1e-10), "{a:?} vs {b:?}");
                assert!(close(a[i][j], a[j][i], 1e-10));
            }
        }
        let (nh, nv) = g.nabla_coefficients();
        for i in 0..2 {
            for j in 0..2 {
                assert!((nh[i][j] + nv[j][i]).abs() < 1e-12);
            }
        }
        assert_zero(&g.nabla_j_residual(&n).unwrap(), 1e-10);
        assert_zero(&g.nabla_metric_residual(), 1e-10);

        let rho = HamiltonianField { hamiltonian: &h };
        let general = connection_general(&rho, &p).unwrap();
        assert_matrix(&general, &[&n[0], &n[1]], 1e-12);
    }
}

#[test]
fn nabla_j_is_affine_in_the_connection() {
    let g = base_point();
    let mut n = g.connection();
    n[0][0] += 0.1;
    n[1][1] += 0.1;
    let r = g.nabla_j_residual(&n).unwrap();
    assert_matrix(&r, &[&[0.2, 0.0], &[0.0, 0.2]], 1e-12);
    assert!(g.nabla_j_residual(&vec![vec![0.0]]).is_err());
}

#[test]
fn general_connection_needs_regular_field() {
    let f = VectorFieldSpec::parse(2, &["x1", "x2"], &["0", "0"]).unwrap();
    let err = connection_general(&f, &at([1.0, 0.0, 1.0, 1.0])).unwrap_err();
    assert!(matches!(err, Error::Singular { .. }));
    let h = free();
    let rho = HamiltonianField { hamiltonian: &h };
    assert_zero(
        &connection_general(&rho, &at([1.0, 2.0, 3.0, 4.0])).unwrap(),
        0.0,
    );
}

#[test]
fn three_routes_for_the_berwald_derivative() {
    let fields = [
        VectorFieldSpec::parse(2, &["0", "0"], &["1", "0"]).unwrap(),
        VectorFieldSpec::parse(2, &["0", "0"], &["0", "1"]).unwrap(),
        VectorFieldSpec::parse(2, &["1", "0"], &["0", "0"]).unwrap(),
        VectorFieldSpec::parse(2, &["x2*p1", "x1^2"], &["p2*x1", "sin(p1)"]).unwrap(),
    ];
    let h = example();
    for p in samples(20) {
        let g = LocalGeometry::new(&h, &p).unwrap();
        let rho = g.rho_jets().to_vec();
        let mut ys: Vec<Vec<Jet>> = fields.iter().map(|f| f.jets(&p, 2).unwrap()).collect();
        ys.push(rho.clone());
        for y in &ys {
            let nabla = g.dynamical_derivative(y);
            let coef = g.berwald_along_rho(y);
            let brackets = g.berwald_derivative(&rho, y);
            for a in 0..4 {
                assert!(close(nabla[a], coef[a], 1e-9), "{nabla:?} vs {coef:?}");
                assert!(
                    close(nabla[a], brackets[a], 1e-9),
                    "{nabla:?} vs {brackets:?}"
                );
            }
        }
        assert!(max_abs(&g.dynamical_derivative(&rho)) < 1e-10);
    }
}

#[test]
fn p_dependent_hamiltonian_identities() {
    let h = HamiltonianSpec::parse(
        "quartic",
        2,
        "0.5*exp(x2)*p1^2 + 0.5*(1+x1^2)*p2^2 + p1^4/12 + 0.1*p1*p2*x1",
    )
    .unwrap();
    for p in samples(30) {
        let g = LocalGeometry::new(&h, &p).unwrap();
        let n = g.connection();
        assert!((n[0][1] - n[1][0]).abs() < 1e-12);
        let r = g.curvature();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert!((r[i][j][k] + r[j][i][k]).abs() < 1e-12);
                }
            }
        }
        assert_zero(&g.nabla_j_residual(&n).unwrap(), 1e-9);
        assert_zero(&g.nabla_metric_residual(), 1e-9);
        let rho = HamiltonianField { hamiltonian: &h };
        let general = connection_general(&rho, &p).unwrap();
        assert_matrix(&general, &[&n[0], &n[1]], 1e-11);
        // the Jacobi formula and the contraction agree only where ρ_H is horizontal
        let horizontal = max_abs(&g.horizontal_residual()) < 1e-10;
        if horizontal {
            let (a, b) = (g.jacobi_endomorphism(), g.jacobi_via_curvature());
            assert_matrix(&a, &[&b[0], &b[1]], 1e-9);
        }
    }
}

#[test]
fn report_is_complete() {
    let r = base_point().report(1e-10);
    assert_eq!(r.hamiltonian, 2.5);
    assert!(r.horizontal.horizontal);
    assert_eq!(r.curvature.len(), 2);
    assert!(r.metric_rcond > 0.0);
}
