use hamsym_core::expr::{evaluate, parse, pmp_hamiltonian, ControlAffineSystem};
use hamsym_core::sampling::{sample_points, SampleBox};

#[test]
fn control_example_gives_the_example_hamiltonian() {
    let sys = ControlAffineSystem {
        dim: 2,
        generators: vec![
            vec![parse("1", 2).unwrap(), parse("0", 2).unwrap()],
            vec![parse("x1", 2).unwrap(), parse("1", 2).unwrap()],
        ],
    };
    let h = pmp_hamiltonian(&sys).unwrap();
    let closed_form = parse("0.5*(p1^2+(p1*x1+p2)^2)", 2).unwrap();
    let b = SampleBox::uniform(2, (-2.0, 2.0), (0.2, 2.0)).unwrap();
    for p in sample_points(&b, 100, 12) {
        let a = evaluate(&h.expr, &p).unwrap();
        let e = evaluate(&closed_form, &p).unwrap();
        assert!((a - e).abs() <= 1e-12 * e.abs().max(1.0), "{a} vs {e}");
    }
}
