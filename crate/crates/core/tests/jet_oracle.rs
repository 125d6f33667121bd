use hamsym_core::expr::{evaluate, parse, Expr};
use hamsym_core::jets::{fd_oracle, jet_lift, Jet};
use hamsym_core::sampling::{sample_points, SampleBox};
use hamsym_core::PhasePoint;
use proptest::prelude::*;

const CORPUS: [&str; 20] = [
    "0.5*(p1^2+(p1*x1+p2)^2)",
    "x1*x2*p1*p2",
    "p1^3-2*x2^2*p2",
    "sin(x1)*cos(p2)",
    "exp(x1*p1)",
    "exp(-x2)*p1^2",
    "ln(x1+p2)",
    "sqrt(1+x1^2+p1^2)",
    "(x1+p1)^-1",
    "x2^0.5*p1",
    "1/(1+x1^2)*p2^2",
    "sin(x1*x2+p1)",
    "cos(exp(p2))",
    "x1^4+p2^4-x1*p2",
    "ln(p1)*sqrt(x2)",
    "exp(sin(x1))*p1",
    "(p1*x1+p2)^3/(1+p1^2)",
    "-x1*(-p2)+3",
    "0.5*(p1^2+p2^2)+cos(x1-x2)",
    "p1^2.5+x2^1.5",
];

fn multi_indices(nvars: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for m in &layer {
            let start = m.last().copied().unwrap_or(0);
            for v in start..nvars {
                let mut e: Vec<usize> = m.clone();
                e.push(v);
                next.push(e);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn points(count: usize, seed: u64) -> Vec<PhasePoint> {
    let b = SampleBox::uniform(2, (0.5, 1.5), (0.5, 1.5)).unwrap();
    sample_points(&b, count, seed)
}

#[test]
fn jets_match_finite_differences() {
    let indices = multi_indices(4, 3);
    assert_eq!(indices.len(), 35);
    for text in CORPUS {
        let e = parse(text, 2).unwrap();
        for p in points(50, 21) {
            let jet = jet_lift(&e, &p, 3).unwrap();
            for m in &indices {
                let exact = jet.partial(m).unwrap();
                let fd = fd_oracle(&e, &p, m).unwrap();
                let tol = (1e-5 * exact.abs()).max(1e-7);
                assert!(
                    (exact - fd).abs() <= tol,
                    "{text} at {:?} {m:?}: jet {exact} fd {fd}",
                    p.coords()
                );
            }
        }
    }
}

#[test]
fn order_four_on_polynomials() {
    let e = parse("x1^4*p2+x2^2*p1^2", 2).unwrap();
    let p = PhasePoint::new(vec![0.7, -1.1], vec![0.3, 2.0]).unwrap();
    let jet = jet_lift(&e, &p, 4).unwrap();
    assert_eq!(jet.partial(&[0, 0, 0, 0]).unwrap(), 24.0 * 2.0);
    assert_eq!(jet.partial(&[1, 1, 2, 2]).unwrap(), 4.0);
    assert!((jet.partial(&[0, 0, 0, 3]).unwrap() - 24.0 * 0.7).abs() < 1e-13);
    assert_eq!(jet.partial(&[1, 1, 1, 1]).unwrap(), 0.0);
}

fn arb_point() -> impl Strategy<Value = PhasePoint> {
    proptest::collection::vec(0.5f64..1.5, 4).prop_map(|z| PhasePoint::from_coords(&z).unwrap())
}

fn arb_jet() -> impl Strategy<Value = Jet> {
    proptest::collection::vec(-2.0f64..2.0, 3).prop_map(|z| {
        let vars = Jet::seed(&z, 3);
        &(&vars[0] * &vars[1]) + &(&vars[2] * &vars[2]).scale(0.5) + vars[1].clone()
    })
}

fn close(a: &Jet, b: &Jet) -> bool {
    (0..3)
        .flat_map(|i| [vec![], vec![i], vec![i, i], vec![0, 1, i]])
        .filter(|m| m.len() <= a.order().min(b.order()))
        .all(|m| {
            let (u, v) = (a.partial(&m).unwrap(), b.partial(&m).unwrap());
            (u - v).abs() <= 1e-12 * (1.0 + u.abs())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn plain_evaluation_is_the_jet_constant(p in arb_point(), k in 0usize..20) {
        let e: Expr = parse(CORPUS[k], 2).unwrap();
        let plain = evaluate(&e, &p).unwrap();
        let jet = jet_lift(&e, &p, 3).unwrap();
        prop_assert_eq!(plain, jet.value());
    }
}

proptest! {
    #[test]
    fn ring_laws(a in arb_jet(), b in arb_jet(), c in arb_jet()) {
        prop_assert!(close(&(&a * &b), &(&b * &a)));
        prop_assert!(close(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
        prop_assert!(close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
        prop_assert!(close(&(&a - &a), &Jet::constant(3, 3, 0.0)));
    }

    #[test]
    fn product_rule(a in arb_jet(), b in arb_jet(), v in 0usize..3) {
        let lhs = (&a * &b).derivative(v);
        let rhs = &(&a.derivative(v) * &b) + &(&a * &b.derivative(v));
        prop_assert!(close(&lhs, &rhs.truncate(2)));
    }
}
