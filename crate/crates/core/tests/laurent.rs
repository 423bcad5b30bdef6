use std::f64::consts::PI;

use num_complex::Complex64;
use phasekit::{CircleGrid, LaurentPoly, Parity};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn poly_strategy(max_abs_degree: i64) -> impl Strategy<Value = LaurentPoly> {
    (
        -max_abs_degree..=max_abs_degree,
        1usize..=(2 * max_abs_degree as usize + 1),
    )
        .prop_flat_map(|(lo, len)| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |cs| {
                LaurentPoly::new(lo, cs.into_iter().map(|(a, b)| c(a, b)).collect())
            })
        })
}

fn angle_strategy() -> impl Strategy<Value = f64> {
    -PI..PI
}

/// Naive oracle: direct power sum.
fn direct_eval(p: &LaurentPoly, theta: f64) -> Complex64 {
    p.terms()
        .map(|(k, ck)| ck * Complex64::from_polar(1.0, k as f64 * theta))
        .sum()
}

proptest! {
    #[test]
    fn evaluation_is_a_ring_homomorphism(
        p in poly_strategy(12),
        q in poly_strategy(12),
        thetas in prop::collection::vec(angle_strategy(), 128),
    ) {
        let prod = p.mul_poly(&q);
        let sum = &p + &q;
        for t in thetas {
            let z = Complex64::from_polar(1.0, t);
            let (pz, qz) = (p.eval(z).unwrap(), q.eval(z).unwrap());
            prop_assert!((prod.eval(z).unwrap() - pz * qz).norm() <= 1e-11);
            prop_assert!((sum.eval(z).unwrap() - (pz + qz)).norm() <= 1e-12);
        }
    }

    #[test]
    fn conj_reciprocal_is_an_involution(p in poly_strategy(10)) {
        prop_assert_eq!(p.conj_reciprocal().conj_reciprocal(), p);
    }

    #[test]
    fn conj_reciprocal_conjugates_values(p in poly_strategy(6), t in angle_strategy()) {
        let z = Complex64::from_polar(1.0, t);
        let lhs = p.conj_reciprocal().eval(z).unwrap();
        prop_assert!((lhs - p.eval(z).unwrap().conj()).norm() <= 1e-12);
    }

    #[test]
    fn parity_split_is_a_direct_sum(p in poly_strategy(9)) {
        let (even, odd) = p.parity_split();
        for (k, ck) in p.terms() {
            let (e, o) = (even.coeff(k), odd.coeff(k));
            match Parity::of(k) {
                Parity::Even => { prop_assert_eq!(e, ck); prop_assert_eq!(o, c(0.0, 0.0)); }
                Parity::Odd => { prop_assert_eq!(o, ck); prop_assert_eq!(e, c(0.0, 0.0)); }
            }
        }
        prop_assert_eq!(&even + &odd, p);
    }

    #[test]
    fn horner_matches_power_sum(p in poly_strategy(12), t in angle_strategy()) {
        prop_assert!((p.eval_angle(t) - direct_eval(&p, t)).norm() <= 1e-12);
    }

    #[test]
    fn json_round_trip_is_bit_exact(p in poly_strategy(8)) {
        let text = serde_json::to_string(&p).unwrap();
        let back: LaurentPoly = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn sup_norm_bound_dominates_a_dense_scan() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let scan = 1_000_000usize;
    for _ in 0..4 {
        let n = rng.random_range(1..=20i64);
        let coeffs = (-n..=n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let p = LaurentPoly::new(-n, coeffs);
        let grid = CircleGrid::new(8 * p.span()).unwrap();
        let sup = p.sup_norm_on_circle(&grid).unwrap();
        let dense = p
            .eval_on_roots_of_unity(scan)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(dense <= sup.bound() + 1e-12, "{dense} > {}", sup.bound());
        assert!(sup.value <= dense + 1e-12);
    }
}

#[test]
fn arithmetic_examples() {
    let w = LaurentPoly::monomial(1, c(1.0, 0.0));
    let winv = LaurentPoly::monomial(-1, c(1.0, 0.0));
    let one = LaurentPoly::constant(c(1.0, 0.0));
    let prod = (&w - &one).mul_poly(&(&winv - &one));
    assert_eq!(prod, LaurentPoly::from_real(-1, &[-1.0, 2.0, -1.0]));
    assert!(w.mul_poly(&LaurentPoly::zero()).is_zero());

    let e = &w - &LaurentPoly::constant(c(0.5, 0.0));
    let ee = e.mul_poly(&e.conj_reciprocal());
    for z in CircleGrid::new(64).unwrap().points() {
        let want = (z - 0.5) * (z.inv() - 0.5);
        assert!((ee.eval(z).unwrap() - want).norm() < 1e-14);
    }
}

#[test]
fn conj_reciprocal_examples() {
    let p = LaurentPoly::monomial(1, c(0.0, 1.0));
    assert_eq!(p.conj_reciprocal(), LaurentPoly::monomial(-1, c(0.0, -1.0)));
    let cosine = LaurentPoly::from_real(-1, &[1.0, 0.0, 1.0]);
    assert_eq!(cosine.conj_reciprocal(), cosine);
}

#[test]
fn parity_split_examples() {
    let p = LaurentPoly::from_real(1, &[1.0, 1.0]);
    let (even, odd) = p.parity_split();
    assert_eq!(even, LaurentPoly::monomial(2, c(1.0, 0.0)));
    assert_eq!(odd, LaurentPoly::monomial(1, c(1.0, 0.0)));

    let q = LaurentPoly::from_real(-2, &[1.0, 0.0, 0.0, 0.0, 1.0]);
    let (even, odd) = q.parity_split();
    assert_eq!(even, q);
    assert!(odd.is_zero());
}

#[test]
fn symmetry_predicates() {
    let cosine = LaurentPoly::from_real(-1, &[1.0, 0.0, 1.0]);
    assert!(cosine.is_real_on_circle(1e-12) && cosine.is_reciprocal(1e-12));
    let sine = LaurentPoly::new(-1, vec![c(0.0, -1.0), c(0.0, 0.0), c(0.0, 1.0)]);
    assert!(sine.is_real_on_circle(1e-12));
    assert!(!sine.is_reciprocal(1e-12));
    let w = LaurentPoly::monomial(1, c(1.0, 0.0));
    assert!(!w.is_real_on_circle(1e-12) && !w.is_reciprocal(1e-12));
}

#[test]
fn sup_norm_examples() {
    let grid = CircleGrid::new(64).unwrap();
    let w = LaurentPoly::monomial(1, c(1.0, 0.0));
    assert!((w.sup_norm_on_circle(&grid).unwrap().value - 1.0).abs() < 1e-15);
    let cos = LaurentPoly::from_real(-1, &[0.5, 0.0, 0.5]);
    let s = cos.sup_norm_on_circle(&grid).unwrap();
    assert!((s.value - 1.0).abs() < 1e-15);
    assert!(s.bound() >= 1.0);
    let coarse = CircleGrid::new(4).unwrap();
    assert!(LaurentPoly::from_real(-4, &[1.0; 9])
        .sup_norm_on_circle(&coarse)
        .is_err());
}

#[test]
fn eval_rejects_points_off_the_circle() {
    let p = LaurentPoly::monomial(1, c(1.0, 0.0));
    assert!(p.eval(c(2.0, 0.0)).is_err());
    assert_eq!(p.eval_anywhere(c(2.0, 0.0)), c(2.0, 0.0));
}

#[test]
fn trimming_drops_cancelled_edges() {
    let p = LaurentPoly::from_real(-2, &[1.0, 0.0, 1.0, 0.0, 1.0]);
    let q = LaurentPoly::from_real(-2, &[1.0, 0.0, 0.0, 0.0, 1.0]);
    let diff = &p - &q;
    assert_eq!(diff, LaurentPoly::constant(c(1.0, 0.0)));
    assert_eq!(
        (diff.min_degree(), diff.degree(), diff.abs_degree()),
        (0, 0, 0)
    );
}
