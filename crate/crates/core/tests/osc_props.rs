use newton_circle_core::osc::{
    maximal_shadow_sides, oscillation, oscillation_on, rademacher_menshov_sides, variation, IncreasingSequence, IndexedFamily,
};
use newton_circle_core::Complex;
use proptest::prelude::*;

const EPS: f64 = 1e-9;

fn values(max_len: usize) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b)| Complex::new(a, b)), 2..=max_len)
}

fn line(v: &[Complex]) -> IndexedFamily<1> {
    IndexedFamily::new(v.iter().enumerate().map(|(i, x)| ([i as f64], *x))).unwrap()
}

/// A family with values, and an increasing sequence drawn from its index set.
fn family_and_sequence(max_len: usize) -> impl Strategy<Value = (Vec<Complex>, Vec<usize>)> {
    values(max_len).prop_flat_map(|v| {
        let n = v.len();
        (Just(v), prop::collection::btree_set(0..n, 2..=n.min(12)).prop_map(|s| s.into_iter().collect()))
    })
}

fn seq(idx: &[usize]) -> IncreasingSequence<1> {
    IncreasingSequence::new(idx.iter().map(|&i| [i as f64]).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn seminorm_axioms((v, idx) in family_and_sequence(64), w in values(64), c in (-3.0f64..3.0, -3.0f64..3.0)) {
        let n = v.len().min(w.len());
        let idx: Vec<usize> = idx.into_iter().filter(|&i| i < n).collect();
        prop_assume!(idx.len() >= 2);
        let (f, g) = (line(&v[..n]), line(&w[..n]));
        let s = seq(&idx);
        let sum = oscillation(&f.add(&g).unwrap(), &s).unwrap();
        prop_assert!(sum <= oscillation(&f, &s).unwrap() + oscillation(&g, &s).unwrap() + EPS);
        let c = Complex::new(c.0, c.1);
        let scaled = oscillation(&f.map(|_, x| c * x), &s).unwrap();
        prop_assert!((scaled - c.norm() * oscillation(&f, &s).unwrap()).abs() <= EPS * (1.0 + scaled));
    }

    #[test]
    fn splitting_variation_and_crude_bounds((v, idx) in family_and_sequence(64), cut in 0.0f64..64.0) {
        let f = line(&v);
        let s = seq(&idx);
        let whole = oscillation(&f, &s).unwrap();
        let low = oscillation_on(&f, &s, |t| t[0] < cut).unwrap();
        let high = oscillation_on(&f, &s, |t| t[0] >= cut).unwrap();
        prop_assert!(whole <= low + high + EPS);
        prop_assert!(whole <= variation(&f, 2.0).unwrap() + EPS);
        prop_assert!(whole <= 2.0 * f.l2() + EPS);
    }

    #[test]
    fn rademacher_menshov(v in values(64), j0 in 0usize..8) {
        let len = v.len().next_power_of_two().max(j0 + 2).next_power_of_two();
        let vals: Vec<Complex> = (j0..len).map(|k| v[k % v.len()]).collect();
        let f = IndexedFamily::new(vals.iter().enumerate().map(|(i, x)| ([(j0 + i) as f64], *x))).unwrap();
        let points: Vec<usize> = (j0..len).step_by(3).collect();
        prop_assume!(points.len() >= 2);
        let s = IncreasingSequence::new(points.iter().map(|&i| [i as f64]).collect()).unwrap();
        let (lhs, rhs) = rademacher_menshov_sides(&f, &s).unwrap();
        prop_assert!(lhs <= rhs + EPS, "{} > {}", lhs, rhs);
    }

    #[test]
    fn maximal_function_shadow((v, idx) in family_and_sequence(64)) {
        let mut idx = idx;
        idx[0] = 0;
        *idx.last_mut().unwrap() = v.len() - 1;
        idx.dedup();
        prop_assume!(idx.len() >= 2);
        let (lhs, rhs) = maximal_shadow_sides(&line(&v), &seq(&idx)).unwrap();
        prop_assert!(lhs <= rhs + EPS);
    }
}

#[test]
fn variation_is_monotone_in_rho() {
    let v: Vec<Complex> = [0.0, 2.0, -1.0, 3.0, 0.5].iter().map(|x| Complex::new(*x, 0.0)).collect();
    let f = line(&v);
    let (v1, v2, v4) = (variation(&f, 1.0).unwrap(), variation(&f, 2.0).unwrap(), variation(&f, 4.0).unwrap());
    assert!(v1 >= v2 && v2 >= v4);
    assert!((v1 - 11.5).abs() < 1e-12);
}
