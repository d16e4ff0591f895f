use drcss::finite_field::{make_field, prime_power, ExtensionTower, FiniteField, PhiMap};
use drcss::Error;
use proptest::prelude::*;

fn fields_up_to(max_q: u64) -> Vec<FiniteField> {
    (2..=max_q)
        .filter_map(|q| prime_power(q).ok())
        .map(|(p, n)| make_field(p, n, None).unwrap())
        .collect()
}

#[test]
fn axioms_hold_exhaustively_for_small_fields() {
    for f in fields_up_to(49) {
        let els: Vec<_> = f.elements().collect();
        assert_eq!(els.len() as u64, f.q());
        let zero = f.zero();
        let one = f.one();
        for a in &els {
            assert_eq!(&(a + &zero), a);
            assert_eq!(&(a * &one), a);
            assert!((a + &(-a)).is_zero());
            if !a.is_zero() {
                assert!((a * &a.inv().unwrap()).is_one());
                assert_eq!(a.pow(f.q() - 1), one, "Fermat in F_{}", f.q());
            }
            for b in &els {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                assert_eq!(&(a - b) + b, *a);
                if !b.is_zero() {
                    assert_eq!(&a.try_div(b).unwrap() * b, *a);
                }
            }
        }
    }
}

#[test]
fn associativity_and_distributivity_for_small_fields() {
    for f in fields_up_to(27) {
        let els: Vec<_> = f.elements().collect();
        for a in &els {
            for b in &els {
                for c in &els {
                    assert_eq!(&(a * b) * c, a * &(b * c));
                    assert_eq!(&(a + b) + c, a + &(b + c));
                    assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                }
            }
        }
    }
}

#[test]
fn division_by_zero_is_an_error() {
    let f = make_field(3, 2, None).unwrap();
    assert_eq!(f.one().try_div(&f.zero()), Err(Error::DivisionByZero));
    assert_eq!(f.zero().inv(), Err(Error::DivisionByZero));
}

#[test]
fn relative_trace_is_linear_over_the_base() {
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let (p, n) = prime_power(q).unwrap();
        let tower = ExtensionTower::quadratic(make_field(p, n, None).unwrap(), None).unwrap();
        let base: Vec<_> = tower.base().elements().collect();
        let ext: Vec<_> = tower.ext().elements().collect();
        for (i, x) in ext.iter().enumerate() {
            let tx = tower.rel_trace(x).unwrap();
            // Tr(x^q) = Tr(x)
            assert_eq!(tower.rel_trace(&x.pow(q)).unwrap(), tx);
            for y in ext.iter().skip(i % 3).step_by(3) {
                let ty = tower.rel_trace(y).unwrap();
                for a in &base {
                    let ea = tower.embed(a).unwrap();
                    let lhs = tower.rel_trace(&(&(&ea * x) + y)).unwrap();
                    assert_eq!(lhs, &(a * &tx) + &ty, "q={q}");
                }
            }
        }
    }
}

#[test]
fn trace_is_balanced() {
    for q in [3u64, 4, 5, 7, 8, 9] {
        let (p, n) = prime_power(q).unwrap();
        let tower = ExtensionTower::quadratic(make_field(p, n, None).unwrap(), None).unwrap();
        let mut counts = vec![0u64; q as usize];
        for x in tower.ext().elements() {
            counts[tower.rel_trace(&x).unwrap().index() as usize] += 1;
        }
        assert!(counts.iter().all(|&c| c == q), "q={q}: {counts:?}");
    }
}

fn permutation(len: usize) -> impl Strategy<Value = Vec<u32>> {
    Just((0..len as u32).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn phi_round_trips(table in (2usize..50).prop_flat_map(permutation)) {
        let phi = PhiMap::from_permutation(table.clone()).unwrap();
        for x in 0..table.len() as u64 {
            prop_assert_eq!(phi.invert(phi.apply(x)), x);
        }
        for v in 0..table.len() as u32 {
            prop_assert_eq!(phi.apply(phi.invert(v)), v);
        }
    }

    #[test]
    fn non_bijections_are_rejected(mut table in (3usize..30).prop_flat_map(permutation), i in 0usize..30) {
        let len = table.len();
        let i = i % len;
        table[i] = table[(i + 1) % len];
        prop_assert!(matches!(PhiMap::from_permutation(table), Err(Error::NotABijection(_))));
    }

    #[test]
    fn index_round_trips(q_pick in 0usize..8, idx in 0u64..1024) {
        let (p, n) = [(2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2), (2, 5), (13, 1)][q_pick];
        let f = make_field(p, n, None).unwrap();
        let idx = idx % f.q();
        prop_assert_eq!(f.element(idx).index(), idx);
    }
}
