use drcss::ambiguity::{af_surface, metrics, set_af};
use drcss::constructions::{construct, default_tower, Construction, SequenceSet};
use drcss::finite_field::PhiMap;
use drcss::orthomatrix::character_matrix;
use drcss::Error;
use proptest::prelude::*;

fn permutation(len: usize) -> impl Strategy<Value = Vec<u32>> {
    Just((0..len as u32).collect::<Vec<_>>()).prop_shuffle()
}

fn build(c: Construction, q: u32, table: Vec<u32>) -> drcss::Result<SequenceSet> {
    let tower = default_tower(q)?;
    let phi = PhiMap::from_permutation(table)?;
    let psi = character_matrix(tower.base());
    construct(c, &tower, &phi, c.uses_psi().then_some(&psi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn theta_claim_holds_for_any_admissible_phi(
        ci in 0usize..5,
        qi in 0usize..3,
        table in permutation(7),
    ) {
        let c = Construction::ALL[ci];
        let q = [5u32, 7, 8][qi];
        let mut table: Vec<u32> = table.into_iter().filter(|&v| v < q).collect();
        table.extend(7..q);
        match build(c, q, table.clone()) {
            Ok(set) => {
                let (_, m, n) = set.shape();
                let r = metrics(&set, (n, n)).unwrap();
                prop_assert!(r.theta_max <= c.theta_claim(q) as f64 + 1e-6 * (m * n) as f64);
                let back = SequenceSet::from_json(&set.to_json()).unwrap();
                prop_assert_eq!(back.to_json(), set.to_json());
            }
            Err(Error::PhiCollision) => {
                prop_assert!(matches!(c, Construction::T4 | Construction::T5));
                prop_assert!(table[0] != 0 && table[0] != q - 1);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn auto_peak_is_mn(ci in 0usize..5, k in 0usize..4) {
        let c = Construction::ALL[ci];
        let set = build(c, 7, (0..7).collect()).unwrap();
        let (_, m, n) = set.shape();
        let a = set_af(&set.matrices[k], &set.matrices[k], 0, 0).unwrap();
        prop_assert!((a.re - (m * n) as f64).abs() < 1e-9 && a.im.abs() < 1e-9);
    }
}

#[test]
fn af_symmetry_under_swap() {
    // AF(C2, C1)(tau, v) = conj(AF(C1, C2)(-tau, -v)) * xi_N^{-tau v}
    let set = build(Construction::T2, 8, (0..8).collect()).unwrap();
    let n = set.shape().2 as i64;
    let ab = af_surface(&set.matrices[2], &set.matrices[5]).unwrap();
    let ba = af_surface(&set.matrices[5], &set.matrices[2]).unwrap();
    for tau in -(n - 1)..n {
        for v in -(n - 1)..n {
            let phase = drcss::orthomatrix::unit_root(n as u32, -tau * v);
            let want = ab.get(-tau, -v).conj() * phase;
            assert!((ba.get(tau, v) - want).norm() < 1e-9, "({tau},{v})");
        }
    }
}

#[test]
fn shapes_over_prime_powers() {
    for q in [4u32, 8, 9, 16, 25, 27] {
        for c in Construction::ALL {
            if q <= c.min_q_exclusive() {
                continue;
            }
            let set = build(c, q, (0..q).collect()).unwrap();
            assert_eq!(set.shape(), c.shape(q as usize), "{c} q={q}");
            assert_eq!(set.alphabet, c.alphabet(q, set.p));
        }
    }
}
