//! Rule #1 against a dense triple-loop evaluation.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use schumpeter_core::model::{apply_rule1, build_random_tensor, InteractionTensor, ProductState};

/// Dense `n×n×n` 0/1 array of a tensor.
fn dense(t: &InteractionTensor) -> Vec<Vec<Vec<i64>>> {
    let n = t.n();
    let mut a = vec![vec![vec![0i64; n]; n]; n];
    for &(i, j, k) in t.triples() {
        a[i][j][k] = 1;
    }
    a
}

fn oracle(state: &[bool], plus: &InteractionTensor, minus: &InteractionTensor) -> Vec<bool> {
    let n = state.len();
    let (ap, am) = (dense(plus), dense(minus));
    let s: Vec<i64> = state.iter().map(|&b| i64::from(b)).collect();
    (0..n)
        .map(|k| {
            let mut delta = 0;
            for i in 0..n {
                for j in 0..n {
                    delta += (ap[i][j][k] - am[i][j][k]) * s[i] * s[j];
                }
            }
            match delta.signum() {
                1 => true,
                -1 => false,
                _ => state[k],
            }
        })
        .collect()
}

fn all_states(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |m| (0..n).map(|b| m >> b & 1 == 1).collect())
}

#[test]
fn fast_rule1_matches_dense_oracle_exhaustively() {
    let mut rng = Pcg64::seed_from_u64(0xa11ce);
    let mut checked = 0u64;
    for n in 3..=4 {
        for _ in 0..1000 {
            let dp: f64 = rng.gen();
            let dm: f64 = rng.gen();
            let plus = build_random_tensor(n, dp, &mut rng).unwrap();
            let minus = build_random_tensor(n, dm, &mut rng).unwrap();
            for s in all_states(n) {
                let fast =
                    apply_rule1(&ProductState::from_bools(s.clone()), &plus, &minus).unwrap();
                assert_eq!(fast.as_slice(), oracle(&s, &plus, &minus).as_slice());
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 1000 * (8 + 16));
}

#[test]
fn sizes_below_three_only_admit_empty_tensors() {
    for n in 1..=2 {
        let z = InteractionTensor::zeros(n);
        for s in all_states(n) {
            let out = apply_rule1(&ProductState::from_bools(s.clone()), &z, &z).unwrap();
            assert_eq!(out.as_slice(), s.as_slice());
        }
    }
}

proptest! {
    /// Relabelling products before the update and undoing it afterwards gives
    /// the same result: no product is privileged by evaluation order.
    #[test]
    fn rule1_commutes_with_relabelling(
        seed in any::<u64>(),
        n in 3usize..9,
        dp in 0.0f64..0.5,
        dm in 0.0f64..0.5,
        perm_seed in any::<u64>(),
    ) {
        let mut rng = Pcg64::seed_from_u64(seed);
        let plus = build_random_tensor(n, dp, &mut rng).unwrap();
        let minus = build_random_tensor(n, dm, &mut rng).unwrap();
        let state: Vec<bool> = (0..n).map(|_| rng.gen()).collect();

        let mut perm: Vec<usize> = (0..n).collect();
        let mut prng = Pcg64::seed_from_u64(perm_seed);
        for i in (1..n).rev() {
            perm.swap(i, prng.gen_range(0..=i));
        }
        let relabel = |t: &InteractionTensor| {
            InteractionTensor::new(n, t.triples().iter().map(|&(i, j, k)| (perm[i], perm[j], perm[k])))
                .unwrap()
        };
        let mut permuted_state = vec![false; n];
        for i in 0..n {
            permuted_state[perm[i]] = state[i];
        }

        let direct = apply_rule1(&ProductState::from_bools(state), &plus, &minus).unwrap();
        let via_perm = apply_rule1(
            &ProductState::from_bools(permuted_state),
            &relabel(&plus),
            &relabel(&minus),
        )
        .unwrap();
        for (i, &pi) in perm.iter().enumerate() {
            prop_assert_eq!(direct.get(i), via_perm.get(pi));
        }
    }
}
