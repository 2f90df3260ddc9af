use std::collections::HashSet;

use dynahill::cipher::{decrypt_message, encrypt_message};
use dynahill::codec::{decode, encode, EncodingMode};
use dynahill::keysched::{advance_chain, estimate_order, keygen, OrderResult};
use dynahill::matvec::{mat_mat_mul, Matrix, Vector};
use dynahill::{KeyMaterial, Prime, Untallied};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn small_params() -> impl Strategy<Value = (u64, usize)> {
    (prop::sample::select(vec![3u64, 5, 29]), 2usize..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bytes_roundtrip(data in prop::collection::vec(any::<u8>(), 0..200),
                       p in prop::sample::select(vec![2u64, 3, 29, 257, 65537]),
                       n in 1usize..=5, seed in any::<u64>()) {
        let prime = Prime::new(p).unwrap();
        let mode = EncodingMode::default_for(prime);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let km = keygen(n, prime, &mut rng, 1).unwrap();
        let blocks = encode(&data, prime, n, mode).unwrap();
        let ct = encrypt_message(&km, &blocks, &mut Untallied).unwrap();
        let pt = decrypt_message(&km, &ct, &mut Untallied).unwrap();
        prop_assert_eq!(decode(&pt, prime, n, mode, data.len()).unwrap(), data);
    }

    #[test]
    fn chain_closed_form((p, n) in small_params(), seed in any::<u64>()) {
        let prime = Prime::new(p).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let km = keygen(n, prime, &mut rng, 1).unwrap();
        let mut state = km.initial_state();
        for i in 1..=20u64 {
            let m_pow = km.transform().pow(i - 1);
            prop_assert_eq!(&state.key, &mat_mat_mul(km.initial_key(), &m_pow, &mut Untallied).unwrap());
            prop_assert_eq!(state.index, i);
            state = advance_chain(&km, &state, &mut Untallied);
        }
    }

    #[test]
    fn long_chains_stay_valid((p, n) in small_params(), seed in any::<u64>()) {
        let prime = Prime::new(p).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let km = keygen(n, prime, &mut rng, 1).unwrap();
        let mut state = km.initial_state();
        for _ in 0..60 {
            prop_assert!(state.key.is_nonsingular());
            prop_assert!(!state.whitening.is_zero());
            state = advance_chain(&km, &state, &mut Untallied);
        }
    }

    #[test]
    fn perturbing_initial_vector_changes_every_block(seed in any::<u64>(), coord in 0usize..3, delta in 1u64..29) {
        let prime = Prime::new(29).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let km = keygen(3, prime, &mut rng, 1).unwrap();
        let mut iv = km.initial_vector().to_u64s();
        iv[coord] = (iv[coord] + delta) % 29;
        let iv = Vector::from_u64s(prime, &iv).unwrap();
        prop_assume!(!iv.is_zero());
        let other = KeyMaterial::new(km.transform().clone(), km.initial_key().clone(), iv).unwrap();
        let msg: Vec<Vector> = (0..200).map(|_| Vector::random(prime, 3, &mut rng).unwrap()).collect();
        let a = encrypt_message(&km, &msg, &mut Untallied).unwrap();
        let b = encrypt_message(&other, &msg, &mut Untallied).unwrap();
        let changed = a.iter().zip(&b).filter(|(x, y)| x != y).count();
        prop_assert!(changed * 100 >= 99 * msg.len(), "{changed}/200 blocks changed");
    }
}

#[test]
fn equal_plaintext_blocks_rarely_collide() {
    let prime = Prime::new(257).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    let km = keygen(3, prime, &mut rng, 1 << 16).unwrap();
    let block = Vector::from_u64s(prime, &[65, 65, 65]).unwrap();
    let msg = vec![block; 2000];
    let ct = encrypt_message(&km, &msg, &mut Untallied).unwrap();
    let distinct: HashSet<_> = ct.iter().map(|c| c.to_u64s()).collect();
    let repeats = ct.len() - distinct.len();
    assert!(
        repeats * 100 <= ct.len(),
        "{repeats} repeated ciphertext blocks"
    );
}

#[test]
fn chain_is_periodic_in_the_order_of_the_transform() {
    let prime = Prime::new(29).unwrap();
    // cyclic coordinate shift (order 3) and a diagonal of order 4 (12 has order 4 mod 29)
    let cases: [(&[&[u64]], u64); 3] = [
        (&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]], 3),
        (&[&[12, 0, 0], &[0, 1, 0], &[0, 0, 1]], 4),
        (&[&[28, 0, 0], &[0, 28, 0], &[0, 0, 28]], 2),
    ];
    let b1 = Matrix::from_u64_rows(prime, &[&[1, 2, 0], &[3, 1, 0], &[1, 28, 4]]).unwrap();
    let i1 = Vector::from_u64s(prime, &[2, 1, 5]).unwrap();
    for (rows, k) in cases {
        let m = Matrix::from_u64_rows(prime, rows).unwrap();
        assert_eq!(estimate_order(&m, 100).unwrap(), OrderResult::Exact(k));
        let km = KeyMaterial::new(m, b1.clone(), i1.clone()).unwrap();
        let mut states = vec![km.initial_state()];
        for _ in 0..3 * k {
            let next = advance_chain(&km, states.last().unwrap(), &mut Untallied);
            states.push(next);
        }
        for i in 0..2 * k as usize {
            let j = i + k as usize;
            assert_eq!(states[i].key, states[j].key, "order {k}, step {i}");
            assert_eq!(states[i].whitening, states[j].whitening);
        }
        // no shorter period for the key sequence
        for d in 1..k as usize {
            assert_ne!(states[0].key, states[d].key, "order {k} repeated after {d}");
        }
    }
}
