use carrier_core::boolean::BooleanFunction;
use carrier_core::exact::rat;
use carrier_core::hadamard::{hadamard_spectrum, normalized_transform};
use carrier_core::interference::interference_order_exact;
use carrier_core::juntas::{count_k_juntas, effective_variables, enumerate_k_juntas, fourier_degree, is_k_junta};
use carrier_core::symmetry::{apply_inversion, apply_symmetry, HyperoctahedralElement};
use carrier_core::{Exec, RationalBehavior};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn function_strategy() -> impl Strategy<Value = BooleanFunction> {
    (1usize..=5).prop_flat_map(|n| prop::collection::vec(any::<bool>(), 1 << n).prop_map(move |bits| BooleanFunction::from_bits(n, &bits).unwrap()))
}

fn behavior_strategy() -> impl Strategy<Value = RationalBehavior> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(0i64..=12, 1 << n).prop_map(move |nums| RationalBehavior::new(n, nums.into_iter().map(|v| rat(v, 12)).collect()).unwrap())
    })
}

fn element(n: usize, seed: u64) -> HyperoctahedralElement {
    HyperoctahedralElement::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #[test]
    fn hex_round_trip(f in function_strategy()) {
        prop_assert_eq!(BooleanFunction::from_hex(f.n_inputs(), &f.to_hex()).unwrap(), f);
    }

    #[test]
    fn symmetry_preserves_junta_structure(f in function_strategy(), seed in any::<u64>()) {
        let g = element(f.n_inputs(), seed);
        let image = g.apply_function(&f).unwrap();
        prop_assert_eq!(effective_variables(&image).len(), effective_variables(&f).len());
        prop_assert_eq!(fourier_degree(&image), fourier_degree(&f));
        for k in 0..=f.n_inputs() {
            prop_assert_eq!(is_k_junta(&image, k), is_k_junta(&f, k));
        }
        prop_assert_eq!(g.inverse().apply_function(&image).unwrap(), f);
    }

    #[test]
    fn symmetry_and_inversion_preserve_interference_order(b in behavior_strategy(), seed in any::<u64>()) {
        let order = interference_order_exact(&b);
        let g = element(b.n_inputs(), seed);
        prop_assert_eq!(interference_order_exact(&apply_symmetry(&g, &b).unwrap()), order);
        prop_assert_eq!(interference_order_exact(&apply_inversion(&b)), order);
        prop_assert_eq!(apply_inversion(&apply_inversion(&b)), b);
    }

    #[test]
    fn spectrum_inverts(b in behavior_strategy()) {
        let f = b.to_float();
        let spectrum = hadamard_spectrum(&f);
        for (a, c) in spectrum.inverse().iter().zip(f.p1_table()) {
            prop_assert!((a - c).abs() < 1e-12);
        }
        // The normalized transform is an involution.
        let twice = normalized_transform(&normalized_transform(f.p1_table()));
        for (a, c) in twice.iter().zip(f.p1_table()) {
            prop_assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn behavior_json_round_trip(b in behavior_strategy()) {
        let back = RationalBehavior::from_json_str(&b.to_json_value().to_string()).unwrap();
        prop_assert_eq!(back, b);
    }
}

#[test]
fn counts_match_enumeration() {
    for n in 1..=4 {
        for k in 0..=n {
            let listed = enumerate_k_juntas(n, k, 1 << 20, Exec::default()).unwrap().len();
            assert_eq!(count_k_juntas(n, k), BigUint::from(listed), "N={n}, K={k}");
        }
    }
}
