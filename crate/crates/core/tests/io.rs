use proptest::prelude::*;
use sparse_ginv::instances::{generate, geometric_profile, parse_suite_config, write_suite_config, InstanceSpec, SingularValues};
use sparse_ginv::mtx::{read_matrix, write_matrix};
use sparse_ginv::svd::{numerical_rank, singular_values, DEFAULT_RANK_TOL};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_instances_have_requested_spectrum(m in 2usize..12, n in 2usize..12, r_frac in 0.0f64..1.0, seed in 0u64..1000) {
        let r = 1 + ((m.min(n) - 1) as f64 * r_frac) as usize;
        let spec = InstanceSpec::new(m, n, r, seed);
        let a = generate(&spec).unwrap();
        prop_assert_eq!(a.shape(), (m, n));
        prop_assert_eq!(numerical_rank(&a, DEFAULT_RANK_TOL).unwrap(), r);
        let sv = singular_values(&a).unwrap();
        for (got, want) in sv.iter().zip(geometric_profile(2.0, r)) {
            prop_assert!((got - want).abs() < 1e-12);
        }
        // same seed, same matrix
        prop_assert_eq!(generate(&spec).unwrap(), a);
    }

    #[test]
    fn matrix_market_round_trip_is_exact(m in 1usize..8, n in 1usize..8, seed in 0u64..100) {
        let a = generate(&InstanceSpec { singular_values: SingularValues::UnitSpread, ..InstanceSpec::new(m, n, 1, seed) }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        write_matrix(&a, &path).unwrap();
        prop_assert_eq!(read_matrix(&path).unwrap(), a);
    }
}

#[test]
fn suite_config_round_trip() {
    let specs = vec![
        InstanceSpec::new(10, 5, 2, 1),
        InstanceSpec { singular_values: SingularValues::Explicit(vec![3.0, 0.25]), ..InstanceSpec::new(4, 4, 2, 9) },
        InstanceSpec { singular_values: SingularValues::UnitSpread, ..InstanceSpec::new(6, 3, 3, 2) },
    ];
    let text = write_suite_config(&specs);
    assert_eq!(parse_suite_config(&text).unwrap(), specs);
}
