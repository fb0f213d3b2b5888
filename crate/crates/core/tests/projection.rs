mod common;

use common::{affine_projection, lcg_matrix};
use proptest::prelude::*;
use sparse_ginv::instances::{generate, InstanceSpec};
use sparse_ginv::{DenseMatrix, ProblemKind, ProjectionContext};

type LinearMap<'a> = &'a dyn Fn(&DenseMatrix) -> DenseMatrix;

fn rank_one_3x2() -> (DenseMatrix, DenseMatrix, DenseMatrix) {
    // A = u vᵀ with u = (1, 2, 3), v = (1, 2): A† = v uᵀ / (|u|²|v|²), AA† = u uᵀ / |u|²
    let u = [1.0, 2.0, 3.0];
    let v = [1.0, 2.0];
    let a = DenseMatrix::from_fn(3, 2, |i, j| u[i] * v[j]);
    let pinv = DenseMatrix::from_fn(2, 3, |i, j| v[i] * u[j] / 70.0);
    let aad = DenseMatrix::from_fn(3, 3, |i, j| u[i] * u[j] / 14.0);
    (a, pinv, aad)
}

#[test]
fn matches_gram_schmidt_oracle_on_rank_one() {
    let (a, pinv, aad) = rank_one_3x2();
    let ata = a.t_matmul(&a).unwrap();
    let aat = a.matmul_t(&a).unwrap();
    let pls = |h: &DenseMatrix| &ata * h;
    let reflexive = |h: &DenseMatrix| &(h * &aad) - h;
    let pmn = |h: &DenseMatrix| h * &aat;

    for seed in 0..5 {
        let v = lcg_matrix(2, 3, seed).scaled(3.0);
        let cases: [(ProblemKind, Vec<LinearMap>); 3] = [
            (ProblemKind::P13, vec![&pls]),
            (ProblemKind::P123, vec![&pls, &reflexive]),
            (ProblemKind::P134, vec![&pls, &pmn]),
        ];
        for (problem, maps) in cases {
            let ctx = ProjectionContext::new(&a, problem).unwrap();
            assert!(ctx.a_dagger.max_abs_diff(&pinv) < 1e-14);
            let got = ctx.project(&v).unwrap();
            let want = affine_projection(&maps, &pinv, &v);
            assert!(got.max_abs_diff(&want) < 1e-12, "{problem}: {got:?} vs {want:?}");
        }
    }
}

#[test]
fn projection_properties_on_random_instances() {
    for (k, &(m, n, r)) in [(12, 6, 3), (9, 9, 4), (20, 10, 5), (7, 5, 5), (15, 15, 2)].iter().enumerate() {
        let a = generate(&InstanceSpec::new(m, n, r, 40 + k as u64)).unwrap();
        for problem in ProblemKind::ALL {
            let ctx = ProjectionContext::new(&a, problem).unwrap();
            for s in 0..10 {
                let v = lcg_matrix(n, m, 1000 * k as u64 + s).scaled(5.0);
                let w = lcg_matrix(n, m, 7 + 1000 * k as u64 + s).scaled(5.0);
                let pv = ctx.project(&v).unwrap();
                let pw = ctx.project(&w).unwrap();
                assert!(ctx.project(&pv).unwrap().max_abs_diff(&pv) < 1e-9);
                assert!(ctx.is_feasible(&pv, 1e-8 * ctx.scale()));
                assert!((&pv - &pw).frobenius_norm() <= (&v - &w).frobenius_norm() * (1.0 + 1e-12));
                // V − Π(V) is orthogonal to every feasible direction Π(W) − Π(0)
                let dir = &pw - &ctx.project(&DenseMatrix::zeros(n, m)).unwrap();
                let err = &v - &pv;
                assert!(err.inner(&dir).abs() <= 1e-8 * err.frobenius_norm().max(1.0) * dir.frobenius_norm().max(1.0));
            }
        }
    }
}

#[test]
fn pseudoinverse_is_fixed_point_of_every_projection() {
    let a = generate(&InstanceSpec::new(8, 5, 3, 3)).unwrap();
    for problem in ProblemKind::ALL {
        let ctx = ProjectionContext::new(&a, problem).unwrap();
        assert!(ctx.project(&ctx.a_dagger).unwrap().max_abs_diff(&ctx.a_dagger) < 1e-13);
    }
}

#[test]
fn feasible_sets_are_nested() {
    // P123 and P134 feasible sets lie inside the P13 set
    let a = generate(&InstanceSpec::new(8, 6, 3, 9)).unwrap();
    let p13 = ProjectionContext::new(&a, ProblemKind::P13).unwrap();
    for problem in [ProblemKind::P123, ProblemKind::P134] {
        let ctx = p13.with_problem(problem);
        let h = ctx.project(&lcg_matrix(6, 8, 5)).unwrap();
        assert!(p13.is_feasible(&h, 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent_and_orthogonal(entries in prop::collection::vec(-10.0f64..10.0, 24), pick in 0usize..3) {
        let a = generate(&InstanceSpec::new(6, 4, 2, 11)).unwrap();
        let ctx = ProjectionContext::new(&a, ProblemKind::ALL[pick]).unwrap();
        let v = DenseMatrix::new(4, 6, entries).unwrap();
        let pv = ctx.project(&v).unwrap();
        prop_assert!(ctx.project(&pv).unwrap().max_abs_diff(&pv) < 1e-9);
        // Π(V) − A† is a feasible direction
        let dir = &pv - &ctx.a_dagger;
        prop_assert!((&v - &pv).inner(&dir).abs() < 1e-8 * (1.0 + v.frobenius_norm().powi(2)));
    }
}
