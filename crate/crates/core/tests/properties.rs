use limitmotive::corpus::{permute_components, random_curve, random_description, FuzzParams};
use limitmotive::curve::{betti1, cycle_basis, dual_graph, NodalCurve, ValidationOptions};
use limitmotive::exactla::{
    cokernel_structure, homology_at, image_basis, kernel_basis, smith, IntegerMatrix,
};
use limitmotive::koszul::{binomial, build_complex, cohomology, multichoose, FreeAbelianMap};
use limitmotive::limitmhs::limit_graded;
use limitmotive::motive::pairing_matrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntegerMatrix> {
    (0..=max_dim, 0..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c).prop_map(move |v| {
            IntegerMatrix::from_entries(r, c, v.into_iter().map(BigInt::from).collect())
        })
    })
}

fn sized_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntegerMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c).prop_map(move |v| {
            IntegerMatrix::from_entries(r, c, v.into_iter().map(BigInt::from).collect())
        })
    })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// gcd of all `k x k` minors.
fn minor_gcd(a: &IntegerMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rows in subsets(a.rows(), k) {
        for cols in subsets(a.cols(), k) {
            let m = a.select_rows(rows.iter().copied()).select_columns(cols.iter().copied());
            g = g.gcd(&m.determinant());
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn smith_decomposition_is_exact(a in sized_matrix(6, 9)) {
        let snf = smith(&a);
        prop_assert_eq!(&(&snf.u * &a) * &snf.v, snf.s.clone());
        prop_assert_eq!(&snf.u * &snf.u_inv, IntegerMatrix::identity(a.rows()));
        prop_assert_eq!(&snf.v * &snf.v_inv, IntegerMatrix::identity(a.cols()));
        prop_assert!(snf.u.determinant().abs().is_one());
        prop_assert!(snf.v.determinant().abs().is_one());
        let diag = snf.diagonal();
        for i in 0..diag.len() {
            prop_assert_eq!(diag[i].is_zero(), i >= snf.rank());
            prop_assert!(!diag[i].is_negative());
            if i + 1 < snf.rank() {
                prop_assert!((&diag[i + 1] % &diag[i]).is_zero());
            }
        }
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    prop_assert!(snf.s.get(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn invariant_factors_match_minor_gcds(a in sized_matrix(4, 5)) {
        let factors = smith(&a).invariant_factors();
        let mut product = BigInt::one();
        for k in 1..=a.rows().min(a.cols()) {
            if k <= factors.len() {
                product *= &factors[k - 1];
                prop_assert_eq!(minor_gcd(&a, k), product.clone());
            } else {
                prop_assert!(minor_gcd(&a, k).is_zero());
            }
        }
        prop_assert_eq!(a.rank(), factors.len());
    }

    #[test]
    fn kernel_is_saturated(a in sized_matrix(5, 4)) {
        let k = kernel_basis(&a);
        prop_assert!((&a * &k).is_zero());
        prop_assert_eq!(k.cols(), a.cols() - a.rank());
        prop_assert!(cokernel_structure(&k).is_free());
        let im = image_basis(&a);
        prop_assert_eq!(im.cols(), a.rank());
        prop_assert_eq!(cokernel_structure(&im), cokernel_structure(&a));
    }

    #[test]
    fn koszul_euler_characteristic(eps in matrix(3, 3), n in 0usize..=4) {
        let map = FreeAbelianMap::from_matrix(eps);
        let (e, f) = (map.source_rank(), map.target_rank());
        let complex = build_complex(&map, n);
        let mut from_terms = 0i64;
        let mut from_cohomology = 0i64;
        for q in 0..=n {
            let sign = if q % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(complex.term_dim(q), multichoose(e, n - q) * binomial(f, q));
            from_terms += sign * complex.term_dim(q) as i64;
            from_cohomology += sign * cohomology(&complex, q).free_rank as i64;
        }
        prop_assert_eq!(from_terms, complex.euler_characteristic());
        prop_assert_eq!(from_terms, from_cohomology);
        for q in 0..n as isize {
            prop_assert!((&complex.differential(q + 1) * &complex.differential(q)).is_zero());
        }
    }

    #[test]
    fn homology_of_exact_pair(a in sized_matrix(4, 3)) {
        let k = kernel_basis(&a);
        let h = homology_at(&k, &a).unwrap();
        prop_assert!(h.is_trivial());
    }

    #[test]
    fn cycle_bases_span_the_cycle_space(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let curve = random_curve(&mut rng, &FuzzParams::default());
        let g = dual_graph(&curve);
        let basis = cycle_basis(&g);
        prop_assert_eq!(basis.len(), g.edge_count() + g.connected_components - g.vertex_count());
        prop_assert_eq!(basis.len(), betti1(&g));
        for cycle in &basis {
            prop_assert!(g.boundary(cycle).iter().all(|&x| x == 0));
        }
        if !basis.is_empty() {
            let m = IntegerMatrix::from_columns(
                g.edge_count(),
                &basis.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect::<Vec<_>>(),
            );
            prop_assert!(cokernel_structure(&m).is_free());
        }
    }

    #[test]
    fn invariants_ignore_component_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let desc = random_description(&mut rng, &FuzzParams { rational_only: true, ..FuzzParams::default() });
        let mut perm: Vec<usize> = (0..desc.components.len()).collect();
        perm.reverse();
        let opts = ValidationOptions::default();
        let a = NodalCurve::new(desc.clone(), &opts).unwrap();
        let b = NodalCurve::new(permute_components(&desc, &perm), &opts).unwrap();
        let (sa, sb) = (limit_graded(&a), limit_graded(&b));
        prop_assert_eq!((sa.gr0_dim, sa.gr1_dim, sa.gr2_dim), (sb.gr0_dim, sb.gr1_dim, sb.gr2_dim));
        prop_assert_eq!(pairing_matrix(&a).determinant(), pairing_matrix(&b).determinant());
    }
}
