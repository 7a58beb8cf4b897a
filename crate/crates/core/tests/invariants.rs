//! Cross-module invariants, checked property-style on seeded random
//! graphs and on the fixed corpus. Each block pits one implementation
//! against an independent oracle: iterated kernels against dense matrix
//! powers, the bipartition certificate against exhaustive odd-walk
//! search, witness defects against the Rayleigh floor of the spectrum,
//! and the gradient against the Dirichlet form.

use nalgebra::DMatrix;
use proptest::prelude::*;

use oddwalk::generators::{corpus, generate, lazify, GraphKind, GraphSpec};
use oddwalk::kernel::transition_row;
use oddwalk::spectral::GAP_ZERO_TOL;
use oddwalk::{
    bipartition, distance_quasidistance, dvl_p2_check, eps_ball, eps_view, fit_growth,
    gap_at_minus_one, gradient, implication_check, iterate_kernel, lb_odd_profile,
    lemma_pdv_check, odd_walk_oracle, parity_partition_of_ball, power_quasidistance,
    sigma_rescale, spectrum, BipartiteCertificate, LpExponent, VertexFunction, WeightedGraph,
};

/// Deterministic random graph from the generator family.
fn seeded_graph(vertices: usize, density: f64, seed: u64) -> WeightedGraph {
    let spec = GraphSpec::new(GraphKind::RandomWeighted { vertices, density, seed });
    generate(&spec).expect("random spec is valid")
}

/// Row-stochastic dense matrix `P(x, y) = p(x, y) m(y)`.
fn markov_matrix(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.vertex_count();
    DMatrix::from_fn(n, n, |x, y| g.kernel(x, y) * g.measure(y))
}

/// Independent oracle for the k-step kernel: matrix power divided by the
/// target measure.
fn kernel_by_matrix_power(g: &WeightedGraph, k: usize) -> DMatrix<f64> {
    let n = g.vertex_count();
    let p = markov_matrix(g);
    let mut power = DMatrix::identity(n, n);
    for _ in 0..k {
        power = &power * &p;
    }
    DMatrix::from_fn(n, n, |x, y| power[(x, y)] / g.measure(y))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn iterated_kernel_matches_matrix_power(
        vertices in 2usize..12,
        density in 0.1f64..0.9,
        seed in any::<u64>(),
        steps in 1usize..7,
    ) {
        let g = seeded_graph(vertices, density, seed);
        let kernel = iterate_kernel(&g, steps).unwrap();
        let oracle = kernel_by_matrix_power(&g, steps);
        for x in 0..g.vertex_count() {
            for y in 0..g.vertex_count() {
                prop_assert!(
                    (kernel.entry(x, y) - oracle[(x, y)]).abs() < 1e-10,
                    "({x}, {y}) at {steps} steps: {} vs {}",
                    kernel.entry(x, y),
                    oracle[(x, y)]
                );
            }
        }
    }

    #[test]
    fn chapman_kolmogorov_composition(
        vertices in 2usize..10,
        density in 0.1f64..0.9,
        seed in any::<u64>(),
        j in 1usize..5,
        k in 1usize..5,
    ) {
        let g = seeded_graph(vertices, density, seed);
        let kj = iterate_kernel(&g, j).unwrap();
        let kk = iterate_kernel(&g, k).unwrap();
        let kjk = iterate_kernel(&g, j + k).unwrap();
        for x in 0..g.vertex_count() {
            for y in 0..g.vertex_count() {
                let composed: f64 = (0..g.vertex_count())
                    .map(|z| kj.entry(x, z) * kk.entry(z, y) * g.measure(z))
                    .sum();
                prop_assert!((composed - kjk.entry(x, y)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn row_application_agrees_with_dense_kernel(
        vertices in 2usize..12,
        density in 0.1f64..0.9,
        seed in any::<u64>(),
        steps in 0usize..6,
    ) {
        let g = seeded_graph(vertices, density, seed);
        let kernel = iterate_kernel(&g, steps).unwrap();
        for x in 0..g.vertex_count() {
            let row = transition_row(&g, x, steps).unwrap();
            for (y, &value) in row.iter().enumerate() {
                prop_assert!((value - kernel.entry(x, y)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bipartition_certificate_matches_odd_walk_search(
        vertices in 2usize..12,
        density in 0.1f64..0.9,
        seed in any::<u64>(),
        eps in 0.0f64..0.5,
        subset_seed in any::<u32>(),
    ) {
        let g = seeded_graph(vertices, density, seed);
        let view = eps_view(&g, eps).unwrap();
        let n = g.vertex_count();
        let mask = (u64::from(subset_seed) % ((1u64 << n) - 1)) + 1;
        let set: Vec<usize> = (0..n).filter(|x| mask >> x & 1 == 1).collect();
        let has_odd = odd_walk_oracle(&view, &set).unwrap();
        match bipartition(&view, &set).unwrap() {
            BipartiteCertificate::Bipartite { class0, class1 } => {
                prop_assert!(!has_odd);
                let mut merged: Vec<usize> =
                    class0.iter().chain(&class1).copied().collect();
                merged.sort_unstable();
                prop_assert_eq!(&merged, &set);
                for class in [&class0, &class1] {
                    for (i, &a) in class.iter().enumerate() {
                        for &b in &class[i..] {
                            prop_assert!(
                                !view.are_close(a, b),
                                "eps-edge inside one class: ({a}, {b})"
                            );
                        }
                    }
                }
            }
            BipartiteCertificate::NotBipartite { witness } => {
                prop_assert!(has_odd);
                prop_assert!(view.is_closed_odd_walk(&witness));
                prop_assert!(witness.iter().all(|v| set.contains(v)));
            }
        }
    }

    #[test]
    fn balls_shrink_as_the_threshold_rises(
        vertices in 2usize..12,
        density in 0.1f64..0.9,
        seed in any::<u64>(),
        radius in 1usize..5,
    ) {
        let g = seeded_graph(vertices, density, seed);
        let low = eps_view(&g, 0.02).unwrap();
        let high = eps_view(&g, 0.2).unwrap();
        for x in 0..g.vertex_count() {
            let big = eps_ball(&low, x, radius).unwrap();
            let small = eps_ball(&high, x, radius).unwrap();
            for v in &small.members {
                prop_assert!(big.members.contains(v));
            }
        }
    }

    #[test]
    fn energy_identity_couples_gradient_and_dirichlet_form(
        vertices in 2usize..12,
        density in 0.1f64..0.9,
        seed in any::<u64>(),
        fseed in any::<u64>(),
    ) {
        let g = seeded_graph(vertices, density, seed);
        let values: Vec<f64> = (0..g.vertex_count())
            .map(|x| {
                let h = x as u64 ^ fseed;
                ((h.wrapping_mul(0x9e3779b97f4a7c15) >> 11) as f64
                    / (1u64 << 53) as f64)
                    * 4.0
                    - 2.0
            })
            .collect();
        let f = VertexFunction::new(values).unwrap();
        let grad = gradient(&g, &f).unwrap();
        let lhs = g.lp_norm(&grad, LpExponent::Finite(2.0)).unwrap().powi(2);
        let lap = g.apply_laplacian(&f).unwrap();
        let rhs = 2.0 * g.inner_product(&lap, &f).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn second_diagonal_volume_bound_never_fails(
        vertices in 2usize..14,
        density in 0.1f64..0.9,
        seed in any::<u64>(),
    ) {
        let g = seeded_graph(vertices, density, seed);
        let check = dvl_p2_check(&g);
        prop_assert!(check.holds, "min ratio {}", check.min_ratio);
    }
}

#[test]
fn cycles_are_bipartite_exactly_at_even_length() {
    for n in 3..=20 {
        let g = generate(&GraphSpec::new(GraphKind::Cycle(n))).unwrap();
        let view = eps_view(&g, 0.0).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let cert = bipartition(&view, &all).unwrap();
        let gap = gap_at_minus_one(&g).unwrap();
        if n % 2 == 0 {
            assert!(matches!(cert, BipartiteCertificate::Bipartite { .. }), "C{n}");
            assert!(gap < GAP_ZERO_TOL, "C{n} gap {gap}");
        } else {
            assert!(matches!(cert, BipartiteCertificate::NotBipartite { .. }), "C{n}");
            assert!(gap > GAP_ZERO_TOL, "C{n} gap {gap}");
        }
    }
}

#[test]
fn witness_defect_sits_above_the_rayleigh_floor() {
    // For any +-1/0 witness, ||(I+P) f||_2^2 / ||f||_2^2 is a Rayleigh
    // quotient of (I+P)^2, so it cannot undercut (1 + lambda_min)^2.
    let mut checked = 0usize;
    for entry in corpus() {
        let g = &entry.graph;
        if g.has_loops() || !g.is_connected() || g.vertex_count() > 128 {
            continue;
        }
        let gap = gap_at_minus_one(g).unwrap();
        let view = eps_view(g, 0.0).unwrap();
        for center in 0..g.vertex_count().min(4) {
            let ball = eps_ball(&view, center, 2).unwrap();
            let Ok((class0, class1)) = parity_partition_of_ball(&view, &ball) else {
                continue;
            };
            let Ok(witness) =
                oddwalk::build_witness(&view, &ball, &class0, &class1, 2.0)
            else {
                continue;
            };
            assert!(
                witness.defect >= gap * gap - 1e-9,
                "{}: defect {} under gap^2 {}",
                entry.name,
                witness.defect,
                gap * gap
            );
            checked += 1;
        }
    }
    assert!(checked > 20, "only {checked} witnesses checked");
}

#[test]
fn lazy_walk_shifts_the_spectrum_affinely() {
    // theta -> alpha + (1 - alpha) theta, eigenvalue by eigenvalue.
    for (name, alpha) in [("cycle:6", 0.25), ("path:5", 0.5), ("complete:4", 0.125)] {
        let g = generate(&name.parse().unwrap()).unwrap();
        let lazy = lazify(&g, alpha).unwrap();
        let base = spectrum(&g).unwrap();
        let shifted = spectrum(&lazy).unwrap();
        for (b, s) in base.iter().zip(&shifted) {
            assert!(
                (alpha + (1.0 - alpha) * b - s).abs() < 1e-9,
                "{name} alpha={alpha}: {b} -> {s}"
            );
        }
    }
}

#[test]
fn growth_implications_hold_across_the_corpus() {
    for entry in corpus() {
        let g = &entry.graph;
        if !g.is_connected() {
            continue;
        }
        let fit = fit_growth(g, 4).unwrap();
        let report = implication_check(g, &fit).unwrap();
        assert_eq!(report.dv_violations, 0, "{}", entry.name);
        assert!(report.dv_implies_pdv, "{}", entry.name);
        assert!(report.pdv_implies_dvl, "{}", entry.name);
    }
}

#[test]
fn rescaled_quasidistances_validate_across_the_corpus() {
    for entry in corpus() {
        let g = &entry.graph;
        if !g.is_connected() || g.vertex_count() > 64 {
            continue;
        }
        for qd in [distance_quasidistance(g).unwrap(), power_quasidistance(g, 2.0).unwrap()] {
            let check = lemma_pdv_check(g, &qd, 4).unwrap();
            assert!(check.holds, "{}: {:?}", entry.name, check);
            for l in [1, 2, 3] {
                let sigma = sigma_rescale(g, &qd, l).unwrap();
                assert!(sigma.c_rho > 0.0, "{} l={l}", entry.name);
            }
        }
    }
}

#[test]
fn odd_diagonal_infima_vanish_exactly_on_bipartite_graphs() {
    for entry in corpus() {
        let g = &entry.graph;
        if g.has_loops() || !g.is_connected() || g.vertex_count() > 128 {
            continue;
        }
        let view = eps_view(g, 0.0).unwrap();
        let all: Vec<usize> = (0..g.vertex_count()).collect();
        let bipartite =
            matches!(bipartition(&view, &all).unwrap(), BipartiteCertificate::Bipartite { .. });
        let profile = lb_odd_profile(g, 9).unwrap();
        if bipartite {
            for row in &profile {
                assert_eq!(row.value, 0.0, "{} k={}", entry.name, row.k);
            }
        } else {
            assert!(
                profile.iter().any(|row| row.value > 1e-12),
                "{}: no positive odd return up to k = 9",
                entry.name
            );
        }
    }
}
