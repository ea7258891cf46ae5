mod common;

use nalgebra::DMatrix;
use nonlocal_spectrum::discretize::{apply, assemble_b, assemble_m, fourier_symbol, QFamily};
use nonlocal_spectrum::eigen::{
    collatz_wielandt_bounds, full_spectrum, perron, positive_start, PerronOptions,
};
use nonlocal_spectrum::evolution::{evolve, EvolveOptions};
use nonlocal_spectrum::gapbound::{gap_constants, verify_gap, DEFAULT_SLACK};
use nonlocal_spectrum::kernels::{
    jump_rate, wind_kernel, ContinuousKernel, GenericKernel, GenericTag, Potential, WoundKernel,
};
use nonlocal_spectrum::spectral::{analyze, essential_spectrum, AnalysisOptions};
use nonlocal_spectrum::TorusGrid;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid(n: usize) -> TorusGrid {
    TorusGrid::new(1, n).unwrap()
}

fn positive_samples(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..3.0, len)
}

fn nonpositive_samples(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), -2.0f64..-0.01], len)
        .prop_filter("needs a negative node", |v| v.iter().any(|&x| x < 0.0))
}

/// Wound kernels rescaled to unit quadrature mass.
fn unit_mass_kernel(g: TorusGrid) -> impl Strategy<Value = WoundKernel> {
    let normalize = move |a: WoundKernel| {
        let m = a.mass();
        WoundKernel::from_samples(g, a.samples().iter().map(|x| x / m).collect()).unwrap()
    };
    prop_oneof![
        (0.06f64..0.4).prop_map(move |s| {
            normalize(wind_kernel(&ContinuousKernel::gaussian(1, s).unwrap(), g, 1e-12).unwrap())
        }),
        (0.05f64..0.4).prop_map(move |l| {
            normalize(wind_kernel(&ContinuousKernel::exponential(1, l).unwrap(), g, 1e-12).unwrap())
        }),
        (-0.95f64..0.95).prop_map(move |a| WoundKernel::sine(g, a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_annihilates_constants(samples in positive_samples(12 * 12)) {
        let g = grid(12);
        let b = GenericKernel::from_samples(g, samples, GenericTag::Tabulated).unwrap();
        let zero = Potential::constant(g, 0.0).unwrap();
        let m = assemble_m(&b, &zero, &g).unwrap();
        let r = apply(&m, &[1.0; 12]).unwrap();
        prop_assert!(r.iter().all(|&x| x == 0.0), "{:?}", r);
    }

    #[test]
    fn mass_derivative_is_potential_quadrature(
        samples in positive_samples(10 * 10),
        v in nonpositive_samples(10),
    ) {
        let g = grid(10);
        let b = GenericKernel::from_samples(g, samples, GenericTag::Tabulated).unwrap();
        let pot = Potential::from_samples(g, v.clone()).unwrap();
        let m = assemble_m(&b, &pot, &g).unwrap();
        let du = apply(&m, &[1.0; 10]).unwrap();
        let h = g.weight();
        let lhs: f64 = h * du.iter().sum::<f64>();
        let rhs: f64 = h * v.iter().sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-13, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn generator_is_metzler(samples in positive_samples(8 * 8), v in nonpositive_samples(8)) {
        let g = grid(8);
        let b = GenericKernel::from_samples(g, samples, GenericTag::Tabulated).unwrap();
        let m = assemble_m(&b, &Potential::from_samples(g, v).unwrap(), &g).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    prop_assert!(m.matrix()[(i, j)] >= 0.0);
                }
            }
        }
    }

    #[test]
    fn perron_root_is_certified_and_matches_dense_spectrum(seed in 0u64..10_000) {
        let n = 9;
        let entries = positive_start(n * n, seed);
        let a = DMatrix::from_row_slice(n, n, &entries);
        let r = perron(&a, &PerronOptions::default()).unwrap();
        prop_assert!(r.cw_lower <= r.rho && r.rho <= r.cw_upper);
        prop_assert!(r.gap() <= 1e-11);
        let (lo, hi) = collatz_wielandt_bounds(&a, &r.vector).unwrap();
        prop_assert!(lo <= r.rho + 1e-12 && r.rho <= hi + 1e-12);
        let top = full_spectrum(&a).unwrap()[0];
        prop_assert!((top.re - r.rho).abs() <= 1e-9 && top.im == 0.0);
        let oracle = common::schur_max_real(&a).unwrap();
        prop_assert!((oracle - r.rho).abs() <= 1e-9);
    }

    #[test]
    fn dense_spectrum_matches_nalgebra(seed in 0u64..10_000) {
        let n = 10;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let ours = full_spectrum(&a).unwrap();
        let oracle = common::schur_max_real(&a).unwrap();
        prop_assert!((ours[0].re - oracle).abs() <= 1e-10);
        // trace and transpose invariance
        let trace: f64 = ours.iter().map(|z| z.re).sum();
        prop_assert!((trace - a.trace()).abs() <= 1e-10);
        let t = full_spectrum(&a.transpose()).unwrap();
        for (x, y) in ours.iter().zip(&t) {
            prop_assert!((x - y).norm() <= 1e-8);
        }
    }

    #[test]
    fn radius_of_q_is_monotone(seed in 0u64..1000) {
        let f = common::random_fixture(seed, 24);
        let family = QFamily::new(&f.kernel, &f.potential, &f.grid).unwrap();
        let a1 = family.alpha1();
        let mut prev = f64::INFINITY;
        for k in 1..=20 {
            let mu = -a1 + k as f64 * 0.25;
            let r = perron(family.at(mu).unwrap().matrix(), &PerronOptions::default()).unwrap().rho;
            prop_assert!(r <= prev + 1e-9);
            prev = r;
        }
    }

    #[test]
    fn gap_bound_holds_when_analysis_succeeds(
        a in unit_mass_kernel(grid(32)),
        v in nonpositive_samples(32),
    ) {
        let g = grid(32);
        let pot = Potential::from_samples(g, v).unwrap();
        let b = GenericKernel::convolution(&a);
        if let Ok(report) = analyze(&b, &pot, &g, &AnalysisOptions::default()) {
            let bound = gap_constants(&pot, &a).unwrap();
            let verdict = verify_gap(&report, &bound, DEFAULT_SLACK);
            prop_assert!(verdict.pass, "lambda {} kappa {}", report.lambda, bound.kappa);
        }
    }

    #[test]
    fn gap_constants_scale_with_potential(
        a in unit_mass_kernel(grid(32)),
        v in nonpositive_samples(32),
        t in 0.01f64..=1.0,
    ) {
        let g = grid(32);
        let pot = Potential::from_samples(g, v).unwrap();
        let one = gap_constants(&pot, &a).unwrap();
        let scaled = gap_constants(&pot.scaled(t), &a).unwrap();
        prop_assert!((scaled.gamma0 - one.gamma0).abs() <= 1e-12 * one.gamma0);
        prop_assert!((scaled.c1 - t * one.c1).abs() <= 1e-12 * one.c1);
        let expected = (one.c2 * one.gamma0 * one.gamma0).min(t * one.c1 / 2.0);
        prop_assert!((scaled.kappa - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn symbol_gap_matches_circulant_spectrum(a in unit_mass_kernel(grid(16))) {
        let c2 = 1.0 - fourier_symbol(&a).max_nonzero_modulus();
        // circulant eigenvalues of the B part, largest modulus is a_0 = 1
        let mut moduli: Vec<f64> = full_spectrum(assemble_b(&GenericKernel::convolution(&a)).matrix())
            .unwrap()
            .iter()
            .map(|z| z.norm())
            .collect();
        moduli.sort_by(|x, y| y.total_cmp(x));
        prop_assert!((moduli[0] - 1.0).abs() <= 1e-10);
        // with n = 16 the Nyquist mode k = 8 sits outside the resolved band
        let symbol = fourier_symbol(&a);
        let nyquist = symbol.get(&[8]).norm();
        let second = moduli[1..].iter().copied().find(|&m| (m - nyquist).abs() > 1e-12 || m > nyquist).unwrap();
        let band_max = 1.0 - c2;
        prop_assert!(
            (second - band_max).abs() <= 1e-10 || (second - nyquist).abs() <= 1e-10,
            "second {} band {} nyquist {}", second, band_max, nyquist
        );
        prop_assert!(band_max <= moduli[1] + 1e-10);
    }

    #[test]
    fn evolution_preserves_positivity(
        samples in positive_samples(10 * 10),
        v in nonpositive_samples(10),
        u0 in prop::collection::vec(0.0f64..2.0, 10),
    ) {
        prop_assume!(u0.iter().any(|&x| x > 0.0));
        let g = grid(10);
        let b = GenericKernel::from_samples(g, samples, GenericTag::Tabulated).unwrap();
        let pot = Potential::from_samples(g, v).unwrap();
        let m = assemble_m(&b, &pot, &g).unwrap();
        let alpha0 = essential_spectrum(&pot, &jump_rate(&b)).unwrap().alpha0;
        let trace = evolve(&m, &u0, &EvolveOptions::new(5.0, alpha0)).unwrap();
        prop_assert!(trace.min_value_seen >= -1e-10, "{}", trace.min_value_seen);
    }

    #[test]
    fn discrete_eigenvalues_stay_off_the_essential_set(seed in 0u64..1000) {
        let f = common::random_fixture(seed, 32);
        let r = analyze(&f.kernel, &f.potential, &f.grid, &AnalysisOptions::default()).unwrap();
        for z in &r.discrete_eigenvalues {
            prop_assert!(r.essential.distance(*z) > r.diagnostics.tol_ess);
        }
        if r.essential.distance(r.lambda.into()) > r.diagnostics.tol_ess {
            prop_assert!((r.discrete_eigenvalues[0].re - r.lambda).abs() <= 1e-7);
        }
    }
}
