use approx::assert_relative_eq;
use proptest::prelude::*;

use heun_spectra::heun::{heunb_degree, SpectralPoly, TridiagonalSequences};
use heun_spectra::models::{
    block_for, block_heun, block_sequences, permissible_blocks, solve_block, validate_block, BlockHeun, Case,
    ModelConfig,
};
use heun_spectra::precision::PrecisionPolicy;
use heun_spectra::report::Sig17;
use heun_spectra::spectral::{determinant_numeric, determinant_polynomial, symmetric_roots};

fn poly() -> impl Strategy<Value = SpectralPoly> {
    (-2.0..2.0f64, -2.0..2.0f64, -1.0..1.0f64).prop_map(|(c0, c1, c2)| SpectralPoly([c0, c1, c2]))
}

fn sequences(max_n: usize) -> impl Strategy<Value = TridiagonalSequences> {
    (0..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(poly(), n + 1),
            prop::collection::vec(-3.0..3.0f64, n),
            prop::collection::vec(poly(), n),
        )
            .prop_map(|(a, b, c)| {
                let b = b.into_iter().map(SpectralPoly::constant).collect();
                TridiagonalSequences::new(a, b, c).unwrap()
            })
    })
}

/// Continuant of absolute values: bounds the terms that cancel in the determinant.
fn abs_continuant(seqs: &TridiagonalSequences, s: f64) -> f64 {
    let num = seqs.at_f64(s);
    let (mut prev, mut cur) = (1.0, num.a[0].abs());
    for j in 1..num.a.len() {
        let next = num.a[j].abs() * cur + (num.b[j - 1] * num.c[j - 1]).abs() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn repulsive_block() -> impl Strategy<Value = (ModelConfig, usize)> {
    (prop_oneof![Just(Case::A), Just(Case::B)], 1..=6i64, -5.0..5.0f64, 0..8usize).prop_map(|(case, k, eps, pick)| {
        (ModelConfig::repulsive(case, k, eps).unwrap(), pick)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn continuant_matches_dense_lu(seqs in sequences(20), s in -4.0..4.0f64) {
        let size = seqs.size();
        let rows = seqs.dense_at(s);
        let dense = nalgebra::DMatrix::from_fn(size, size, |i, j| rows[i][j]).lu().determinant();
        let poly = determinant_polynomial(&seqs).eval(s);
        let scale = abs_continuant(&seqs, s);
        prop_assert!((dense - poly).abs() <= 1e-10 * scale, "dense {dense:e} poly {poly:e} scale {scale:e}");
    }

    #[test]
    fn numeric_and_polynomial_paths_agree(seqs in sequences(5), s in -4.0..4.0f64) {
        let numeric = determinant_numeric(&seqs, s);
        let poly = determinant_polynomial(&seqs).eval(s);
        prop_assert!((numeric - poly).abs() <= 1e-12 * abs_continuant(&seqs, s));
    }

    #[test]
    fn constant_term_is_value_at_zero(seqs in sequences(8)) {
        let det = determinant_polynomial(&seqs);
        let scale = abs_continuant(&seqs, 0.0).max(f64::MIN_POSITIVE);
        prop_assert!((det.coeffs[0] - determinant_numeric(&seqs, 0.0)).abs() <= 1e-13 * scale);
    }

    #[test]
    fn sig17_round_trips(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        prop_assume!(x.is_finite());
        let text = serde_json::to_string(&Sig17(x)).unwrap();
        let back: Sig17 = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.0.to_bits(), x.to_bits());
    }

    #[test]
    fn repulsive_spectra_are_real((cfg, pick) in repulsive_block()) {
        let blocks = permissible_blocks(&cfg, 8).unwrap();
        prop_assume!(!blocks.is_empty());
        let block = blocks[pick % blocks.len()];
        let sol = solve_block(&cfg, &block, PrecisionPolicy::Auto).unwrap();
        prop_assert!(sol.complex_roots.is_empty());
        prop_assert_eq!(sol.roots.len(), block.n + 1);
        let mut companion: Vec<f64> = sol.roots.iter().map(|r| r.value).collect();
        companion.sort_by(f64::total_cmp);
        let symmetric = symmetric_roots(&block_sequences(&cfg, &block).unwrap()).unwrap();
        for (x, y) in companion.iter().zip(&symmetric) {
            assert_relative_eq!(*x, *y, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn null_vectors_satisfy_every_relation((cfg, pick) in repulsive_block()) {
        let blocks = permissible_blocks(&cfg, 8).unwrap();
        prop_assume!(!blocks.is_empty());
        let block = blocks[pick % blocks.len()];
        let seqs = block_sequences(&cfg, &block).unwrap();
        for root in solve_block(&cfg, &block, PrecisionPolicy::Auto).unwrap().roots {
            let num = seqs.at_f64(root.value);
            let p = &root.eigenvector.unwrap().coeffs;
            let pmax = p.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            for j in 0..=block.n {
                let lower = if j == 0 { 0.0 } else { num.c[j - 1] * p[j - 1] };
                let upper = if j < block.n { num.b[j] * p[j + 1] } else { 0.0 };
                let scale = pmax * (num.a[j].abs() + if j > 0 { num.c[j - 1].abs() } else { 0.0 }
                    + if j < block.n { num.b[j].abs() } else { 0.0 }).max(1.0);
                prop_assert!((lower + num.a[j] * p[j] + upper).abs() <= 1e-8 * scale, "relation {j}");
            }
        }
    }

    #[test]
    fn model_blocks_are_heun_polynomials(case in prop_oneof![Just(Case::A), Just(Case::B)], k in 1..=8i64, eps in -5.0..5.0f64) {
        let cfg = ModelConfig::repulsive(case, k, eps).unwrap();
        for block in permissible_blocks(&cfg, 8).unwrap() {
            prop_assert!(validate_block(&cfg, &block).is_ok());
            prop_assert_eq!(block_for(&cfg, Some(block.n), None).unwrap(), block);
            if let BlockHeun::Biconfluent(p) = block_heun(&cfg, &block).unwrap() {
                prop_assert_eq!(heunb_degree(&p.at(0.3).unwrap()), Some(block.n));
            } else {
                prop_assert!(false, "repulsive block reduced to the confluent equation");
            }
        }
    }

    #[test]
    fn non_rational_energies_are_negative(k in 1..=6i64, eps in -5.0..60.0f64, first in any::<bool>()) {
        let (case, k) = if first { (Case::First, -k) } else { (Case::Second, k) };
        let cfg = ModelConfig::non_rational(case, k, eps).unwrap();
        for block in permissible_blocks(&cfg, 3).unwrap() {
            let sol = solve_block(&cfg, &block, PrecisionPolicy::Auto).unwrap();
            prop_assert_eq!(sol.total_roots(), 2 * (block.n + 1));
            for r in sol.physical() {
                prop_assert!(r.value < 0.0 && r.energy < 0.0);
                assert_relative_eq!(r.energy, -r.value * r.value);
            }
        }
    }
}
