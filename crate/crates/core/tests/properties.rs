mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_pu::basis::{BasisConfig, PuBasis, WarpParams};
use spectral_pu::colorimetry::{integrate_to_xyz, spectral_locus, Illuminant, SpectralCurve, VISIBLE_LEN};
use spectral_pu::effects::{
    depth_trajectory, medium_coefficients, metameric_palette, pick_by_hue, representative_set, PaletteSettings,
    ABSORPTION_CLAMP_ROOT,
};
use spectral_pu::imaging::blend_levels;
use spectral_pu::sampler::{feasibility_check, weights_from_bary, ClassSampler};
use spectral_pu::{ColorTarget, TrianglePolicy};

use common::{chroma, dense_color, interior_chromaticity};

fn basis_strategy() -> impl Strategy<Value = PuBasis> {
    // Extreme warps can squeeze a basis between grid samples; construction
    // rejects those.
    (
        3usize..13,
        0.0f64..1.0,
        0.05f64..0.95,
        prop_oneof![Just(0.0), Just(100.0), 0.0f64..150.0],
    )
        .prop_filter_map("basis with a zero color", |(k, s, p, offset)| {
            PuBasis::new(BasisConfig::new(k, WarpParams::new(s, p).unwrap(), offset)).ok()
        })
}

fn sampling_basis() -> impl Strategy<Value = PuBasis> {
    (prop::sample::select(vec![5usize, 7, 9, 11]), 0.0f64..0.9, 0.2f64..0.8)
        .prop_filter_map("basis with a zero color", |(k, s, p)| {
            PuBasis::new(BasisConfig::new(k, WarpParams::new(s, p).unwrap(), 100.0)).ok()
        })
}

fn illuminant() -> impl Strategy<Value = Illuminant> {
    prop_oneof![
        Just(Illuminant::d65()),
        Just(Illuminant::f2()),
        Just(Illuminant::equal_energy())
    ]
}

/// A target inside the gamut whose luminance is a fraction of the box ceiling.
fn target_for(basis: &PuBasis, seed: u64, fraction: f64) -> ColorTarget {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = interior_chromaticity(basis, &mut rng);
    let ceiling = feasibility_check(
        basis,
        &ColorTarget {
            chromaticity: c,
            luminance: 0.0,
        },
    )
    .unwrap()
    .max_scaled_luminance;
    ColorTarget {
        chromaticity: c,
        luminance: ceiling * fraction,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integration_is_linear(
        f in prop::collection::vec(0.0f64..1.0, VISIBLE_LEN),
        g in prop::collection::vec(0.0f64..1.0, VISIBLE_LEN),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
        ill in illuminant(),
    ) {
        let mix: Vec<f64> = f.iter().zip(&g).map(|(a, b)| alpha * a + beta * b).collect();
        let xf = integrate_to_xyz(&SpectralCurve::visible(f), Some(&ill)).unwrap();
        let xg = integrate_to_xyz(&SpectralCurve::visible(g), Some(&ill)).unwrap();
        let xm = integrate_to_xyz(&SpectralCurve::visible(mix), Some(&ill)).unwrap();
        prop_assert!((xm.x - alpha * xf.x - beta * xg.x).abs() < 1e-12);
        prop_assert!((xm.y - alpha * xf.y - beta * xg.y).abs() < 1e-12);
        prop_assert!((xm.z - alpha * xf.z - beta * xg.z).abs() < 1e-12);
    }

    #[test]
    fn nonnegative_spectra_stay_in_the_locus(
        f in prop::collection::vec(0.0f64..1.0, VISIBLE_LEN),
        sparse in prop::collection::vec(any::<bool>(), VISIBLE_LEN),
    ) {
        let values: Vec<f64> = f.iter().zip(&sparse).map(|(v, keep)| if *keep { *v } else { 0.0 }).collect();
        prop_assume!(values.iter().any(|v| *v > 0.0));
        let c = integrate_to_xyz(&SpectralCurve::visible(values), None).unwrap().chromaticity().unwrap();
        prop_assert!(spectral_locus(1).unwrap().contains(c, 1e-9));
    }

    #[test]
    fn partition_of_unity_and_bounds(basis in basis_strategy(), w in prop::collection::vec(0.0f64..=1.0, 12)) {
        let k = basis.count();
        for g in 0..VISIBLE_LEN {
            let sum: f64 = (0..k).map(|i| basis.dense(i)[g]).sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
        }
        let f = basis.reconstruct_visible(&w[..k]).unwrap();
        prop_assert!(f.values().iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
    }

    #[test]
    fn basis_colors_match_dense_integration(basis in basis_strategy(), w in prop::collection::vec(0.0f64..=1.0, 12), ill in illuminant()) {
        let k = basis.count();
        let premultiplied = basis.with_illuminant(&ill).unwrap();
        let predicted = premultiplied.color_of(&w[..k]).unwrap();
        let direct = dense_color(&basis, &w[..k], &ill);
        prop_assert!((predicted.x - direct.x).abs() < 1e-9);
        prop_assert!((predicted.y - direct.y).abs() < 1e-9);
        prop_assert!((predicted.z - direct.z).abs() < 1e-9);
    }

    #[test]
    fn samples_round_trip(basis in sampling_basis(), seed in any::<u64>(), fraction in 0.05f64..1.5) {
        let target = target_for(&basis, seed, fraction.min(1.0));
        let e = Illuminant::equal_energy();
        let samples = ClassSampler::new(&basis, target).unwrap().sample(16, seed, TrianglePolicy::Random).unwrap();
        for s in &samples {
            let color = dense_color(&basis, &s.w, &e);
            let (x, y) = chroma(color);
            prop_assert!((x - target.chromaticity.x).abs() < 1e-6);
            prop_assert!((y - target.chromaticity.y).abs() < 1e-6);
            let predicted: f64 = s.w.iter().zip(basis.luminances()).map(|(a, b)| a * b).sum();
            prop_assert!((s.achieved_luminance - predicted).abs() < 1e-12);
            prop_assert!(basis.max_reconstructed(&s.w).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn pivot_choice_does_not_move_the_color(basis in sampling_basis(), seed in any::<u64>()) {
        let target = target_for(&basis, seed, 0.5);
        let s = ClassSampler::new(&basis, target).unwrap().sample_one(seed, 0, TrianglePolicy::Largest).unwrap();
        let line = weights_from_bary(&basis, &s.a).unwrap();
        // Rescale the line so another non-zero coordinate plays the pivot.
        let other = (0..basis.count())
            .filter(|&k| k != line.pivot && line.direction[k] > 1e-6)
            .max_by(|&a, &b| line.direction[a].total_cmp(&line.direction[b]));
        if let Some(o) = other {
            let rebased: Vec<f64> = line.direction.iter().map(|v| v / line.direction[o]).collect();
            let y_rebased: f64 = rebased.iter().zip(basis.luminances()).map(|(a, b)| a * b).sum();
            let w: Vec<f64> = rebased.iter().map(|v| v * target.luminance / y_rebased).collect();
            let a = basis.color_of(&w).unwrap();
            let b = basis.color_of(&line.at(target.luminance / basis.luminance_of(&line.direction).unwrap())).unwrap();
            prop_assert!((a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12 && (a.z - b.z).abs() < 1e-12);
        }
    }

    #[test]
    fn blends_of_achieving_samples_stay_in_class(basis in sampling_basis(), seed in any::<u64>()) {
        let target = target_for(&basis, seed, 0.3);
        let met: Vec<_> = ClassSampler::new(&basis, target)
            .unwrap()
            .sample(8, seed, TrianglePolicy::Random)
            .unwrap()
            .into_iter()
            .filter(|s| s.luminance_met)
            .collect();
        prop_assume!(met.len() >= 2);
        for alpha in [0.25, 0.5, 0.75] {
            let w: Vec<f64> = met[0].w.iter().zip(&met[1].w).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
            let c = dense_color(&basis, &w, &Illuminant::equal_energy());
            let (x, y) = chroma(c);
            prop_assert!((x - target.chromaticity.x).abs() < 1e-9);
            prop_assert!((y - target.chromaticity.y).abs() < 1e-9);
            prop_assert!((c.y - target.luminance).abs() < 1e-9);
        }
    }

    #[test]
    fn trajectories_pass_through_the_target(basis in sampling_basis(), seed in any::<u64>()) {
        let target = target_for(&basis, seed, 0.5);
        let s = ClassSampler::new(&basis, target).unwrap().sample_one(seed, 1, TrianglePolicy::Random).unwrap();
        let t1 = basis.reconstruct_visible(&s.w).unwrap();
        let traj = depth_trajectory(&t1, &[0.5, 1.0, 4.0], None).unwrap();
        let at_one = traj.at(1.0).unwrap();
        prop_assert!((at_one.x - target.chromaticity.x).abs() < 1e-6);
        prop_assert!((at_one.y - target.chromaticity.y).abs() < 1e-6);
    }

    #[test]
    fn hue_blends_keep_the_target(basis in sampling_basis(), seed in any::<u64>(), hue in 0.0f64..std::f64::consts::TAU) {
        let target = target_for(&basis, seed, 0.3);
        let set = representative_set(&basis, &target, 10.0).unwrap();
        prop_assume!(!set.entries.is_empty());
        let blend = pick_by_hue(&set, hue).unwrap();
        let c = dense_color(&basis, &blend.w, &Illuminant::equal_energy());
        let (x, y) = chroma(c);
        prop_assert!((x - target.chromaticity.x).abs() < 1e-9);
        prop_assert!((y - target.chromaticity.y).abs() < 1e-9);
        if set.entries[blend.first].luminance_met && set.entries[blend.second].luminance_met {
            prop_assert!((c.y - target.luminance).abs() < 1e-9);
        }
    }

    #[test]
    fn clamping_is_reported_where_transmittance_is_high(values in prop::collection::vec(0.01f64..=1.0, VISIBLE_LEN)) {
        let m = medium_coefficients(&SpectralCurve::visible(values.clone())).unwrap();
        for (t, flagged) in values.iter().zip(&m.clamped_mask) {
            prop_assert_eq!(*flagged, *t > ABSORPTION_CLAMP_ROOT);
        }
        prop_assert_eq!(m.clamped, values.iter().any(|t| *t > ABSORPTION_CLAMP_ROOT));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn palette_entries_agree_with_dense_integration(seed in any::<u64>(), k in prop::sample::select(vec![5usize, 7, 9])) {
        let basis = PuBasis::new(BasisConfig::unwarped(k)).unwrap();
        let (d65, f2) = (Illuminant::d65(), Illuminant::f2());
        let premultiplied = basis.with_illuminant(&d65).unwrap();
        let target = target_for(&premultiplied, seed, 0.3);
        let entries = metameric_palette(&basis, &d65, &f2, &target, &PaletteSettings::new(8, seed)).unwrap();
        for e in &entries {
            let predicted = premultiplied.color_of(&e.w).unwrap();
            prop_assert!((predicted.x - e.color_under_first.x).abs() < 1e-9);
            prop_assert!((predicted.y - e.color_under_first.y).abs() < 1e-9);
            prop_assert!((predicted.z - e.color_under_first.z).abs() < 1e-9);
        }
        // Every gray level blends the palette convexly, so its color under
        // the first illuminant keeps the palette chromaticity.
        for w in blend_levels(&entries, k).unwrap() {
            let (x, y) = chroma(premultiplied.color_of(&w).unwrap());
            prop_assert!((x - target.chromaticity.x).abs() < 1e-6);
            prop_assert!((y - target.chromaticity.y).abs() < 1e-6);
        }
    }
}
