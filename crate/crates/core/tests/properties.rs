use proptest::prelude::*;
use regionxfer::colorspace::{lab_pixel_to_rgb, rgb_pixel_to_lab};
use regionxfer::colorxfer::match_pixels;
use regionxfer::stylemath::style_layer_loss;
use regionxfer::*;

fn image(max_side: usize) -> impl Strategy<Value = ImageRgb> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0f64..=1.0, w * h * 3).prop_map(move |d| ImageRgb::new(w, h, d).unwrap())
    })
}

fn quantized_image(max_side: usize) -> impl Strategy<Value = ImageRgb> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), w * h * 3).prop_map(move |b| ImageRgb::from_bytes(w, h, &b).unwrap())
    })
}

fn mask_and_edges(side: usize) -> impl Strategy<Value = (BinaryMask, EdgeMap)> {
    (
        prop::collection::vec(prop::bool::weighted(0.6), side * side),
        prop::collection::vec(prop::bool::weighted(0.05), side * side),
    )
        .prop_map(move |(m, e)| (BinaryMask::new(side, side, m).unwrap(), EdgeMap::new(side, side, e).unwrap()))
}

fn fmap(n: usize, m: usize) -> impl Strategy<Value = FeatureMap> {
    prop::collection::vec(-2.0f64..2.0, n * m).prop_map(move |d| FeatureMap::new(n, m, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn color_round_trip(rgb in prop::array::uniform3(0.05f64..=1.0)) {
        let back = lab_pixel_to_rgb(rgb_pixel_to_lab(rgb));
        for c in 0..3 {
            prop_assert!((back[c] - rgb[c]).abs() < 1e-4);
        }
    }

    #[test]
    fn png_round_trip_is_byte_identical(img in quantized_image(12)) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.png");
        save_image(&img, &p).unwrap();
        let first = std::fs::read(&p).unwrap();
        let loaded = load_image(&p).unwrap();
        prop_assert_eq!(&loaded, &img);
        save_image(&loaded, &p).unwrap();
        prop_assert_eq!(std::fs::read(&p).unwrap(), first);
    }

    #[test]
    fn refine_removes_only((mask, edges) in mask_and_edges(14)) {
        let out = refine_mask(&mask, &edges, &PipelineConfig::default()).unwrap();
        prop_assert!(out.is_subset_of(&mask));
        let again = refine_mask(&mask, &edges, &PipelineConfig::default()).unwrap();
        prop_assert_eq!(out, again);
    }

    #[test]
    fn refine_with_cap_removes_less((mask, edges) in mask_and_edges(14), cap in 0.0f64..4.0) {
        let free = refine_mask(&mask, &edges, &PipelineConfig::default()).unwrap();
        let capped = refine_mask(&mask, &edges, &PipelineConfig { erosion_cap: Some(cap), ..Default::default() }).unwrap();
        prop_assert!(capped.is_subset_of(&mask));
        prop_assert!(free.is_subset_of(&capped));
    }

    #[test]
    fn feather_bounds((mask, _e) in mask_and_edges(16), radius in 0.0f64..6.0) {
        let a = feather_mask(&mask, radius).unwrap();
        let depth = regionxfer::boundary::interior_distance(&mask);
        for (i, &v) in a.data().iter().enumerate() {
            prop_assert!((0.0..=1.0).contains(&v));
            if !mask.data()[i] {
                prop_assert_eq!(v, 0.0);
            }
            if mask.data()[i] && depth[i] >= radius {
                prop_assert_eq!(v, 1.0);
            }
        }
        // monotone in interior distance
        let mut pairs: Vec<(f64, f64)> = depth.iter().copied().zip(a.data().iter().copied()).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        prop_assert!(pairs.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn blend_stays_between_inputs(
        (a, b, alpha) in (1usize..10, 1usize..10).prop_flat_map(|(w, h)| (
            prop::collection::vec(0.0f64..=1.0, w * h * 3).prop_map(move |d| ImageRgb::new(w, h, d).unwrap()),
            prop::collection::vec(0.0f64..=1.0, w * h * 3).prop_map(move |d| ImageRgb::new(w, h, d).unwrap()),
            prop::collection::vec(0.0f64..=1.0, w * h).prop_map(move |d| AlphaMask::new(w, h, d).unwrap()),
        ))
    ) {
        let out = alpha_blend(&a, &b, &alpha).unwrap();
        for ((o, x), y) in out.data().iter().zip(a.data()).zip(b.data()) {
            prop_assert!(*o >= x.min(*y) && *o <= x.max(*y));
        }
    }

    #[test]
    fn transfer_output_is_drawn_from_style(content in image(10), style in image(10)) {
        let out = transfer_colors(&content, &style, None).unwrap();
        let palette: Vec<[f64; 3]> = style.pixels().collect();
        for p in out.pixels() {
            prop_assert!(palette.contains(&p));
        }
    }

    #[test]
    fn matching_is_monotone(content in image(10), style in image(10)) {
        let (cl, sl) = (rgb_to_lab(&content), rgb_to_lab(&style));
        let qc = principal_axis(&cl, None).unwrap();
        let qs = principal_axis(&sl, None).unwrap();
        let pc = project(&cl, &qc, None).unwrap();
        let ps = project(&sl, &qs, None).unwrap();
        let m = match_pixels(&cl, &sl, None, CovarianceMode::Centered).unwrap();
        for a in &m {
            for b in &m {
                if pc[a.content] < pc[b.content] {
                    prop_assert!(ps[a.style] <= ps[b.style]);
                }
            }
        }
    }

    #[test]
    fn axis_and_matches_are_scale_invariant(content in image(8), style in image(8), factor in 0.1f64..10.0) {
        let (cl, sl) = (rgb_to_lab(&content), rgb_to_lab(&style));
        let q = principal_axis(&cl, None).unwrap().vector();
        let qs = principal_axis(&cl.scaled(factor), None).unwrap().vector();
        // skip near-isotropic clouds where the leading eigenvector is ill-conditioned
        let cov = regionxfer::colorxfer::scatter_matrix(&cl, &(0..cl.pixel_count()).collect::<Vec<_>>(), CovarianceMode::Centered);
        let (vals, _) = regionxfer::colorxfer::symmetric_eigen3(cov);
        let mut sorted = vals;
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted[2] - sorted[1] > 1e-6 * sorted[2].abs().max(1e-12));
        for c in 0..3 {
            prop_assert!((q[c] - qs[c]).abs() < 1e-6, "{:?} vs {:?}", q, qs);
        }
        let base = match_pixels(&cl, &sl, None, CovarianceMode::Centered).unwrap();
        let scaled = match_pixels(&cl.scaled(factor), &sl.scaled(factor), None, CovarianceMode::Centered).unwrap();
        prop_assert_eq!(base, scaled);
    }

    #[test]
    fn gram_is_symmetric_psd(f in (1usize..6, 1usize..8).prop_flat_map(|(n, m)| fmap(n, m))) {
        let g = gram(&f);
        let n = g.n();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
        // xᵀ G x = |Fᵀ x|² >= 0 for a few probe vectors
        for s in 0..n {
            let x: Vec<f64> = (0..n).map(|i| if (i + s) % 2 == 0 { 1.0 } else { -0.5 }).collect();
            let q: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| x[i] * g.get(i, j) * x[j]).sum();
            prop_assert!(q >= -1e-9);
        }
    }

    #[test]
    fn losses_are_non_negative(f in fmap(3, 5), p in fmap(3, 5), a in fmap(3, 4)) {
        prop_assert!(content_loss(&f, &p).unwrap() >= 0.0);
        let a = gram(&a);
        prop_assert!(style_layer_loss(&f, &a, 0.7).unwrap() >= 0.0);
        prop_assert_eq!(content_loss(&f, &f).unwrap(), 0.0);
    }

    #[test]
    fn style_loss_permutation_invariant(f in fmap(4, 5), s in fmap(4, 7), perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let a = gram(&s);
        let w = LossWeights::uniform(1);
        let base = style_loss(&[f.clone()], &[a.clone()], &w).unwrap();
        let fp = FeatureMap::new(4, 5, perm.iter().flat_map(|&i| f.row(i).to_vec()).collect()).unwrap();
        let ap = GramMatrix::new(4, perm.iter().flat_map(|&i| perm.iter().map(move |&j| (i, j))).map(|(i, j)| a.get(i, j)).collect()).unwrap();
        let permuted = style_loss(&[fp], &[ap], &w).unwrap();
        prop_assert!((base - permuted).abs() <= 1e-12 * base.abs().max(1.0));
    }
}
