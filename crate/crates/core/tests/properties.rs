//! Randomized invariant checks across the core modules.

use proptest::prelude::*;
use std::collections::BTreeSet;

use sara_core::aoi::{aoi_metrics, AoiConfig};
use sara_core::gaze::{detect_fixations, FixationConfig, Gender, GazeLog, Group, Sample, SampleKind};
use sara_core::heatmap::{build_heatmap, WeightedPoint};
use sara_core::metrics::{fractional_ranks, shuffled_auc, sor, srcc, RankPair};
use sara_core::normalize::{normalize_map, NormalizeConfig};
use sara_core::sara::{rank_masks, rank_segments, score_segments, ElementMask, GridConfig, ScoreWeights};
use sara_core::special::chi_square_sf;
use sara_core::stats::{kruskal_wallis, mann_whitney_u, GroupedSamples};
use sara_core::{SaliencyMap};

fn map_strategy(min_side: usize, max_side: usize) -> impl Strategy<Value = SaliencyMap> {
    (min_side..=max_side, min_side..=max_side).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<u8>(), w * h)
            .prop_map(move |v| SaliencyMap::new(w, h, v).unwrap())
    })
}

/// Deterministic shuffle so permutation tests do not depend on proptest
/// internals.
fn shuffle<T>(items: &mut [T], mut seed: u64) {
    for i in (1..items.len()).rev() {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        items.swap(i, (seed % (i as u64 + 1)) as usize);
    }
}

proptest! {
    #[test]
    fn resampling_preserves_value_bounds(
        map in map_strategy(2, 20),
        dw in 1usize..32,
        dh in 1usize..32,
    ) {
        let out = map.resampled(dw, dh).unwrap();
        let in_min = map.values().iter().min().copied().unwrap();
        let in_max = map.values().iter().max().copied().unwrap();
        let out_min = out.values().iter().min().copied().unwrap();
        let out_max = out.values().iter().max().copied().unwrap();
        prop_assert!(out_min >= in_min);
        prop_assert!(out_max <= in_max);
    }

    #[test]
    fn normalized_maps_stay_within_32_levels(map in map_strategy(4, 24)) {
        let cfg = NormalizeConfig::default();
        let norm = normalize_map(&map, &cfg).unwrap();
        let distinct: BTreeSet<u8> = norm.values().iter().copied().collect();
        prop_assert!(distinct.len() <= 32);
        prop_assert!(norm.values().iter().all(|&v| v < 32));
        // Re-normalizing an already quantized map keeps the bound.
        let again = normalize_map(&norm, &cfg).unwrap();
        let distinct: BTreeSet<u8> = again.values().iter().copied().collect();
        prop_assert!(distinct.len() <= 32);
    }

    #[test]
    fn segment_scores_decompose_and_stay_bounded(
        map in map_strategy(6, 24),
        k in 2usize..5,
    ) {
        let cfg = GridConfig { k, weights: ScoreWeights::default() };
        let scores = score_segments(&map, &cfg, None).unwrap();
        let w = cfg.weights;
        for s in &scores {
            prop_assert!((0.0..=5.0).contains(&s.entropy));
            prop_assert!((0.0..=1.0).contains(&s.mean_saliency));
            prop_assert!(s.center_bias > 0.0 && s.center_bias <= 1.0);
            let recombined = w.entropy * s.entropy
                + w.saliency * s.mean_saliency
                + w.center_bias * s.center_bias
                + w.depth * s.depth;
            prop_assert!((s.score - recombined).abs() <= 1e-12);
        }
    }

    #[test]
    fn ranks_are_a_permutation_with_non_increasing_scores(
        map in map_strategy(6, 20),
        k in 2usize..5,
    ) {
        let cfg = GridConfig { k, weights: ScoreWeights::default() };
        let list = rank_segments(&map, &cfg, None).unwrap();
        prop_assert_eq!(list.len(), k * k);
        let mut seen = vec![false; k * k];
        let mut prev = f64::INFINITY;
        for e in list.entries() {
            prop_assert!((1..=k * k).contains(&e.rank));
            prop_assert!(!seen[e.rank - 1]);
            seen[e.rank - 1] = true;
            prop_assert!(e.score <= prev);
            prev = e.score;
        }
    }

    #[test]
    fn weight_scaling_preserves_rank_order(
        map in map_strategy(6, 20),
        scale in prop_oneof![Just(0.5), Just(2.0), Just(3.75), Just(1e-6), Just(1e6), Just(7.25)],
        we in 0.1f64..4.0,
        ws in 0.1f64..4.0,
        wc in 0.1f64..4.0,
    ) {
        let base = ScoreWeights { entropy: we, saliency: ws, center_bias: wc, depth: 0.0 };
        let cfg = GridConfig { k: 3, weights: base };
        let baseline = rank_segments(&map, &cfg, None).unwrap();
        // Skip degenerate cases where two scores nearly tie; order under a
        // rescaled sum is then at the mercy of rounding.
        let mut scores: Vec<f64> = baseline.entries().iter().map(|e| e.score).collect();
        scores.sort_by(f64::total_cmp);
        let span = scores.last().unwrap().abs().max(1.0);
        for pair in scores.windows(2) {
            prop_assume!((pair[1] - pair[0]).abs() > 1e-9 * span);
        }
        let scaled_cfg = GridConfig {
            k: 3,
            weights: ScoreWeights {
                entropy: we * scale,
                saliency: ws * scale,
                center_bias: wc * scale,
                depth: 0.0,
            },
        };
        let scaled = rank_segments(&map, &scaled_cfg, None).unwrap();
        let order: Vec<&str> = baseline.entries().iter().map(|e| e.id.as_str()).collect();
        let scaled_order: Vec<&str> = scaled.entries().iter().map(|e| e.id.as_str()).collect();
        prop_assert_eq!(order, scaled_order);
    }

    #[test]
    fn single_pixel_grid_matches_direct_pixel_scoring(
        side in 4usize..9,
        pick in proptest::collection::vec(any::<bool>(), 81),
        values in proptest::collection::vec(any::<u8>(), 81),
        split in 1usize..80,
    ) {
        // A k = side grid over a side x side map makes every segment a
        // single pixel, so mask scores must equal direct per-pixel scoring.
        let n = side * side;
        let map = SaliencyMap::new(side, side, values[..n].to_vec()).unwrap();
        let mut mask_a = vec![false; n];
        let mut mask_b = vec![false; n];
        for i in 0..n {
            if pick[i] {
                if i % 80 < split { mask_a[i] = true; } else { mask_b[i] = true; }
            }
        }
        prop_assume!(mask_a.iter().any(|&p| p) && mask_b.iter().any(|&p| p));
        let masks = vec![
            ElementMask::new("a", side, side, mask_a.clone()).unwrap(),
            ElementMask::new("b", side, side, mask_b.clone()).unwrap(),
        ];
        let cfg = GridConfig { k: side, weights: ScoreWeights::default() };
        let ranked = rank_masks(&map, &cfg, &masks, None).unwrap();

        let direct = |mask: &[bool]| -> f64 {
            let diag = ((side * side + side * side) as f64).sqrt();
            let sigma = diag / 6.0;
            let (mut sum, mut count) = (0.0, 0usize);
            for y in 0..side {
                for x in 0..side {
                    if !mask[y * side + x] {
                        continue;
                    }
                    // One-pixel histogram: entropy is exactly zero.
                    let ss = f64::from(map.get(x, y)) / 255.0;
                    let cx = x as f64 + 0.5 - side as f64 / 2.0;
                    let cy = y as f64 + 0.5 - side as f64 / 2.0;
                    let cb = (-(cx * cx + cy * cy) / (2.0 * sigma * sigma)).exp();
                    sum += ss + cb;
                    count += 1;
                }
            }
            sum / count as f64
        };
        let score_a = ranked.score_of("a").unwrap();
        let score_b = ranked.score_of("b").unwrap();
        prop_assert!((score_a - direct(&mask_a)).abs() <= 1e-12);
        prop_assert!((score_b - direct(&mask_b)).abs() <= 1e-12);
    }

    #[test]
    fn heatmap_is_permutation_invariant(
        points in proptest::collection::vec(
            (0.0f64..64.0, 0.0f64..48.0, 0.0f64..10.0),
            1..20,
        ),
        seed in any::<u64>(),
    ) {
        let as_points = |src: &[(f64, f64, f64)]| -> Vec<WeightedPoint> {
            src.iter().map(|&(x, y, weight)| WeightedPoint { x, y, weight }).collect()
        };
        let base = build_heatmap(&as_points(&points), 64, 48, 6.0).unwrap();
        let mut shuffled = points.clone();
        shuffle(&mut shuffled, seed | 1);
        let permuted = build_heatmap(&as_points(&shuffled), 64, 48, 6.0).unwrap();
        prop_assert_eq!(base, permuted);
    }

    #[test]
    fn heatmap_is_exact_under_power_of_two_weight_scaling(
        points in proptest::collection::vec(
            (0.0f64..64.0, 0.0f64..48.0, 0.25f64..8.0),
            1..16,
        ),
        exponent in -3i32..4,
    ) {
        let factor = (2.0f64).powi(exponent);
        let base: Vec<WeightedPoint> = points
            .iter()
            .map(|&(x, y, weight)| WeightedPoint { x, y, weight })
            .collect();
        let scaled: Vec<WeightedPoint> = points
            .iter()
            .map(|&(x, y, weight)| WeightedPoint { x, y, weight: weight * factor })
            .collect();
        let a = build_heatmap(&base, 64, 48, 5.0).unwrap();
        let b = build_heatmap(&scaled, 64, 48, 5.0).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn fixations_never_overlap_and_respect_min_duration(
        steps in proptest::collection::vec(
            (1u32..80, 0.0f64..300.0, 0.0f64..300.0, proptest::bool::weighted(0.08)),
            2..120,
        ),
    ) {
        let mut t = 0.0;
        let samples: Vec<Sample> = steps
            .iter()
            .map(|&(dt, x, y, off_screen)| {
                t += f64::from(dt);
                Sample { t_ms: t, x, y, kind: SampleKind::Gaze, off_screen }
            })
            .collect();
        let cfg = FixationConfig::default();
        let fixations = detect_fixations(&samples, &cfg).unwrap();
        let mut prev_end = f64::NEG_INFINITY;
        for f in &fixations {
            prop_assert!(f.duration_ms >= cfg.min_duration_ms);
            prop_assert!(f.t_start_ms >= prev_end);
            prev_end = f.t_end_ms();
        }
    }

    #[test]
    fn aoi_metrics_are_bounded_and_consistent(
        dwells in proptest::collection::vec(
            (0.0f64..200.0, 120.0f64..900.0, 0.0f64..200.0, 0.0f64..200.0),
            1..8,
        ),
    ) {
        // Build one participant whose dwells are chained back to back; the
        // total span stays far below the 10 s viewing window.
        let mut samples = Vec::new();
        let mut t = 0.0;
        for &(gap, dur, x, y) in &dwells {
            t += gap + 1.0;
            for i in 0..=4 {
                samples.push(Sample {
                    t_ms: t + dur * f64::from(i) / 4.0,
                    x,
                    y,
                    kind: SampleKind::Gaze,
                    off_screen: false,
                });
            }
            t += dur;
        }
        let log = GazeLog::new("p", 30, Gender::Other, Group::Ctrl, "img", samples).unwrap();
        let aoi = ElementMask::from_fn("roi", 200, 200, |x, y| x < 100 && y < 100).unwrap();
        let m = aoi_metrics(&[log], &aoi, &AoiConfig::default()).unwrap().unwrap();
        prop_assert!((0.0..=100.0).contains(&m.time_viewed_pct));
        prop_assert!((0.0..=100.0).contains(&m.revisitors_pct));
        prop_assert!(m.avg_revisits >= 0.0);
        if m.revisitors_pct > 0.0 {
            prop_assert!(m.avg_revisits > 0.0);
        }
        if m.avg_fixations == 0.0 {
            prop_assert_eq!(m.avg_first_view_s, None);
        }
    }

    #[test]
    fn sor_is_the_affine_image_of_srcc(
        pairs in proptest::collection::vec((0u32..40, 0u32..40), 2..12),
    ) {
        let scores: Vec<f64> = pairs.iter().map(|&(a, _)| f64::from(a)).collect();
        let other: Vec<f64> = pairs.iter().map(|&(_, b)| f64::from(b)).collect();
        let pair = RankPair::new(scores, other).unwrap();
        let rho = srcc(&pair);
        let s = sor(&pair);
        prop_assert!((-1.0..=1.0).contains(&rho));
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s, (rho + 1.0) / 2.0);
    }

    #[test]
    fn srcc_matches_rank_definition_oracle(
        n in 2usize..8,
        raw in proptest::collection::vec((0u32..6, 0u32..6), 8),
    ) {
        let a: Vec<f64> = raw[..n].iter().map(|&(x, _)| f64::from(x)).collect();
        let b: Vec<f64> = raw[..n].iter().map(|&(_, y)| f64::from(y)).collect();
        let rho = srcc(&RankPair::new(a.clone(), b.clone()).unwrap());
        // Oracle: Pearson correlation of fractional ranks, zero when either
        // side is constant.
        let ra = fractional_ranks(&a);
        let rb = fractional_ranks(&b);
        let nf = n as f64;
        let ma = ra.iter().sum::<f64>() / nf;
        let mb = rb.iter().sum::<f64>() / nf;
        let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
        for i in 0..n {
            cov += (ra[i] - ma) * (rb[i] - mb);
            va += (ra[i] - ma) * (ra[i] - ma);
            vb += (rb[i] - mb) * (rb[i] - mb);
        }
        let want = if va == 0.0 || vb == 0.0 { 0.0 } else { cov / (va.sqrt() * vb.sqrt()) };
        prop_assert!((rho - want).abs() <= 1e-12, "rho {} vs oracle {}", rho, want);
    }

    #[test]
    fn shuffled_auc_is_invariant_under_monotone_relabeling(
        levels in proptest::collection::vec(0usize..32, 24 * 18),
        lut in proptest::collection::btree_set(any::<u8>(), 32),
        positives in proptest::collection::vec((0.0f64..24.0, 0.0f64..18.0), 1..12),
        negatives in proptest::collection::vec((0.0f64..24.0, 0.0f64..18.0), 1..12),
    ) {
        let lut: Vec<u8> = lut.into_iter().collect();
        let raw: Vec<u8> = levels.iter().map(|&l| l as u8).collect();
        let relabeled: Vec<u8> = levels.iter().map(|&l| lut[l]).collect();
        let a = shuffled_auc(
            &SaliencyMap::new(24, 18, raw).unwrap(),
            &positives,
            &negatives,
        )
        .unwrap();
        let b = shuffled_auc(
            &SaliencyMap::new(24, 18, relabeled).unwrap(),
            &positives,
            &negatives,
        )
        .unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn rank_tests_are_invariant_under_monotone_transforms(
        groups in proptest::collection::vec(
            proptest::collection::vec(0u32..64, 2..10),
            2..5,
        ),
        steps in proptest::collection::vec(0.01f64..3.0, 64),
        base in -50.0f64..50.0,
    ) {
        // Strictly increasing lookup table over the integer sample space.
        let mut lut = vec![0.0; 64];
        let mut acc = base;
        for (i, &s) in steps.iter().enumerate() {
            acc += s;
            lut[i] = acc;
        }
        let raw: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| g.iter().map(|&v| f64::from(v)).collect())
            .collect();
        let mapped: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| g.iter().map(|&v| lut[v as usize]).collect())
            .collect();
        let labels: Vec<String> = (0..groups.len()).map(|i| format!("g{i}")).collect();
        let kw_raw = kruskal_wallis(&GroupedSamples::new(labels.clone(), raw.clone()).unwrap(), 0.05).unwrap();
        let kw_map = kruskal_wallis(&GroupedSamples::new(labels, mapped.clone()).unwrap(), 0.05).unwrap();
        prop_assert_eq!(kw_raw.statistic, kw_map.statistic);
        prop_assert_eq!(kw_raw.p_value, kw_map.p_value);
        prop_assert!((0.0..=1.0).contains(&kw_raw.p_value));
        prop_assert!((0.0..=1.0).contains(&kw_raw.effect_size.unwrap()));

        let mwu_raw = mann_whitney_u(&raw[0], &raw[1], 0.05).unwrap();
        let mwu_map = mann_whitney_u(&mapped[0], &mapped[1], 0.05).unwrap();
        prop_assert_eq!(mwu_raw.statistic, mwu_map.statistic);
        prop_assert_eq!(mwu_raw.p_value, mwu_map.p_value);
        prop_assert!((0.0..=1.0).contains(&mwu_raw.p_value));
    }

    #[test]
    fn mann_whitney_exact_path_matches_bruteforce(
        a in proptest::collection::vec((0u32..16).prop_map(f64::from), 1..5),
        b in proptest::collection::vec((0u32..16).prop_map(f64::from), 1..5),
    ) {
        let result = mann_whitney_u(&a, &b, 0.05).unwrap();
        let (na, nb) = (a.len(), b.len());
        let n = na + nb;
        let pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
        let ranks = fractional_ranks(&pooled);
        // Enumerate every assignment of na pooled positions to group A.
        let mut hits = 0u64;
        let mut total = 0u64;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != na {
                continue;
            }
            total += 1;
            let rank_sum: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
            let ua = rank_sum - (na * (na + 1)) as f64 / 2.0;
            let ub = (na * nb) as f64 - ua;
            if ua.min(ub) <= result.statistic + 1e-9 {
                hits += 1;
            }
        }
        let oracle = hits as f64 / total as f64;
        prop_assert!((result.p_value - oracle).abs() <= 1e-12,
            "p {} vs oracle {}", result.p_value, oracle);
    }

    #[test]
    fn two_group_rank_tests_are_consistent(
        pool in proptest::collection::btree_set(0u32..400, 18..26),
        na in 8usize..11,
        seed in any::<u64>(),
    ) {
        // Tie-free two-group case: H equals the squared (uncorrected) normal
        // deviate of U, and the tests agree on significance away from the
        // threshold.
        let mut values: Vec<f64> = pool.into_iter().map(f64::from).collect();
        shuffle(&mut values, seed | 1);
        prop_assume!(values.len() > na + 7);
        let (a, b) = values.split_at(na);
        let (na, nb) = (a.len(), b.len());
        let s = GroupedSamples::new(
            vec!["a".into(), "b".into()],
            vec![a.to_vec(), b.to_vec()],
        )
        .unwrap();
        let kw = kruskal_wallis(&s, 0.05).unwrap();
        let mwu = mann_whitney_u(a, b, 0.05).unwrap();

        let n = (na + nb) as f64;
        let mu = (na * nb) as f64 / 2.0;
        let sigma = ((na * nb) as f64 * (n + 1.0) / 12.0).sqrt();
        let z = (mwu.statistic - mu) / sigma;
        prop_assert!((kw.statistic - z * z).abs() <= 1e-8 * (1.0 + z * z),
            "H {} vs z^2 {}", kw.statistic, z * z);

        // The exact U p-value and the chi-squared approximation can differ
        // by a little over 0.02 at these sizes, so only compare significance
        // away from that band around alpha.
        prop_assume!((kw.p_value - 0.05).abs() > 0.03);
        prop_assume!((mwu.p_value - 0.05).abs() > 0.03);
        prop_assert_eq!(kw.significant, mwu.significant);
    }

    #[test]
    fn fractional_ranks_are_well_formed(
        values in proptest::collection::vec((0u32..24).prop_map(f64::from), 1..40),
    ) {
        let ranks = fractional_ranks(&values);
        let n = values.len();
        let sum: f64 = ranks.iter().sum();
        prop_assert!((sum - (n * (n + 1)) as f64 / 2.0).abs() <= 1e-9);
        for (i, &ri) in ranks.iter().enumerate() {
            prop_assert!(ri >= 1.0 && ri <= n as f64);
            for (j, &rj) in ranks.iter().enumerate() {
                if values[i] < values[j] {
                    prop_assert!(ri < rj);
                } else if values[i] == values[j] {
                    prop_assert_eq!(ri, rj);
                }
            }
        }
    }

    #[test]
    fn chi_square_tail_is_a_probability_and_decreasing(
        df in 1u32..20,
        x1 in 0.0f64..40.0,
        dx in 0.0f64..10.0,
    ) {
        let df = f64::from(df);
        let p1 = chi_square_sf(x1, df);
        let p2 = chi_square_sf(x1 + dx, df);
        prop_assert!((0.0..=1.0).contains(&p1));
        prop_assert!((0.0..=1.0).contains(&p2));
        prop_assert!(p2 <= p1 + 1e-13);
    }
}
