mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cii::conformal::select_by_scores;
use cii::ipm::{fit_ipm_with, IpmOptions};
use cii::metrics::{empirical_quantile, quantile_scaled_breadth, spearman, stratify};
use cii::transport::{ascloseas, BallConstraints};
use cii::uncertain::{area_metric, read_records, write_records, PBox, PBoxRecord, StepCdf};

fn step_cdf() -> impl Strategy<Value = StepCdf> {
    any::<u64>().prop_map(|seed| common::random_step_cdf(&mut ChaCha8Rng::seed_from_u64(seed), 10))
}

fn affine(c: &StepCdf, a: f64, b: f64) -> StepCdf {
    StepCdf::new(
        c.breakpoints().iter().map(|x| a * x + b).collect(),
        c.levels().to_vec(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn envelopes_bracket_the_base_and_grow_with_budget(
        base in step_cdf(),
        d1 in 0.0..0.3f64,
        extra in 0.0..0.3f64,
        constrained in any::<bool>(),
    ) {
        let c = if constrained {
            BallConstraints::with_support(-1.0, 2.0).unwrap()
        } else {
            BallConstraints::unconstrained()
        };
        let p = PBox::precise(base.clone());
        let small = ascloseas(&p, d1, &c, None).unwrap().pbox;
        let large = ascloseas(&p, d1 + extra, &c, None).unwrap().pbox;
        prop_assert!(small.contains(&p, 1e-12));
        prop_assert!(large.contains(&small, 1e-12));
        // without a support bound the lower envelope never reaches 1
        if constrained {
            prop_assert!(large.breadth().unwrap() + 1e-12 >= small.breadth().unwrap());
        }
    }

    #[test]
    fn area_metric_is_a_metric_on_precise_cdfs(a in step_cdf(), b in step_cdf(), c in step_cdf()) {
        let (pa, pb, pc) = (PBox::precise(a), PBox::precise(b), PBox::precise(c));
        prop_assert!(area_metric(&pa, &pa).abs() < 1e-12);
        prop_assert!((area_metric(&pa, &pb) - area_metric(&pb, &pa)).abs() < 1e-12);
        prop_assert!(area_metric(&pa, &pc) <= area_metric(&pa, &pb) + area_metric(&pb, &pc) + 1e-12);
    }

    #[test]
    fn fitted_band_encloses_its_points(
        pts in prop::collection::vec((0.0..10.0f64, 0.0..5.0f64), 4..40),
        degree in 0usize..=3,
        tail in any::<bool>(),
    ) {
        let r_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let r_max = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        prop_assume!(r_max - r_min > 1e-3 && pts.len() >= degree + 2);
        let m = fit_ipm_with(&pts, &IpmOptions { degree, grid_size: 32, monotone_tail: tail }).unwrap();
        prop_assert!(m.max_enclosure_violation(&pts) <= 1e-9);
        prop_assert!(m.band_area() >= -1e-9);
        for &(r, _) in &pts {
            prop_assert!(m.adjusted_for_score(r, r_max) >= 0.0);
        }
    }

    #[test]
    fn calibration_selection_is_sorted_unique_and_sized(
        scores in prop::collection::vec(0.0..5.0f64, 1..120),
        frac in 0.0..=1.0f64,
        n_cal_seed in any::<usize>(),
        seed in any::<u64>(),
    ) {
        let n_cal = 1 + n_cal_seed % scores.len();
        let sel = select_by_scores(&scores, n_cal, frac, seed).unwrap();
        prop_assert_eq!(sel.len(), n_cal);
        prop_assert!(sel.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(sel.iter().all(|&i| i < scores.len()));
        prop_assert_eq!(&sel, &select_by_scores(&scores, n_cal, frac, seed).unwrap());
    }

    #[test]
    fn coverage_is_the_count_weighted_bin_mean(
        obs in prop::collection::vec((any::<bool>(), 0.0..3.0f64), 1..200),
        bins in 1usize..=12,
    ) {
        let (covered, rs): (Vec<bool>, Vec<f64>) = obs.iter().copied().unzip();
        let table = stratify(&covered, &rs, bins).unwrap();
        let total: usize = table.iter().map(|b| b.count).sum();
        prop_assert_eq!(total, covered.len());
        let hits: usize = table
            .iter()
            .filter_map(|b| b.xi.map(|x| (x * b.count as f64).round() as usize))
            .sum();
        prop_assert_eq!(hits, covered.iter().filter(|&&c| c).count());
    }

    #[test]
    fn scaled_breadth_is_affine_invariant(
        lo in step_cdf(),
        shift in 0.0..0.5f64,
        a in 0.1..50.0f64,
        b in -100.0..100.0f64,
    ) {
        let hi = affine(&lo, 1.0, -shift);
        let p = PBox::new(lo.clone(), hi.clone()).unwrap();
        let q = PBox::new(affine(&lo, a, b), affine(&hi, a, b)).unwrap();
        let g1 = quantile_scaled_breadth(&p, 0.1, 0.9).unwrap();
        let g2 = quantile_scaled_breadth(&q, a * 0.1 + b, a * 0.9 + b).unwrap();
        prop_assert!((g1 - g2).abs() <= 1e-10 * g1.abs().max(1.0));
    }

    #[test]
    fn spearman_is_bounded_and_rank_based(xs in prop::collection::vec(-10.0..10.0f64, 3..50)) {
        let ys: Vec<f64> = xs.iter().map(|x| x.powi(3) + 2.0).collect();
        let r = spearman(&xs, &ys).unwrap();
        prop_assert!((r - 1.0).abs() < 1e-12 || xs.iter().all(|&x| x == xs[0]));
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        let s = spearman(&xs, &neg).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&s));
    }

    #[test]
    fn quantiles_are_monotone(sample in prop::collection::vec(-5.0..5.0f64, 1..60), p in 0.0..=1.0f64, q in 0.0..=1.0f64) {
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        prop_assert!(empirical_quantile(&sample, p).unwrap() <= empirical_quantile(&sample, q).unwrap());
    }

    #[test]
    fn records_round_trip(lo in step_cdf(), shift in 0.0..1.0f64) {
        let p = PBox::new(lo.clone(), affine(&lo, 1.0, -shift)).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &[PBoxRecord::from_pbox(&p, Some(3))]).unwrap();
        let back = read_records(buf.as_slice()).unwrap();
        prop_assert_eq!(back, vec![(3, p)]);
    }
}
