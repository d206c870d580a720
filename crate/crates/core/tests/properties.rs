//! Property-based checks of the public-API invariants, plus seeded sweeps
//! of the qualitative behavior the edge decomposition is supposed to show.

use edge_logdet_core::clt::deterministic_shift_exact;
use edge_logdet_core::edge::{compute_trace, edge_quantities, g_weights};
use edge_logdet_core::ensemble::{sample_tridiagonal, EnsembleSpec};
use edge_logdet_core::logdet::{
    eigenvalues_bisection, logabsdet_from_eigs, logabsdet_recurrence,
    sturm_negative_pivot_count, EdgeParams,
};
use edge_logdet_core::rng::RngStream;
use edge_logdet_core::stats::{
    run_campaign, stieltjes_sums, stieltjes_sums_resolvent, summarize, BatchConfig, SigmaRule,
};
use edge_logdet_core::clt::{CltVariant, ScalingRule, SpikeMode};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The O(N) renormalized recurrence and the eigenvalue-product oracle
    /// are two routes to the same number.
    #[test]
    fn recurrence_agrees_with_eigenvalue_oracle(
        n in 2usize..60,
        alpha_idx in 0usize..3,
        sigma in -3.0f64..6.0,
        seed in any::<u64>(),
    ) {
        let alpha = [0.5, 1.0, 2.0][alpha_idx];
        let spec = EnsembleSpec::new(n, alpha, 0.0).unwrap();
        let m = sample_tridiagonal(&spec, &mut RngStream::new(seed, 0));
        let p = EdgeParams::from_sigma(n, sigma).unwrap();
        let a = logabsdet_recurrence(&m, &p).unwrap();
        let eigs = eigenvalues_bisection(&m);
        let b = logabsdet_from_eigs(&eigs, &p).unwrap();
        prop_assert_eq!(a.sign, b.sign);
        prop_assert!(
            (a.log_abs - b.log_abs).abs() <= 1e-8 * a.log_abs.abs().max(1.0),
            "recurrence {} vs oracle {}", a.log_abs, b.log_abs
        );
    }

    /// Algebraic identities of the deterministic edge quantities:
    /// r + m = 2, r·m = (i−1)/(Nθ²), r ∈ [1, 2], γ ∈ [0, 1), δ ≥ 0.
    #[test]
    fn edge_quantities_satisfy_their_identities(
        n in 2usize..500,
        sigma in 0.0f64..8.0,
        frac in 0.0f64..1.0,
    ) {
        let p = EdgeParams::from_sigma(n, sigma).unwrap();
        let i = 1 + ((n - 1) as f64 * frac).floor() as usize; // 1..=n
        let q = edge_quantities(i, &p).unwrap();
        let nt2 = n as f64 * p.theta() * p.theta();
        prop_assert!((q.r + q.m - 2.0).abs() < 1e-12);
        prop_assert!((q.r * q.m - (i as f64 - 1.0) / nt2).abs() < 1e-12);
        prop_assert!((1.0..=2.0).contains(&q.r));
        prop_assert!((0.0..1.0).contains(&q.gamma) || q.gamma == 0.0);
        prop_assert!(q.delta >= 0.0);
    }

    /// The normalized-minor trace plus the exact deterministic shift
    /// reconstructs the direct log-determinant.
    #[test]
    fn trace_plus_shift_reconstructs_logdet(
        n in 16usize..200,
        sigma in 0.0f64..6.0,
        seed in any::<u64>(),
    ) {
        let spec = EnsembleSpec::new(n, 1.0, 0.0).unwrap();
        let m = sample_tridiagonal(&spec, &mut RngStream::new(seed, 0));
        let p = EdgeParams::from_sigma(n, sigma).unwrap();
        let t = compute_trace(&m, &p, false).unwrap();
        let direct = logabsdet_recurrence(&m, &p).unwrap();
        let rebuilt = t.e_log[n - 1] + deterministic_shift_exact(&p).unwrap();
        prop_assert!(
            (rebuilt - direct.log_abs).abs() <= 1e-9 * direct.log_abs.abs().max(1.0),
            "rebuilt {} vs direct {}", rebuilt, direct.log_abs
        );
    }

    /// The negative-pivot count at a shift equals the number of
    /// eigenvalues below that shift.
    #[test]
    fn pivot_count_counts_eigenvalues(
        n in 1usize..40,
        seed in any::<u64>(),
        x in -3.0f64..3.0,
    ) {
        let spec = EnsembleSpec::new(n, 1.0, 0.0).unwrap();
        let m = sample_tridiagonal(&spec, &mut RngStream::new(seed, 0));
        let shift = x * (n as f64).sqrt();
        let count = sturm_negative_pivot_count(&m, shift);
        let eigs = eigenvalues_bisection(&m);
        let below = eigs.iter().filter(|&&l| l < shift).count();
        prop_assert_eq!(count, below);
    }

    /// Both gap-sum routes (eigenvalues vs resolvent sweeps) agree.
    #[test]
    fn gap_sum_routes_agree(
        n in 2usize..50,
        sigma in 0.5f64..4.0,
        seed in any::<u64>(),
    ) {
        let spec = EnsembleSpec::new(n, 1.0, 0.0).unwrap();
        let m = sample_tridiagonal(&spec, &mut RngStream::new(seed, 0));
        let p = EdgeParams::from_sigma(n, sigma).unwrap();
        let sqn = (n as f64).sqrt();
        let scaled: Vec<f64> = eigenvalues_bisection(&m).into_iter().map(|l| l / sqn).collect();
        let a = stieltjes_sums(&scaled, &p).unwrap();
        let b = stieltjes_sums_resolvent(&m, &p).unwrap();
        prop_assert!((a.s1 - b.s1).abs() <= 1e-8 * a.s1.abs().max(1.0));
        prop_assert!((a.s2 - b.s2).abs() <= 1e-8 * a.s2.abs().max(1.0));
    }

    /// Sample-moment behavior under the affine map x ↦ a·x + b.
    #[test]
    fn summary_moments_transform_affinely(
        xs in prop::collection::vec(-50.0f64..50.0, 4..40),
        a in 0.5f64..3.0,
        b in -10.0f64..10.0,
    ) {
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let sx = summarize(&xs).unwrap();
        let sy = summarize(&ys).unwrap();
        prop_assert!((sy.mean - (a * sx.mean + b)).abs() < 1e-9 * (1.0 + sx.mean.abs()));
        prop_assert!((sy.variance - a * a * sx.variance).abs() < 1e-9 * (1.0 + sx.variance));
        if sx.skewness.is_finite() && sy.skewness.is_finite() {
            prop_assert!((sy.skewness - sx.skewness).abs() < 1e-7 * (1.0 + sx.skewness.abs()));
        }
    }

    /// Round trip of the σ-rule text form.
    #[test]
    fn sigma_rule_text_round_trips(c in -100.0f64..100.0, kind in 0usize..3) {
        let rule = match kind {
            0 => SigmaRule::Const(c),
            1 => SigmaRule::LogLogSq(c),
            _ => SigmaRule::LogLogCube(c),
        };
        let back: SigmaRule = rule.to_string().parse().unwrap();
        prop_assert_eq!(back, rule);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Campaign output is a pure function of the configuration,
    /// independent of the worker-thread count.
    #[test]
    fn campaigns_are_thread_count_invariant(
        seed in any::<u64>(),
        reps in 1u32..4,
        threads in 2usize..6,
    ) {
        let cfg = BatchConfig {
            master_seed: seed,
            reps,
            n_list: vec![8, 21, 34],
            sigma_rule: SigmaRule::Const(1.0),
            alpha: 1.0,
            spike: 0.0,
            variant: CltVariant::new(ScalingRule::Theta, SpikeMode::None),
        };
        let serial = run_campaign(&cfg, 1).unwrap();
        let parallel = run_campaign(&cfg, threads).unwrap();
        prop_assert_eq!(serial, parallel);
    }
}

/// At the exact edge (σ = 0) the ratio process stays below N^{−1/3}
/// except on a vanishing fraction of indices: the deviation fraction over
/// i ≤ 0.9N stays under 5% on seeded draws at N = 10⁴.
#[test]
fn ratio_deviations_are_rare_at_the_edge() {
    let n = 10_000;
    let p = EdgeParams::from_two_theta(n, 2.0).unwrap();
    let cutoff = (n as f64).powf(-1.0 / 3.0);
    let spec = EnsembleSpec::new(n, 1.0, 0.0).unwrap();
    for seed in [1u64, 2, 3] {
        let m = sample_tridiagonal(&spec, &mut RngStream::new(seed, 0));
        let t = compute_trace(&m, &p, false).unwrap();
        let r = t.r_series.as_ref().expect("σ = 0 is inside the real-root regime");
        // r[k] ↔ i = k + 2; restrict to i ≤ 0.9N
        let limit = (0.9 * n as f64) as usize;
        let considered: Vec<f64> =
            r.iter().enumerate().filter(|(k, _)| k + 2 <= limit).map(|(_, v)| *v).collect();
        let exceed = considered.iter().filter(|v| v.abs() > cutoff).count();
        let frac = exceed as f64 / considered.len() as f64;
        assert!(frac < 0.05, "seed {seed}: deviation fraction {frac}");
    }
}

/// Above the spectrum the shifted matrix is close to sign-definite, so
/// successive principal minors should alternate in sign almost always;
/// at the edge itself the alternation still dominates.
#[test]
fn minor_signs_mostly_alternate_at_the_edge() {
    let n = 10_000;
    let p = EdgeParams::from_two_theta(n, 2.0).unwrap();
    let spec = EnsembleSpec::new(n, 1.0, 0.0).unwrap();
    for seed in [1u64, 2, 3] {
        let m = sample_tridiagonal(&spec, &mut RngStream::new(seed, 0));
        let t = compute_trace(&m, &p, false).unwrap();
        let flips = t
            .e_sign
            .windows(2)
            .filter(|w| w[0] != 0 && w[1] != 0 && w[0] != w[1])
            .count();
        let frac = flips as f64 / (n - 1) as f64;
        assert!(frac >= 0.95, "seed {seed}: alternation fraction {frac}");
    }
}

/// The accumulated edge weights are always ≥ 1 and end at exactly 1.
#[test]
fn edge_weights_are_bounded_below_by_one() {
    for (n, sigma) in [(100usize, 0.0f64), (1000, 3.0), (5000, 12.0)] {
        let p = EdgeParams::from_sigma(n, sigma).unwrap();
        let g = g_weights(&p).unwrap();
        assert_eq!(g.len(), n - 1);
        assert!(g.iter().all(|&x| x >= 1.0));
        assert_eq!(*g.last().unwrap(), 1.0);
    }
}
