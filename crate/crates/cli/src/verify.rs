//! Deterministic self-verification suite: identities that hold on every
//! clean build, checked with frozen tolerances. Exits 2 if any check fails.
//!
//! Checks:
//! 1. engine equivalence — the renormalized recurrence and the bisection
//!    eigenvalue oracle agree on a seeded grid;
//! 2. trace reconstruction — the normalized-minor trace plus the exact
//!    deterministic shift reproduces the direct log-determinant;
//! 3. shift consistency — the exact deterministic shift and its O(1/N)
//!    integral form agree within the frozen C·w^{−3/2} envelope;
//! 4. g-bounds — the accumulated edge weights sit inside the two-sided
//!    r/(2(r−1)) sandwich away from the turning point.

use crate::config::{echo_config, Settings};
use crate::{Failure, VerifyArgs};
use edge_logdet_core::clt::{deterministic_shift_exact, deterministic_shift_integral};
use edge_logdet_core::edge::{compute_trace, edge_quantities, g_weights};
use edge_logdet_core::ensemble::{sample_tridiagonal, EnsembleSpec};
use edge_logdet_core::logdet::{
    create_engine, logabsdet_recurrence, EdgeParams, LogDetEngine,
};
use edge_logdet_core::rng::RngStream;

/// Runs `f` over `0..total` case indices on `threads` workers and collects
/// the failure messages in index order.
fn collect_failures<F>(total: usize, threads: usize, f: F) -> Vec<String>
where
    F: Fn(usize) -> Option<String> + Sync,
{
    let threads = threads.max(1);
    let mut slots: Vec<Option<String>> = (0..total).map(|_| None).collect();
    if threads == 1 || total <= 1 {
        for (i, slot) in slots.iter_mut().enumerate() {
            *slot = f(i);
        }
    } else {
        let chunk = total.div_ceil(threads);
        std::thread::scope(|scope| {
            for (ci, slice) in slots.chunks_mut(chunk).enumerate() {
                let f = &f;
                scope.spawn(move || {
                    for (k, slot) in slice.iter_mut().enumerate() {
                        *slot = f(ci * chunk + k);
                    }
                });
            }
        });
    }
    slots.into_iter().flatten().collect()
}

struct OracleCase {
    n: usize,
    alpha: f64,
    sigma: f64,
    seed: u64,
}

/// Check 1: both engines agree in sign and to 1e−8 relative in magnitude.
fn check_engine_equivalence(threads: usize) -> Result<(), String> {
    let mut cases = Vec::new();
    for &n in &[8usize, 64, 256] {
        for &alpha in &[0.5, 1.0, 2.0] {
            for sigma in [-2.0, 0.0, 1.0, (n as f64).ln()] {
                for seed in 0..5u64 {
                    cases.push(OracleCase { n, alpha, sigma, seed });
                }
            }
        }
    }
    let recurrence = create_engine("recurrence").expect("registered engine");
    let eigen = create_engine("eigen").expect("registered engine");
    let run_case = |idx: usize| -> Option<String> {
        let c = &cases[idx];
        let case_of = |e: &dyn LogDetEngine| {
            let spec = EnsembleSpec::new(c.n, c.alpha, 0.0).unwrap();
            let m = sample_tridiagonal(&spec, &mut RngStream::new(c.seed, 0));
            let p = EdgeParams::from_sigma(c.n, c.sigma).unwrap();
            e.compute(&m, &p)
        };
        let a = match case_of(recurrence.as_ref()) {
            Ok(v) => v,
            Err(e) => return Some(format!("recurrence failed: {e}")),
        };
        let b = match case_of(eigen.as_ref()) {
            Ok(v) => v,
            Err(e) => return Some(format!("eigen oracle failed: {e}")),
        };
        let tol = 1e-8 * a.log_abs.abs().max(1.0);
        if a.sign != b.sign || (a.log_abs - b.log_abs).abs() > tol {
            return Some(format!(
                "n={} alpha={} sigma={} seed={}: recurrence ({}, {:.17e}) vs eigen ({}, {:.17e})",
                c.n, c.alpha, c.sigma, c.seed, a.sign, a.log_abs, b.sign, b.log_abs
            ));
        }
        None
    };
    let failures = collect_failures(cases.len(), threads, run_case);
    match failures.first() {
        None => Ok(()),
        Some(first) => Err(format!("{} of {} cases failed; first: {first}", failures.len(), cases.len())),
    }
}

/// Check 2: normalized trace end point + exact deterministic shift equals
/// the direct renormalized log-determinant to 1e−6 relative.
fn check_trace_reconstruction() -> Result<(), String> {
    let n = 2048;
    let p = EdgeParams::from_sigma(n, 5.0).map_err(|e| e.to_string())?;
    let shift = deterministic_shift_exact(&p).map_err(|e| e.to_string())?;
    let spec = EnsembleSpec::new(n, 1.0, 0.0).unwrap();
    for seed in 0..5u64 {
        let m = sample_tridiagonal(&spec, &mut RngStream::new(seed, 1));
        let direct = logabsdet_recurrence(&m, &p).map_err(|e| e.to_string())?;
        let t = compute_trace(&m, &p, false).map_err(|e| e.to_string())?;
        let reconstructed = t.e_log[n - 1] + shift;
        let tol = 1e-6 * direct.log_abs.abs().max(1.0);
        if (reconstructed - direct.log_abs).abs() > tol {
            return Err(format!(
                "seed {seed}: reconstructed {:.17e} vs direct {:.17e}",
                reconstructed, direct.log_abs
            ));
        }
    }
    Ok(())
}

/// Check 3: exact vs integral-form deterministic shift stay within the
/// frozen envelope 5·w^{−3/2} on the acceptance grid.
fn check_shift_consistency() -> Result<(), String> {
    let n = 1_000_000;
    for w in [5.0f64, 10.0, 20.0, 40.0] {
        let p = EdgeParams::from_sigma(n, 2.0 * w).map_err(|e| e.to_string())?;
        let exact = deterministic_shift_exact(&p).map_err(|e| e.to_string())?;
        let integral = deterministic_shift_integral(&p).map_err(|e| e.to_string())?;
        let gap = (exact - integral).abs();
        let envelope = 5.0 * w.powf(-1.5);
        if gap > envelope {
            return Err(format!(
                "w={w}: |exact − integral| = {gap:.3e} exceeds {envelope:.3e}"
            ));
        }
    }
    Ok(())
}

/// Check 4: for N = 10⁵ and w = 1.1(log log N)², every weight g_i with
/// 3 ≤ i ≤ N − N^{1/3} obeys
/// r_i/(2(r_i−1))·(1 − log⁻²N) < g_i < r_i/(2(r_i−1))·(1 + w^{−3/2}).
fn check_g_bounds() -> Result<(), String> {
    let n = 100_000usize;
    let w = 1.1 * (n as f64).ln().ln().powi(2);
    let p = EdgeParams::from_sigma(n, 2.0 * w).map_err(|e| e.to_string())?;
    let g = g_weights(&p).map_err(|e| e.to_string())?;
    let lo_factor = 1.0 - (n as f64).ln().powi(-2);
    let hi_factor = 1.0 + w.powf(-1.5);
    let i_max = n - (n as f64).cbrt().floor() as usize;
    for i in 3..=i_max {
        let r = edge_quantities(i, &p).map_err(|e| e.to_string())?.r;
        let center = r / (2.0 * (r - 1.0));
        let gi = g[i - 3];
        if !(center * lo_factor < gi && gi < center * hi_factor) {
            return Err(format!(
                "i={i}: g={gi:.12e} outside ({:.12e}, {:.12e})",
                center * lo_factor,
                center * hi_factor
            ));
        }
    }
    Ok(())
}

pub fn verify(a: &VerifyArgs, cfg: &Settings) -> Result<(), Failure> {
    let threads = cfg.or_default(a.threads, "threads", 1)?;
    echo_config("verify", &[("threads", threads.to_string())]);
    let checks: Vec<(&str, Result<(), String>)> = vec![
        ("engine-equivalence", check_engine_equivalence(threads)),
        ("trace-reconstruction", check_trace_reconstruction()),
        ("shift-consistency", check_shift_consistency()),
        ("g-bounds", check_g_bounds()),
    ];
    let mut failed = 0;
    for (name, outcome) in &checks {
        match outcome {
            Ok(()) => println!("ok {name}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        println!("verify: all {} checks passed", checks.len());
        Ok(())
    } else {
        println!("verify: {failed} of {} checks failed", checks.len());
        Err(Failure::Verification)
    }
}
