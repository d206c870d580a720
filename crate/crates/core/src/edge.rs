//! Edge-local decomposition of the determinant recurrence.
//!
//! Near the upper spectral edge the shifted minor recurrence has a
//! deterministic characteristic root of largest modulus
//! `|ρ_i⁺| = θ√N·r_i` with `r_i = 1 + √(1 − (i−1)/(Nθ²))`. Dividing the
//! minors by the running product of these moduli yields a normalized
//! sequence `E_i` whose consecutive ratio `R_i = E_i/E_{i−1} + 1` stays
//! close to zero through the bulk of the recursion, and whose driving
//! noise linearizes to `L_i = ξ_i + γ_i·L_{i−1}`. This module computes:
//!
//! * the deterministic coefficient sequences `r_i, m_i, γ_i, δ_i`
//!   ([`edge_quantities`]) and root log-moduli ([`rho_plus_log_modulus`]),
//! * the full traces `E`/`R`/`L` from a sampled matrix ([`compute_trace`]),
//! * the discrete weights `g_i = 1 + γ_i + γ_iγ_{i+1} + …` ([`g_weights`]),
//! * exact second-moment identities for the noise and the linear process
//!   ([`xi_variance_exact`], [`predicted_sum_variance`],
//!   [`l_variance_profile`]) and the weighted drift sum ([`t_delta_sum`]).
//!
//! All log-magnitude traces are derived from the binary-renormalized minor
//! recurrence (never from raw products), so they remain finite for every
//! dimension and also in the regime where the characteristic roots turn
//! complex and only the modulus normalization is meaningful.

use crate::ensemble::TridiagonalMatrix;
use crate::error::{Error, Result};
use crate::logdet::{validate_pair, EdgeParams};
use crate::util::KahanSum;
use std::io::Write;

/// Divisors `|1 − R_{i−1}|` below this are flagged as near-singular; from
/// the first flag onward the ratio recursion is abandoned and `R` is
/// reconstructed from the renormalized minors instead.
pub const NEAR_SINGULAR_TOL: f64 = 1e-12;

/// Deterministic edge coefficients at index `i` (1-based):
/// `r_i = 1 + √(1 − (i−1)/(Nθ²))`, `m_i = 2 − r_i`, `γ_i = m_i/r_i`,
/// `δ_i = m_i/r_i − m_i/r_{i−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeQuantities {
    pub i: usize,
    pub r: f64,
    pub m: f64,
    pub gamma: f64,
    pub delta: f64,
}

#[inline]
fn checked_nt2(p: &EdgeParams) -> Result<f64> {
    if p.theta() <= 0.0 {
        return Err(Error::Regime(format!(
            "edge quantities need a positive evaluation point, got theta = {}",
            p.theta()
        )));
    }
    Ok(p.n() as f64 * p.theta() * p.theta())
}

/// `r_i` from the closed form; caller guarantees `(i−1) ≤ nt2 = N·θ²`.
#[inline]
fn r_of(i: usize, nt2: f64) -> f64 {
    1.0 + (1.0 - (i as f64 - 1.0) / nt2).sqrt()
}

/// Computes the deterministic coefficients at index `i`.
///
/// Requires `1 ≤ i ≤ N` and `(i−1) ≤ N·θ²` (real characteristic roots);
/// outside that range the square root turns imaginary and only
/// [`rho_plus_log_modulus`] remains meaningful.
pub fn edge_quantities(i: usize, p: &EdgeParams) -> Result<EdgeQuantities> {
    if i < 1 || i > p.n() {
        return Err(Error::InvalidParameter(format!(
            "index {i} outside 1..={}",
            p.n()
        )));
    }
    let nt2 = checked_nt2(p)?;
    if (i as f64 - 1.0) > nt2 {
        return Err(Error::Regime(format!(
            "index {i} is beyond the real-root regime (N·θ² = {nt2})"
        )));
    }
    let r = r_of(i, nt2);
    let m = 2.0 - r;
    // r_{i−1} from the same formula one index back; at i = 1 the argument
    // exceeds 1 but m_1 = 0 makes δ_1 = 0 regardless
    let r_prev = 1.0 + (1.0 - (i as f64 - 2.0) / nt2).sqrt();
    let gamma = m / r;
    let delta = m / r - m / r_prev;
    Ok(EdgeQuantities { i, r, m, gamma, delta })
}

/// Log-modulus of the dominant characteristic root at index `j`:
/// `|ρ_j⁺| = θ√N + √(θ²N − (j−1))` while the discriminant is nonnegative,
/// and the complex modulus `√(j−1)` beyond it. Requires `j ≥ 1` and a
/// positive θ.
pub fn rho_plus_log_modulus(j: usize, p: &EdgeParams) -> f64 {
    debug_assert!(j >= 1 && p.theta() > 0.0);
    let tn = p.theta() * p.theta() * p.n() as f64;
    let disc = tn - (j as f64 - 1.0);
    if disc >= 0.0 {
        (p.theta() * (p.n() as f64).sqrt() + disc.sqrt()).ln()
    } else {
        // |ρ|² = θ²N + ((j−1) − θ²N) = j−1
        0.5 * (j as f64 - 1.0).ln()
    }
}

/// Normalized traces of one sampled matrix.
///
/// Vectors `e_sign`/`e_log` run over i = 1..=N; `r_series`, `l_series` and
/// `flags` run over i = 2..=N (entry k ↔ i = k+2). `r_series`/`l_series`
/// are `None` outside the real-root regime, where the ratio and linear
/// recursions are not defined; the `E` trace is always present.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTrace {
    pub e_sign: Vec<i8>,
    pub e_log: Vec<f64>,
    pub r_series: Option<Vec<f64>>,
    pub l_series: Option<Vec<f64>>,
    pub flags: Vec<bool>,
}

/// Noise decomposition at index `i`: `α_i` from the diagonal entry, `β_i`
/// from the centered off-diagonal square `c_{i−1} = (b_{i−1}² − (i−1))/√(i−1)`,
/// and their sum `ξ_i = α_i + β_i` (exactly as computed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiInputs {
    pub i: usize,
    pub alpha_i: f64,
    pub beta_i: f64,
    pub xi_i: f64,
    pub c_prev: f64,
}

/// Builds [`XiInputs`] from raw matrix entries `a_i` and `b_{i−1}²`
/// (useful for simulating the noise law directly, without assembling a
/// full matrix). Requires `2 ≤ i ≤ N` and the real-root regime at `i`.
pub fn xi_from_entries(i: usize, a_i: f64, bsq_prev: f64, p: &EdgeParams) -> Result<XiInputs> {
    if i < 2 || i > p.n() {
        return Err(Error::InvalidParameter(format!(
            "noise index {i} outside 2..={}",
            p.n()
        )));
    }
    let nt2 = checked_nt2(p)?;
    if (i as f64 - 1.0) > nt2 {
        return Err(Error::Regime(format!(
            "noise index {i} is beyond the real-root regime (N·θ² = {nt2})"
        )));
    }
    let r = r_of(i, nt2);
    let r_prev = r_of(i - 1, nt2);
    let m = 2.0 - r;
    let sqn_th = (p.n() as f64).sqrt() * p.theta();
    let c_prev = (bsq_prev - (i as f64 - 1.0)) / (i as f64 - 1.0).sqrt();
    let alpha_i = a_i / (sqn_th * r);
    let beta_i = (m / r).sqrt() * c_prev / (sqn_th * r_prev);
    Ok(XiInputs { i, alpha_i, beta_i, xi_i: alpha_i + beta_i, c_prev })
}

/// Extracts [`XiInputs`] at index `i` from a sampled matrix, so the linear
/// trace is driven by the same randomness as the ratio trace.
pub fn xi_inputs(m: &TridiagonalMatrix, p: &EdgeParams, i: usize) -> Result<XiInputs> {
    validate_pair(m, p)?;
    if i < 2 {
        return Err(Error::InvalidParameter("noise index must be at least 2".into()));
    }
    xi_from_entries(i, m.diag()[i - 1], m.offdiag()[i - 2] * m.offdiag()[i - 2], p)
}

/// `R_i` reconstructed from the renormalized minors:
/// `E_i/E_{i−1} + 1 = sign·exp(e_log[i] − e_log[i−1]) + 1`.
/// `E_i = 0` gives exactly 1; `E_{i−1} = 0` gives NaN (singular ratio).
#[inline]
fn ratio_from_minors(e_sign: &[i8], e_log: &[f64], k: usize) -> f64 {
    if e_sign[k - 1] == 0 {
        return f64::NAN;
    }
    if e_sign[k] == 0 {
        return 1.0;
    }
    let sp = (e_sign[k] * e_sign[k - 1]) as f64;
    sp * (e_log[k] - e_log[k - 1]).exp() + 1.0
}

/// Runs the full edge-normalized trace of one matrix.
///
/// The `E` trace (`e_sign`, `e_log[i] = log|D_i| − Σ_{j≤i} log|ρ_j⁺|`) is
/// computed for any θ > 0 from the renormalized minor recurrence. The
/// ratio series is seeded at i = 2 with the closed form
/// `R_2 = (D_2)/(r_2·θ√N·D_1) + 1` and continued by
/// `R_i = α_i − γ_i + (γ_i + β_i − δ_i)/(1 − R_{i−1})`; divisors smaller
/// than [`NEAR_SINGULAR_TOL`] set the flag at that index and switch the
/// remainder of the series to the minor-derived ratio, which is immune to
/// the singular division. With `with_l` the linear trace
/// `L_i = ξ_i + γ_i·L_{i−1}` (L₂ = 0) is produced from the same entries.
///
/// Errors: `with_l` (or any r-series use) outside the real-root regime
/// `(N−1) ≤ N·θ²` is a regime error only for the optional series — the call
/// still succeeds with `r_series = l_series = None` unless `with_l` was
/// explicitly requested.
pub fn compute_trace(m: &TridiagonalMatrix, p: &EdgeParams, with_l: bool) -> Result<EdgeTrace> {
    validate_pair(m, p)?;
    if p.theta() <= 0.0 {
        return Err(Error::Regime(format!(
            "the root normalization needs theta > 0, got {}",
            p.theta()
        )));
    }
    let n = p.n();
    let nt2 = p.n() as f64 * p.theta() * p.theta();
    let real_regime = (n as f64 - 1.0) <= nt2;
    if with_l && !real_regime {
        return Err(Error::Regime(format!(
            "linear trace requested outside the real-root regime (N−1 = {} > N·θ² = {nt2})",
            n - 1
        )));
    }

    let diag = m.diag();
    let off = m.offdiag();
    let s = p.shift_unscaled();

    // E trace from the renormalized minors minus cumulative root log-moduli
    let mut e_sign = Vec::with_capacity(n);
    let mut e_log = Vec::with_capacity(n);
    {
        let mut st = crate::logdet::MinorState::start(0);
        let mut cum_rho = KahanSum::new();
        st.step(diag[0] - s, None);
        cum_rho.add(rho_plus_log_modulus(1, p));
        e_sign.push(st.sign());
        e_log.push(st.log_abs() - cum_rho.value());
        for i in 2..=n {
            st.step(diag[i - 1] - s, Some(off[i - 2] * off[i - 2]));
            cum_rho.add(rho_plus_log_modulus(i, p));
            e_sign.push(st.sign());
            e_log.push(st.log_abs() - cum_rho.value());
        }
    }

    if !real_regime {
        return Ok(EdgeTrace { e_sign, e_log, r_series: None, l_series: None, flags: vec![] });
    }

    let mut flags = vec![false; n.saturating_sub(1)];
    let mut r_vec: Vec<f64> = Vec::with_capacity(n.saturating_sub(1));
    let mut l_vec: Option<Vec<f64>> = with_l.then(|| Vec::with_capacity(n.saturating_sub(1)));

    if n >= 2 {
        let sqn_th = (n as f64).sqrt() * p.theta();
        let mut past_flag = false;

        // i = 2: closed-form seed; its divisor is D_1, i.e. |1 − R_1| = |E_1|
        let d1 = diag[0] - s;
        let e1 = d1 / (2.0 * sqn_th);
        let r2_coeff = r_of(2, nt2);
        let r2 = if e1.abs() < NEAR_SINGULAR_TOL {
            flags[0] = true;
            past_flag = true;
            ratio_from_minors(&e_sign, &e_log, 1)
        } else {
            (d1 * (diag[1] - s) - off[0] * off[0]) / (r2_coeff * sqn_th * d1) + 1.0
        };
        r_vec.push(r2);
        if let Some(l) = &mut l_vec {
            l.push(0.0); // L_2 = 0
        }

        let mut r_prev_val = r2;
        let mut l_prev = 0.0f64;
        let mut r_coeff_prev = r2_coeff; // r_{i−1}
        for i in 3..=n {
            let r = r_of(i, nt2);
            let mcoef = 2.0 - r;
            let gamma = mcoef / r;
            let delta = mcoef / r - mcoef / r_coeff_prev;
            let c_prev = (off[i - 2] * off[i - 2] - (i as f64 - 1.0)) / (i as f64 - 1.0).sqrt();
            let alpha_i = diag[i - 1] / (sqn_th * r);
            let beta_i = (mcoef / r).sqrt() * c_prev / (sqn_th * r_coeff_prev);

            let ri = if past_flag {
                ratio_from_minors(&e_sign, &e_log, i - 1)
            } else {
                let denom = 1.0 - r_prev_val;
                if denom.abs() < NEAR_SINGULAR_TOL {
                    flags[i - 2] = true;
                    past_flag = true;
                    ratio_from_minors(&e_sign, &e_log, i - 1)
                } else {
                    alpha_i - gamma + (gamma + beta_i - delta) / denom
                }
            };
            r_vec.push(ri);
            r_prev_val = ri;

            if let Some(l) = &mut l_vec {
                l_prev = (alpha_i + beta_i) + gamma * l_prev;
                l.push(l_prev);
            }
            r_coeff_prev = r;
        }
    }

    Ok(EdgeTrace { e_sign, e_log, r_series: Some(r_vec), l_series: l_vec, flags })
}

/// Discrete tail weights `g_i = 1 + γ_i + γ_iγ_{i+1} + … + γ_i⋯γ_N`,
/// returned for i = 3..=N+1 in ascending order (`g_{N+1} = 1`), computed by
/// the backward recursion `g_i = 1 + γ_i·g_{i+1}`. Real-root regime only.
pub fn g_weights(p: &EdgeParams) -> Result<Vec<f64>> {
    let n = p.n();
    let nt2 = checked_nt2(p)?;
    if (n as f64 - 1.0) > nt2 {
        return Err(Error::Regime(format!(
            "weights need the real-root regime: N−1 = {} > N·θ² = {nt2}",
            n - 1
        )));
    }
    if n < 2 {
        return Ok(vec![]);
    }
    let len = n - 1; // indices i = 3..=N+1
    let mut g = vec![0.0; len];
    g[len - 1] = 1.0;
    for i in (3..=n).rev() {
        let r = r_of(i, nt2);
        let gamma = (2.0 - r) / r;
        g[i - 3] = 1.0 + gamma * g[i - 2];
    }
    Ok(g)
}

/// Exact second moment of the noise:
/// `E ξ_i² = α/(Nθ²r_i²) + α·m_i·r_i/(Nθ²·r_i²·r_{i−1}²)`.
/// Requires i ≥ 3 and the real-root regime at i.
pub fn xi_variance_exact(i: usize, p: &EdgeParams, alpha: f64) -> Result<f64> {
    if i < 3 || i > p.n() {
        return Err(Error::InvalidParameter(format!(
            "variance index {i} outside 3..={}",
            p.n()
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ensemble parameter alpha must be positive and finite, got {alpha}"
        )));
    }
    let nt2 = checked_nt2(p)?;
    if (i as f64 - 1.0) > nt2 {
        return Err(Error::Regime(format!(
            "variance index {i} is beyond the real-root regime (N·θ² = {nt2})"
        )));
    }
    let r = r_of(i, nt2);
    let r_prev = r_of(i - 1, nt2);
    let m = 2.0 - r;
    Ok(alpha / (nt2 * r * r) + alpha * m * r / (nt2 * r * r * r_prev * r_prev))
}

/// Weighted total noise variance: the exact finite sum
/// `Σ_{i=3}^N g_{i+1}²·Eξ_i²` next to its N-free closed form
/// `α·log((θ + √(θ²−1))/(2√(θ²−1)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariancePrediction {
    pub exact: f64,
    pub closed_form: f64,
}

/// Computes both sides of the total-variance prediction. Requires θ > 1
/// (the closed form diverges as θ ↓ 1).
pub fn predicted_sum_variance(p: &EdgeParams, alpha: f64) -> Result<VariancePrediction> {
    let theta = p.theta();
    if !(theta > 1.0) {
        return Err(Error::Domain(format!(
            "the closed-form total variance needs theta > 1, got {theta}"
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ensemble parameter alpha must be positive and finite, got {alpha}"
        )));
    }
    let n = p.n();
    let nt2 = n as f64 * theta * theta;
    let g = g_weights(p)?; // g[k] = g_{k+3}
    let mut sum = KahanSum::new();
    if n >= 3 {
        let mut r_prev = r_of(2, nt2);
        for i in 3..=n {
            let r = r_of(i, nt2);
            let m = 2.0 - r;
            let exi2 = alpha / (nt2 * r * r) + alpha * m * r / (nt2 * r * r * r_prev * r_prev);
            let g_next = g[i - 2]; // g_{i+1}
            sum.add(g_next * g_next * exi2);
            r_prev = r;
        }
    }
    // θ²−1 as (θ−1)(θ+1) keeps precision for θ close to 1
    let root = ((theta - 1.0) * (theta + 1.0)).sqrt();
    let closed = alpha * ((theta + root) / (2.0 * root)).ln();
    Ok(VariancePrediction { exact: sum.value(), closed_form: closed })
}

/// Exact second moments `V_i = E L_i²` of the linear trace, for
/// i = 2..=N ascending (`V_2 = 0`, `V_i = Eξ_i² + γ_i²·V_{i−1}`).
pub fn l_variance_profile(p: &EdgeParams, alpha: f64) -> Result<Vec<f64>> {
    let n = p.n();
    let nt2 = checked_nt2(p)?;
    if (n as f64 - 1.0) > nt2 {
        return Err(Error::Regime(format!(
            "variance profile needs the real-root regime: N−1 = {} > N·θ² = {nt2}",
            n - 1
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ensemble parameter alpha must be positive and finite, got {alpha}"
        )));
    }
    if n < 2 {
        return Ok(vec![]);
    }
    let mut v = Vec::with_capacity(n - 1);
    v.push(0.0); // V_2
    let mut v_prev = 0.0f64;
    let mut r_prev = r_of(2, nt2);
    for i in 3..=n {
        let r = r_of(i, nt2);
        let m = 2.0 - r;
        let gamma = m / r;
        let exi2 = alpha / (nt2 * r * r) + alpha * m * r / (nt2 * r * r * r_prev * r_prev);
        v_prev = exi2 + gamma * gamma * v_prev;
        v.push(v_prev);
        r_prev = r;
    }
    Ok(v)
}

/// Exact weighted drift sum `Σ_{i=3}^N T_{δi}` where
/// `T_{δi} = δ_i + γ_iδ_{i−1} + γ_iγ_{i−1}δ_{i−2} + …`; computed in O(N) by
/// the backward identity `Σ_i T_{δi} = Σ_{j=3}^N δ_j·g_{j+1}`.
pub fn t_delta_sum(p: &EdgeParams) -> Result<f64> {
    let n = p.n();
    let nt2 = checked_nt2(p)?;
    if (n as f64 - 1.0) > nt2 {
        return Err(Error::Regime(format!(
            "drift sum needs the real-root regime: N−1 = {} > N·θ² = {nt2}",
            n - 1
        )));
    }
    if n < 3 {
        return Ok(0.0);
    }
    let mut acc = KahanSum::new();
    let mut g = 1.0f64; // g_{N+1}
    let mut r_cur = r_of(n, nt2);
    for i in (3..=n).rev() {
        let r_prev = r_of(i - 1, nt2);
        let m = 2.0 - r_cur;
        let delta = m / r_cur - m / r_prev;
        let gamma = m / r_cur;
        acc.add(delta * g); // δ_i · g_{i+1}
        g = 1.0 + gamma * g;
        r_cur = r_prev;
    }
    Ok(acc.value())
}

/// Writes the trace as CSV with header `i,e_sign,e_log,R,L,flag`, one row
/// per i = 1..=N. `R`, `L` are blank at i = 1 and whenever the series is
/// absent; `flag` is 0/1 (blank at i = 1). Floats carry 17 significant
/// digits; `−inf` marks an exactly zero minor.
pub fn write_trace_csv<W: Write>(t: &EdgeTrace, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "i,e_sign,e_log,R,L,flag")?;
    for k in 0..t.e_sign.len() {
        let r = match (&t.r_series, k) {
            (_, 0) => String::new(),
            (Some(rv), _) => format!("{:.16e}", rv[k - 1]),
            (None, _) => String::new(),
        };
        let l = match (&t.l_series, k) {
            (_, 0) => String::new(),
            (Some(lv), _) => format!("{:.16e}", lv[k - 1]),
            (None, _) => String::new(),
        };
        let flag = if k == 0 {
            String::new()
        } else if t.flags.is_empty() {
            "0".to_string()
        } else {
            (t.flags[k - 1] as u8).to_string()
        };
        writeln!(out, "{},{},{:.16e},{},{},{}", k + 1, t.e_sign[k], t.e_log[k], r, l, flag)?;
    }
    Ok(())
}

/// Writes consecutive normalized-minor pairs `(E_i, E_{i−1})` for
/// i = 2..=N as CSV (`i,e_i,e_prev`), reconstructing `E = sign·exp(e_log)`
/// with saturation at ±10³⁰⁰ — the pairs are only meaningful near the
/// stable regime, and saturation keeps the file finite elsewhere.
pub fn write_scatter_csv<W: Write>(t: &EdgeTrace, out: &mut W) -> std::io::Result<()> {
    const CAP: f64 = 1e300;
    let rebuild = |k: usize| -> f64 {
        if t.e_sign[k] == 0 {
            return 0.0;
        }
        let mag = t.e_log[k].exp();
        let mag = if mag.is_finite() { mag.min(CAP) } else { CAP };
        t.e_sign[k] as f64 * mag
    };
    writeln!(out, "i,e_i,e_prev")?;
    for k in 1..t.e_sign.len() {
        writeln!(out, "{},{:.16e},{:.16e}", k + 1, rebuild(k), rebuild(k - 1))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_tridiagonal, EnsembleSpec};
    use crate::logdet::logabsdet_recurrence;
    use crate::rng::RngStream;

    fn params(n: usize, sigma: f64) -> EdgeParams {
        EdgeParams::from_sigma(n, sigma).unwrap()
    }

    #[test]
    fn edge_quantities_trivial_and_reference_values() {
        // i = 1: square root of 1
        let q = edge_quantities(1, &params(50, 3.0)).unwrap();
        assert_eq!(q.r, 2.0);
        assert_eq!(q.m, 0.0);
        assert_eq!(q.gamma, 0.0);
        assert_eq!(q.delta, 0.0);

        // i = Nθ² + 1 (integral): square root of 0
        let p = EdgeParams::from_two_theta(100, 1.0).unwrap(); // θ = 0.5, Nθ² = 25
        let q = edge_quantities(26, &p).unwrap();
        assert!((q.r - 1.0).abs() < 1e-12);
        assert!((q.m - 1.0).abs() < 1e-12);
        assert!((q.gamma - 1.0).abs() < 1e-12);

        // reference evaluation at N=100, θ=1, i=51
        let p = EdgeParams::from_sigma(100, 0.0).unwrap();
        let q = edge_quantities(51, &p).unwrap();
        assert!((q.r - 1.707_106_8).abs() < 1e-6);
        assert!((q.m - 0.292_893_2).abs() < 1e-6);
        assert!((q.gamma - 0.171_572_9).abs() < 1e-6);

        // outside the real-root regime
        let p = EdgeParams::from_two_theta(100, 1.0).unwrap();
        assert!(matches!(edge_quantities(27, &p), Err(Error::Regime(_))));
        assert!(edge_quantities(0, &p).is_err());
        assert!(edge_quantities(101, &p).is_err());
    }

    #[test]
    fn edge_quantities_satisfy_algebraic_invariants() {
        let p = params(500, 2.5);
        let nt2 = 500.0 * p.theta() * p.theta();
        let mut last_delta = 0.0;
        for i in 1..=500 {
            let q = edge_quantities(i, &p).unwrap();
            assert!((q.r + q.m - 2.0).abs() < 1e-14, "r+m at {i}");
            assert!(
                (q.r * q.m - (i as f64 - 1.0) / nt2).abs() < 1e-14,
                "r·m at {i}"
            );
            assert!(q.r >= 1.0 && 1.0 >= q.m && q.m >= 0.0);
            assert!(q.delta >= last_delta - 1e-16, "delta monotone at {i}");
            last_delta = q.delta;
        }
    }

    #[test]
    fn root_log_modulus_matches_closed_cases() {
        let p = params(4, 0.0); // θ = 1
        assert!((rho_plus_log_modulus(1, &p) - 4.0f64.ln()).abs() < 1e-15);
        assert!((rho_plus_log_modulus(5, &p) - 2.0f64.ln()).abs() < 1e-15);
        let p = EdgeParams::from_two_theta(4, 1.0).unwrap(); // θ = 0.5
        assert!((rho_plus_log_modulus(4, &p) - 3.0f64.sqrt().ln()).abs() < 1e-15);
    }

    #[test]
    fn trace_reconstructs_the_log_determinant() {
        // e_log[N] + (N/2)·log θ² + Σ log(1+√x_{i−1}) must equal the direct
        // renormalized recurrence (two independent bookkeeping paths)
        for (n, sigma, seed) in [(512usize, 5.0, 11u64), (700, 1.5, 12), (64, 0.0, 13)] {
            let p = params(n, sigma);
            let spec = EnsembleSpec::new(n, 1.0, 0.0).unwrap();
            let m = sample_tridiagonal(&spec, &mut RngStream::new(seed, 0));
            let t = compute_trace(&m, &p, false).unwrap();
            let nt2 = n as f64 * p.theta() * p.theta();
            let mut shift = KahanSum::new();
            for i in 1..=n {
                shift.add((1.0 + (1.0 - (i as f64 - 1.0) / nt2).sqrt()).ln());
            }
            let reconstructed =
                t.e_log[n - 1] + n as f64 * p.theta().ln() + shift.value();
            let direct = logabsdet_recurrence(&m, &p).unwrap().log_abs;
            assert!(
                (reconstructed - direct).abs() <= 1e-6 * direct.abs().max(1.0),
                "n={n}: {reconstructed} vs {direct}"
            );
        }
    }

    #[test]
    fn ratio_seed_matches_generic_step_on_seeded_draws() {
        // the closed-form R_2 and one generic step from R_1 = a_1/(2θ√N)
        // are the same rational function written two ways
        let mut worst = 0.0f64;
        for rep in 0..100 {
            let n = 40 + (rep % 7) as usize * 37;
            // σ ≥ 0 keeps every size in the real-edge regime where the
            // ratio series is defined
            let sigma = [0.0, 1.0, 2.0, 5.0][rep % 4];
            let alpha = [0.5, 1.0, 2.0][rep % 3];
            let p = params(n, sigma);
            let spec = EnsembleSpec::new(n, alpha, 0.0).unwrap();
            let m = sample_tridiagonal(&spec, &mut RngStream::new(900 + rep as u64, 3));
            let t = compute_trace(&m, &p, false).unwrap();
            let closed = t.r_series.as_ref().unwrap()[0];

            let sqn_th = (n as f64).sqrt() * p.theta();
            let r1 = m.diag()[0] / (2.0 * sqn_th);
            let q2 = edge_quantities(2, &p).unwrap();
            let xi = xi_inputs(&m, &p, 2).unwrap();
            let generic =
                xi.alpha_i - q2.gamma + (q2.gamma + xi.beta_i - q2.delta) / (1.0 - r1);
            worst = worst.max((closed - generic).abs());
        }
        assert!(worst <= 1e-12, "worst seed/generic gap {worst}");
    }

    #[test]
    fn exp_consistency_links_ratio_and_minor_traces() {
        let n = 512;
        let p = params(n, 5.0);
        let spec = EnsembleSpec::new(n, 1.0, 0.0).unwrap();
        let m = sample_tridiagonal(&spec, &mut RngStream::new(2024, 0));
        let t = compute_trace(&m, &p, false).unwrap();
        assert!(t.flags.iter().all(|f| !f), "unexpected near-singular flag");
        let r = t.r_series.as_ref().unwrap();
        let mut rhs = KahanSum::new();
        rhs.add(t.e_log[1]); // log|E_2|
        for ri in &r[1..] {
            rhs.add((1.0 - ri).abs().ln());
        }
        let lhs = t.e_log[n - 1];
        assert!(
            (lhs - rhs.value()).abs() <= 1e-6 * n as f64,
            "{lhs} vs {}",
            rhs.value()
        );
    }

    #[test]
    fn degenerate_input_zeroes_the_normalized_trace() {
        let n = 6;
        let p = params(n, 0.0);
        let s = p.shift_unscaled();
        let m = TridiagonalMatrix::new(vec![s; n], vec![0.0; n - 1]).unwrap();
        let t = compute_trace(&m, &p, false).unwrap();
        assert!(t.e_sign.iter().all(|s| *s == 0));
        assert!(t.e_log.iter().all(|l| *l == f64::NEG_INFINITY));
    }

    #[test]
    fn complex_regime_omits_ratio_series_and_rejects_linear_trace() {
        // θ = 0.5 puts most of the recursion beyond the real-root regime
        let n = 64;
        let p = EdgeParams::from_two_theta(n, 1.0).unwrap();
        let spec = EnsembleSpec::new(n, 1.0, 0.0).unwrap();
        let m = sample_tridiagonal(&spec, &mut RngStream::new(77, 0));
        let t = compute_trace(&m, &p, false).unwrap();
        assert!(t.r_series.is_none() && t.l_series.is_none());
        assert_eq!(t.e_log.len(), n);
        assert!(t.e_log.iter().all(|x| x.is_finite()));
        assert!(matches!(compute_trace(&m, &p, true), Err(Error::Regime(_))));
    }

    #[test]
    fn weights_satisfy_definition_tail_and_large_theta_limit() {
        let n = 200;
        let p = params(n, 4.0);
        let g = g_weights(&p).unwrap();
        assert_eq!(g.len(), n - 1);
        assert_eq!(g[n - 2], 1.0); // g_{N+1}
        let qn = edge_quantities(n, &p).unwrap();
        assert!((g[n - 3] - (1.0 + qn.gamma)).abs() < 1e-14, "g_N = 1 + γ_N");

        // θ = 10³ sends every γ_i → 0, hence every weight → 1
        let p = EdgeParams::from_two_theta(n, 2000.0).unwrap();
        let g = g_weights(&p).unwrap();
        for gi in &g {
            assert!((gi - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn noise_variance_matches_monte_carlo() {
        // sample variance of ξ_i over 10⁶ independent (a_i, b²_{i−1}) draws
        let n = 2000;
        let i = 1500;
        let alpha = 1.0;
        let p = params(n, 5.0);
        let exact = xi_variance_exact(i, &p, alpha).unwrap();
        let mut rng = RngStream::new(31415, 100);
        let reps = 1_000_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..reps {
            let a = alpha.sqrt() * rng.next_normal();
            let bsq = rng.next_gamma((i as f64 - 1.0) / alpha, alpha).unwrap();
            let xi = xi_from_entries(i, a, bsq, &p).unwrap().xi_i;
            sum += xi;
            sumsq += xi * xi;
        }
        let mean = sum / reps as f64;
        let var = sumsq / reps as f64 - mean * mean;
        assert!(
            (var - exact).abs() <= 0.01 * exact,
            "sample {var} vs exact {exact}"
        );
    }

    #[test]
    fn noise_variance_second_term_vanishes_with_the_edge_mass() {
        // as θ grows, m_i → 0 and the off-diagonal contribution dies
        let p = EdgeParams::from_two_theta(100, 2000.0).unwrap(); // θ = 10³
        let nt2 = 100.0 * p.theta() * p.theta();
        let full = xi_variance_exact(3, &p, 1.0).unwrap();
        let r = r_of(3, nt2);
        let first_term = 1.0 / (nt2 * r * r);
        assert!((full - first_term).abs() <= 1e-6 * first_term);
    }

    #[test]
    fn linear_variance_profile_first_step_and_recursion() {
        let n = 50;
        let p = params(n, 3.0);
        let v = l_variance_profile(&p, 1.5).unwrap();
        assert_eq!(v.len(), n - 1);
        assert_eq!(v[0], 0.0); // V_2
        let v3 = xi_variance_exact(3, &p, 1.5).unwrap();
        assert!((v[1] - v3).abs() < 1e-16, "V_3 = Eξ_3²");
        // doubling α doubles the whole profile
        let v2 = l_variance_profile(&p, 3.0).unwrap();
        for (a, b) in v.iter().zip(&v2) {
            assert!((2.0 * a - b).abs() <= 1e-15 * b.abs());
        }
    }

    #[test]
    fn linear_trace_matches_its_variance_profile() {
        // 10⁵ simulated noise paths; sample Var(L_i) vs the exact V_i
        let n = 200;
        let alpha = 1.0;
        let p = params(n, 5.0);
        let v = l_variance_profile(&p, alpha).unwrap();
        let spots = [120usize, 200];
        let reps = 100_000;
        let mut sumsq = [0.0f64; 2];
        let mut sums = [0.0f64; 2];
        let mut rng = RngStream::new(8686, 0);
        for _ in 0..reps {
            let mut l = 0.0f64;
            for i in 3..=n {
                let a = alpha.sqrt() * rng.next_normal();
                let bsq = rng.next_gamma((i as f64 - 1.0) / alpha, alpha).unwrap();
                let xi = xi_from_entries(i, a, bsq, &p).unwrap();
                let q = edge_quantities(i, &p).unwrap();
                l = xi.xi_i + q.gamma * l;
                for (k, spot) in spots.iter().enumerate() {
                    if i == *spot {
                        sums[k] += l;
                        sumsq[k] += l * l;
                    }
                }
            }
        }
        for (k, spot) in spots.iter().enumerate() {
            let mean = sums[k] / reps as f64;
            let var = sumsq[k] / reps as f64 - mean * mean;
            let exact = v[spot - 2];
            assert!(
                (var - exact).abs() <= 0.02 * exact,
                "i={spot}: sample {var} vs exact {exact}"
            );
        }
    }

    #[test]
    fn drift_sum_collapses_when_weights_are_trivial() {
        // θ = 10³: γ_i ≲ (i−1)/(2Nθ²), so the weights deviate from 1 by at
        // most ≈ N/(2θ²) = 2.5·10⁻⁴ and the weighted sum collapses to the
        // plain δ sum at that relative rate
        let n = 500;
        let p = EdgeParams::from_two_theta(n, 2000.0).unwrap();
        let t = t_delta_sum(&p).unwrap();
        let mut plain = KahanSum::new();
        for i in 3..=n {
            plain.add(edge_quantities(i, &p).unwrap().delta);
        }
        let rel = (t - plain.value()).abs() / plain.value().abs();
        assert!(rel <= 1e-3, "relative deviation {rel}");
        assert!(rel > 0.0, "weighted and plain sums should not be identical");
    }

    #[test]
    fn drift_sum_tracks_its_logarithmic_leading_term() {
        let n = 100_000;
        let p = params(n, 5.0);
        let t = t_delta_sum(&p).unwrap();
        let lead = (n as f64).ln() / 6.0;
        assert!(
            (t - lead).abs() <= 5.0 * (n as f64).ln().ln(),
            "sum {t} vs leading term {lead}"
        );
    }

    #[test]
    fn csv_writers_produce_documented_layout() {
        let n = 4;
        let p = params(n, 5.0);
        let spec = EnsembleSpec::new(n, 1.0, 0.0).unwrap();
        let m = sample_tridiagonal(&spec, &mut RngStream::new(5, 5));
        let t = compute_trace(&m, &p, true).unwrap();

        let mut buf = Vec::new();
        write_trace_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i,e_sign,e_log,R,L,flag");
        assert_eq!(lines.len(), n + 1);
        assert!(lines[1].starts_with("1,"));
        // row for i = 1 has blank R, L, flag
        assert_eq!(lines[1].split(',').count(), 6);
        assert_eq!(lines[1].split(',').nth(3).unwrap(), "");
        assert_eq!(lines[1].split(',').nth(4).unwrap(), "");
        // later rows have all columns populated
        assert!(!lines[3].split(',').nth(3).unwrap().is_empty());
        assert!(!lines[3].split(',').nth(4).unwrap().is_empty());

        let mut buf = Vec::new();
        write_scatter_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i,e_i,e_prev");
        assert_eq!(lines.len(), n); // rows for i = 2..=N
    }
}
