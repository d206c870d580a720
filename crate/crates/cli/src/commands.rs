//! Implementations of the data-producing subcommands. Every command echoes
//! its full effective configuration (including the derived evaluation
//! point θ where one exists) to stderr, then writes results to stdout
//! and/or the requested files.

use crate::config::{echo_config, parse_n_list, Settings};
use crate::{
    CltArgs, DecimateArgs, Failure, LogdetArgs, Prop1Args, SampleArgs, TraceArgs,
};
use edge_logdet_core::clt::{CltVariant, ScalingRule};
use edge_logdet_core::ensemble::{
    apply_spike, sample_tridiagonal, write_matrix_csv, EnsembleSpec, TridiagonalMatrix,
};
use edge_logdet_core::edge::{compute_trace, write_scatter_csv, write_trace_csv};
use edge_logdet_core::logdet::{create_engine, EdgeParams, ENGINE_NAMES};
use edge_logdet_core::rng::RngStream;
use edge_logdet_core::stats::{
    decimation_check_with_shift, gap_sum_scaling_fit, run_campaign, run_gap_sum_campaign,
    summarize_campaign, write_gap_sums_csv, write_samples_csv, write_summary_csv, BatchConfig,
    GapSumConfig, SigmaRule,
};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Draws the matrix a command operates on. One-shot commands read
/// replicate stream 0 of the master seed.
fn draw_matrix(n: usize, alpha: f64, spike: f64, seed: u64) -> Result<TridiagonalMatrix, Failure> {
    let spec = EnsembleSpec::new(n, alpha, spike)?;
    let mut rng = RngStream::new(seed, 0);
    let mut m = sample_tridiagonal(&spec, &mut rng);
    if spike > 0.0 {
        m = apply_spike(m, spike);
    }
    Ok(m)
}

fn create_file(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", path.display())))
}

fn parse_scaling(s: &str) -> Result<ScalingRule, Failure> {
    match s.to_ascii_lowercase().as_str() {
        "thm1" => Ok(ScalingRule::LogN),
        "thm2" => Ok(ScalingRule::Theta),
        _ => Err(Failure::Usage(format!("scaling must be thm1 or thm2, got {s:?}"))),
    }
}

pub fn sample(a: &SampleArgs, cfg: &Settings) -> Result<(), Failure> {
    let n = cfg.require(a.n, "n")?;
    let alpha = cfg.require(a.alpha, "alpha")?;
    let spike = cfg.or_default(a.spike, "spike", 0.0)?;
    let seed = cfg.seed(a.seed)?;
    let out: PathBuf = cfg.require(a.out.clone(), "out")?;
    echo_config(
        "sample",
        &[
            ("n", n.to_string()),
            ("alpha", alpha.to_string()),
            ("spike", spike.to_string()),
            ("seed", seed.to_string()),
            ("out", out.display().to_string()),
        ],
    );
    let m = draw_matrix(n, alpha, spike, seed)?;
    let mut w = create_file(&out)?;
    write_matrix_csv(&m, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn logdet(a: &LogdetArgs, cfg: &Settings) -> Result<(), Failure> {
    let n = cfg.require(a.n, "n")?;
    let alpha = cfg.require(a.alpha, "alpha")?;
    let sigma = cfg.require(a.sigma, "sigma")?;
    let spike = cfg.or_default(a.spike, "spike", 0.0)?;
    let seed = cfg.seed(a.seed)?;
    let method = cfg.or_default(a.method.clone(), "method", "recurrence".into())?;
    let engine = create_engine(&method).ok_or_else(|| {
        Failure::Usage(format!("unknown method {method:?}; available: {}", ENGINE_NAMES.join(", ")))
    })?;
    let p = EdgeParams::from_sigma(n, sigma)?;
    echo_config(
        "logdet",
        &[
            ("n", n.to_string()),
            ("alpha", alpha.to_string()),
            ("sigma", sigma.to_string()),
            ("theta", format!("{:.16e}", p.theta())),
            ("spike", spike.to_string()),
            ("seed", seed.to_string()),
            ("method", engine.name().to_string()),
        ],
    );
    let m = draw_matrix(n, alpha, spike, seed)?;
    let d = engine.compute(&m, &p)?;
    println!("sign {}", d.sign);
    println!("log_abs {:.16e}", d.log_abs);
    Ok(())
}

/// Sibling path with the same stem and an extra suffix, e.g.
/// `run/trace.csv` → `run/trace.scatter.csv`.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    out.with_file_name(format!("{stem}{suffix}"))
}

pub fn trace(a: &TraceArgs, cfg: &Settings) -> Result<(), Failure> {
    let n = cfg.require(a.n, "n")?;
    let two_theta = cfg.require(a.two_theta, "two-theta")?;
    let alpha = cfg.or_default(a.alpha, "alpha", 1.0)?;
    let with_l = a.with_l || cfg.or_default(None, "with-l", false)?;
    let seed = cfg.seed(a.seed)?;
    let out: PathBuf = cfg.require(a.out.clone(), "out")?;
    let p = EdgeParams::from_two_theta(n, two_theta)?;
    let scatter_path = sibling(&out, ".scatter.csv");
    let script_path = sibling(&out, ".gp");
    echo_config(
        "trace",
        &[
            ("n", n.to_string()),
            ("two-theta", two_theta.to_string()),
            ("theta", format!("{:.16e}", p.theta())),
            ("sigma", format!("{:.16e}", p.sigma())),
            ("alpha", alpha.to_string()),
            ("with-l", with_l.to_string()),
            ("seed", seed.to_string()),
            ("out", out.display().to_string()),
            ("scatter", scatter_path.display().to_string()),
            ("script", script_path.display().to_string()),
        ],
    );
    let m = draw_matrix(n, alpha, 0.0, seed)?;
    let t = compute_trace(&m, &p, with_l)?;
    let mut w = create_file(&out)?;
    write_trace_csv(&t, &mut w)?;
    w.flush()?;
    let mut w = create_file(&scatter_path)?;
    write_scatter_csv(&t, &mut w)?;
    w.flush()?;
    let mut w = create_file(&script_path)?;
    write_viewer_script(&mut w, &out, &scatter_path)?;
    w.flush()?;
    Ok(())
}

/// Emits a plain-text gnuplot script with three stacked panels: the running
/// log-magnitude of the normalized minors, the successive-minor scatter,
/// and the Sturm-ratio series. The script references the emitted CSVs by
/// file name, so run gnuplot from their directory.
fn write_viewer_script<W: Write>(
    out: &mut W,
    trace_csv: &Path,
    scatter_csv: &Path,
) -> std::io::Result<()> {
    let name = |p: &Path| p.file_name().unwrap_or_default().to_string_lossy().into_owned();
    let trace = name(trace_csv);
    let scatter = name(scatter_csv);
    let png = name(&sibling(trace_csv, ".png"));
    writeln!(out, "# Viewer for the edge-process trace files.")?;
    writeln!(out, "# Usage: gnuplot {}", name(&sibling(trace_csv, ".gp")))?;
    writeln!(out, "set datafile separator ','")?;
    writeln!(out, "set terminal pngcairo size 1000,1400")?;
    writeln!(out, "set output '{png}'")?;
    writeln!(out, "set multiplot layout 3,1")?;
    writeln!(out, "set key off")?;
    writeln!(out, "set title 'log-magnitude of the normalized minors'")?;
    writeln!(out, "set xlabel 'i'")?;
    writeln!(out, "set ylabel 'log |E_i|'")?;
    writeln!(out, "plot '{trace}' every ::1 using 1:3 with lines lc rgb '#1f77b4'")?;
    writeln!(out, "set title 'successive normalized minors'")?;
    writeln!(out, "set xlabel 'E_(i-1)'")?;
    writeln!(out, "set ylabel 'E_i'")?;
    writeln!(out, "plot '{scatter}' every ::1 using 3:2 with points pt 7 ps 0.3 lc rgb '#d62728'")?;
    writeln!(out, "set title 'Sturm-ratio series'")?;
    writeln!(out, "set xlabel 'i'")?;
    writeln!(out, "set ylabel 'R_i'")?;
    writeln!(out, "plot '{trace}' every ::1 using 1:4 with lines lc rgb '#2ca02c'")?;
    writeln!(out, "unset multiplot")?;
    Ok(())
}

pub fn clt(a: &CltArgs, cfg: &Settings) -> Result<(), Failure> {
    let n_list = parse_n_list(&cfg.require(a.n_list.clone(), "n-list")?)?;
    let reps = cfg.require(a.reps, "reps")?;
    let sigma_rule: SigmaRule = cfg
        .require(a.sigma_rule.clone(), "sigma-rule")?
        .parse()
        .map_err(|e: edge_logdet_core::Error| Failure::Usage(e.to_string()))?;
    let alpha = cfg.or_default(a.alpha, "alpha", 1.0)?;
    let spike = cfg.or_default(a.spike, "spike", 0.0)?;
    let scaling = parse_scaling(&cfg.require(a.scaling.clone(), "scaling")?)?;
    let seed = cfg.seed(a.seed)?;
    let threads = cfg.or_default(a.threads, "threads", 1)?;
    let out: PathBuf = cfg.require(a.out.clone(), "out")?;
    let variant = CltVariant::for_spike(scaling, (spike > 0.0).then_some(spike))?;
    let batch = BatchConfig {
        master_seed: seed,
        reps,
        n_list,
        sigma_rule,
        alpha,
        spike,
        variant,
    };
    let thetas: Vec<String> = batch
        .n_list
        .iter()
        .map(|&n| {
            EdgeParams::from_sigma(n, batch.sigma_rule.sigma(n))
                .map(|p| format!("{}:{:.16e}", n, p.theta()))
        })
        .collect::<Result<_, _>>()?;
    echo_config(
        "clt",
        &[
            ("n-list", batch.n_list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")),
            ("reps", reps.to_string()),
            ("sigma-rule", sigma_rule.to_string()),
            ("theta", thetas.join(",")),
            ("alpha", alpha.to_string()),
            ("spike", spike.to_string()),
            ("scaling", format!("{:?}", scaling)),
            ("seed", seed.to_string()),
            ("threads", threads.to_string()),
            ("out", out.display().to_string()),
        ],
    );
    for warning in batch.validate()? {
        eprintln!("# warning: {warning}");
    }
    let records = run_campaign(&batch, threads)?;
    std::fs::create_dir_all(&out)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", out.display())))?;
    let samples_path = out.join("samples.csv");
    let mut w = create_file(&samples_path)?;
    write_samples_csv(&records, &mut w)?;
    w.flush()?;
    let rows = summarize_campaign(&records)?;
    let summary_path = out.join("summary.csv");
    let mut w = create_file(&summary_path)?;
    write_summary_csv(&rows, &mut w)?;
    w.flush()?;
    for (n, s) in &rows {
        println!(
            "n={} count={} mean={:.6} variance={:.6} skewness={:.6} excess_kurtosis={:.6} \
             ks_distance={:.6} ks_p_value={:.6}",
            n, s.count, s.mean, s.variance, s.skewness, s.excess_kurtosis, s.ks_distance,
            s.ks_p_value
        );
    }
    println!("samples {}", samples_path.display());
    println!("summary {}", summary_path.display());
    Ok(())
}

pub fn prop1(a: &Prop1Args, cfg: &Settings) -> Result<(), Failure> {
    let n_list = parse_n_list(&cfg.require(a.n_list.clone(), "n-list")?)?;
    let reps = cfg.require(a.reps, "reps")?;
    let sigma = cfg.require(a.sigma, "sigma")?;
    let alpha = cfg.or_default(a.alpha, "alpha", 1.0)?;
    let seed = cfg.seed(a.seed)?;
    let threads = cfg.or_default(a.threads, "threads", 1)?;
    let out = cfg.opt(a.out.clone(), "out")?;
    let gap_cfg = GapSumConfig { master_seed: seed, reps, n_list, sigma, alpha };
    let thetas: Vec<String> = gap_cfg
        .n_list
        .iter()
        .map(|&n| {
            EdgeParams::from_sigma(n, sigma).map(|p| format!("{}:{:.16e}", n, p.theta()))
        })
        .collect::<Result<_, _>>()?;
    echo_config(
        "prop1",
        &[
            ("n-list", gap_cfg.n_list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")),
            ("reps", reps.to_string()),
            ("sigma", sigma.to_string()),
            ("theta", thetas.join(",")),
            ("alpha", alpha.to_string()),
            ("seed", seed.to_string()),
            ("threads", threads.to_string()),
            (
                "out",
                out.as_ref().map_or("-".into(), |p: &PathBuf| p.display().to_string()),
            ),
        ],
    );
    let records = run_gap_sum_campaign(&gap_cfg, threads)?;
    if let Some(path) = out {
        let mut w = create_file(&path)?;
        write_gap_sums_csv(&records, &mut w)?;
        w.flush()?;
    }
    let report = gap_sum_scaling_fit(&records)?;
    for (n, m1, m2) in &report.medians {
        println!("n={} median_abs_s1={:.16e} median_s2={:.16e}", n, m1, m2);
    }
    println!("s1_exponent {:.16e}", report.s1_exponent);
    println!("s2_exponent {:.16e}", report.s2_exponent);
    Ok(())
}

pub fn decimate(a: &DecimateArgs, cfg: &Settings) -> Result<(), Failure> {
    let n = cfg.require(a.n, "n")?;
    let reps = cfg.require(a.reps, "reps")?;
    let seed = cfg.seed(a.seed)?;
    let shift = cfg.or_default(a.shift, "shift", 0.0)?;
    echo_config(
        "decimate",
        &[
            ("n", n.to_string()),
            ("reps", reps.to_string()),
            ("seed", seed.to_string()),
            ("shift", shift.to_string()),
        ],
    );
    let report = decimation_check_with_shift(n, reps, seed, shift)?;
    println!("n {}", report.n);
    println!("reps {}", report.reps);
    println!("ks_distance {:.16e}", report.ks.distance);
    println!("p_value {:.16e}", report.ks.p_value);
    Ok(())
}
