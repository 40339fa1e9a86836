use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use expdamp::diagnostics::{decay_probe, half_life, stability_experiment, verify_energy};
use expdamp::integrator::{init_random_divfree, rhs_nonlinear, run, RunOutput, SimParams};
use expdamp::io::{
    parse_config_with, read_ledger_csv, write_csv, write_json, write_ledger_csv, write_snapshot,
    DeltaKind, RunConfig,
};
use expdamp::nonlinearity::{
    lemma_sweep, standard_cases, transport_term, ClipPolicy, DampingParams, GapCase,
};
use expdamp::oracle::{aliasing_study, dense_transport, explicit_reference_run, oversampled_damping, DenseModeSet};
use expdamp::spectral::{l2_norm, make_grid, SpectralVectorField};
use expdamp::Error;
use serde_json::json;

/// Exit status for a failed invariant or runtime failure.
const EXIT_FAIL: u8 = 1;
/// Exit status for bad invocations and invalid configuration.
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "expdamp", version, about = "Navier-Stokes with exponential damping: experiments and checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ConfigArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override one config entry, e.g. `sim.dt=5e-4`. Repeatable.
    #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory; defaults to `output.directory` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the configured initial data and write the energy ledger.
    Simulate(ConfigArgs),
    /// Check a ledger CSV against the discrete energy inequality.
    VerifyEnergy {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired runs against the Gronwall bound.
    Stability(ConfigArgs),
    /// Norm bookkeeping of the frequency-split decay argument along a run.
    Decay(ConfigArgs),
    /// Half-life of the L2 norm across damping exponents and truncation radii.
    Sweep(ConfigArgs),
    /// Random sweep of the monotonicity gaps of the absorption terms.
    LemmaCheck {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Adds the configured (b, r) to the standard cases.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the FFT kernels against the direct-sum oracles.
    OracleCompare(ConfigArgs),
}

type CmdResult = Result<bool, Error>;

struct Loaded {
    config: RunConfig,
    echo: String,
    out: PathBuf,
}

fn load(args: &ConfigArgs) -> Result<Loaded, Error> {
    let text = fs::read_to_string(&args.config)?;
    let config = parse_config_with(&text, &args.overrides)?;
    let echo = config.echo();
    let out = args.out.clone().unwrap_or_else(|| config.output_dir.clone());
    fs::create_dir_all(&out)?;
    Ok(Loaded { config, echo, out })
}

fn report(summary: &serde_json::Value) {
    // a closed pipe downstream is not an error of the run
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(summary).expect("json value"));
}

fn run_or_flush(u0: &SpectralVectorField, p: &SimParams, ledger_path: &Path, echo: &str) -> Result<RunOutput, Error> {
    match run(u0, p) {
        Ok(out) => {
            write_ledger_csv(ledger_path, &out.ledger, echo)?;
            Ok(out)
        }
        Err(Error::RunAborted {
            source,
            partial_ledger,
            last_state,
        }) => {
            write_ledger_csv(ledger_path, &partial_ledger, echo)?;
            Err(Error::RunAborted {
                source,
                partial_ledger,
                last_state,
            })
        }
        Err(e) => Err(e),
    }
}

fn simulate(args: &ConfigArgs) -> CmdResult {
    let Loaded { config, echo, out } = load(args)?;
    let grid = config.make_grid()?;
    let u0 = config.initial_field(&grid)?;
    let result = run_or_flush(&u0, &config.sim, &out.join("ledger.csv"), &echo)?;
    for (i, snap) in result.snapshots.iter().enumerate() {
        write_snapshot(out.join(format!("snapshot_{i:04}.nsd")), &snap.field, snap.time, "velocity", Some(&echo))?;
    }
    let fin = &result.final_state;
    write_snapshot(out.join("final.nsd"), fin.field(), fin.time, "velocity", Some(&echo))?;
    let verdict = verify_energy(&result.ledger, config.energy_tol)?;
    let summary = json!({
        "subcommand": "simulate",
        "passed": verdict.passed,
        "final_time": fin.time,
        "saturation_count": fin.saturation_count,
        "extra_substeps": result.extra_substeps,
        "rows": result.ledger.rows.len(),
        "energy": verdict,
    });
    write_json(out.join("summary.json"), &summary, &echo)?;
    report(&summary);
    Ok(verdict.passed)
}

fn verify(ledger: &Path, tol: f64, out: Option<&Path>) -> CmdResult {
    let l = read_ledger_csv(ledger)?;
    let verdict = verify_energy(&l, tol)?;
    let summary = json!({
        "subcommand": "verify-energy",
        "ledger": ledger.display().to_string(),
        "passed": verdict.passed,
        "energy": verdict,
    });
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let echo = format!("[verify]\nledger = {}\ntol = {tol:?}\n", ledger.display());
        write_json(dir.join("verify_energy.json"), &summary, &echo)?;
    }
    report(&summary);
    Ok(verdict.passed)
}

fn stability(args: &ConfigArgs) -> CmdResult {
    let Loaded { config, echo, out } = load(args)?;
    let grid = config.make_grid()?;
    let u0 = config.initial_field(&grid)?;
    let s = &config.stability;
    let delta = match s.delta_kind {
        DeltaKind::Scaled => u0.clone().scaled(s.delta_rel),
        DeltaKind::Random => init_random_divfree(&grid, s.delta_seed, grid.trunc_radius(), s.delta_rel * l2_norm(&u0))?,
    };
    let rep = stability_experiment(&u0, &delta, &config.sim)?;
    #[derive(serde::Serialize)]
    struct Row {
        t: f64,
        w_norm_sq: f64,
        bound: f64,
        margin: f64,
    }
    let rows: Vec<Row> = (0..rep.times.len())
        .map(|i| Row {
            t: rep.times[i],
            w_norm_sq: rep.w_norm_sq[i],
            bound: rep.bound[i],
            margin: rep.margin[i],
        })
        .collect();
    write_csv(out.join("stability.csv"), &rows, &echo)?;
    let summary = json!({
        "subcommand": "stability",
        "passed": rep.passed,
        "min_margin": rep.min_margin(),
        "w0_norm_sq": rep.w_norm_sq.first(),
        "max_w_norm": rep.max_w_norm(),
    });
    write_json(out.join("summary.json"), &summary, &echo)?;
    report(&summary);
    Ok(rep.passed)
}

fn decay(args: &ConfigArgs) -> CmdResult {
    let Loaded { config, echo, out } = load(args)?;
    let grid = config.make_grid()?;
    let u0 = config.initial_field(&grid)?;
    let p = config.sim.clone().with_snapshots(1);
    let result = run_or_flush(&u0, &p, &out.join("ledger.csv"), &echo)?;
    let rep = decay_probe(&result.snapshots, config.kappa, &p.damping)?;
    write_csv(out.join("decay.csv"), &rep.rows, &echo)?;
    let verdict = verify_energy(&result.ledger, config.energy_tol)?;
    let l2_decreasing = rep.strictly_decreasing(|r| r.l2);
    let h_neg2_decreasing = rep.strictly_decreasing(|r| r.h_neg2);
    let passed = verdict.passed && h_neg2_decreasing;
    let summary = json!({
        "subcommand": "decay",
        "passed": passed,
        "kappa": config.kappa,
        "snapshots": rep.rows.len(),
        "l2_strictly_decreasing": l2_decreasing,
        "h_neg2_strictly_decreasing": h_neg2_decreasing,
        "energy": verdict,
    });
    write_json(out.join("summary.json"), &summary, &echo)?;
    report(&summary);
    Ok(passed)
}

fn sweep(args: &ConfigArgs) -> CmdResult {
    let Loaded { config, echo, out } = load(args)?;
    let base = config.make_grid()?;
    let u0_base = config.initial_field(&base)?;
    let radii = if config.sweep.trunc_radii.is_empty() {
        vec![config.grid.trunc_radius]
    } else {
        config.sweep.trunc_radii.clone()
    };
    let mut jobs = Vec::new();
    for &radius in &radii {
        for &r in &config.sweep.r_values {
            jobs.push((radius, r));
        }
    }
    #[derive(serde::Serialize)]
    struct Row {
        r: f64,
        trunc_radius: f64,
        half_life: Option<f64>,
        final_energy_ratio: f64,
        max_abs_residual: f64,
        energy_ok: bool,
    }
    let results: Vec<Result<Row, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(radius, r)| {
                let (config, u0_base) = (&config, &u0_base);
                s.spawn(move || -> Result<Row, Error> {
                    let grid = make_grid(config.grid.n_points, config.grid.box_scale, radius)?;
                    let mut u0 = SpectralVectorField::from_components(&grid, u0_base.components().clone())?;
                    u0.truncate_in_place(radius);
                    let mut p = config.sim.clone();
                    p.damping = DampingParams::new(p.damping.a, p.damping.b, r)?;
                    p.clip = ClipPolicy::default_for(&p.damping);
                    let res = run(&u0, &p)?;
                    let times: Vec<f64> = res.ledger.rows.iter().map(|x| x.t).collect();
                    let norms: Vec<f64> = res.ledger.rows.iter().map(|x| x.energy.sqrt()).collect();
                    let verdict = verify_energy(&res.ledger, config.energy_tol)?;
                    let e0 = res.ledger.rows[0].energy;
                    let last = res.ledger.rows.last().expect("nonempty ledger");
                    Ok(Row {
                        r,
                        trunc_radius: radius,
                        half_life: half_life(&times, &norms),
                        final_energy_ratio: if e0 > 0.0 { last.energy / e0 } else { 0.0 },
                        max_abs_residual: res.ledger.max_abs_residual(),
                        energy_ok: verdict.passed,
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    write_csv(out.join("sweep.csv"), &rows, &echo)?;
    let passed = rows.iter().all(|r| r.energy_ok);
    let summary = json!({
        "subcommand": "sweep",
        "passed": passed,
        "runs": rows.len(),
        "table": rows,
    });
    write_json(out.join("summary.json"), &summary, &echo)?;
    report(&summary);
    Ok(passed)
}

fn lemma_check(
    samples: usize,
    seed: u64,
    tol: f64,
    config: Option<&Path>,
    overrides: &[String],
    out: Option<&Path>,
) -> CmdResult {
    let mut cases = standard_cases();
    let mut echo = format!("[lemma]\nsamples = {samples}\nseed = {seed}\ntol = {tol:?}\n");
    if let Some(path) = config {
        let cfg = parse_config_with(&fs::read_to_string(path)?, overrides)?;
        let d = cfg.sim.damping;
        let case = GapCase::Exponential { b: d.b, r: d.r };
        if !cases.contains(&case) {
            cases.push(case);
        }
        echo.push_str(&cfg.echo());
    }
    let rep = lemma_sweep(samples, seed, &cases, tol);
    let min_gap = rep
        .cases
        .iter()
        .map(|c| c.min_normalized_gap)
        .fold(f64::INFINITY, f64::min);
    let summary = json!({
        "subcommand": "lemma-check",
        "passed": rep.passed,
        "min_normalized_gap": min_gap,
        "report": rep,
    });
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_json(dir.join("lemma_check.json"), &summary, &echo)?;
    }
    report(&summary);
    Ok(rep.passed)
}

fn oracle_compare(args: &ConfigArgs) -> CmdResult {
    let Loaded { config, echo, out } = load(args)?;
    let grid = config.make_grid()?;
    let u0 = config.initial_field(&grid)?;
    let m = DenseModeSet::from_field(&u0)?;
    let radius = grid.trunc_radius();

    let t_ref = dense_transport(&m, radius)?;
    // the projected transport can vanish on the ball (Taylor-Green at small n),
    // so the comparison is floored by the natural scale R·|u|²
    let t_norm = t_ref.coefficient_norm_sq().sqrt();
    let t_scale = t_norm.max(radius * m.coefficient_norm_sq());
    let t_rel = DenseModeSet::from_field(&transport_term(&u0)?)?.relative_diff(&t_ref);
    let transport_diff = if t_norm > 0.0 { t_rel * t_norm / t_scale } else { t_rel / t_scale.max(f64::MIN_POSITIVE) };

    let rhs = rhs_nonlinear(&u0, &config.sim)?;
    let d_ref = oversampled_damping(&m, &config.sim.damping, 4)?;
    let oracle = t_ref.to_field(&grid)?.add(&d_ref.to_field(&grid)?)?.scaled(-1.0);
    let denom = l2_norm(&oracle);
    let rhs_diff = if denom > 0.0 { l2_norm(&rhs.sub(&oracle)?) / denom } else { l2_norm(&rhs) };
    let aliasing = aliasing_study(&m, &config.sim.damping)?;
    let aliasing_monotone = aliasing[1] <= aliasing[0] && aliasing[2] <= aliasing[1];

    let endpoint_diff = if config.sim.t_end <= 1.0 {
        let res = run(&u0, &config.sim)?;
        let reference = explicit_reference_run(&m, &config.sim, config.sim.dt / 16.0)?;
        Some(DenseModeSet::from_field(res.final_state.field())?.relative_diff(&reference))
    } else {
        None
    };
    let passed = transport_diff <= 1e-12 && endpoint_diff.is_none_or(|d| d <= 1e-6) && aliasing_monotone;
    let summary = json!({
        "subcommand": "oracle-compare",
        "passed": passed,
        "modes": m.len(),
        "transport_relative_diff": t_rel,
        "transport_scaled_diff": transport_diff,
        "rhs_relative_diff_vs_oversample_4": rhs_diff,
        "aliasing_refinement": aliasing,
        "aliasing_monotone": aliasing_monotone,
        "endpoint_relative_diff": endpoint_diff,
    });
    write_json(out.join("oracle_compare.json"), &summary, &echo)?;
    report(&summary);
    Ok(passed)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidParameter { .. } | Error::InvalidGrid(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Simulate(a) => simulate(a),
        Cmd::VerifyEnergy { ledger, tol, out } => verify(ledger, *tol, out.as_deref()),
        Cmd::Stability(a) => stability(a),
        Cmd::Decay(a) => decay(a),
        Cmd::Sweep(a) => sweep(a),
        Cmd::LemmaCheck {
            samples,
            seed,
            tol,
            config,
            overrides,
            out,
        } => lemma_check(*samples, *seed, *tol, config.as_deref(), overrides, out.as_deref()),
        Cmd::OracleCompare(a) => oracle_compare(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            let body = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
