//! Command-line front end: matrix I/O, single computations, law-suite runs
//! and shift-lab scans.
//!
//! Exit codes: 0 on success, 1 for mathematical non-applicability (operator
//! outside the membership algebra, not A-invertible, failed laws), 2 for
//! usage, parse and I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};


use aspectral::io::{self, RunManifest};
use aspectral::laws::{self, FuzzConfig, LawReport, RankPolicy};
use aspectral::shiftlab::{self, ProbeMode, ShiftKind, ShiftModel, WeightScaleMode};
use aspectral::spectrum::{self, Certificate, InvertRoute, SpectrumMethod, SpectrumReport};
use aspectral::weight::PositiveWeight;
use aspectral::{CMatrix, Error, ToleranceConfig};

#[derive(Parser)]
#[command(
    name = "aspectral",
    version,
    about = "Weighted seminorms, adjoints, spectra and invertibility for operators over matrix *-algebras"
)]
struct Cli {
    #[command(flatten)]
    tolerances: TolArgs,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone, Copy)]
struct TolArgs {
    /// Relative singular-value cutoff for numeric rank decisions
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Equation-residual acceptance tolerance
    #[arg(long, global = true)]
    residual_tol: Option<f64>,
    /// Spectrum-set matching tolerance
    #[arg(long, global = true)]
    set_tol: Option<f64>,
    /// Negative-eigenvalue clamp bound for PSD inputs
    #[arg(long, global = true)]
    clamp_tol: Option<f64>,
}

impl TolArgs {
    fn build(&self) -> Result<ToleranceConfig, Error> {
        let mut tol = ToleranceConfig::default();
        if let Some(v) = self.rank_tol {
            tol.rank_rel_tol = v;
        }
        if let Some(v) = self.residual_tol {
            tol.residual_tol = v;
        }
        if let Some(v) = self.set_tol {
            tol.set_match_tol = v;
        }
        if let Some(v) = self.clamp_tol {
            tol.psd_clamp_tol = v;
        }
        tol.validate()?;
        Ok(tol)
    }

    fn overrides(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(v) = self.rank_tol {
            out.push(format!("--rank-tol={v}"));
        }
        if let Some(v) = self.residual_tol {
            out.push(format!("--residual-tol={v}"));
        }
        if let Some(v) = self.set_tol {
            out.push(format!("--set-tol={v}"));
        }
        if let Some(v) = self.clamp_tol {
            out.push(format!("--clamp-tol={v}"));
        }
        out
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Membership verdict and the weighted seminorms of the operator and
    /// its half adjoint
    Norm {
        weight: PathBuf,
        operator: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Canonical A-adjoint of the operator (the A^{1/2}-adjoint with --half)
    Adjoint {
        weight: PathBuf,
        operator: PathBuf,
        /// Return the A^{1/2}-adjoint partner instead
        #[arg(long)]
        half: bool,
        /// Write the result as a matrix file instead of printing JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted spectrum, radius and residual diagnostics
    Spectrum {
        weight: PathBuf,
        operator: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Compression)]
        method: MethodArg,
        /// Squarings for the Gelfand-limit radius
        #[arg(long, default_value_t = 12)]
        doublings: u32,
        #[arg(long)]
        json: bool,
    },
    /// A-invertibility verdict with certificate and margin
    Invert {
        weight: PathBuf,
        operator: PathBuf,
        #[arg(long, value_enum, default_value_t = RouteArg::Compression)]
        route: RouteArg,
        /// Write the A-inverse as a matrix file when invertible
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Seeded fuzzing of the spectral laws
    Laws {
        #[arg(long, default_value_t = laws::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Dimension range as lo:hi
        #[arg(long, default_value = "2:8")]
        dims: String,
        #[arg(long, value_enum, default_value_t = PolicyArg::Mixed)]
        rank_policy: PolicyArg,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Comma-separated law ids (default: the full suite)
        #[arg(long, value_delimiter = ',')]
        laws: Option<Vec<String>>,
        #[arg(long)]
        json: bool,
        /// Directory for counterexample bundles and the run manifest
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Truncated shift models: exact norms, resolvent scans, ratio probes
    Shiftlab {
        /// Model name: unilateral_halved or bilateral_factorial
        #[arg(long)]
        model: String,
        /// Truncation sizes for scans (strictly increasing)
        #[arg(long, value_delimiter = ',', default_value = "20,40,60")]
        n_list: Vec<usize>,
        /// Grid spacing over [-1.5, 1.5]^2; enables the disc scan
        #[arg(long)]
        grid: Option<f64>,
        /// Adjoint-shift ratio probe indices (bilateral model)
        #[arg(long, value_delimiter = ',')]
        probe: Option<Vec<i64>>,
        /// Output directory for CSV and manifest
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Compression,
    PureState,
    Gelfand,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Compression,
    Douglas,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Full,
    Deficient,
    Mixed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_mathematical() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let tol = cli.tolerances.build()?;
    match &cli.command {
        Cmd::Norm {
            weight,
            operator,
            json,
        } => cmd_norm(tol, weight, operator, *json),
        Cmd::Adjoint {
            weight,
            operator,
            half,
            out,
        } => cmd_adjoint(tol, weight, operator, *half, out.as_deref()),
        Cmd::Spectrum {
            weight,
            operator,
            method,
            doublings,
            json,
        } => cmd_spectrum(tol, weight, operator, *method, *doublings, *json),
        Cmd::Invert {
            weight,
            operator,
            route,
            out,
            json,
        } => cmd_invert(tol, weight, operator, *route, out.as_deref(), *json),
        Cmd::Laws {
            seed,
            trials,
            dims,
            rank_policy,
            scale,
            laws: law_ids,
            json,
            out_dir,
        } => cmd_laws(
            &cli.tolerances,
            *seed,
            *trials,
            dims,
            *rank_policy,
            *scale,
            law_ids.as_deref(),
            *json,
            out_dir.as_deref(),
        ),
        Cmd::Shiftlab {
            model,
            n_list,
            grid,
            probe,
            out,
        } => cmd_shiftlab(
            &cli.tolerances,
            tol,
            model,
            n_list,
            *grid,
            probe.as_deref(),
            out.as_deref(),
        ),
    }
}

fn load_pair(
    tol: ToleranceConfig,
    weight_path: &Path,
    operator_path: &Path,
) -> Result<(PositiveWeight, CMatrix), Error> {
    let a = io::read_matrix_file(weight_path)?;
    let t = io::read_matrix_file(operator_path)?;
    if a.nrows() != a.ncols() || t.nrows() != t.ncols() || a.nrows() != t.nrows() {
        return Err(Error::DimensionMismatch {
            expected: "square matrices of equal dimension".to_string(),
            got: format!(
                "weight {}x{}, operator {}x{}",
                a.nrows(),
                a.ncols(),
                t.nrows(),
                t.ncols()
            ),
        });
    }
    let w = PositiveWeight::new(a, tol)?;
    Ok((w, t))
}

fn cmd_norm(
    tol: ToleranceConfig,
    weight_path: &Path,
    operator_path: &Path,
    json: bool,
) -> Result<ExitCode, Error> {
    let (w, t) = load_pair(tol, weight_path, operator_path)?;
    let member = w.is_member(&t)?;
    let (norm_t, norm_l) = if member {
        let l = w.half_adjoint(&t)?;
        (Some(w.seminorm(&t)?), Some(w.seminorm(&l)?))
    } else {
        (None, None)
    };
    if json {
        let report = serde_json::json!({
            "membership": member,
            "seminorm": norm_t,
            "half_adjoint_seminorm": norm_l,
            "compressed_dims": [w.rank(), w.rank()],
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    } else if member {
        println!("membership: in M^A");
        println!("norm_T: {}", norm_t.expect("member"));
        println!("norm_L: {}", norm_l.expect("member"));
        println!("compressed: {0}x{0}", w.rank());
    } else {
        println!("membership: not in M^A");
        println!("norm_T: inf");
        println!("norm_L: inf");
        println!("compressed: {0}x{0}", w.rank());
    }
    Ok(if member {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_adjoint(
    tol: ToleranceConfig,
    weight_path: &Path,
    operator_path: &Path,
    half: bool,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let (w, t) = load_pair(tol, weight_path, operator_path)?;
    let result = if half {
        w.half_adjoint(&t)?
    } else {
        w.a_adjoint(&t)?
    };
    match out {
        Some(path) => io::write_matrix_file(path, &result)?,
        None => println!("{}", io::matrix_json_string(&result)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(
    tol: ToleranceConfig,
    weight_path: &Path,
    operator_path: &Path,
    method: MethodArg,
    doublings: u32,
    json: bool,
) -> Result<ExitCode, Error> {
    let (w, t) = load_pair(tol, weight_path, operator_path)?;
    let report: SpectrumReport = match method {
        MethodArg::Compression => spectrum::a_spectrum(&w, &t)?,
        MethodArg::PureState => spectrum::pure_state_spectrum(&w, &t)?,
        MethodArg::Gelfand => {
            let g = spectrum::a_radius_gelfand(&w, &t, doublings)?;
            SpectrumReport {
                points: Vec::new(),
                radius: g.value,
                method: SpectrumMethod::GelfandRadiusOnly,
                diagnostics: spectrum::SpectrumDiagnostics {
                    max_residual: 0.0,
                    membership_defect: w.member_defect(&t)?,
                    uncertified_points: 0,
                    state_normalization_defect: 0.0,
                },
                weight_rank: w.rank(),
            }
        }
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    } else {
        let method_name = match report.method {
            SpectrumMethod::Compression => "compression",
            SpectrumMethod::PureState => "pure_state",
            SpectrumMethod::GelfandRadiusOnly => "gelfand_radius_only",
        };
        println!("method: {method_name}");
        println!("weight_rank: {}", report.weight_rank);
        for p in &report.points {
            println!("point: {} {:+}i", p.re, p.im);
        }
        println!("radius: {}", report.radius);
        println!(
            "residuals: eig {:.3e}, membership {:.3e}, uncertified {}",
            report.diagnostics.max_residual,
            report.diagnostics.membership_defect,
            report.diagnostics.uncertified_points
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_invert(
    tol: ToleranceConfig,
    weight_path: &Path,
    operator_path: &Path,
    route: RouteArg,
    out: Option<&Path>,
    json: bool,
) -> Result<ExitCode, Error> {
    let (w, t) = load_pair(tol, weight_path, operator_path)?;
    let route = match route {
        RouteArg::Compression => InvertRoute::Compression,
        RouteArg::Douglas => InvertRoute::Douglas,
    };
    let verdict = spectrum::a_invertible(&w, &t, route)?;
    let (tag, inverse) = match &verdict.certificate {
        Certificate::Inverse(s) => (None, Some(s.clone())),
        Certificate::Failed(cond) => (
            Some(match cond {
                spectrum::FailedCondition::CondILower => "cond_i_lower",
                spectrum::FailedCondition::CondIUpper => "cond_i_upper",
                spectrum::FailedCondition::CondII => "cond_ii",
            }),
            None,
        ),
    };
    if json {
        let report = serde_json::json!({
            "invertible": verdict.invertible,
            "route": match route {
                InvertRoute::Compression => "compression",
                InvertRoute::Douglas => "douglas",
            },
            "margin": verdict.margin,
            "failing_condition": tag,
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    } else {
        println!("invertible: {}", verdict.invertible);
        println!("margin: {:.6e}", verdict.margin);
        if let Some(tag) = tag {
            println!("failing_condition: {tag}");
        }
    }
    if let (Some(path), Some(inv)) = (out, inverse.as_ref()) {
        io::write_matrix_file(path, inv)?;
    }
    Ok(if verdict.invertible {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_laws(
    tol_args: &TolArgs,
    seed: u64,
    trials: usize,
    dims: &str,
    rank_policy: PolicyArg,
    scale: f64,
    law_ids: Option<&[String]>,
    json: bool,
    out_dir: Option<&Path>,
) -> Result<ExitCode, Error> {
    let dim_range = parse_dims(dims)?;
    let cfg = FuzzConfig {
        seed,
        trials,
        dim_range,
        rank_policy: match rank_policy {
            PolicyArg::Full => RankPolicy::Full,
            PolicyArg::Deficient => RankPolicy::Deficient,
            PolicyArg::Mixed => RankPolicy::Mixed,
        },
        scale,
    };
    let ids: Vec<&str> = match law_ids {
        Some(list) => list.iter().map(|s| s.as_str()).collect(),
        None => laws::LAW_IDS.to_vec(),
    };
    let reports = laws::run_suite(&cfg, &ids)?;

    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&reports).expect("reports serialize")
        );
    } else {
        println!(
            "{:<22} {:>6} {:>6} {:>12} {:>6} {:>12}",
            "law", "trials", "passed", "inconclusive", "failed", "worst_dev"
        );
        for r in &reports {
            println!(
                "{:<22} {:>6} {:>6} {:>12} {:>6} {:>12.3e}",
                r.law_id,
                r.trials,
                r.passed,
                r.inconclusive,
                r.failed(),
                r.worst_deviation
            );
        }
    }

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let reports_json =
            serde_json::to_string_pretty(&reports).expect("reports serialize");
        std::fs::write(dir.join("law_reports.json"), reports_json + "\n")?;
        write_counterexamples(dir, &reports)?;
        let mut arguments = vec![
            format!("--seed={seed}"),
            format!("--trials={trials}"),
            format!("--dims={dims}"),
            format!("--scale={scale}"),
        ];
        arguments.extend(tol_args.overrides());
        RunManifest::new("laws", arguments, tol_args.build()?, Some(seed))
            .write(&dir.join("manifest.json"))?;
    } else {
        write_counterexamples(Path::new("."), &reports)?;
    }

    let any_failed = reports.iter().any(|r| r.failed() > 0);
    Ok(if any_failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn write_counterexamples(dir: &Path, reports: &[LawReport]) -> Result<(), Error> {
    for r in reports {
        if let Some(ce) = &r.counterexample {
            let path = dir.join(format!("counterexample_{}.json", r.law_id));
            let json = serde_json::to_string_pretty(ce).expect("counterexample serializes");
            std::fs::write(&path, json + "\n")?;
            eprintln!(
                "law {} failed at trial {} (seed {}); bundle written to {}",
                r.law_id,
                ce.trial,
                ce.trial_seed,
                path.display()
            );
        }
    }
    Ok(())
}

fn parse_dims(spec: &str) -> Result<(usize, usize), Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidConfig(format!(
            "dims must be lo:hi, got `{spec}`"
        )));
    }
    let lo = parts[0]
        .parse::<usize>()
        .map_err(|e| Error::InvalidConfig(format!("bad dims `{spec}`: {e}")))?;
    let hi = parts[1]
        .parse::<usize>()
        .map_err(|e| Error::InvalidConfig(format!("bad dims `{spec}`: {e}")))?;
    Ok((lo, hi))
}

fn cmd_shiftlab(
    tol_args: &TolArgs,
    tol: ToleranceConfig,
    model_name: &str,
    n_list: &[usize],
    grid: Option<f64>,
    probe: Option<&[i64]>,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let kind = ShiftKind::parse(model_name)?;

    match kind {
        ShiftKind::UnilateralHalved => {
            let n = n_list.first().copied().unwrap_or(8);
            let model = ShiftModel::new(kind, n, WeightScaleMode::Linear)?;
            let parts = model.build(tol)?;
            let norm_t = parts.weight.seminorm(&parts.shift)?;
            let l = parts.left_partner.as_ref().expect("unilateral pair");
            let norm_l = parts.weight.seminorm(l)?;
            println!("model: {} (N = {n})", kind.name());
            println!("A-seminorms (T, L): {}, {}", norm_t, norm_l);
        }
        ShiftKind::BilateralFactorial => {
            println!("model: {}", kind.name());
        }
    }

    if let Some(indices) = probe {
        let probe_n = n_list.iter().copied().max().unwrap_or(80).max(8);
        let model = ShiftModel::new(kind, probe_n, WeightScaleMode::LogDomain)?;
        let values = model.ratio_probe(ProbeMode::AdjointShift, indices)?;
        for (idx, v) in indices.iter().zip(values.iter()) {
            println!("ratio[{idx}] = {v}");
        }
    }

    let run_scan =
        grid.is_some() || (kind == ShiftKind::BilateralFactorial && probe.is_none());
    if run_scan {
        let density = grid.unwrap_or(0.25);
        let (rows, scores) = shiftlab::disc_report(kind, density, n_list, tol)?;
        let divergent = scores.iter().filter(|s| s.divergent).count();
        println!(
            "grid: {} points, {} divergent, {} bounded",
            scores.len(),
            divergent,
            scores.len() - divergent
        );

        let dir = out.unwrap_or(Path::new("."));
        std::fs::create_dir_all(dir)?;
        io::write_scan_csv(&dir.join("scan.csv"), &rows)?;
        let mut scores_csv = String::from("lambda_re,lambda_im,score,divergent\n");
        for s in &scores {
            scores_csv.push_str(&format!(
                "{},{},{},{}\n",
                s.lambda.re, s.lambda.im, s.score, s.divergent
            ));
        }
        std::fs::write(dir.join("scores.csv"), scores_csv)?;

        let mut arguments = vec![
            format!("--model={}", kind.name()),
            format!(
                "--n-list={}",
                n_list
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            format!("--grid={density}"),
        ];
        arguments.extend(tol_args.overrides());
        RunManifest::new("shiftlab", arguments, tol, None).write(&dir.join("manifest.json"))?;
        println!("wrote {} and {}", dir.join("scan.csv").display(), dir.join("scores.csv").display());
    }

    Ok(ExitCode::SUCCESS)
}
