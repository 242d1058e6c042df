//! Batch command-line front end.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num::rational::BigRational;
use serde_json::json;

use facecut::config::{OutputFormat, RunConfig};
use facecut::suites::{verify_suite, Suite};
use facecut::sweep::{emit_plot_data, sweep_enorm};
use facecut_core::classical::{
    hadamard_transform, poly_face_membership, poly_ri_membership, poly_segment_witness,
    ratio_limit_report, simplex_face_membership, simplex_ri_membership, simplex_segment_witness,
    triangle_counterexample, FiniteDensity, Polynomial, SymbolicDensity,
};
use facecut_core::constraint::{ConstraintKind, HermitianObservable};
use facecut_core::decompose::{bipartite_decompose, pure_decompose, Decomposition};
use facecut_core::face::{
    default_lambda_grid, face_membership, face_report_subnormalized_with_cutoff,
    face_report_with_cutoff, segment_oracle,
};
use facecut_core::io::{load_matrix, load_problem, Problem, ProblemState};
use facecut_core::optimize::{constrained_linear_max, enorm_dual, enorm_pure, min_output_entropy};
use facecut_core::state::DensityOperator;
use facecut_core::{Error, PureState};

#[derive(Parser)]
#[command(
    name = "facecut",
    version,
    about = "Faces, extreme points, and pure-state decompositions of constrained density matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Problem file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override of the default support/rank tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Sublevel,
    Level,
}

impl From<KindArg> for ConstraintKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Sublevel => ConstraintKind::Sublevel,
            KindArg::Level => ConstraintKind::Level,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Face dimensions, activity pattern, and extremality of the input state.
    FaceReport,
    /// Whether the state in --other generates into the input state's face.
    FaceMember {
        /// Bare matrix file with the candidate state sigma.
        #[arg(long)]
        other: PathBuf,
    },
    /// Extremality verdict only.
    ExtremeCheck,
    /// Pure-state decomposition preserving every constraint value.
    Decompose,
    /// Bipartite decomposition with marginal expectation certificates.
    DecomposeBipartite {
        /// Tensor factorization, e.g. 2,2.
        #[arg(long)]
        dims: String,
    },
    /// Operator E-norm of options.operator under the first constraint.
    Enorm {
        /// Bound E; defaults to the first constraint's bound.
        #[arg(long)]
        e: Option<f64>,
        #[arg(long, default_value_t = 32)]
        restarts: u32,
    },
    /// Constrained minimal output entropy of the channel in options.kraus.
    MinEntropy {
        #[arg(long)]
        e: Option<f64>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, default_value_t = 32)]
        restarts: u32,
    },
    /// Constrained linear maximization of options.operator.
    Linmax {
        #[arg(long)]
        e: Option<f64>,
    },
    /// Exact classical examples.
    Classical {
        #[command(subcommand)]
        sub: ClassicalCmd,
    },
    /// Randomized theorem-verification suites.
    Verify {
        /// purity | dim-drop | decompose | enorm | jensen | counterexamples
        suite: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Comma-separated dimensions, e.g. 2,3,4.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, default_value_t = 32)]
        restarts: u32,
        /// Replay a single instance stream.
        #[arg(long)]
        instance: Option<u64>,
    },
    /// Value sweep emitting plot-ready tables.
    Sweep {
        #[arg(long, default_value = "enorm")]
        op: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        /// Number of evenly spaced parameter values (both ends included).
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
}

#[derive(Subcommand)]
enum ClassicalCmd {
    /// Face membership of finite densities (--input: {"q": {...}, "p": {...}}).
    SimplexMember,
    /// Hadamard chain signatures for the geometric family.
    HadamardChain {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long = "N", default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
    },
    /// Zeta-density face ordering signature.
    ZetaOrder {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        #[arg(long = "N", default_value_t = 10_000)]
        n: u64,
    },
    /// Face membership of polynomials (--input: {"q": [...], "p": [...]}).
    PolyMember,
    /// The classical-triangle counterexample certificate.
    TriangleDemo,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ParseError { .. }
        | Error::SchemaError { .. }
        | Error::Io { .. }
        | Error::Validation { .. }
        | Error::DimensionMismatch { .. }
        | Error::BadRank { .. }
        | Error::BadFactorization { .. }
        | Error::InputNotInCone { .. }
        | Error::NotInSet { .. }
        | Error::Infeasible { .. }
        | Error::TailUnavailable { .. } => 2,
        Error::NoConvergence { .. }
        | Error::NumericalDependencyFailure { .. }
        | Error::ZeroMatrix { .. }
        | Error::DirectionZero
        | Error::DirectionUnsupported { .. }
        | Error::ExtremeMixedState { .. } => 3,
    }
}

fn require_input(input: &Option<PathBuf>) -> Result<Problem, Error> {
    let path = input.as_ref().ok_or_else(|| Error::SchemaError {
        field: "--input".into(),
        message: "this subcommand requires a problem file".into(),
    })?;
    load_problem(path)
}

fn read_json_input(input: &Option<PathBuf>) -> Result<serde_json::Value, Error> {
    let path = input.as_ref().ok_or_else(|| Error::SchemaError {
        field: "--input".into(),
        message: "this subcommand requires an input file".into(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::ParseError {
        path: path.display().to_string(),
        source,
    })
}

fn emit(output: &Option<PathBuf>, text: String) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn emit_json<T: serde::Serialize>(output: &Option<PathBuf>, value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::ParseError {
        path: "<report>".into(),
        source,
    })?;
    emit(output, text + "\n")
}

fn vector_json(phi: &PureState) -> Vec<[f64; 2]> {
    phi.vector().iter().map(|c| [c.re, c.im]).collect()
}

fn decomposition_json(dec: &Decomposition, problem: &Problem) -> serde_json::Value {
    let components: Vec<serde_json::Value> = dec
        .components
        .iter()
        .map(|comp| {
            let mut values = BTreeMap::new();
            for (k, c) in problem.constraints.iter().enumerate() {
                let key = c
                    .observable
                    .name()
                    .map(str::to_owned)
                    .unwrap_or_else(|| format!("H{}", k + 1));
                values.insert(key, comp.values[k]);
            }
            json!({
                "weight": comp.weight,
                "vector": vector_json(&comp.state),
                "values": values,
            })
        })
        .collect();
    json!({
        "components": components,
        "residual": dec.residual,
        "reduced_from": dec.reduced_from,
        "dropped_mass": dec.dropped_mass,
    })
}

/// Observable for norm/entropy subcommands: the first constraint.
fn first_observable(problem: &Problem) -> Result<(HermitianObservable, f64, ConstraintKind), Error> {
    let c = problem.constraints.get(0).ok_or_else(|| Error::SchemaError {
        field: "constraints".into(),
        message: "at least one constraint (the observable H) is required".into(),
    })?;
    Ok((c.observable.clone(), c.bound, c.kind))
}

fn operator_from_options(problem: &Problem) -> Result<facecut_core::CMat, Error> {
    problem
        .options
        .operator
        .as_ref()
        .map(|m| m.as_mat().clone())
        .ok_or_else(|| Error::SchemaError {
            field: "options.operator".into(),
            message: "this subcommand requires options.operator".into(),
        })
}

fn warn_if_not_positive(h: &HermitianObservable) {
    let floor = h.lambda_min();
    if floor < -1e-12 {
        eprintln!(
            "warning: observable has negative spectral floor {:.6e}; functional is still affine",
            floor
        );
    }
}

fn parse_dims_pair(dims: &str) -> Result<(usize, usize), Error> {
    let parts: Vec<&str> = dims.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::SchemaError {
            field: "--dims".into(),
            message: "expected two comma-separated dimensions, e.g. 2,2".into(),
        });
    }
    let parse = |s: &str| {
        s.trim().parse::<usize>().map_err(|_| Error::SchemaError {
            field: "--dims".into(),
            message: format!("invalid dimension {s:?}"),
        })
    };
    Ok((parse(parts[0])?, parse(parts[1])?))
}

fn density_map(value: &serde_json::Value, field: &str) -> Result<FiniteDensity, Error> {
    let map = value
        .get(field)
        .and_then(|v| v.as_object())
        .ok_or_else(|| Error::SchemaError {
            field: field.into(),
            message: "expected an object mapping points to rational weights".into(),
        })?;
    let mut entries = Vec::with_capacity(map.len());
    for (key, w) in map {
        let n: u64 = key.parse().map_err(|_| Error::SchemaError {
            field: format!("{field}.{key}"),
            message: "point must be a positive integer".into(),
        })?;
        let s = w.as_str().ok_or_else(|| Error::SchemaError {
            field: format!("{field}.{key}"),
            message: "weight must be a rational string like \"1/3\"".into(),
        })?;
        let r = BigRational::from_str(s).map_err(|e| Error::SchemaError {
            field: format!("{field}.{key}"),
            message: format!("bad rational: {e}"),
        })?;
        entries.push((n, r));
    }
    FiniteDensity::new(entries)
}

fn polynomial_field(value: &serde_json::Value, field: &str) -> Result<Polynomial, Error> {
    let arr = value
        .get(field)
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::SchemaError {
            field: field.into(),
            message: "expected an array of rational-string coefficients".into(),
        })?;
    let mut coeffs = Vec::with_capacity(arr.len());
    for (k, entry) in arr.iter().enumerate() {
        let s = entry.as_str().ok_or_else(|| Error::SchemaError {
            field: format!("{field}[{k}]"),
            message: "coefficient must be a rational string like \"-7\" or \"5/3\"".into(),
        })?;
        coeffs.push(BigRational::from_str(s).map_err(|e| Error::SchemaError {
            field: format!("{field}[{k}]"),
            message: format!("bad rational: {e}"),
        })?);
    }
    Ok(Polynomial::new(coeffs))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::FaceReport => {
            let problem = require_input(&cli.input)?;
            let cutoff = cli.tol.unwrap_or(facecut_core::tol::SUPPORT_CUTOFF);
            let report = match &problem.state {
                ProblemState::Density(rho) => {
                    face_report_with_cutoff(rho, &problem.constraints, cutoff)?
                }
                ProblemState::Subnormalized(a) => {
                    face_report_subnormalized_with_cutoff(a, &problem.constraints, cutoff)?
                }
            };
            emit_json(&cli.output, &report.summary())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::FaceMember { other } => {
            let problem = require_input(&cli.input)?;
            let rho = problem.density()?;
            let sigma = DensityOperator::from_complex_matrix(load_matrix(&other)?)?;
            let member = face_membership(&sigma, rho)?;
            let oracle = segment_oracle(&sigma, rho, &default_lambda_grid())?;
            emit_json(
                &cli.output,
                &json!({"member": member, "segment_oracle": oracle}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ExtremeCheck => {
            let problem = require_input(&cli.input)?;
            let cutoff = cli.tol.unwrap_or(facecut_core::tol::SUPPORT_CUTOFF);
            let report = match &problem.state {
                ProblemState::Density(rho) => {
                    face_report_with_cutoff(rho, &problem.constraints, cutoff)?
                }
                ProblemState::Subnormalized(a) => {
                    face_report_subnormalized_with_cutoff(a, &problem.constraints, cutoff)?
                }
            };
            emit_json(
                &cli.output,
                &json!({
                    "extreme": report.extreme,
                    "rank": report.rank,
                    "constrained_dim": report.constrained_dim,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose => {
            let problem = require_input(&cli.input)?;
            let rho = problem.density()?;
            let dec = pure_decompose(rho, &problem.constraints)?;
            emit_json(&cli.output, &decomposition_json(&dec, &problem))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::DecomposeBipartite { dims } => {
            let problem = require_input(&cli.input)?;
            let rho = problem.density()?;
            let (d_a, d_b) = parse_dims_pair(&dims)?;
            if problem.constraints.len() < 2 {
                return Err(Error::SchemaError {
                    field: "constraints".into(),
                    message: "decompose-bipartite needs H_A and H_B as the first two constraints"
                        .into(),
                });
            }
            let h_a = problem.constraints.get(0).expect("checked").observable.clone();
            let h_b = problem.constraints.get(1).expect("checked").observable.clone();
            let result = bipartite_decompose(rho, d_a, d_b, &h_a, &h_b)?;
            let mut value = decomposition_json(&result.decomposition, &problem);
            value["e_a"] = json!(result.e_a);
            value["e_b"] = json!(result.e_b);
            value["marginals"] = json!(result.marginals);
            emit_json(&cli.output, &value)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Enorm { e, restarts } => {
            let problem = require_input(&cli.input)?;
            let a = operator_from_options(&problem)?;
            let (h, bound, _) = first_observable(&problem)?;
            warn_if_not_positive(&h);
            let e = e.unwrap_or(bound);
            let dual = enorm_dual(&a, &h, e)?;
            let pure = enorm_pure(&a, &h, e, restarts, cli.seed)?;
            emit_json(
                &cli.output,
                &json!({
                    "value": dual,
                    "pure_value": pure.value,
                    "gap": (dual - pure.value).abs(),
                    "status": pure.status,
                    "restarts": pure.restarts_used,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::MinEntropy { e, kind, restarts } => {
            let problem = require_input(&cli.input)?;
            let kraus = problem
                .options
                .kraus
                .as_ref()
                .ok_or_else(|| Error::SchemaError {
                    field: "options.kraus".into(),
                    message: "min-entropy requires the channel's Kraus operators".into(),
                })?;
            let channel = facecut_core::optimize::KrausChannel::new(
                kraus.iter().map(|m| m.as_mat().clone()).collect(),
            )?;
            let (h, bound, ckind) = first_observable(&problem)?;
            warn_if_not_positive(&h);
            let e = e.unwrap_or(bound);
            let kind = kind.map(ConstraintKind::from).unwrap_or(ckind);
            let result = min_output_entropy(&channel, &h, e, kind, restarts, cli.seed)?;
            emit_json(
                &cli.output,
                &json!({
                    "value": result.value,
                    "optimizer": vector_json(&result.state),
                    "status": result.status,
                    "iterations": result.iterations,
                    "restarts": result.restarts_used,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Linmax { e } => {
            let problem = require_input(&cli.input)?;
            let m = HermitianObservable::new(operator_from_options(&problem)?, None)?;
            let (h, bound, _) = first_observable(&problem)?;
            warn_if_not_positive(&h);
            let e = e.unwrap_or(bound);
            let result = constrained_linear_max(&m, &h, e)?;
            emit_json(
                &cli.output,
                &json!({
                    "value": result.value,
                    "optimizer": vector_json(&result.state),
                    "dual_multiplier": result.dual,
                    "status": result.status,
                    "iterations": result.iterations,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classical { sub } => run_classical(sub, &cli.input, &cli.output),
        Command::Verify {
            suite,
            samples,
            dims,
            ell,
            restarts,
            instance,
        } => {
            let suite = Suite::from_name(&suite).ok_or_else(|| Error::SchemaError {
                field: "suite".into(),
                message: format!(
                    "unknown suite {:?}; expected one of {}",
                    suite,
                    Suite::ALL.map(|s| s.name()).join(", ")
                ),
            })?;
            let dims = match dims {
                Some(list) => list
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<usize>().map_err(|_| Error::SchemaError {
                            field: "--dims".into(),
                            message: format!("invalid dimension {s:?}"),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                None => vec![2, 3, 4],
            };
            let config = RunConfig {
                seed: cli.seed,
                tol: cli.tol,
                restarts,
                samples,
                dims,
                ell,
                output: cli.output.clone(),
                format: match cli.format {
                    FormatArg::Json => OutputFormat::Json,
                    FormatArg::Csv => OutputFormat::Csv,
                },
                instance,
            };
            let report = verify_suite(suite, &config);
            eprintln!(
                "suite {} finished in {} ms: {}",
                report.suite,
                report.wall_time_ms,
                if report.pass { "pass" } else { "FAIL" }
            );
            emit_json(&cli.output, &report)?;
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Sweep { op, from, to, steps } => {
            if op != "enorm" {
                return Err(Error::SchemaError {
                    field: "--op".into(),
                    message: format!("unsupported sweep op {op:?}; only \"enorm\" is available"),
                });
            }
            let problem = require_input(&cli.input)?;
            let a = operator_from_options(&problem)?;
            let (h, _, _) = first_observable(&problem)?;
            warn_if_not_positive(&h);
            let points = sweep_enorm(&a, &h, from, to, steps)?;
            match cli.format {
                FormatArg::Csv => emit(&cli.output, emit_plot_data(&points, "E", "enorm"))?,
                FormatArg::Json => emit_json(&cli.output, &points)?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_classical(
    sub: ClassicalCmd,
    input: &Option<PathBuf>,
    output: &Option<PathBuf>,
) -> Result<ExitCode, Error> {
    match sub {
        ClassicalCmd::SimplexMember => {
            let value = read_json_input(input)?;
            let q = density_map(&value, "q")?;
            let p = density_map(&value, "p")?;
            let member = simplex_face_membership(&q, &p);
            let ri = simplex_ri_membership(&q, &p);
            let witness = simplex_segment_witness(&q, &p);
            emit_json(
                output,
                &json!({
                    "member": member,
                    "ri_member": ri,
                    "witness_lambda": witness.as_ref().map(|(l, _)| l.to_string()),
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        ClassicalCmd::HadamardChain { k, n, ratio } => {
            let mut chain = vec![SymbolicDensity::geometric(ratio)?];
            for _ in 0..k {
                let next = hadamard_transform(chain.last().expect("nonempty"))?;
                chain.push(next);
            }
            let mut links = Vec::new();
            for step in 0..k as usize {
                let fwd = ratio_limit_report(&chain[step], &chain[step + 1], n);
                let rev = ratio_limit_report(&chain[step + 1], &chain[step], n);
                links.push(json!({
                    "k": step,
                    "forward": fwd,
                    "reverse": rev,
                }));
            }
            emit_json(output, &json!({"ratio": ratio, "links": links}))?;
            Ok(ExitCode::SUCCESS)
        }
        ClassicalCmd::ZetaOrder { s, t, n } => {
            let ps = SymbolicDensity::zeta(s)?;
            let pt = SymbolicDensity::zeta(t)?;
            let report = ratio_limit_report(&ps, &pt, n);
            emit_json(
                output,
                &json!({
                    "s": s,
                    "t": t,
                    "report": report,
                    "expected_membership": t <= s,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        ClassicalCmd::PolyMember => {
            let value = read_json_input(input)?;
            let q = polynomial_field(&value, "q")?;
            let p = polynomial_field(&value, "p")?;
            let member = poly_face_membership(&q, &p)?;
            let ri = poly_ri_membership(&q, &p)?;
            let witness = poly_segment_witness(&q, &p)?;
            emit_json(
                output,
                &json!({
                    "member": member,
                    "ri_member": ri,
                    "witness_lambda": witness.as_ref().map(|(l, _)| l.to_string()),
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        ClassicalCmd::TriangleDemo => {
            let report = triangle_counterexample();
            emit_json(output, &report)?;
            Ok(if report.certificate_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
