//! gmelab command line: state construction, closest-state projection runs,
//! witness extraction, distance estimation, negativity reports, θ sweeps,
//! and the conversion-protocol checks.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure. Every run
//! taking `--seed` is bit-reproducible, including the emitted CSV bytes.
//! `GMELAB_THREADS` caps sweep parallelism (0 forces sequential execution).

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gmelab::error::Error;
use gmelab::estimator;
use gmelab::gilbert::{self, GilbertConfig};
use gmelab::negativity::{self, AggregateMode};
use gmelab::operator::DensityMatrix;
use gmelab::partition::{enumerate_bipartitions, Bipartition, PartySpec, SeparabilityClass};
use gmelab::states::{self, StateName};
use gmelab::witness;

use io::{
    grouping_from_str, grouping_to_str, rational_label, read_json, write_json, EstimateJson,
    G3peJson, LambdaRow, NegativityJson, ProtocolBranchJson, ProtocolJson, ProtocolsJson,
    RunReport, StateFile, WitnessJson,
};

#[derive(Parser)]
#[command(name = "gmelab", version, about = "Separability analysis for small multiqubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named state to a JSON state file.
    State {
        /// psi-plus | ghz | w3 | theta | rho1 | rho2 | phi4 | psi4 | rho3 | rho4
        name: String,
        #[arg(long)]
        theta: Option<f64>,
        /// Qubit count for ghz.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Project a state onto a separability class and report distances.
    Gilbert {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Report JSON path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// History CSV path.
        #[arg(long)]
        history: Option<PathBuf>,
        /// Write the final approximation as a state file.
        #[arg(long)]
        css_out: Option<PathBuf>,
        /// Start from this state file instead of the maximally mixed state
        /// (it must lie inside the chosen class).
        #[arg(long)]
        initial: Option<PathBuf>,
    },
    /// Witness report for a state against an explicit approximation.
    Witness {
        #[arg(long)]
        state: PathBuf,
        /// State file holding the approximation (loaded without the
        /// density-matrix checks, so stored fixtures are accepted).
        #[arg(long)]
        css: PathBuf,
        #[arg(long, default_value = "biseparable")]
        class: String,
        #[arg(long)]
        grouping: Option<String>,
        #[arg(long, default_value_t = 200)]
        restarts: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Asymptotic distance estimate from a history CSV.
    Estimate {
        #[arg(long)]
        history: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-cut negativities (and the tripartite mean for three groups).
    Negativity {
        #[arg(long)]
        state: PathBuf,
        /// Override the file's grouping: party | particle.
        #[arg(long)]
        grouping: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate three-particle entanglement over particle triples.
    G3pe {
        #[arg(long)]
        state: PathBuf,
        /// within-all | cross-location
        #[arg(long, default_value = "within-all")]
        mode: String,
        #[arg(long)]
        grouping: Option<String>,
        /// negativity | witness-distance
        #[arg(long, default_value = "negativity")]
        measure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the merge pipeline over a θ grid and tabulate the distances.
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        run: RunArgs,
        /// Sweep CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Also emit a gnuplot script plotting the CSV.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Check both state-conversion protocols.
    Protocols {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// separable | biseparable | cut:<SPEC> (e.g. cut:AB|CD)
    #[arg(long, default_value = "biseparable")]
    class: String,
    /// Override the file's grouping: party | particle.
    #[arg(long)]
    grouping: Option<String>,
    #[arg(long, default_value_t = 3500)]
    max_corrections: u64,
    #[arg(long, default_value_t = 2_000_000)]
    max_trials: u64,
    #[arg(long, default_value_t = 50)]
    record_interval: u64,
    /// See-saw restarts per cut for the λ maximization.
    #[arg(long, default_value_t = 200)]
    restarts: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    target_distance: Option<f64>,
    #[arg(long, default_value_t = 60)]
    seesaw_sweeps: u32,
    #[arg(long, default_value_t = 1e-10)]
    seesaw_tol: f64,
}

impl RunArgs {
    fn config(&self, seed: u64) -> GilbertConfig {
        GilbertConfig {
            max_corrections: self.max_corrections,
            max_trials: self.max_trials,
            record_interval: self.record_interval,
            seesaw_sweeps: self.seesaw_sweeps,
            seesaw_tol: self.seesaw_tol,
            rng_seed: seed,
            target_distance: self.target_distance,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

enum CliError {
    Input(String),
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::EigenNoConvergence { .. }
            | Error::DegenerateHistory
            | Error::IncompatibleProjection { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::State {
            name,
            theta,
            n,
            out,
        } => cmd_state(&name, theta, n, &out),
        Command::Gilbert {
            state,
            run,
            out,
            history,
            css_out,
            initial,
        } => cmd_gilbert(
            &state,
            &run,
            out.as_deref(),
            history.as_deref(),
            css_out.as_deref(),
            initial.as_deref(),
        ),
        Command::Witness {
            state,
            css,
            class,
            grouping,
            restarts,
            seed,
            out,
        } => cmd_witness(&state, &css, &class, grouping.as_deref(), restarts, seed, out.as_deref()),
        Command::Estimate { history, out } => cmd_estimate(&history, out.as_deref()),
        Command::Negativity {
            state,
            grouping,
            out,
        } => cmd_negativity(&state, grouping.as_deref(), out.as_deref()),
        Command::G3pe {
            state,
            mode,
            grouping,
            measure,
            out,
        } => cmd_g3pe(&state, &mode, grouping.as_deref(), &measure, out.as_deref()),
        Command::Sweep {
            from,
            to,
            steps,
            run,
            out,
            gnuplot,
        } => cmd_sweep(from, to, steps, &run, &out, gnuplot.as_deref()),
        Command::Protocols { out } => cmd_protocols(out.as_deref()),
    }
}

fn parse_state_name(name: &str, theta: Option<f64>, n: Option<usize>) -> Result<StateName, CliError> {
    let need_theta = || {
        theta.ok_or_else(|| CliError::Input(format!("state `{name}` requires --theta")))
    };
    Ok(match name {
        "psi-plus" => StateName::PsiPlus,
        "ghz" => StateName::Ghz(n.unwrap_or(3)),
        "w3" => StateName::W3,
        "theta" => StateName::Theta(need_theta()?),
        "rho1" => StateName::Rho1(need_theta()?),
        "rho2" => StateName::Rho2,
        "phi4" => StateName::Phi4,
        "psi4" => StateName::Psi4,
        "rho3" => StateName::Rho3(need_theta()?),
        "rho4" => StateName::Rho4,
        other => return Err(CliError::Input(Error::UnknownState(other.into()).to_string())),
    })
}

fn cmd_state(name: &str, theta: Option<f64>, n: Option<usize>, out: &Path) -> Result<(), CliError> {
    let named = states::build_state(parse_state_name(name, theta, n)?)?;
    let rho = named.density()?;
    let file = StateFile::from_state(&rho, &named.spec);
    write_json(out, &file)?;
    println!("wrote {} ({} x {})", out.display(), rho.dim(), rho.dim());
    Ok(())
}

fn load_state(
    path: &Path,
    grouping_override: Option<&str>,
) -> Result<(DensityMatrix, PartySpec), CliError> {
    let file: StateFile = read_json(path)?;
    let (rho, spec) = file.to_density()?;
    let spec = match grouping_override {
        Some(g) => spec.with_grouping(grouping_from_str(g)?),
        None => spec,
    };
    Ok((rho, spec))
}

fn parse_class(text: &str, spec: &PartySpec) -> Result<SeparabilityClass, CliError> {
    Ok(match text {
        "separable" => SeparabilityClass::FullySeparable,
        "biseparable" => SeparabilityClass::Biseparable,
        other => match other.strip_prefix("cut:") {
            Some(cut) => SeparabilityClass::SingleCut(Bipartition::parse(cut, spec)?),
            None => {
                return Err(CliError::Input(format!(
                    "unknown class `{other}` (separable | biseparable | cut:<SPEC>)"
                )))
            }
        },
    })
}

struct RunOutput {
    report: RunReport,
    history_csv: String,
    css: StateFile,
}

fn execute_run(
    rho: &DensityMatrix,
    spec: &PartySpec,
    class: &SeparabilityClass,
    args: &RunArgs,
    seed: u64,
) -> Result<RunOutput, CliError> {
    execute_run_from(rho, spec, class, args, seed, None)
}

fn execute_run_from(
    rho: &DensityMatrix,
    spec: &PartySpec,
    class: &SeparabilityClass,
    args: &RunArgs,
    seed: u64,
    initial: Option<&DensityMatrix>,
) -> Result<RunOutput, CliError> {
    let config = args.config(seed);
    let run = match initial {
        Some(start) => gilbert::run_from(rho, class, spec, &config, start)?,
        None => gilbert::run(rho, class, spec, &config)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let report = if run.corrections_done == 0 && run.d_last >= witness::DEGENERATE_DISTANCE {
        return Err(CliError::Numerical(format!(
            "trial budget exhausted before any correction (d_last = {})",
            run.d_last
        )));
    } else {
        witness::build_witness(&run, args.restarts, &mut rng)?
    };
    let estimate = estimator::estimate(&run.history).ok();
    Ok(RunOutput {
        report: RunReport::assemble(&run, &report, estimate.as_ref()),
        history_csv: run.history_csv(),
        css: StateFile::from_state(&run.css, spec),
    })
}

fn cmd_gilbert(
    state: &Path,
    args: &RunArgs,
    out: Option<&Path>,
    history: Option<&Path>,
    css_out: Option<&Path>,
    initial: Option<&Path>,
) -> Result<(), CliError> {
    let (rho, spec) = load_state(state, args.grouping.as_deref())?;
    let class = parse_class(&args.class, &spec)?;
    let start = match initial {
        Some(path) => Some(load_state(path, args.grouping.as_deref())?.0),
        None => None,
    };
    let output = execute_run_from(&rho, &spec, &class, args, args.seed, start.as_ref())?;
    if let Some(path) = out {
        write_json(path, &output.report)?;
    }
    if let Some(path) = history {
        std::fs::write(path, &output.history_csv)?;
    }
    if let Some(path) = css_out {
        write_json(path, &output.css)?;
    }
    println!(
        "class={} d_last={} d_est={} d_wit={} corrections={} trials={}",
        output.report.class,
        output.report.d_last,
        output
            .report
            .d_est
            .map_or("n/a".to_string(), |v| v.to_string()),
        output.report.d_wit,
        output.report.corrections,
        output.report.trials,
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_witness(
    state: &Path,
    css: &Path,
    class: &str,
    grouping: Option<&str>,
    restarts: u32,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (rho, spec) = load_state(state, grouping)?;
    let css_file: StateFile = read_json(css)?;
    let (css_matrix, _) = css_file.to_raw_matrix()?;
    let class = parse_class(class, &spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = witness::build_witness_from_parts(
        &rho, &css_matrix, &class, &spec, restarts, &mut rng, 60, 1e-10,
    )?;
    let json = WitnessJson::assemble(&report, &class.label());
    if let Some(path) = out {
        write_json(path, &json)?;
    }
    println!(
        "class={} d_last={} lambda={} d_wit={}",
        json.class, json.d_last, json.lambda, json.d_wit
    );
    for row in &json.lambda_table {
        println!("{} {}", row.cut, row.value);
    }
    Ok(())
}

fn cmd_estimate(history: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(history)?;
    let entries = io::parse_history_csv(&text)?;
    let est = estimator::estimate(&entries)?;
    let json = EstimateJson {
        d_est: est.d_est,
        a_star: est.a_star,
        r_star: est.r_star,
    };
    if let Some(path) = out {
        write_json(path, &json)?;
    }
    println!("d_est={} a_star={} r={}", json.d_est, json.a_star, json.r_star);
    Ok(())
}

fn cmd_negativity(state: &Path, grouping: Option<&str>, out: Option<&Path>) -> Result<(), CliError> {
    let (rho, spec) = load_state(state, grouping)?;
    let cuts = enumerate_bipartitions(&spec)?;
    let mut rows = Vec::with_capacity(cuts.len());
    for cut in &cuts {
        rows.push(LambdaRow {
            cut: cut.to_string(),
            value: negativity::negativity(&rho, cut, &spec)?,
        });
    }
    let tripartite = if spec.group_count() == 3 {
        negativity::tripartite_negativity(&rho, &spec)?.combined
    } else {
        None
    };
    let json = NegativityJson {
        grouping: grouping_to_str(spec.grouping()).to_string(),
        cuts: rows,
        tripartite,
    };
    if let Some(path) = out {
        write_json(path, &json)?;
    }
    for row in &json.cuts {
        println!("{} {}", row.cut, row.value);
    }
    if let Some(t) = json.tripartite {
        println!("tripartite {t}");
    }
    Ok(())
}

fn cmd_g3pe(
    state: &Path,
    mode: &str,
    grouping: Option<&str>,
    measure: &str,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (rho, spec) = load_state(state, grouping)?;
    let mode_enum = match mode {
        "within-all" => AggregateMode::WithinAll,
        "cross-location" => AggregateMode::CrossLocation,
        other => {
            return Err(CliError::Input(format!(
                "unknown mode `{other}` (within-all | cross-location)"
            )))
        }
    };
    let triples = negativity::aggregate_triples(&spec, mode_enum)?.len();
    let value = match measure {
        "negativity" => negativity::aggregate_g3pe_negativity(&rho, &spec, mode_enum)?,
        "witness-distance" => {
            let config = GilbertConfig {
                max_corrections: 600,
                max_trials: 300_000,
                rng_seed: 1,
                ..Default::default()
            };
            let f = negativity::witness_distance_measure(config, 80);
            negativity::aggregate_g3pe(&rho, &spec, mode_enum, &f)?
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown measure `{other}` (negativity | witness-distance)"
            )))
        }
    };
    let json = G3peJson {
        mode: mode.to_string(),
        measure: measure.to_string(),
        triples,
        value,
    };
    if let Some(path) = out {
        write_json(path, &json)?;
    }
    println!("mode={} triples={} value={}", json.mode, json.triples, json.value);
    Ok(())
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn thread_cap() -> usize {
    match std::env::var("GMELAB_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => 1,
            Ok(n) => n,
            Err(_) => 1,
        },
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

fn cmd_sweep(
    from: f64,
    to: f64,
    steps: usize,
    args: &RunArgs,
    out: &Path,
    gnuplot: Option<&Path>,
) -> Result<(), CliError> {
    if steps < 1 {
        return Err(CliError::Input("steps must be at least 1".into()));
    }
    let thetas: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                from
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();

    // Derived per-point seeds keep grid points independent yet reproducible.
    let point = |i: usize| -> Result<(f64, RunReport), CliError> {
        let theta = thetas[i];
        let seed = args.seed ^ splitmix64(i as u64);
        let named = states::build_state(StateName::Rho3(theta))?;
        let spec = match args.grouping.as_deref() {
            Some(g) => named.spec.with_grouping(grouping_from_str(g)?),
            None => named.spec.clone(),
        };
        let rho = named.density()?;
        let class = parse_class(&args.class, &spec)?;
        let output = execute_run(&rho, &spec, &class, args, seed)?;
        Ok((theta, output.report))
    };

    let cap = thread_cap().max(1);
    let mut rows: Vec<(f64, RunReport)> = Vec::with_capacity(steps);
    if cap == 1 {
        for i in 0..steps {
            rows.push(point(i)?);
        }
    } else {
        // Batches of at most `cap` concurrent points; rows are gathered in
        // θ order regardless of completion order.
        let indices: Vec<usize> = (0..steps).collect();
        for batch in indices.chunks(cap) {
            let results: Vec<Result<(f64, RunReport), CliError>> =
                std::thread::scope(|scope| {
                    let point_ref = &point;
                    let handles: Vec<_> = batch
                        .iter()
                        .map(|&i| scope.spawn(move || point_ref(i)))
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("sweep worker panicked"))
                        .collect()
                });
            for res in results {
                rows.push(res?);
            }
        }
    }

    let mut csv = String::from("theta,d_last,d_est,d_wit,corrections\n");
    for row in &rows {
        let (theta, report) = row;
        let d_est = report
            .d_est
            .map_or("NaN".to_string(), |v| v.to_string());
        csv.push_str(&format!(
            "{theta},{},{d_est},{},{}\n",
            report.d_last, report.d_wit, report.corrections
        ));
    }
    std::fs::write(out, &csv)?;
    if let Some(path) = gnuplot {
        let script = format!(
            "set datafile separator ','\n\
             set key autotitle columnhead\n\
             set xlabel 'theta'\n\
             set ylabel 'Hilbert-Schmidt distance'\n\
             plot '{}' using 1:2 with linespoints title 'D_Last', \\\n\
             \x20    '' using 1:3 with linespoints title 'D_Est', \\\n\
             \x20    '' using 1:4 with linespoints title 'D_Wit'\n",
            out.display()
        );
        std::fs::write(path, script)?;
    }
    println!("wrote {} ({} rows)", out.display(), steps);
    Ok(())
}

fn cmd_protocols(out: Option<&Path>) -> Result<(), CliError> {
    let w2g = states::protocol_w_to_ghz()?;
    let g2w = states::protocol_ghz_to_w()?;
    let to_json = |o: &states::ProtocolOutcome| ProtocolJson {
        prob: o.success_prob,
        prob_rational: rational_label(o.success_prob, 64),
        fidelity: o
            .branches
            .iter()
            .map(|b| b.fidelity)
            .fold(f64::INFINITY, f64::min),
        branches: o
            .branches
            .iter()
            .map(|b| ProtocolBranchJson {
                label: b.label.clone(),
                measure_prob: b.measure_prob,
                stage_prob: b.stage_prob,
                correction: b.correction.clone(),
                fidelity: b.fidelity,
            })
            .collect(),
    };
    let json = ProtocolsJson {
        w_to_ghz: to_json(&w2g),
        ghz_to_w: to_json(&g2w),
    };
    if let Some(path) = out {
        write_json(path, &json)?;
    }
    println!(
        "w_to_ghz prob={} ({}) fidelity={}",
        json.w_to_ghz.prob, json.w_to_ghz.prob_rational, json.w_to_ghz.fidelity
    );
    println!(
        "ghz_to_w prob={} ({}) fidelity={}",
        json.ghz_to_w.prob, json.ghz_to_w.prob_rational, json.ghz_to_w.fidelity
    );
    Ok(())
}
