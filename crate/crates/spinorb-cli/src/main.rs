//! Command-line front end: simulate pipelines, evaluate the witness,
//! and generate counting records.
//!
//! Exit codes: 0 success, 2 usage or parse errors, 3 a pipeline
//! post-selection annihilated the state, 4 the witness is undefined for
//! the requested state, 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use spinorb::circuits::{
    named_pipeline, parse_pipeline, pipeline_from_elements, pipeline_names, reference_state,
    run_pipeline, Pipeline, PipelineRun, StateId,
};
use spinorb::measurement::{
    estimate_from_exact, estimate_witness, protocol_settings, sample_counts, setting_probability,
};
use spinorb::fock::PhotonicState;
use spinorb::witness::{bell_witness, min_separable, WitnessDof, WitnessOperator};
use spinorb::Error;

const DEFAULT_L: u32 = 1;
const DEFAULT_SHOTS: u64 = 100_000;
/// Both witness paths; every bundled two-photon state lives on them.
const WITNESS_PATHS: (u32, u32) = (1, 2);

#[derive(Parser)]
#[command(
    name = "spinorb",
    version,
    about = "Simulate and verify few-photon states carrying polarization and orbital angular momentum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a bundled or file-defined element pipeline
    Simulate {
        /// Bundled pipeline name (see --list)
        pipeline: Option<String>,
        /// Read elements from a file, one per line; requires --source
        #[arg(long)]
        file: Option<PathBuf>,
        /// Source state for --file pipelines (e.g. PSI_POL)
        #[arg(long)]
        source: Option<String>,
        /// Compare the output against this reference state
        #[arg(long)]
        expect: Option<String>,
        /// OAM order of the mode grid
        #[arg(long, default_value_t = DEFAULT_L)]
        l: u32,
        /// Print at most this many output amplitudes
        #[arg(long, default_value_t = 8)]
        top: usize,
        /// Write a JSON report to this file
        #[arg(long)]
        json_out: Option<PathBuf>,
        /// List bundled pipelines and reference states, then exit
        #[arg(long)]
        list: bool,
    },
    /// Evaluate the entanglement witness on a reference state
    Witness {
        /// Reference state (e.g. PSI_OAM)
        state: String,
        /// Which degree of freedom carries the qubits
        #[arg(long, value_enum)]
        dof: DofArg,
        /// OAM order of the mode grid
        #[arg(long, default_value_t = DEFAULT_L)]
        l: u32,
        /// Also minimize the witness over product states
        #[arg(long)]
        min_separable: bool,
        /// Write a JSON report to this file
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Simulate the ten-setting counting run and estimate the witness
    Sample {
        /// Reference state (e.g. PSI_OAM)
        state: String,
        /// Which degree of freedom carries the qubits
        #[arg(long, value_enum)]
        dof: DofArg,
        /// Trials per detector setting
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
        /// Seed for the count generator
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// OAM order of the mode grid
        #[arg(long, default_value_t = DEFAULT_L)]
        l: u32,
        /// Write the counts as CSV to this file
        #[arg(long)]
        csv_out: Option<PathBuf>,
        /// Write a JSON report to this file
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DofArg {
    Oam,
    Pol,
}

impl From<DofArg> for WitnessDof {
    fn from(arg: DofArg) -> Self {
        match arg {
            DofArg::Oam => WitnessDof::Oam,
            DofArg::Pol => WitnessDof::Polarization,
        }
    }
}

impl DofArg {
    fn name(self) -> &'static str {
        match self {
            DofArg::Oam => "oam",
            DofArg::Pol => "pol",
        }
    }
}

enum CliError {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Lib(err)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(err) => write!(f, "{err}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Lib(err) => match err {
                Error::Annihilated { .. } => 3,
                Error::WitnessDomain(_) | Error::EmptyBasisCounts => 4,
                Error::PipelineParse { .. }
                | Error::UnknownState(_)
                | Error::UnknownPipeline(_) => 2,
                _ => 1,
            },
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate {
            pipeline,
            file,
            source,
            expect,
            l,
            top,
            json_out,
            list,
        } => simulate(pipeline, file, source, expect, l, top, json_out, list),
        Command::Witness {
            state,
            dof,
            l,
            min_separable,
            json_out,
        } => witness(&state, dof, l, min_separable, json_out),
        Command::Sample {
            state,
            dof,
            shots,
            seed,
            l,
            csv_out,
            json_out,
        } => sample(&state, dof, shots, seed, l, csv_out, json_out),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|err| CliError::Io(format!("cannot write {}: {err}", path.display())))
}

fn write_report(path: &Path, command: &str, report: serde_json::Value) -> Result<(), CliError> {
    let document = json!({
        "tool": { "name": "spinorb", "version": env!("CARGO_PKG_VERSION") },
        "defaults": { "l": DEFAULT_L, "shots": DEFAULT_SHOTS },
        "command": command,
        "report": report,
    });
    let mut text = serde_json::to_string_pretty(&document)
        .map_err(|err| CliError::Io(format!("cannot serialize the report: {err}")))?;
    text.push('\n');
    write_file(path, &text)
}

fn parse_state(name: &str) -> Result<StateId, CliError> {
    Ok(name.parse::<StateId>()?)
}

fn list_builtins() {
    println!("bundled pipelines:");
    for name in pipeline_names() {
        let pipeline = named_pipeline(name).expect("bundled names resolve");
        let expected = pipeline
            .expected
            .map(|id| id.to_string())
            .unwrap_or_default();
        println!(
            "  {name:<16} {} -> {expected}: {}",
            pipeline.source, pipeline.description
        );
    }
    println!("reference states:");
    for id in StateId::ALL {
        println!(
            "  {:<12} {} photons on paths {:?}",
            id.to_string(),
            id.photon_number(),
            id.paths()
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    pipeline_name: Option<String>,
    file: Option<PathBuf>,
    source: Option<String>,
    expect: Option<String>,
    l: u32,
    top: usize,
    json_out: Option<PathBuf>,
    list: bool,
) -> Result<(), CliError> {
    if list {
        list_builtins();
        return Ok(());
    }
    let pipeline: Pipeline = match (&pipeline_name, &file) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either a bundled pipeline name or --file, not both".to_string(),
            ))
        }
        (Some(name), None) => {
            if source.is_some() || expect.is_some() {
                return Err(CliError::Usage(
                    "--source and --expect apply only to --file pipelines; \
                     bundled pipelines fix both"
                        .to_string(),
                ));
            }
            named_pipeline(name)?
        }
        (None, Some(path)) => {
            let source_name = source.as_deref().ok_or_else(|| {
                CliError::Usage("--file pipelines need --source <STATE>".to_string())
            })?;
            let source_id = parse_state(source_name)?;
            let expected_id = expect.as_deref().map(parse_state).transpose()?;
            let text = std::fs::read_to_string(path)
                .map_err(|err| CliError::Io(format!("cannot read {}: {err}", path.display())))?;
            let elements = parse_pipeline(&text, l)?;
            if elements.is_empty() {
                return Err(CliError::Usage(format!(
                    "{} defines no elements",
                    path.display()
                )));
            }
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "file".to_string());
            pipeline_from_elements(name, "pipeline from file", elements, source_id, expected_id)
        }
        (None, None) => {
            return Err(CliError::Usage(
                "give a bundled pipeline name (see --list) or --file <PATH>".to_string(),
            ))
        }
    };

    let run: PipelineRun = run_pipeline(&pipeline, l)?;

    println!("pipeline {} (l={l}): {}", pipeline.name, pipeline.description);
    println!("  source {} ({} photons)", pipeline.source, run.input.photon_number());
    for (position, spec) in pipeline.elements.iter().enumerate() {
        println!("  element {}: {spec}", position + 1);
    }
    println!("  success probability {:.9}", run.probability);
    if let (Some(expected), Some(fidelity)) = (pipeline.expected, run.fidelity) {
        println!("  fidelity vs {expected}: {fidelity:.12}");
    }
    let amplitudes = top_amplitudes(&run.output, top);
    println!(
        "  output: {} photons, {} terms",
        run.output.photon_number(),
        run.output.term_count()
    );
    for (label, re, im, probability) in &amplitudes {
        println!("    {label}  amp {re:+.6}{im:+.6}i  p={probability:.6}");
    }

    if let Some(path) = json_out {
        let report = json!({
            "pipeline": pipeline.name,
            "description": pipeline.description,
            "l": l,
            "source": pipeline.source.to_string(),
            "expected": pipeline.expected.map(|id| id.to_string()),
            "elements": pipeline.elements.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "probability": run.probability,
            "fidelity": run.fidelity,
            "output": {
                "photon_number": run.output.photon_number(),
                "term_count": run.output.term_count(),
                "top_amplitudes": amplitudes.iter().map(|(label, re, im, probability)| json!({
                    "occupation": label,
                    "re": re,
                    "im": im,
                    "probability": probability,
                })).collect::<Vec<_>>(),
            },
        });
        write_report(&path, "simulate", report)?;
    }
    Ok(())
}

/// The `top` strongest output terms as `(label, re, im, probability)`,
/// strongest first.
fn top_amplitudes(state: &PhotonicState, top: usize) -> Vec<(String, f64, f64, f64)> {
    let registry = state.registry();
    let mut terms: Vec<(String, f64, f64, f64)> = state
        .amplitudes()
        .map(|(occ, amp)| (occ.label(registry), amp.re, amp.im, amp.norm_sqr()))
        .collect();
    terms.sort_by(|a, b| b.3.total_cmp(&a.3));
    terms.truncate(top);
    terms
}

fn witness_for(
    state_name: &str,
    dof: DofArg,
    l: u32,
) -> Result<(WitnessOperator, PhotonicState, StateId), CliError> {
    let id = parse_state(state_name)?;
    let (registry, state) = reference_state(id, l)?;
    let witness = bell_witness(&registry, dof.into(), WITNESS_PATHS)?;
    Ok((witness, state, id))
}

fn witness(
    state_name: &str,
    dof: DofArg,
    l: u32,
    with_min: bool,
    json_out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (witness, state, id) = witness_for(state_name, dof, l)?;
    let expectation = witness.expectation(&state)?;
    let components = witness.component_probabilities(&state)?;
    let estimator = estimate_from_exact(&witness, &state)?;

    println!(
        "witness ({} encoding) on {id}, paths {} and {}, l={l}",
        dof.name(),
        WITNESS_PATHS.0,
        WITNESS_PATHS.1
    );
    println!("  value                    {:+.12}", expectation.value);
    println!(
        "  coincidence probability  {:.12}",
        expectation.coincidence_probability
    );
    println!("  estimator on exact rates {estimator:+.12}");
    println!("  components (conditional probabilities):");
    for (term, probability) in witness.terms().iter().zip(&components) {
        println!(
            "    {:<6} coeff {:+.1}  p={probability:.12}",
            term.label, term.coefficient
        );
    }

    let minimum = with_min.then(min_separable);
    if let Some(m) = &minimum {
        println!(
            "  separable minimum {:+.12} at alpha={:.6} beta={:.6} phi1={:.6} phi2={:.6}",
            m.value, m.angles[0], m.angles[1], m.angles[2], m.angles[3]
        );
    }

    if let Some(path) = json_out {
        let report = json!({
            "state": id.to_string(),
            "dof": dof.name(),
            "l": l,
            "paths": [WITNESS_PATHS.0, WITNESS_PATHS.1],
            "value": expectation.value,
            "coincidence_probability": expectation.coincidence_probability,
            "estimator_on_exact_rates": estimator,
            "components": witness.terms().iter().zip(&components).map(|(term, p)| json!({
                "label": term.label,
                "coefficient": term.coefficient,
                "probability": p,
            })).collect::<Vec<_>>(),
            "min_separable": minimum.map(|m| json!({
                "value": m.value,
                "angles": m.angles,
                "params": {
                    "a": m.params.a, "b": m.params.b,
                    "c": m.params.c, "d": m.params.d,
                    "phi1": m.params.phi1, "phi2": m.params.phi2,
                },
            })),
        });
        write_report(&path, "witness", report)?;
    }
    Ok(())
}

fn sample(
    state_name: &str,
    dof: DofArg,
    shots: u64,
    seed: u64,
    l: u32,
    csv_out: Option<PathBuf>,
    json_out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (witness, state, id) = witness_for(state_name, dof, l)?;
    let settings = protocol_settings(&witness);
    let record = sample_counts(&state, &witness, shots, seed)?;
    let estimate = estimate_witness(&witness, &record)?;
    let exact = witness.expectation(&state)?.value;

    println!(
        "counting run ({} encoding) on {id}, {shots} shots per setting, seed {seed}, l={l}",
        dof.name()
    );
    let mut rows = Vec::with_capacity(settings.len());
    for (setting, entry) in settings.iter().zip(record.witness.iter().chain(&record.basis)) {
        let probability = setting_probability(&state, &witness, setting)?;
        println!(
            "  {:<8} p={probability:.6}  counts {:>8} / {}",
            setting.label, entry.counts, entry.shots
        );
        rows.push(json!({
            "label": setting.label,
            "analyzer_a": setting.analyzer_a.to_string(),
            "analyzer_b": setting.analyzer_b.to_string(),
            "probability": probability,
            "counts": entry.counts,
            "shots": entry.shots,
        }));
    }
    println!("  estimate    {estimate:+.6}");
    println!("  exact value {exact:+.6}");

    if let Some(path) = &csv_out {
        write_file(path, &record.to_csv())?;
        println!("  counts written to {}", path.display());
    }

    if let Some(path) = json_out {
        let report = json!({
            "state": id.to_string(),
            "dof": dof.name(),
            "l": l,
            "shots": shots,
            "seed": seed,
            "estimate": estimate,
            "exact_value": exact,
            "settings": rows,
            "csv": csv_out.map(|p| p.display().to_string()),
        });
        write_report(&path, "sample", report)?;
    }
    Ok(())
}
