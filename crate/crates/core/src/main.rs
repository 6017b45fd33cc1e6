use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use perron_pea::experiment::{run_and_emit, ExperimentConfig};
use perron_pea::generators::{build_local_hamiltonian, gen_local_spec, gen_random_symmetric, EnsembleKind, LocalModel};
use perron_pea::io::{format_lham, format_matrix, read_lham, read_matrix};
use perron_pea::probability::analyze;
use perron_pea::qpe::{condition_on_zero, run_dense, run_spectral, sample, Engine, MeasurementSummary, QpeConfig};
use perron_pea::{plot, report, Error, Result, SymmetricMatrix};

#[derive(Parser)]
#[command(name = "perron-pea", version, about = "Phase estimation success probabilities for non-negative symmetric matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Symm,
    Lham,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random matrix (symm-v1) or local Hamiltonian spec (lham-v1).
    Gen {
        #[arg(long)]
        kind: EnsembleKind,
        /// Matrix order N.
        #[arg(long, conflicts_with = "qubits")]
        size: Option<usize>,
        /// Qubit count n, N = 2^n.
        #[arg(long)]
        qubits: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "symm")]
        format: Format,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute exact and estimated success probabilities for a matrix.
    Analyze {
        #[arg(long, required_unless_present = "lham", conflicts_with = "lham")]
        matrix: Option<PathBuf>,
        #[arg(long)]
        lham: Option<PathBuf>,
        /// Also print eigenvalues and eigenvector sums.
        #[arg(long)]
        spectrum: bool,
    },
    /// Simulate phase estimation on the equal superposition.
    Simulate {
        #[arg(long, required_unless_present = "lham", conflicts_with = "lham")]
        matrix: Option<PathBuf>,
        #[arg(long)]
        lham: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        m: u32,
        #[arg(long, default_value = "spectral")]
        engine: Engine,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        output_hadamards: bool,
        /// Phase guard delta; defaults to 2^-m.
        #[arg(long)]
        guard: Option<f64>,
        /// Sample this many shots instead of writing exact probabilities.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV of (k, b, prob), or (k, b, count) when sampling.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the measurement summary as key=value lines.
        #[arg(long)]
        summary: bool,
    },
    /// Run an ensemble experiment from a config file, writing CSV and SVG.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Plot an experiment CSV as SVG.
    Report {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
}

fn load(matrix: Option<&Path>, lham: Option<&Path>) -> Result<SymmetricMatrix> {
    match (matrix, lham) {
        (Some(p), _) => read_matrix(p),
        (None, Some(p)) => build_local_hamiltonian(&read_lham(p)?),
        (None, None) => Err(Error::Config("one of --matrix or --lham is required".into())),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn model_of(kind: EnsembleKind) -> Option<LocalModel> {
    match kind {
        EnsembleKind::RandomSymmetric => None,
        EnsembleKind::LocalH1 => Some(LocalModel::H1),
        EnsembleKind::LocalH2 => Some(LocalModel::H2),
    }
}

fn gen(
    kind: EnsembleKind,
    size: Option<usize>,
    qubits: Option<usize>,
    density: f64,
    seed: u64,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let qubits = match (size, qubits) {
        (_, Some(n)) => Some(n),
        (Some(s), None) if s.is_power_of_two() => Some(s.trailing_zeros() as usize),
        _ => None,
    };
    let text = match (model_of(kind), format) {
        (None, Format::Lham) => return Err(Error::Config("lham output needs a local kind".into())),
        (None, Format::Symm) => {
            let order = size
                .or(qubits.map(|n| 1 << n))
                .ok_or_else(|| Error::Config("--size or --qubits is required".into()))?;
            format_matrix(&gen_random_symmetric(order, density, seed)?)
        }
        (Some(model), format) => {
            let n = qubits.ok_or_else(|| Error::Config("local kinds need --qubits or a power-of-two --size".into()))?;
            let spec = gen_local_spec(n, model, seed)?;
            match format {
                Format::Lham => format_lham(&spec),
                Format::Symm => format_matrix(&build_local_hamiltonian(&spec)?),
            }
        }
    };
    write_out(out, &text)
}

fn analyze_cmd(m: &SymmetricMatrix, spectrum: bool) -> Result<()> {
    let a = analyze(m)?;
    let r = &a.report;
    let mut s = String::new();
    let pairs: [(&str, String); 21] = [
        ("N", r.order.to_string()),
        ("principal_eigenvalue", r.principal_eigenvalue.to_string()),
        ("alpha1_sq", r.alpha1_sq.to_string()),
        ("p_reg2", r.p_reg2.to_string()),
        ("p_reg1", r.p_reg1.to_string()),
        ("alpha1_sq_est", r.alpha1_sq_est.to_string()),
        ("p_reg2_est", r.p_reg2_est.to_string()),
        ("p_reg1_est", r.p_reg1_est.to_string()),
        ("sigma1", r.sigma1.to_string()),
        ("sigma2", r.sigma2.to_string()),
        ("lambda1", r.lambda1.to_string()),
        ("lambda2", r.lambda2.to_string()),
        ("epsilon_forward", r.epsilon_forward.to_string()),
        ("epsilon_inverse", r.epsilon_inverse.to_string()),
        ("ratio_bound", r.ratio_bound.to_string()),
        ("ratio_actual", r.ratio_actual.to_string()),
        ("ratio_applicable", r.ratio_applicable.to_string()),
        ("shift", r.shift.to_string()),
        ("parseval_defect", r.parseval_defect.to_string()),
        ("bound_ok", r.bound_ok().to_string()),
        ("parseval_ok", r.parseval_ok().to_string()),
    ];
    for (k, v) in pairs {
        let _ = writeln!(s, "{k}={v}");
    }
    if spectrum {
        let join = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(s, "eigenvalues={}", join(&mut a.spectrum.eigenvalues().iter().copied()));
        let root_n = (m.order() as f64).sqrt();
        let _ = writeln!(s, "eigenvector_sums={}", join(&mut a.alphas.alphas.iter().map(|x| x * root_n)));
    }
    print!("{s}");
    Ok(())
}

fn print_summary(sum: &MeasurementSummary) {
    println!("m={}", sum.m);
    println!("p_zero={}", sum.p_zero);
    println!("top_bin={}", sum.top_bin);
    println!("eigenvalue_estimate={}", sum.eigenvalue_estimate);
    println!("principal_bin={}", sum.principal_bin);
    println!("principal_mass={}", sum.principal_mass);
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    m: &SymmetricMatrix,
    bits: u32,
    engine: Engine,
    output_hadamards: bool,
    guard: Option<f64>,
    shots: Option<u64>,
    seed: u64,
    out: Option<&Path>,
    summary: bool,
) -> Result<()> {
    let mut cfg = QpeConfig::new(bits).with_engine(engine).with_output_hadamards(output_hadamards);
    cfg.guard = guard;
    let dist = match engine {
        Engine::Dense => run_dense(m, &cfg)?,
        Engine::Spectral => {
            let a = analyze(m)?;
            run_spectral(&a.spectrum, &a.alphas, &cfg)?
        }
    };
    let states = dist.states();
    let mut text = String::new();
    match shots {
        Some(shots) => {
            let counts = sample(&dist, shots, seed)?;
            text.push_str("k,b,count\n");
            for (idx, c) in counts.iter().enumerate().filter(|(_, c)| **c > 0) {
                let _ = writeln!(text, "{},{},{c}", idx / states, idx % states);
            }
        }
        None => {
            text.push_str("k,b,prob\n");
            for (idx, p) in dist.probs().iter().enumerate().filter(|(_, p)| **p > 0.0) {
                let _ = writeln!(text, "{},{},{p}", idx / states, idx % states);
            }
        }
    }
    if out.is_some() || !summary {
        write_out(out, &text)?;
    }
    if summary {
        if !output_hadamards {
            return Err(Error::Config("--summary needs --output-hadamards true".into()));
        }
        print_summary(&condition_on_zero(&dist)?);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            kind,
            size,
            qubits,
            density,
            seed,
            format,
            out,
        } => gen(kind, size, qubits, density, seed, format, out.as_deref()),
        Command::Analyze { matrix, lham, spectrum } => {
            analyze_cmd(&load(matrix.as_deref(), lham.as_deref())?, spectrum)
        }
        Command::Simulate {
            matrix,
            lham,
            m,
            engine,
            output_hadamards,
            guard,
            shots,
            seed,
            out,
            summary,
        } => simulate(
            &load(matrix.as_deref(), lham.as_deref())?,
            m,
            engine,
            output_hadamards,
            guard,
            shots,
            seed,
            out.as_deref(),
            summary,
        ),
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let table = run_and_emit(&cfg)?;
            for (k, v) in table.aggregates.entries() {
                println!("{k}={v}");
            }
            Ok(())
        }
        Command::Report { csv, svg } => plot::emit_plot(&report::read_csv(&csv)?, &svg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 3 } else { 2 })
        }
    }
}
