//! Command-line front end for building, running and checking spiking networks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::json;

use neuroram::bits::{format_bits, hamming, parse_bits};
use neuroram::dynamics::{ClampSpec, Simulator};
use neuroram::experiment::{run_experiment, ExperimentConfig, ExperimentKind};
use neuroram::io::{
    circuit_to_json, feedforward_from_json, feedforward_to_json, load_network, network_to_json,
};
use neuroram::neuroram::{IndexInstance, NeuroRam};
use neuroram::similarity::Similarity;
use neuroram::transforms::{distribution_equivalence, sample_threshold_circuit, unroll};
use neuroram::vc::{
    baum_product_bound, circuit_vc_upper, count_dichotomies, log2_big, sauer_lower,
    vc_by_enumeration, SampleSet, VarThresholdArchitecture,
};
use neuroram::Temperature;

#[derive(Parser)]
#[command(name = "neuroram", version, about = "Spiking neuro-RAM and similarity networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a neuro-RAM network as JSON.
    BuildNeuroram {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reset: bool,
        /// Temperature `p/q`; defaults to 1/(4 log2 n).
        #[arg(long)]
        lambda: Option<Temperature>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a similarity-testing network as JSON.
    BuildSimilarity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long)]
        lambda: Option<Temperature>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the neuro-RAM on one instance; prints a CSV row.
    Index {
        #[arg(long)]
        n: usize,
        /// Data bits, position 0 first.
        #[arg(long)]
        x: String,
        /// Index bits: bucket half then offset half, each least significant first.
        #[arg(long, conflicts_with = "k")]
        y: Option<String>,
        /// Index as an integer.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        lambda: Option<Temperature>,
    },
    /// Run the similarity tester on two inputs; prints a CSV row.
    Similarity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long)]
        x1: String,
        #[arg(long)]
        x2: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        lambda: Option<Temperature>,
    },
    /// Simulate a network JSON with clamped inputs; prints one CSV row per round.
    Run {
        #[arg(long)]
        net: PathBuf,
        /// Input bits in input-neuron order.
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print every neuron instead of the outputs only.
        #[arg(long)]
        all: bool,
    },
    /// Unroll a single-output network into a feedforward network.
    Unroll {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a deterministic threshold circuit from a feedforward network.
    Derandomize {
        /// Feedforward network JSON, as written by `unroll`.
        #[arg(long)]
        net: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare output laws of a network and its sampled circuits.
    Equiv {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dichotomy counts and VC bounds for threshold circuits.
    #[command(subcommand)]
    Vc(VcCommand),
    /// Run an experiment from a JSON config or flags; prints a JSON summary.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum VcCommand {
    /// Exact dichotomy count of an architecture on a sample set.
    Count {
        #[arg(long)]
        arch: PathBuf,
        #[arg(long)]
        samples: PathBuf,
    },
    /// Largest shattered subset of the cube, by enumeration.
    Enumerate {
        #[arg(long)]
        arch: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_z: usize,
    },
    /// Upper bound for m-gate circuits and the lower bound from a class size.
    Bounds {
        #[arg(long)]
        m: usize,
        /// Class size as a power of two.
        #[arg(long)]
        class_log2: u32,
        /// Domain size.
        #[arg(long)]
        n: u64,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, conflicts_with = "kind")]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    kind: Option<ExperimentKind>,
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cases: Option<usize>,
    #[arg(long)]
    min_rate: Option<f64>,
    /// CSV output; overrides the config's `output`.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn lambda_or_default(lambda: Option<Temperature>, n: usize) -> Result<Temperature> {
    Ok(match lambda {
        Some(l) => l,
        None => Temperature::default_for(n)?,
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn bits_arg(s: &str) -> Result<Vec<bool>> {
    Ok(parse_bits(s)?)
}

/// Runs the command; `Ok(false)` means it completed but a check failed.
fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::BuildNeuroram { n, reset, lambda, out } => {
            let ram = NeuroRam::new(n, reset, lambda_or_default(lambda, n)?)?;
            emit(&network_to_json(&ram.net), out.as_deref())?;
        }
        Command::BuildSimilarity { n, eps, c, lambda, out } => {
            let s = Similarity::new(n, eps, c, lambda_or_default(lambda, n)?)?;
            emit(&network_to_json(&s.net), out.as_deref())?;
        }
        Command::Index { n, x, y, k, trials, seed, lambda } => {
            let x = bits_arg(&x)?;
            let inst = match (y, k) {
                (Some(y), None) => IndexInstance::new(x, bits_arg(&y)?)?,
                (None, Some(k)) => IndexInstance::addressing(x, k)?,
                _ => bail!("give exactly one of --y or --k"),
            };
            let ram = NeuroRam::new(n, false, lambda_or_default(lambda, n)?)?;
            let hits = ram.success_count(&inst, trials, seed)?;
            println!("n,x,y,truth,trials,successes");
            println!(
                "{n},{},{},{},{trials},{hits}",
                format_bits(&inst.x),
                format_bits(&inst.y),
                u8::from(inst.truth())
            );
        }
        Command::Similarity { n, eps, c, x1, x2, trials, seed, lambda } => {
            let (x1, x2) = (bits_arg(&x1)?, bits_arg(&x2)?);
            if x1.len() != n || x2.len() != n {
                bail!("inputs must have {n} bits");
            }
            let s = Similarity::new(n, eps, c, lambda_or_default(lambda, n)?)?;
            let pos = s.positives(&x1, &x2, trials, seed)?;
            println!("n,eps,hamming,trials,positives");
            println!("{n},{eps},{},{trials},{pos}", hamming(&x1, &x2));
        }
        Command::Run { net, input, rounds, seed, all } => {
            let net = load_network(&net)?;
            let clamps = ClampSpec::zip(&net, &net.inputs(), &bits_arg(&input)?)?;
            let trace = Simulator::new(&net).run(&clamps, rounds, seed);
            let shown: Vec<_> = if all {
                net.neurons().iter().map(|n| n.id).collect()
            } else {
                net.outputs()
            };
            println!("round,fired");
            for s in trace.states() {
                println!("{},{}", s.round, format_bits(&s.pattern(&shown)));
            }
        }
        Command::Unroll { net, t, out } => {
            let ff = unroll(&load_network(&net)?, t)?;
            emit(&feedforward_to_json(&ff), out.as_deref())?;
        }
        Command::Derandomize { net, seed, out } => {
            let text = fs::read_to_string(&net).with_context(|| format!("reading {}", net.display()))?;
            let tc = sample_threshold_circuit(&feedforward_from_json(&text)?, seed);
            emit(&circuit_to_json(&tc), out.as_deref())?;
        }
        Command::Equiv { net, input, t, trials, seed } => {
            let net = load_network(&net)?;
            let r = distribution_equivalence(&net, &bits_arg(&input)?, t, trials, seed)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            return Ok(r.within_threshold);
        }
        Command::Vc(VcCommand::Count { arch, samples }) => {
            let arch: VarThresholdArchitecture = read_json(&arch)?;
            let samples: SampleSet = read_json(&samples)?;
            let c = count_dichotomies(&arch, &samples)?;
            let bound = baum_product_bound(&c.per_gate);
            let out = json!({
                "count": c.count.to_string(),
                "per_gate": c.per_gate,
                "product_bound": bound.to_string(),
                "within_bound": BigUint::from(c.count) <= bound,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Vc(VcCommand::Enumerate { arch, max_z }) => {
            let arch: VarThresholdArchitecture = read_json(&arch)?;
            let vc = vc_by_enumeration(&arch, max_z)?;
            let out = json!({ "vc_lower": vc, "max_z": max_z, "upper": circuit_vc_upper(arch.m())? });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Vc(VcCommand::Bounds { m, class_log2, n }) => {
            let class = BigUint::from(1u8) << class_log2;
            let out = json!({
                "m": m,
                "circuit_vc_upper": circuit_vc_upper(m)?,
                "class_log2": log2_big(&class),
                "n": n,
                "sauer_lower": sauer_lower(&class, n)?,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Experiment(args) => {
            let mut cfg = match &args.config {
                Some(p) => read_json::<ExperimentConfig>(p)?,
                None => {
                    let kind = args.kind.expect("clap enforces --kind");
                    let mut cfg = ExperimentConfig::new(kind, args.n, args.trials, args.seed);
                    if let Some(e) = args.eps {
                        cfg.eps = e;
                    }
                    if let Some(c) = args.c {
                        cfg.c = c;
                    }
                    cfg.lambda = args.lambda.clone();
                    cfg.cases = args.cases;
                    cfg.min_rate = args.min_rate;
                    cfg
                }
            };
            if args.output.is_some() {
                cfg.output = args.output.clone();
            }
            let report = run_experiment(&cfg)?;
            let out = json!({
                "status": if report.summary.passed { "pass" } else { "fail" },
                "kind": report.kind,
                "summary": report.summary,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            return Ok(report.summary.passed);
        }
    }
    Ok(true)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("NEURORAM_THREADS") {
        let n: usize = v.parse().with_context(|| format!("NEURORAM_THREADS={v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|_| execute(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let msg = json!({ "status": "error", "message": format!("{e:#}") });
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
