//! `nornet`: generate, reduce, query and evaluate leaky noisy-OR networks.
//!
//! Exit codes: 0 on success, 1 on invalid input or a failed run, 2 on a usage
//! error. Every failure ends with one stderr line `error:<class>: <detail>`.

use std::fmt::Display;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use nornet::analysis::{
    fan_stats, ips_path_stats, predict_bias, ratio_r1_exact, ratio_r2, StarConfig,
};
use nornet::experiment::{
    generate_cases, generate_network, run_experiment_with, ExperimentConfig, GeneratorConfig,
};
use nornet::format::{
    fmt_sig, parse_network, parse_network_unchecked, serialize_network, write_cases,
    write_provenance, write_report,
};
use nornet::inference::{conjunction_posterior, posterior};
use nornet::{level_reduce, Assignment, Network, NodeId};

#[derive(Parser)]
#[command(name = "nornet", version, about = "Leaky noisy-OR network toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a network file and list every violation.
    Validate { network: PathBuf },
    /// Generate a seeded synthetic network.
    Gen(Box<GenArgs>),
    /// Eliminate IPS nodes, producing a two-level network.
    Reduce {
        network: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Write per-path provenance of every reduced edge as CSV.
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Exact disease posteriors given finding evidence.
    Infer {
        network: PathBuf,
        /// Comma-separated `id=0|1` pairs.
        #[arg(long, default_value = "")]
        evidence: String,
        /// Comma-separated ids whose joint presence to query.
        #[arg(long)]
        conjunction: Option<String>,
    },
    /// Sample phased test cases to CSV.
    Sample {
        network: PathBuf,
        #[arg(long)]
        cases: usize,
        #[arg(long)]
        seed: u64,
        /// Redraw cases with no present disease.
        #[arg(long)]
        require_positive: bool,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Fan statistics, bias labels and closed-form ratios.
    Analyze { network: PathBuf },
    /// Compare the network with its reduction over sampled cases.
    Experiment {
        network: PathBuf,
        #[arg(long)]
        cases: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    diseases: usize,
    #[arg(long)]
    ips: usize,
    #[arg(long)]
    findings: usize,
    #[arg(long, value_parser = range::<usize>)]
    fan_in: Option<RangeInclusive<usize>>,
    #[arg(long, value_parser = range::<usize>)]
    fan_out: Option<RangeInclusive<usize>>,
    #[arg(long, value_parser = range::<f64>)]
    eta: Option<RangeInclusive<f64>>,
    /// Finding leak range.
    #[arg(long, value_parser = range::<f64>)]
    leak: Option<RangeInclusive<f64>>,
    /// IPS leak range; defaults to --leak.
    #[arg(long, value_parser = range::<f64>)]
    ips_leak: Option<RangeInclusive<f64>>,
    #[arg(long, value_parser = range::<f64>)]
    prior: Option<RangeInclusive<f64>>,
    /// Chance per fan-in slot of an arc from an earlier IPS node.
    #[arg(long)]
    ips_chain: Option<f64>,
    /// Five comma-separated relative weights for phases 1..5.
    #[arg(long, value_parser = phase_weights)]
    phase_weights: Option<[f64; 5]>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    seed: u64,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

/// `a..b`, or a single value meaning `a..a`.
fn range<T: FromStr + PartialOrd + Copy>(s: &str) -> Result<RangeInclusive<T>, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<T>()
            .map_err(|_| format!("bad bound '{t}'"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range '{s}'"));
    }
    Ok(lo..=hi)
}

fn phase_weights(s: &str) -> Result<[f64; 5], String> {
    let w: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad weight '{t}'"))
        })
        .collect::<Result<_, _>>()?;
    w.try_into()
        .map_err(|w: Vec<f64>| format!("need 5 weights, got {}", w.len()))
}

struct Failure {
    class: &'static str,
    detail: String,
}

fn fail(class: &'static str, detail: impl Display) -> Failure {
    Failure {
        class,
        detail: detail.to_string(),
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail("io", format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Network, Failure> {
    parse_network(&read(path)?).map_err(|e| {
        let class = if e.is_validation() {
            "invalid"
        } else {
            "parse"
        };
        fail(class, format!("{}: {e}", path.display()))
    })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, Failure> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| fail("io", format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| fail("io", format!("{}: {e}", path.display())))
}

fn csv_out<E: Display>(
    path: &Path,
    f: impl FnOnce(BufWriter<fs::File>) -> Result<(), E>,
) -> Outcome {
    f(create(path)?).map_err(|e| fail("io", format!("{}: {e}", path.display())))
}

fn parse_evidence(text: &str) -> Result<Assignment, Failure> {
    let mut a = Assignment::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (id, v) = item
            .split_once('=')
            .ok_or_else(|| fail("usage", format!("evidence item '{item}' is not id=0|1")))?;
        let v = match v {
            "1" => true,
            "0" => false,
            other => {
                return Err(fail(
                    "usage",
                    format!("evidence value '{other}' for {id} is not 0 or 1"),
                ))
            }
        };
        if a.insert(id, v).is_some() {
            return Err(fail("usage", format!("evidence repeats {id}")));
        }
    }
    Ok(a)
}

fn cmd_validate(path: &Path, out: &mut impl Write) -> Outcome {
    let raw = parse_network_unchecked(&read(path)?)
        .map_err(|e| fail("parse", format!("{}: {e}", path.display())))?;
    let diagnostics = raw.diagnostics();
    if diagnostics.is_empty() {
        writeln!(out, "ok").map_err(|e| fail("io", e))?;
        return Ok(());
    }
    for d in &diagnostics {
        writeln!(out, "{d}").map_err(|e| fail("io", e))?;
    }
    Err(fail(
        "invalid",
        format!("{}: {} violation(s)", path.display(), diagnostics.len()),
    ))
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let base = GeneratorConfig::default();
    let cfg = GeneratorConfig {
        name: a.name.unwrap_or(base.name),
        n_diseases: a.diseases,
        n_ips: a.ips,
        n_findings: a.findings,
        fan_in: a.fan_in.unwrap_or(base.fan_in),
        fan_out: a.fan_out.unwrap_or(base.fan_out),
        ips_chain_prob: a.ips_chain.unwrap_or(base.ips_chain_prob),
        eta: a.eta.unwrap_or(base.eta),
        leak: a.leak.unwrap_or(base.leak),
        ips_leak: a.ips_leak,
        prior: a.prior.unwrap_or(base.prior),
        phase_weights: a.phase_weights.unwrap_or(base.phase_weights),
        seed: a.seed,
    };
    let net = generate_network(&cfg).map_err(|e| fail("config", e))?;
    write_text(&a.output, &serialize_network(&net))
}

fn cmd_reduce(
    path: &Path,
    output: &Path,
    provenance: Option<&Path>,
    out: &mut impl Write,
) -> Outcome {
    let net = load(path)?;
    let report = level_reduce(&net).map_err(|e| fail("reduction", e))?;
    write_text(output, &serialize_network(&report.reduced))?;
    if let Some(p) = provenance {
        csv_out(p, |w| write_provenance(w, &report))?;
    }
    writeln!(out, "param_count_original {}", report.param_count_original)
        .and_then(|_| writeln!(out, "param_count_reduced {}", report.param_count_reduced))
        .map_err(|e| fail("io", e))
}

fn cmd_infer(
    path: &Path,
    evidence: &str,
    conjunction: Option<&str>,
    out: &mut impl Write,
) -> Outcome {
    let net = load(path)?;
    let evidence = parse_evidence(evidence)?;
    let r = posterior(&net, &evidence).map_err(|e| fail("inference", e))?;
    let mut text = format!(
        "evidence_likelihood {}\n",
        fmt_sig(r.evidence_likelihood, 12)
    );
    for (id, p) in &r.posteriors {
        text.push_str(&format!("{id} {}\n", fmt_sig(*p, 12)));
    }
    if let Some(ids) = conjunction {
        let query: Vec<NodeId> = ids
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(NodeId::from)
            .collect();
        let p = conjunction_posterior(&net, &evidence, &query).map_err(|e| fail("inference", e))?;
        let joined = query
            .iter()
            .map(NodeId::as_str)
            .collect::<Vec<_>>()
            .join(",");
        text.push_str(&format!("conjunction {joined} {}\n", fmt_sig(p, 12)));
    }
    out.write_all(text.as_bytes()).map_err(|e| fail("io", e))
}

fn cmd_sample(
    path: &Path,
    cases: usize,
    seed: u64,
    require_positive: bool,
    output: &Path,
) -> Outcome {
    let net = load(path)?;
    let cases =
        generate_cases(&net, cases, seed, require_positive).map_err(|e| fail("experiment", e))?;
    csv_out(output, |w| write_cases(w, &net, &cases))
}

fn cmd_analyze(path: &Path, out: &mut impl Write) -> Outcome {
    let net = load(path)?;
    let stats = fan_stats(&net);
    let bias = predict_bias(&stats);
    let mut text = String::new();
    for (id, fan) in &stats.per_ips {
        text.push_str(&format!(
            "{id} fan_in={} fan_out={} bias={}\n",
            fan.fan_in, fan.fan_out, bias[id]
        ));
    }
    text.push_str(&format!(
        "ips={} max_fan_in={} max_fan_out={} mean_fan_in={} mean_fan_out={}\n",
        stats.per_ips.len(),
        stats.max_fan_in,
        stats.max_fan_out,
        fmt_sig(stats.mean_fan_in, 12),
        fmt_sig(stats.mean_fan_out, 12)
    ));
    if let Some(star) = StarConfig::from_network(&net) {
        if star.fan_out() == 1 {
            match ratio_r1_exact(&star) {
                Ok(r) => text.push_str(&format!("star r1={}\n", fmt_sig(r, 12))),
                Err(e) => text.push_str(&format!("star r1=undefined ({e})\n")),
            }
        }
        if star.fan_in() == 1 {
            match ratio_r2(star.p[0], &star.q, &star.rho_f) {
                Ok(r) => text.push_str(&format!(
                    "star r2_exact={} r2_approx={}\n",
                    fmt_sig(r.exact, 12),
                    fmt_sig(r.approx, 12)
                )),
                Err(e) => text.push_str(&format!("star r2=undefined ({e})\n")),
            }
        }
    }
    let paths = ips_path_stats(&net).map_err(|e| fail("reduction", e))?;
    for (id, s) in &paths {
        text.push_str(&format!(
            "{id} paths={} max_ips={} mean_ips={}\n",
            s.paths,
            s.max_ips,
            fmt_sig(s.mean_ips, 12)
        ));
    }
    out.write_all(text.as_bytes()).map_err(|e| fail("io", e))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| fmt_sig(v, 9)).unwrap_or_else(|| "-".into())
}

fn cmd_experiment(
    path: &Path,
    cases: usize,
    seed: u64,
    output: &Path,
    jobs: usize,
    out: &mut impl Write,
) -> Outcome {
    let net = load(path)?;
    let cfg = ExperimentConfig {
        jobs,
        ..ExperimentConfig::new(cases, seed)
    };
    let summary = run_experiment_with(&net, &cfg).map_err(|e| fail("experiment", e))?;
    csv_out(output, |w| write_report(w, &summary))?;
    let mut text =
        String::from("phase n mean_tp_two_level mean_tp_three_level mean_abs_diff t_stat\n");
    for p in &summary.phases {
        text.push_str(&format!(
            "{} {} {} {} {} {}\n",
            p.phase,
            p.n_pairs,
            opt(p.mean_tp_two),
            opt(p.mean_tp_three),
            fmt_sig(p.mean_abs_diff, 9),
            opt(p.t_test.map(|t| t.t))
        ));
    }
    text.push_str(&format!(
        "mean_abs_diff {}\n",
        fmt_sig(summary.mean_abs_diff, 9)
    ));
    out.write_all(text.as_bytes()).map_err(|e| fail("io", e))
}

fn run(cli: Cli) -> Outcome {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Validate { network } => cmd_validate(&network, &mut out),
        Command::Gen(a) => cmd_gen(*a),
        Command::Reduce {
            network,
            output,
            provenance,
        } => cmd_reduce(&network, &output, provenance.as_deref(), &mut out),
        Command::Infer {
            network,
            evidence,
            conjunction,
        } => cmd_infer(&network, &evidence, conjunction.as_deref(), &mut out),
        Command::Sample {
            network,
            cases,
            seed,
            require_positive,
            output,
        } => cmd_sample(&network, cases, seed, require_positive, &output),
        Command::Analyze { network } => cmd_analyze(&network, &mut out),
        Command::Experiment {
            network,
            cases,
            seed,
            output,
            jobs,
        } => cmd_experiment(&network, cases, seed, &output, jobs, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let detail = msg
                .lines()
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            eprintln!("error:usage: {}", detail.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = if f.class == "usage" { 2 } else { 1 };
            eprintln!("error:{}: {}", f.class, f.detail.replace('\n', " "));
            ExitCode::from(code)
        }
    }
}
