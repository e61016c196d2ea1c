use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use catfid_core::agent::{agent_delta, value_iteration, FiniteEnv, TabularPolicy};
use catfid_core::ctest::{generate_battery, read_answers, read_battery, score_battery, write_battery, GenerationParams};
use catfid_core::generalization::{baseline_copy_generator, CategorySuite, ConstantGenerator, FreshSampleOracle, Generator};
use catfid_core::harness::{
    self, exit_code, render_suite_report, rerender, resolve_seed, write_outputs, EvalConfig, Format, EXIT_DATA,
    EXIT_FAIL, EXIT_PASS, EXIT_USAGE,
};
use catfid_core::{verdict, Epsilon, Error, ScoringFunction};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "catfid", version, about = "Distinguisher-gap evaluation of generated samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare an original and a generated sample set.
    Eval {
        #[arg(long)]
        original: Option<PathBuf>,
        #[arg(long)]
        generated: Option<PathBuf>,
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimate the resolution floor of the configured family on one set.
    Resolution {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Sequence-continuation batteries.
    Ctest {
        #[command(subcommand)]
        command: CtestCommand,
    },
    /// Finite-environment agents.
    Agent {
        #[command(subcommand)]
        command: AgentCommand,
    },
    /// Holdout category suites.
    Suite {
        #[command(subcommand)]
        command: SuiteCommand,
    },
    /// Run the judging service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long)]
        log: PathBuf,
        /// Directory of built UI assets to serve at /ui.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
    /// Re-render a saved JSON report.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

#[derive(Subcommand)]
enum CtestCommand {
    /// Generate a battery and its answer key.
    Gen {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        count: usize,
        #[arg(long, env = "CATFID_SEED")]
        seed: Option<u64>,
        /// Battery file. The key goes next to it with a `.key.jsonl` suffix
        /// unless `--key` is given.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        key: Option<PathBuf>,
        #[arg(long)]
        alphabet: Option<u32>,
    },
    /// Score answers against a battery.
    Score {
        #[arg(long)]
        battery: PathBuf,
        #[arg(long)]
        answers: PathBuf,
        #[arg(long)]
        key: PathBuf,
    },
}

#[derive(Subcommand)]
enum AgentCommand {
    Eval {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        episodes: usize,
        #[arg(long, env = "CATFID_SEED")]
        seed: Option<u64>,
        /// Also decide pass/fail, which sets the exit status.
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

#[derive(Subcommand)]
enum SuiteCommand {
    Eval {
        #[arg(long)]
        suite: PathBuf,
        /// oracle, constant, copy or copy-noisy
        #[arg(long)]
        generator: String,
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "md")]
        format: String,
    },
}

fn relative_to(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Load a config and make the paths inside it relative to its directory.
fn load_config(path: &Path) -> Result<EvalConfig, Error> {
    let mut config = EvalConfig::load(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    for p in [
        &mut config.inputs.original,
        &mut config.inputs.generated,
        &mut config.output.json,
        &mut config.output.markdown,
    ]
    .into_iter()
    .flatten()
    {
        *p = relative_to(dir, p);
    }
    Ok(config)
}

/// Write to stdout. A closed pipe downstream is not an error.
fn emit(text: &str) -> Result<(), Error> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), Error> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn pass_code(pass: bool) -> u8 {
    (if pass { EXIT_PASS } else { EXIT_FAIL }) as u8
}

fn generator_for(name: &str, suite: &CategorySuite) -> Result<Box<dyn Generator>, Error> {
    Ok(match name {
        "oracle" => Box::new(FreshSampleOracle::new(suite.specs.clone())),
        "constant" => Box::new(ConstantGenerator::zero()),
        "copy" => Box::new(baseline_copy_generator(0.0)?),
        "copy-noisy" => Box::new(baseline_copy_generator(1.0)?),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown generator `{other}` (oracle, constant, copy, copy-noisy)"
            )))
        }
    })
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Eval {
            original,
            generated,
            config,
        } => {
            let config = load_config(&config)?;
            let missing = |what: &str| Error::Config(format!("no {what} set given on the command line or in the config"));
            let original = original
                .or_else(|| config.inputs.original.clone())
                .ok_or_else(|| missing("original"))?;
            let generated = generated
                .or_else(|| config.inputs.generated.clone())
                .ok_or_else(|| missing("generated"))?;
            let report = harness::run_eval(&config, &original, &generated)?;
            write_outputs(&report, &config.output)?;
            emit(&harness::render_report(&report, Format::Json)?)?;
            Ok(pass_code(report.verdict.pass))
        }
        Command::Resolution { set, config } => {
            let report = harness::run_resolution(&load_config(&config)?, &set)?;
            print_json(&report)?;
            Ok(EXIT_PASS as u8)
        }
        Command::Ctest { command } => match command {
            CtestCommand::Gen {
                h,
                count,
                seed,
                out,
                key,
                alphabet,
            } => {
                let mut params = GenerationParams::new(h);
                if let Some(a) = alphabet {
                    params.alphabet = a;
                }
                let items = generate_battery(&params, count, resolve_seed(seed)?)?;
                let key = key.unwrap_or_else(|| out.with_extension("key.jsonl"));
                write_battery(&items, &out, &key)?;
                eprintln!("wrote {} items to {} (key: {})", items.len(), out.display(), key.display());
                Ok(EXIT_PASS as u8)
            }
            CtestCommand::Score { battery, answers, key } => {
                let items = read_battery(&battery, &key)?;
                let score = score_battery(&items, &read_answers(&answers)?)?;
                print_json(&score)?;
                Ok(EXIT_PASS as u8)
            }
        },
        Command::Agent {
            command:
                AgentCommand::Eval {
                    env,
                    policy,
                    episodes,
                    seed,
                    epsilon,
                },
        } => {
            let env = FiniteEnv::load(&env)?;
            let policy = TabularPolicy::load(&env, &policy)?;
            let seed = resolve_seed(seed)?;
            let report = agent_delta(&env, &policy, episodes, &ScoringFunction::Mean, seed)?;
            let optimum = value_iteration(&env)?.optimal_expected_return;
            let verdict = epsilon.map(Epsilon::new).transpose()?.map(|e| verdict(&report, e, None));
            print_json(&serde_json::json!({
                "env": env.id(),
                "episodes": episodes,
                "seed": seed,
                "optimal_expected_return": optimum,
                "delta": report,
                "verdict": verdict,
            }))?;
            Ok(verdict.map_or(EXIT_PASS as u8, |v| pass_code(v.pass)))
        }
        Command::Suite {
            command: SuiteCommand::Eval {
                suite,
                generator,
                config,
            },
        } => {
            let config = load_config(&config)?;
            let loaded = CategorySuite::load(&suite)?;
            let generator = generator_for(&generator, &loaded)?;
            let report = harness::run_suite(&config, &suite, generator.as_ref())?;
            if let Some(p) = &config.output.json {
                std::fs::write(p, render_suite_report(&report, Format::Json)?).map_err(|e| Error::Io {
                    path: p.clone(),
                    source: e,
                })?;
            }
            if let Some(p) = &config.output.markdown {
                std::fs::write(p, render_suite_report(&report, Format::Markdown)?).map_err(|e| Error::Io {
                    path: p.clone(),
                    source: e,
                })?;
            }
            emit(&render_suite_report(&report, Format::Json)?)?;
            let s = &report.table.summary;
            Ok(pass_code(s.passed == s.total))
        }
        Command::Serve { addr, log, ui } => {
            let io = |e: std::io::Error| Error::Io {
                path: PathBuf::from(addr.to_string()),
                source: e,
            };
            let runtime = tokio::runtime::Runtime::new().map_err(io)?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(addr).await.map_err(io)?;
                let bound = listener.local_addr().map_err(io)?;
                eprintln!("listening on http://{bound} (log {})", log.display());
                catfid_judge::serve(listener, &log, ui.as_deref())
                    .await
                    .map_err(|e| Error::Config(e.to_string()))
            })?;
            Ok(EXIT_PASS as u8)
        }
        Command::Report {
            command: ReportCommand::Render { input, format },
        } => {
            let format: Format = format.parse()?;
            let text = std::fs::read_to_string(&input).map_err(|e| Error::Io {
                path: input.clone(),
                source: e,
            })?;
            emit(&rerender(&text, format)?)?;
            Ok(EXIT_PASS as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            debug_assert!(code == EXIT_USAGE || code == EXIT_DATA);
            ExitCode::from(code as u8)
        }
    }
}
