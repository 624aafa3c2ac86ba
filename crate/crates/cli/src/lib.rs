//! The `popmatch` command line. [`run`] parses arguments, executes one
//! subcommand, writes JSON documents to stdout (or `--out`) and a short
//! summary to stderr, and returns the process exit code.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};
use popmatch::colorful::{
    colorful_instance_document, colorful_matching_document, ColorfulMatching,
};
use popmatch::document::{
    instance_to_json, matching_document, parse_instance, parse_matching, to_json, MatchingDocument,
};
use popmatch::solver::{enumeration_limit_from_env, solve_report_document};
use popmatch::{
    build_colorful_many, build_colorful_one, build_subgraph, clone_instance, deferred_acceptance,
    delta, generate_instance, is_popular_perfect, lift_to_stable, realize, solve_min_cost,
    visit_perfect_matchings, Error, GeneratorConfig, Instance, Matching, PerfectMatching, Side,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
/// `verify` found the matching not popular, or `lift` found no stable coloring.
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;
pub const EXIT_LIMIT: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "popmatch",
    version,
    about = "Popular perfect matchings in many-to-many preference instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instance document and report its size and feasibility.
    Validate { file: PathBuf },
    /// Agent-proposing stable matching of the instance or of its colorful version.
    Stable {
        file: PathBuf,
        #[arg(long)]
        colorful: bool,
    },
    /// Decide whether a perfect matching is popular among perfect matchings.
    Verify {
        file: PathBuf,
        #[arg(long)]
        matching: PathBuf,
    },
    /// Head-to-head vote between two matchings.
    Compare {
        file: PathBuf,
        #[arg(long = "matching", num_args = 1, required = true)]
        matchings: Vec<PathBuf>,
    },
    /// Minimum-cost popular perfect matching.
    Solve {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every perfect matching.
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        popular_only: bool,
    },
    /// Write the colorful many-to-many instance, or the colorful one-to-one
    /// instance built around a perfect matching.
    #[command(group(ArgGroup::new("target").required(true).args(["gstar", "gm"])))]
    Reduce {
        file: PathBuf,
        #[arg(long)]
        gstar: bool,
        #[arg(long, requires = "matching")]
        gm: bool,
        #[arg(long)]
        matching: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find a coloring of a perfect matching that is stable in the colorful instance.
    Lift {
        file: PathBuf,
        #[arg(long)]
        matching: PathBuf,
    },
    /// Generate a random instance that admits a perfect matching.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        jobs: usize,
        #[arg(long)]
        max_cap: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::Core(err)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(err) => err.fmt(f),
            Failure::Io(msg) => f.write_str(msg),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => EXIT_INVALID,
            Failure::Core(err) => match err {
                Error::Infeasible(_) | Error::GenerationFailed(_) => EXIT_INFEASIBLE,
                Error::Invariant(_) => EXIT_INTERNAL,
                Error::EnumerationLimit(_) => EXIT_LIMIT,
                _ => EXIT_INVALID,
            },
        }
    }
}

type Outcome = Result<i32, Failure>;

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, text: &str, out: Option<&Path>) -> Result<(), Failure> {
        match out {
            Some(path) => std::fs::write(path, text)
                .map_err(|err| Failure::Io(format!("cannot write {}: {err}", path.display()))),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|err| Failure::Io(format!("cannot write output: {err}"))),
        }
    }

    fn note(&mut self, msg: impl fmt::Display) {
        let _ = writeln!(self.stderr, "{msg}");
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|err| Failure::Io(format!("cannot read {}: {err}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Ok(parse_instance(&read(path)?)?)
}

fn load_matching(inst: &Instance, path: &Path) -> Result<Matching, Failure> {
    Ok(parse_matching(inst, &read(path)?)?)
}

fn load_perfect(inst: &Instance, path: &Path) -> Result<PerfectMatching, Failure> {
    Ok(PerfectMatching::new(inst, load_matching(inst, path)?)?)
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = err.render().to_string();
            let _ = if err.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { stdout, stderr };
    match execute(cli.command, &mut io) {
        Ok(code) => code,
        Err(failure) => {
            io.note(format!("error: {failure}"));
            failure.exit_code()
        }
    }
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    agents: usize,
    jobs: usize,
    edges: usize,
    agent_capacity: usize,
    job_capacity: usize,
    perfect_matchable: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    popular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessReport>,
}

#[derive(Serialize)]
struct WitnessReport {
    matching: MatchingDocument,
    delta: i64,
    cycle: Vec<CycleEdge>,
}

#[derive(Serialize)]
struct CycleEdge {
    agent: String,
    job: String,
}

#[derive(Serialize)]
struct CompareReport {
    delta: i64,
    per_vertex: Vec<VertexVote>,
}

#[derive(Serialize)]
struct VertexVote {
    side: &'static str,
    name: String,
    vote: i64,
}

#[derive(Serialize)]
struct EnumerateReport {
    count: u64,
    popular: Option<u64>,
    matchings: Vec<MatchingDocument>,
}

fn execute(command: Command, io: &mut Io<'_>) -> Outcome {
    match command {
        Command::Validate { file } => {
            let inst = load_instance(&file)?;
            let report = ValidateReport {
                valid: true,
                agents: inst.agents().len(),
                jobs: inst.jobs().len(),
                edges: inst.edges().len(),
                agent_capacity: inst.total_capacity(Side::Agent),
                job_capacity: inst.total_capacity(Side::Job),
                perfect_matchable: popmatch::flow::admits_perfect_matching(&inst),
            };
            io.emit(&to_json(&report), None)?;
            io.note(format!(
                "valid: {} agents, {} jobs, {} edges, perfect matching {}",
                report.agents,
                report.jobs,
                report.edges,
                if report.perfect_matchable {
                    "exists"
                } else {
                    "does not exist"
                }
            ));
            Ok(EXIT_OK)
        }
        Command::Stable { file, colorful } => {
            let inst = load_instance(&file)?;
            if colorful {
                let gstar = build_colorful_many(&inst);
                let m = ColorfulMatching::from_system(&gstar, &deferred_acceptance(&gstar));
                io.emit(&to_json(&colorful_matching_document(&gstar, &m)), None)?;
                io.note(format!(
                    "stable matching of the colorful instance: {} edges",
                    m.len()
                ));
            } else {
                let m = Matching::new(&inst, deferred_acceptance(&inst).edges())?;
                io.emit(&to_json(&matching_document(&inst, &m)), None)?;
                io.note(format!("stable matching: {} edges", m.len()));
            }
            Ok(EXIT_OK)
        }
        Command::Verify { file, matching } => {
            let inst = load_instance(&file)?;
            let m = load_perfect(&inst, &matching)?;
            let verdict = is_popular_perfect(&inst, &m)?;
            let witness = verdict.witness.map(|w| WitnessReport {
                matching: matching_document(&inst, &w.matching),
                delta: w.delta,
                cycle: w
                    .cycle
                    .into_iter()
                    .map(|(agent, job)| CycleEdge { agent, job })
                    .collect(),
            });
            let report = VerifyReport {
                popular: verdict.popular,
                witness,
            };
            io.emit(&to_json(&report), None)?;
            if report.popular {
                io.note("popular: no positive alternating cycle");
                Ok(EXIT_OK)
            } else {
                io.note("not popular: the witness matching wins the vote");
                Ok(EXIT_NEGATIVE)
            }
        }
        Command::Compare { file, matchings } => {
            let [first, second] = matchings.as_slice() else {
                return Err(Failure::Core(Error::InvalidArgument(format!(
                    "compare takes exactly two --matching files, got {}",
                    matchings.len()
                ))));
            };
            let inst = load_instance(&file)?;
            let m = load_matching(&inst, first)?;
            let n = load_matching(&inst, second)?;
            let d = delta(&inst, &m, &n)?;
            let report = CompareReport {
                delta: d.value,
                per_vertex: d
                    .per_vertex
                    .iter()
                    .map(|&(v, vote)| VertexVote {
                        side: v.side().as_str(),
                        name: inst.name(v).to_string(),
                        vote,
                    })
                    .collect(),
            };
            io.emit(&to_json(&report), None)?;
            io.note(format!("delta = {}", d.value));
            Ok(EXIT_OK)
        }
        Command::Solve { file, out } => {
            let inst = load_instance(&file)?;
            let report = solve_min_cost(&inst)?;
            io.emit(
                &to_json(&solve_report_document(&inst, &report)),
                out.as_deref(),
            )?;
            io.note(format!(
                "cost {} over {} perfect matchings ({} popular)",
                report.cost, report.enumerated, report.popular_count
            ));
            Ok(EXIT_OK)
        }
        Command::Enumerate { file, popular_only } => {
            let inst = load_instance(&file)?;
            let limit = enumeration_limit_from_env()?;
            let mut matchings = Vec::new();
            let mut popular = 0;
            let count = visit_perfect_matchings(&inst, limit, |m| {
                if popular_only {
                    if !is_popular_perfect(&inst, &m)?.popular {
                        return Ok(());
                    }
                    popular += 1;
                }
                matchings.push(matching_document(&inst, &m));
                Ok(())
            })?;
            let report = EnumerateReport {
                count,
                popular: popular_only.then_some(popular),
                matchings,
            };
            io.emit(&to_json(&report), None)?;
            match report.popular {
                Some(p) => io.note(format!("{count} perfect matchings, {p} popular")),
                None => io.note(format!("{count} perfect matchings")),
            }
            Ok(EXIT_OK)
        }
        Command::Reduce {
            file,
            gstar,
            matching,
            out,
            ..
        } => {
            let inst = load_instance(&file)?;
            let doc = if gstar {
                colorful_instance_document(&build_colorful_many(&inst))
            } else {
                let path = matching.expect("clap requires --matching with --gm");
                let m = load_perfect(&inst, &path)?;
                let cloned = clone_instance(&inst);
                let sub = build_subgraph(&inst, &cloned, &realize(&inst, &cloned, &m)?);
                let mut doc = colorful_instance_document(&build_colorful_one(&sub));
                doc.realization = Some(matching_document(sub.instance(), sub.realization()));
                doc
            };
            io.emit(&to_json(&doc), Some(&out))?;
            let edges: usize = doc.agents.iter().map(|a| a.preferences.len()).sum();
            io.note(format!("{} colors, {edges} colored edges", doc.colors));
            Ok(EXIT_OK)
        }
        Command::Lift { file, matching } => {
            let inst = load_instance(&file)?;
            let m = load_perfect(&inst, &matching)?;
            match lift_to_stable(&inst, &m)? {
                Some(coloring) => {
                    let gstar = build_colorful_many(&inst);
                    io.emit(
                        &to_json(&colorful_matching_document(&gstar, &coloring)),
                        None,
                    )?;
                    io.note("stable coloring found");
                    Ok(EXIT_OK)
                }
                None => {
                    io.note("no stable coloring exists: the matching is not popular");
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Gen {
            seed,
            agents,
            jobs,
            max_cap,
            density,
            out,
        } => {
            let inst =
                generate_instance(&GeneratorConfig::new(seed, agents, jobs, max_cap, density))?;
            io.emit(&instance_to_json(&inst), Some(&out))?;
            io.note(format!(
                "generated {} agents, {} jobs, {} edges",
                inst.agents().len(),
                inst.jobs().len(),
                inst.edges().len()
            ));
            Ok(EXIT_OK)
        }
    }
}
