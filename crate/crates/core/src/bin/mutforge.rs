use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mutforge::convert::convert;
use mutforge::import::{cmd_import, parse_records};
use mutforge::project::{Project, State};
use mutforge::repr::{OracleKind, Representation, Settings};
use mutforge::runner::{cmd_test, RunOptions};
use mutforge::timing::{summarize, TimingFile};
use mutforge::{Error, Result, SyntaxProfile};

#[derive(Parser)]
#[command(name = "mutforge", version, about = "Manage hand-written mutants")]
struct Cli {
    /// Project root.
    #[arg(long, global = true, default_value = ".")]
    root: PathBuf,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Record the project's representation in `.mutforge/state`.
    Init {
        /// comment, preprocessor, patch, matchreplace or inast.
        #[arg(long, default_value = "comment")]
        repr: Representation,
        /// Comment syntax for every file (e.g. `haskell`); default by extension.
        #[arg(long)]
        profile: Option<String>,
        /// Parser for in-AST projects: `rust` (default) or `mini`.
        #[arg(long)]
        oracle: Option<OracleKind>,
    },
    /// List every mutation block with its mutants, tags and location.
    List {
        /// Print JSON instead of a listing.
        #[arg(long)]
        json: bool,
    },
    /// Activate a mutant, deactivating others of its block.
    Set { mutant: String },
    /// Deactivate a mutant.
    Unset { mutant: String },
    /// Deactivate every mutant.
    Reset,
    /// Run a command for every mutant set of an expression.
    Test {
        /// Mutation expression, e.g. `insert + *easy`.
        expression: String,
        /// Exit 1 when some mutant set's command succeeds.
        #[arg(long)]
        expect_fail: bool,
        /// Report path; defaults to `.mutforge/last-run.json`.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Command to run; `{defines}` and `{active}` are substituted.
        #[arg(last = true, required = true)]
        command: Vec<String>,
    },
    /// Rewrite the project in another representation.
    Convert {
        /// Target representation.
        #[arg(long)]
        to: Representation,
        /// Parser for an in-AST target: `rust` (default) or `mini`.
        #[arg(long)]
        oracle: Option<OracleKind>,
    },
    /// Import mutant records as match-and-replace blocks.
    Import {
        /// JSON array of mutant records.
        records: PathBuf,
    },
    /// Predict campaign costs from a timing file (or the built-in table).
    Model {
        /// TOML file of `[[workload]]` tables.
        file: Option<PathBuf>,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        context: path.display().to_string(),
        source,
    })
}

fn run(cli: Cli) -> Result<u8> {
    let root = &cli.root;
    match cli.command {
        Cmd::Init { repr, profile, oracle } => {
            let mut state = State::new(repr);
            state.oracle = oracle;
            state.profile = match profile {
                Some(p) => Some(SyntaxProfile::by_name(&p).ok_or_else(|| Error::Domain(format!("unknown profile `{p}`")))?),
                None => None,
            };
            let project = Project::init(root, state)?;
            println!("{} project with {} block(s)", project.representation(), project.list()?.len());
        }
        Cmd::List { json } => {
            let entries = Project::open(root)?.list()?;
            if json {
                println!("{}", serde_json::to_string_pretty(&entries).expect("entries serialize"));
                return Ok(0);
            }
            for e in &entries {
                let tags = if e.tags.is_empty() { String::new() } else { format!(" [{}]", e.tags.join(", ")) };
                println!("{}{} {}:{}", e.name, tags, e.file, e.line);
                for v in &e.variants {
                    let mark = if e.active.as_deref() == Some(v.name.as_str()) { "*" } else { " " };
                    let tags = if v.tags.is_empty() { String::new() } else { format!(" [{}]", v.tags.join(", ")) };
                    println!("  {mark} {}{}", v.name, tags);
                }
            }
        }
        Cmd::Set { mutant } => Project::open(root)?.set_active(&mutant)?,
        Cmd::Unset { mutant } => Project::open(root)?.unset_active(&mutant)?,
        Cmd::Reset => Project::open(root)?.reset()?,
        Cmd::Test { expression, expect_fail, report, command } => {
            let mut project = Project::open(root)?;
            let options = RunOptions { report, quiet: false };
            let report = cmd_test(&mut project, &expression, &command, &options)?;
            print!("{}", report.table());
            return Ok(report.exit_code(expect_fail) as u8);
        }
        Cmd::Convert { to, oracle } => {
            let mut project = Project::open(root)?;
            convert(&mut project, to, Settings { profile: None, oracle })?;
        }
        Cmd::Import { records } => {
            let records = parse_records(&read(&records)?)?;
            let project = cmd_import(&records, root)?;
            println!("{} block(s)", project.list()?.len());
        }
        Cmd::Model { file, json } => {
            let timing = match file {
                Some(f) => TimingFile::parse(&read(&f)?)?,
                None => TimingFile::reference(),
            };
            let summary = summarize(&timing)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            } else {
                print!("{}", summary.table());
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
