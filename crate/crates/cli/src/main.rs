use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use negmodal::calculus::{check_derivation, prove_with_budget, CutPolicy, ProveError, DEFAULT_BUDGET};
use negmodal::corpus::{parse_corpus, run_corpus, BUILTIN_CORPUS};
use negmodal::definability::{certify_definability, certify_nondefinability, Fragment};
use negmodal::kripke::{countermodel_search, FrameClass, Model};
use negmodal::matrix::{fde_countervaluation, truth_table};
use negmodal::parser::parse_sequent;
use negmodal::quasi::{refines, QuasiModel};
use negmodal::syntax::{Formula, Logic, Sequent};

/// Proof search, models and certification for modal logics with
/// negative modalities.
///
/// Exit status: 0 affirmative, 1 negative, 2 usage or input error,
/// 3 resource limit reached.
#[derive(Parser)]
#[command(name = "negmodal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogicArg {
    Pk,
    Pkd,
    Pkt,
    Pkf,
    Pkb,
}

impl From<LogicArg> for Logic {
    fn from(l: LogicArg) -> Logic {
        match l {
            LogicArg::Pk => Logic::PK,
            LogicArg::Pkd => Logic::PKD,
            LogicArg::Pkt => Logic::PKT,
            LogicArg::Pkf => Logic::PKF,
            LogicArg::Pkb => Logic::PKB,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CutArg {
    No,
    Hyps,
    Analytic,
    Full,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Emit {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a derivation.
    Prove {
        #[arg(long, value_enum)]
        logic: LogicArg,
        #[arg(long)]
        sequent: String,
        /// File of hypothesis sequents, one per line.
        #[arg(long)]
        hyp: Option<PathBuf>,
        /// Defaults to analytic cut for pkb, cut on hypotheses when
        /// hypotheses are given, and no cut otherwise.
        #[arg(long, value_enum)]
        cut: Option<CutArg>,
        #[arg(long, value_enum, default_value = "text")]
        emit: Emit,
        /// Maximum number of goals to expand.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Evaluate a sequent in a model file.
    CheckModel {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        sequent: String,
        /// Only this world; every world by default.
        #[arg(long)]
        world: Option<usize>,
    },
    /// Search small models of the logic's frame class for a refutation.
    Countermodel {
        #[arg(long, value_enum)]
        logic: LogicArg,
        #[arg(long)]
        sequent: String,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        /// Write the model here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the instance of a quasi model file.
    Instance {
        #[arg(long)]
        quasi: PathBuf,
        /// Build the functional instance instead.
        #[arg(long)]
        functional: bool,
    },
    /// Four-valued matrix validity of an im-free sequent.
    Fde {
        #[arg(long)]
        sequent: String,
        /// Also print the truth table of the sequent's formulas.
        #[arg(long)]
        table: bool,
    },
    /// Certify definability or non-definability of classical negation.
    Definability {
        /// E.g. pkd, pkt\{un,oun}, pkf-oim.
        #[arg(long)]
        fragment: String,
        /// Formula size bound for non-definable fragments.
        #[arg(long, conflicts_with = "max_worlds")]
        max_size: Option<usize>,
        /// Model size bound for definable fragments.
        #[arg(long)]
        max_worlds: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Check every line of a corpus file against its expected verdict.
    Corpus {
        /// The built-in corpus when omitted.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// List the frame classes a model file's frame belongs to.
    Props {
        #[arg(long)]
        frame: PathBuf,
    },
}

/// A run that ends before producing its result.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

fn negative(message: impl std::fmt::Display) -> Failure {
    Failure { code: 1, message: message.to_string() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn sequent(text: &str) -> Result<Sequent, Failure> {
    parse_sequent(text).map_err(|e| usage(format!("`{text}`: {e}")))
}

fn in_language(logic: Logic, s: &Sequent) -> Result<(), Failure> {
    match s.formulas().find(|f| f.has_im()) {
        Some(f) if logic == Logic::PKF => Err(usage(format!("`{f}` uses im, which PKF does not have"))),
        _ => Ok(()),
    }
}

fn model_file(path: &Path) -> Result<Model, Failure> {
    Model::from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn hypotheses(path: &Path) -> Result<Vec<Sequent>, Failure> {
    read(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(sequent)
        .collect()
}

fn run(cli: Cli, out: &mut impl Write) -> Result<u8, Failure> {
    let mut say = |line: String| {
        let _ = writeln!(out, "{line}");
    };
    match cli.command {
        Command::Prove { logic, sequent: text, hyp, cut, emit, budget } => {
            let logic = Logic::from(logic);
            let goal = sequent(&text)?;
            let hyps = match &hyp {
                Some(path) => hypotheses(path)?,
                None => Vec::new(),
            };
            for s in std::iter::once(&goal).chain(&hyps) {
                in_language(logic, s)?;
            }
            let policy = match cut {
                Some(CutArg::No) => CutPolicy::NoCut,
                Some(CutArg::Hyps) => CutPolicy::CutOnHypotheses,
                Some(CutArg::Analytic) => CutPolicy::AnalyticCut,
                Some(CutArg::Full) => CutPolicy::FullCut,
                None => CutPolicy::default_for(logic, !hyps.is_empty()),
            };
            match prove_with_budget(logic, &goal, &hyps, policy, budget) {
                Ok((Some(d), _)) => {
                    if let Err(errors) = check_derivation(logic, &d, &hyps, policy) {
                        return Err(usage(format!("internal error, derivation rejected: {}", errors[0])));
                    }
                    say(match emit {
                        Emit::Text => d.to_text().trim_end().to_string(),
                        Emit::Json => d.to_json(),
                    });
                    Ok(0)
                }
                Ok((None, _)) => {
                    say("unprovable".into());
                    Ok(1)
                }
                Err(ProveError::Resource(n)) => {
                    say("resource".into());
                    Err(Failure { code: 3, message: format!("search budget of {n} expanded goals exhausted") })
                }
                Err(e) => Err(usage(e)),
            }
        }

        Command::CheckModel { model, sequent: text, world } => {
            let m = model_file(&model)?;
            let s = sequent(&text)?;
            let worlds: Vec<usize> = match world {
                Some(w) if w >= m.world_count() => {
                    return Err(usage(format!("world {w} out of range for {} worlds", m.world_count())))
                }
                Some(w) => vec![w],
                None => (0..m.world_count()).collect(),
            };
            let mut all = true;
            for w in worlds {
                let holds = m.holds(w, &s).map_err(usage)?;
                all &= holds;
                say(format!("{w}\t{}", if holds { "holds" } else { "fails" }));
            }
            Ok(if all { 0 } else { 1 })
        }

        Command::Countermodel { logic, sequent: text, max_worlds, out: path } => {
            let logic = Logic::from(logic);
            let s = sequent(&text)?;
            in_language(logic, &s)?;
            if !(1..=8).contains(&max_worlds) {
                return Err(usage("--max-worlds must be between 1 and 8"));
            }
            match countermodel_search(&s, FrameClass::of(logic), max_worlds) {
                Some(c) => {
                    let json = c.model.to_json();
                    match path {
                        Some(p) => fs::write(&p, format!("{json}\n")).map_err(|e| usage(format!("{}: {e}", p.display())))?,
                        None => say(json),
                    }
                    eprintln!("fails at world {} of {}", c.world, c.model.world_count());
                    Ok(0)
                }
                None => {
                    say(format!("none ≤ {max_worlds}"));
                    Ok(1)
                }
            }
        }

        Command::Instance { quasi, functional } => {
            let q = QuasiModel::from_json(&read(&quasi)?).map_err(|e| usage(format!("{}: {e}", quasi.display())))?;
            let logic = if functional { Logic::PKF } else { Logic::PK };
            let violations = q.check_conditions(logic).map_err(usage)?;
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                return Err(negative(format!("{} violated condition(s)", violations.len())));
            }
            let m = if functional { q.functional_instance() } else { q.instance() }.map_err(negative)?;
            if !refines(&m, &q) || (functional && !m.frame.check(FrameClass::Functional)) {
                return Err(negative("internal error: the instance does not refine the quasi model"));
            }
            say(m.to_json());
            Ok(0)
        }

        Command::Fde { sequent: text, table } => {
            let s = sequent(&text)?;
            let cv = fde_countervaluation(&s).map_err(usage)?;
            match &cv {
                None => say("valid".into()),
                Some(a) => {
                    let row: Vec<String> = a.iter().map(|(v, x)| format!("{v}={x}")).collect();
                    say(format!("invalid: {}", row.join(" ")));
                }
            }
            if table {
                let fs: BTreeSet<Formula> = s.formulas().filter(|f| !matches!(f, Formula::Var(_))).cloned().collect();
                let fs: Vec<Formula> = fs.into_iter().collect();
                say(truth_table(&fs).map_err(usage)?.to_string().trim_end().to_string());
            }
            Ok(if cv.is_none() { 0 } else { 1 })
        }

        Command::Definability { fragment, max_size, max_worlds, json } => {
            let frag: Fragment = fragment.parse().map_err(usage)?;
            let definable = frag.is_definable().map_err(usage)?;
            let (text, value, passed) = if definable {
                if max_size.is_some() {
                    return Err(usage(format!("{frag} is definable; use --max-worlds")));
                }
                let n = max_worlds.unwrap_or(3);
                if !(1..=4).contains(&n) {
                    return Err(usage("--max-worlds must be between 1 and 4"));
                }
                let r = certify_definability(&frag, n).map_err(usage)?;
                (r.to_string(), r.to_json(), r.passed())
            } else {
                if max_worlds.is_some() {
                    return Err(usage(format!("{frag} is not definable; use --max-size")));
                }
                let r = certify_nondefinability(&frag, max_size.unwrap_or(7)).map_err(usage)?;
                (r.to_string(), r.to_json(), r.passed())
            };
            say(if json { value.to_string() } else { text.trim_end().to_string() });
            Ok(if passed { 0 } else { 1 })
        }

        Command::Corpus { file, budget } => {
            let text = match &file {
                Some(p) => read(p)?,
                None => BUILTIN_CORPUS.to_string(),
            };
            let entries = parse_corpus(&text).map_err(usage)?;
            let verdicts = run_corpus(&entries, budget);
            let mut mismatches = 0;
            for v in &verdicts {
                say(v.to_string());
                if !v.matches() {
                    mismatches += 1;
                }
            }
            say(format!("{} lines, {mismatches} mismatches", verdicts.len()));
            Ok(if mismatches == 0 { 0 } else { 1 })
        }

        Command::Props { frame } => {
            let m = model_file(&frame)?;
            for class in FrameClass::ALL {
                say(format!("{}\t{}", class.name(), if m.frame.check(class) { "yes" } else { "no" }));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let _ = out.flush();
            eprintln!("negmodal: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
