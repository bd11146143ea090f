mod settings;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use united::abduce::judge_conjectures;
use united::deduct::Deducer;
use united::eval::find_counterexample;
use united::induct::candidate_applications;
use united::kernel::{Sequent, Sym, Theory};
use united::mlfeat::{corpus_paths, fit_weights, parse_corpus, CorpusExample, FeatureSet, Ranker, Weights};
use united::psl::{run_strategy, Strategy};
use united::syntax::{parse_scripts, parse_strategy, parse_theory, print_formula, print_script};
use united::unite::{check_script, search, SearchResult};

use settings::Settings;

/// Exit statuses, ordered by reporting priority.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Status {
    Ok,
    GaveUp,
    Failed,
    Usage,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::GaveUp => 2,
            Status::Usage => 3,
        }
    }

    fn rank(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::GaveUp => 1,
            Status::Failed => 2,
            Status::Usage => 3,
        }
    }

    fn worst(self, other: Status) -> Status {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }
}

#[derive(Parser)]
#[command(name = "united", version, about = "Automatic inductive theorem prover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prove goals of a theory file.
    Prove(ProveArgs),
    /// Replay proof scripts against a theory.
    Check(CheckArgs),
    /// Search for a counterexample to a goal.
    Refute(RefuteArgs),
    /// Rank the induction candidates of a goal.
    Rank(RankArgs),
    /// List conjectures for a goal with their verdicts.
    Conjecture(GoalArgs),
    /// Fit feature weights from a corpus of chosen induction arguments.
    Fit(FitArgs),
}

#[derive(Args, Clone, Default)]
struct SettingArgs {
    /// File of `key = value` settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting, e.g. `--set max_conjectures=0`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Maximum node expansions per goal.
    #[arg(long)]
    nodes: Option<usize>,
    /// Wall-clock limit per goal in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct RankerArgs {
    /// Feature assertion file.
    #[arg(long)]
    features: Option<PathBuf>,
    /// Weights aligned with the feature file.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
struct ProveArgs {
    file: PathBuf,
    #[arg(long)]
    goal: Option<String>,
    /// Best-first united search (the default).
    #[arg(long, conflicts_with = "strategy")]
    united: bool,
    /// Run a strategy instead, by name (`DInd`) or expression.
    #[arg(long)]
    strategy: Option<String>,
    #[command(flatten)]
    settings: SettingArgs,
    #[command(flatten)]
    ranker: RankerArgs,
    /// Directory for emitted proof scripts.
    #[arg(long, value_name = "DIR")]
    emit_proof: Option<PathBuf>,
    /// Reserved; the search is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// One JSON object per goal.
    #[arg(long)]
    json: bool,
    /// Report 0 ms for every goal.
    #[arg(long)]
    no_timing: bool,
    /// Goals proved concurrently; requires --no-lemma-reuse.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Do not add proved goals to the lemma set.
    #[arg(long)]
    no_lemma_reuse: bool,
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[arg(required = true)]
    scripts: Vec<PathBuf>,
    #[command(flatten)]
    settings: SettingArgs,
}

#[derive(Args)]
struct RefuteArgs {
    file: PathBuf,
    #[arg(long)]
    goal: String,
    /// Bound on the total size of an assignment.
    #[arg(long, default_value_t = united::eval::DEFAULT_MAX_SIZE)]
    size: usize,
    #[arg(long, default_value_t = united::eval::DEFAULT_FUEL)]
    fuel: usize,
}

#[derive(Args)]
struct RankArgs {
    file: PathBuf,
    #[arg(long)]
    goal: String,
    #[command(flatten)]
    ranker: RankerArgs,
    #[command(flatten)]
    settings: SettingArgs,
}

#[derive(Args)]
struct GoalArgs {
    file: PathBuf,
    #[arg(long)]
    goal: String,
    #[command(flatten)]
    settings: SettingArgs,
}

#[derive(Args)]
struct FitArgs {
    corpus: PathBuf,
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    settings: SettingArgs,
}

/// Input problems map to exit status 3.
struct UsageError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.into())
    }
}

type CmdResult = std::result::Result<Status, UsageError>;

/// `println!` that ends the process quietly once stdout is closed.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_theory(path: &Path) -> Result<Theory> {
    let text = read(path)?;
    parse_theory(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn load_settings(a: &SettingArgs) -> Result<Settings> {
    let mut s = Settings::default();
    if let Some(p) = &a.config {
        s.load(&read(p)?).with_context(|| format!("in {}", p.display()))?;
    }
    if let Some(n) = a.nodes {
        s.set("max_nodes", &n.to_string())?;
    }
    if let Some(t) = a.timeout {
        s.set("timeout", &t.to_string())?;
    }
    for kv in &a.set {
        s.apply_override(kv)?;
    }
    Ok(s)
}

fn load_ranker(a: &RankerArgs) -> Result<Ranker> {
    let features = match &a.features {
        Some(p) => FeatureSet::parse(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => FeatureSet::default_set(),
    };
    let weights = match &a.weights {
        Some(p) => Weights::parse(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None if a.features.is_some() => bail!("--features requires --weights"),
        None => Weights::default_weights(),
    };
    Ok(Ranker::new(features, weights)?)
}

fn root_sequent(theory: &Theory, goal: &str) -> Result<Sequent> {
    let g = theory.goal(goal).ok_or_else(|| anyhow!("unknown goal '{goal}'"))?;
    Ok(Sequent::root(&g.formula))
}

#[derive(Serialize)]
struct Report {
    name: String,
    verdict: String,
    nodes: usize,
    millis: u128,
    script: Option<String>,
    counterexample: Option<String>,
    #[serde(skip)]
    proof: Option<String>,
}

impl Report {
    fn status(&self) -> Status {
        match self.verdict.as_str() {
            "PROVED" => Status::Ok,
            "REFUTED" => Status::Failed,
            _ => Status::GaveUp,
        }
    }

    fn line(&self) -> String {
        let mut s = format!("{} {} {} {}", self.verdict, self.name, self.nodes, self.millis);
        if let Some(c) = &self.counterexample {
            s.push(' ');
            s.push_str(c);
        }
        s
    }
}

enum Mode {
    United,
    Strategy(Strategy),
}

fn prove_one(theory: &Theory, goal: &str, mode: &Mode, settings: &Settings) -> Result<Report> {
    let mut report = Report {
        name: goal.to_string(),
        verdict: String::new(),
        nodes: 0,
        millis: 0,
        script: None,
        counterexample: None,
        proof: None,
    };
    match mode {
        Mode::United => {
            let r = search(theory, goal, &settings.unite)?;
            let st = r.stats();
            report.verdict = r.verdict().to_string();
            report.nodes = st.nodes;
            report.millis = st.millis;
            match r {
                SearchResult::Proved(s, _) => report.proof = Some(print_script(&s)),
                SearchResult::Refuted(c, _) => report.counterexample = Some(c.to_string()),
                SearchResult::GaveUp(..) => {}
            }
        }
        Mode::Strategy(s) => {
            let start = std::time::Instant::now();
            let named = theory.goal(goal).ok_or_else(|| anyhow!("unknown goal '{goal}'"))?;
            let run = run_strategy(theory, named, s, &settings.psl);
            report.nodes = run.nodes;
            report.millis = start.elapsed().as_millis();
            match run.script {
                Some(script) => {
                    report.verdict = "PROVED".into();
                    report.proof = Some(print_script(&script));
                }
                None => report.verdict = "GAVEUP".into(),
            }
        }
    }
    Ok(report)
}

fn cmd_prove(a: ProveArgs) -> CmdResult {
    let mut theory = load_theory(&a.file)?;
    let mut settings = load_settings(&a.settings)?;
    let ranker = load_ranker(&a.ranker)?;
    if a.ranker.weights.is_some() || a.ranker.features.is_some() {
        settings.psl.ranker = Some(ranker.clone());
    }
    settings.unite.ranker = ranker;
    let mode = match &a.strategy {
        None => Mode::United,
        Some(s) if s == "DInd" => Mode::Strategy(Strategy::dind()),
        Some(s) => Mode::Strategy(parse_strategy(s).map_err(|e| anyhow!("strategy: {e}"))?),
    };
    let goals: Vec<Sym> = match &a.goal {
        Some(g) => {
            root_sequent(&theory, g)?;
            vec![Sym::from(g.as_str())]
        }
        None => theory.goals.iter().map(|g| g.name.clone()).collect(),
    };
    if let Some(dir) = &a.emit_proof {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    if a.jobs > 1 && !a.no_lemma_reuse {
        eprintln!("warning: --jobs needs --no-lemma-reuse; proving sequentially");
    }
    let emit = |r: &mut Report| -> Result<Status> {
        if let (Some(dir), Some(proof)) = (&a.emit_proof, &r.proof) {
            let path = dir.join(format!("{}.prf", r.name));
            fs::write(&path, proof).with_context(|| format!("cannot write {}", path.display()))?;
            r.script = Some(path.display().to_string());
        }
        if a.no_timing {
            r.millis = 0;
        }
        if a.json {
            out!("{}", serde_json::to_string(r).expect("report serialises"));
        } else {
            out!("{}", r.line());
        }
        Ok(r.status())
    };
    let mut status = Status::Ok;
    if a.jobs > 1 && a.no_lemma_reuse {
        for chunk in goals.chunks(a.jobs) {
            let done: Vec<Result<Report>> = std::thread::scope(|sc| {
                let hs: Vec<_> = chunk
                    .iter()
                    .map(|g| {
                        let (th, m, st) = (&theory, &mode, &settings);
                        sc.spawn(move || prove_one(th, g, m, st))
                    })
                    .collect();
                hs.into_iter().map(|h| h.join().expect("prover thread")).collect()
            });
            for r in done {
                status = status.worst(emit(&mut r?)?);
            }
        }
    } else {
        for g in &goals {
            let mut r = prove_one(&theory, g, &mode, &settings)?;
            if r.status() == Status::Ok && !a.no_lemma_reuse {
                let f = theory.goal(g).expect("goal exists").formula.clone();
                theory.add_lemma(g, f);
            }
            status = status.worst(emit(&mut r)?);
        }
    }
    Ok(status)
}

fn cmd_check(a: CheckArgs) -> CmdResult {
    let mut theory = load_theory(&a.file)?;
    let settings = load_settings(&a.settings)?;
    let mut scripts = Vec::new();
    for p in &a.scripts {
        let text = read(p)?;
        let parsed = parse_scripts(&text, &theory).map_err(|e| anyhow!("{}:{e}", p.display()))?;
        scripts.extend(parsed);
    }
    for s in &scripts {
        if theory.goal(&s.goal).is_none() {
            return Err(anyhow!("script for unknown goal '{}'", s.goal).into());
        }
    }
    let mut status = Status::Ok;
    let names: Vec<Sym> = theory.goals.iter().map(|g| g.name.clone()).collect();
    for g in names {
        for s in scripts.iter().filter(|s| s.goal == g) {
            match check_script(&theory, &g, s, settings.unite.budgets) {
                Ok(()) => {
                    out!("OK {g}");
                    let f = theory.goal(&g).expect("goal exists").formula.clone();
                    theory.add_lemma(&g, f);
                }
                Err(e) => {
                    out!("FAIL {g} {e}");
                    status = Status::Failed;
                }
            }
        }
    }
    Ok(status)
}

fn cmd_refute(a: RefuteArgs) -> CmdResult {
    let theory = load_theory(&a.file)?;
    let g = theory
        .goal(&a.goal)
        .ok_or_else(|| anyhow!("unknown goal '{}'", a.goal))?;
    match find_counterexample(&theory, &g.formula, a.size, a.fuel) {
        Some(c) => {
            out!("REFUTED {} {c}", a.goal);
            Ok(Status::Failed)
        }
        None => {
            out!("NONE {}", a.goal);
            Ok(Status::GaveUp)
        }
    }
}

fn cmd_rank(a: RankArgs) -> CmdResult {
    let theory = load_theory(&a.file)?;
    let settings = load_settings(&a.settings)?;
    let ranker = load_ranker(&a.ranker)?;
    let seq = root_sequent(&theory, &a.goal)?;
    let cands = candidate_applications(&seq, &theory, settings.unite.induct);
    for r in ranker.rank(&seq, &theory, cands) {
        out!("{:>8.3} {} {}", r.score, r.vector, r.args);
    }
    Ok(Status::Ok)
}

fn cmd_conjecture(a: GoalArgs) -> CmdResult {
    let theory = load_theory(&a.file)?;
    let settings = load_settings(&a.settings)?;
    let seq = root_sequent(&theory, &a.goal)?;
    let deducer = Deducer::new(&theory, settings.unite.budgets);
    for (c, v) in judge_conjectures(&deducer, &seq, &settings.unite.abduce) {
        out!("{v} {}", print_formula(&c));
    }
    Ok(Status::Ok)
}

fn cmd_fit(a: FitArgs) -> CmdResult {
    let settings = load_settings(&a.settings)?;
    let features = match &a.features {
        Some(p) => FeatureSet::parse(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => FeatureSet::default_set(),
    };
    let entries = parse_corpus(&read(&a.corpus)?).with_context(|| format!("in {}", a.corpus.display()))?;
    let base = a.corpus.parent().unwrap_or(Path::new("."));
    let mut theories = Vec::new();
    for p in corpus_paths(&entries) {
        let th = load_theory(&base.join(&p))?;
        theories.push((p, th));
    }
    let corpus: Vec<CorpusExample> = entries
        .iter()
        .map(|(p, goal, chosen)| CorpusExample {
            theory: &theories.iter().find(|(q, _)| q == p).expect("loaded").1,
            goal: goal.clone(),
            chosen: chosen.clone(),
        })
        .collect();
    let w = fit_weights(&corpus, &features, settings.unite.induct)?;
    fs::write(&a.out, w.to_string()).with_context(|| format!("cannot write {}", a.out.display()))?;
    for (name, x) in features.names.iter().zip(&w.0) {
        out!("{name} {x:.6}");
    }
    Ok(Status::Ok)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Prove(a) => cmd_prove(a),
        Command::Check(a) => cmd_check(a),
        Command::Refute(a) => cmd_refute(a),
        Command::Rank(a) => cmd_rank(a),
        Command::Conjecture(a) => cmd_conjecture(a),
        Command::Fit(a) => cmd_fit(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    // Generous stack for deep terms during search.
    let worker = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || run(cli))
        .expect("spawn prover thread");
    match worker.join().expect("prover thread panicked") {
        Ok(s) => ExitCode::from(s.code()),
        Err(UsageError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::Usage.code())
        }
    }
}
