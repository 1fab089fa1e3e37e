//! The `shiq` command-line driver.
//!
//! Exit codes: `sat` 0 satisfiable, 1 unsatisfiable; `entail` 0 entailed,
//! 1 not entailed; `countermodel` 0 found, 1 none within the domain bound;
//! `validate` 0 clean, 1 violations. Errors, exhausted budgets and
//! inconclusive answers exit with 2.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use shiq_core::{
    countermodel_search, entails_with_interrupt, Budget, EntailConfig, EntailError, ExpandError, KnowledgeBase, Query,
    Reasoner, Verdict,
};

use crate::syntax::{self, ParseError};

#[derive(Debug, Parser)]
#[command(name = "shiq", version, about = "SHIQ satisfiability and conjunctive query entailment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the knowledge base has a model.
    Sat(ExpandArgs),
    /// Decide whether every model of the knowledge base satisfies the query.
    Entail {
        #[command(flatten)]
        expand: ExpandArgs,
        #[arg(long)]
        query: PathBuf,
    },
    /// Search small finite interpretations for a model without a match.
    Countermodel {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value_t = 3)]
        oracle_domain: usize,
    },
    /// Print the first complete clash-free forests.
    DumpForest {
        #[command(flatten)]
        expand: ExpandArgs,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Check role hierarchy and number restriction constraints.
    Validate {
        #[arg(long)]
        kb: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub kb: PathBuf,
    /// Blocking depth. Defaults to 1 for `sat` and `dump-forest`, and to the
    /// sufficient depth for `entail`.
    #[arg(long)]
    pub blocking_depth: Option<u64>,
    #[arg(long)]
    pub max_forests: Option<u64>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    #[arg(long, short)]
    pub verbose: bool,
}

impl ExpandArgs {
    fn budget(&self) -> Budget {
        let d = Budget::default();
        Budget {
            max_forests: self.max_forests.unwrap_or(d.max_forests),
            max_nodes: self.max_nodes.unwrap_or(d.max_nodes),
        }
    }

    fn deadline(&self) -> impl FnMut() -> bool {
        let deadline = self.timeout_ms.map(|ms| Instant::now() + Duration::from_millis(ms));
        move || deadline.is_some_and(|d| Instant::now() >= d)
    }
}

const EXIT_ERROR: i32 = 2;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

macro_rules! say {
    ($w:expr, $($arg:tt)*) => {{
        let _ = writeln!($w, $($arg)*);
    }};
}

fn read(path: &Path, io: &mut Io<'_>) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Some(s),
        Err(e) => {
            say!(io.err, "error: {}: {e}", path.display());
            None
        }
    }
}

fn report_parse(path: &Path, e: &ParseError, io: &mut Io<'_>) {
    say!(io.err, "error: {}:{e}", path.display());
}

fn load_kb(path: &Path, io: &mut Io<'_>) -> Option<KnowledgeBase> {
    let text = read(path, io)?;
    syntax::parse_kb(&text).map_err(|e| report_parse(path, &e, io)).ok()
}

fn load_query(path: &Path, kb: &KnowledgeBase, io: &mut Io<'_>) -> Option<Query> {
    let text = read(path, io)?;
    syntax::parse_query_for(&text, kb).map_err(|e| report_parse(path, &e, io)).ok()
}

fn report_expand(e: &ExpandError, io: &mut Io<'_>) -> i32 {
    match e {
        ExpandError::BudgetExceeded { stats, .. } | ExpandError::Interrupted { stats } => {
            let mut stats = stats.clone();
            stats.budget_hit = true;
            say!(io.err, "error: {e}");
            say!(io.out, "{stats}");
        }
        ExpandError::StaleInstance => say!(io.err, "error: {e}"),
    }
    EXIT_ERROR
}

/// Runs one command and returns its exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut io = Io { out, err };
    match &cli.command {
        Command::Sat(args) => sat(args, &mut io),
        Command::Entail { expand, query } => entail(expand, query, &mut io),
        Command::Countermodel { kb, query, oracle_domain } => countermodel(kb, query, *oracle_domain, &mut io),
        Command::DumpForest { expand, count } => dump_forest(expand, *count, &mut io),
        Command::Validate { kb } => validate(kb, &mut io),
    }
}

fn sat(args: &ExpandArgs, io: &mut Io<'_>) -> i32 {
    let Some(kb) = load_kb(&args.kb, io) else { return EXIT_ERROR };
    let reasoner = Reasoner::new(&kb);
    let mut expander = reasoner.expand(args.blocking_depth.unwrap_or(1).max(1), args.budget()).with_interrupt(args.deadline());
    let mut satisfiable = false;
    for leaf in expander.by_ref() {
        match leaf {
            Ok(leaf) if leaf.is_clash_free() => {
                satisfiable = true;
                if args.verbose {
                    say!(io.err, "{}", reasoner.dump(&leaf.forest, args.blocking_depth.or(Some(1))));
                }
                break;
            }
            Ok(_) => {}
            Err(e) => return report_expand(&e, io),
        }
    }
    say!(io.out, "satisfiable={satisfiable}");
    if args.verbose {
        say!(io.out, "{}", expander.stats());
    }
    if satisfiable {
        0
    } else {
        1
    }
}

fn entail(args: &ExpandArgs, query: &Path, io: &mut Io<'_>) -> i32 {
    let Some(kb) = load_kb(&args.kb, io) else { return EXIT_ERROR };
    let Some(q) = load_query(query, &kb, io) else { return EXIT_ERROR };
    let config = EntailConfig { depth_override: args.blocking_depth, budget: args.budget(), ..Default::default() };
    let params = shiq_core::blocking_depth(&kb, &q, config.depth_override);
    if !params.complete {
        say!(
            io.err,
            "warning: blocking depth {} is below the sufficient depth {}; a missing mapping is not conclusive",
            params.depth,
            params.bound
        );
    }
    let v = match entails_with_interrupt(&kb, &q, &config, args.deadline()) {
        Ok(v) => v,
        Err(EntailError::Expand(e)) => return report_expand(&e, io),
        Err(e) => {
            say!(io.err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    say!(io.out, "{v}");
    if v.unsatisfiable {
        say!(io.out, "unsatisfiable=true");
    }
    if args.verbose {
        say!(io.out, "{}", v.stats);
    }
    if let Some(w) = &v.witness {
        let reasoner = Reasoner::new(&kb);
        say!(io.out, "witness forest:");
        let _ = write!(io.out, "{}", reasoner.dump(&w.forest, Some(v.params.depth)));
        if let Some((model, _)) = &w.countermodel {
            say!(io.out, "countermodel:");
            let _ = write!(io.out, "{model}");
        }
    }
    match v.verdict {
        Verdict::Entailed => 0,
        Verdict::NotEntailed => 1,
        Verdict::NoMappingAtDepth => EXIT_ERROR,
    }
}

fn countermodel(kb: &Path, query: &Path, domain: usize, io: &mut Io<'_>) -> i32 {
    let Some(kb) = load_kb(kb, io) else { return EXIT_ERROR };
    let Some(q) = load_query(query, &kb, io) else { return EXIT_ERROR };
    if let Err(e) = q.validate(&kb) {
        say!(io.err, "error: invalid query: {e}");
        return EXIT_ERROR;
    }
    if domain > shiq_core::oracle::MAX_DOMAIN {
        say!(io.err, "error: --oracle-domain is limited to {}", shiq_core::oracle::MAX_DOMAIN);
        return EXIT_ERROR;
    }
    match countermodel_search(&kb, &q, domain) {
        Some(model) => {
            say!(io.out, "countermodel=found");
            let _ = write!(io.out, "{model}");
            0
        }
        None => {
            say!(io.out, "countermodel=none max_domain={domain}");
            1
        }
    }
}

fn dump_forest(args: &ExpandArgs, count: usize, io: &mut Io<'_>) -> i32 {
    let Some(kb) = load_kb(&args.kb, io) else { return EXIT_ERROR };
    let n = args.blocking_depth.unwrap_or(1).max(1);
    let reasoner = Reasoner::new(&kb);
    let mut expander = reasoner.expand(n, args.budget()).with_interrupt(args.deadline());
    let mut printed = 0;
    while printed < count {
        match expander.next() {
            None => break,
            Some(Ok(leaf)) if leaf.is_clash_free() => {
                say!(io.out, "forest {printed}:");
                let _ = write!(io.out, "{}", reasoner.dump(&leaf.forest, Some(n)));
                printed += 1;
            }
            Some(Ok(_)) => {}
            Some(Err(e)) => return report_expand(&e, io),
        }
    }
    if args.verbose || printed == 0 {
        say!(io.out, "{}", expander.stats());
    }
    0
}

fn validate(path: &Path, io: &mut Io<'_>) -> i32 {
    let Some(text) = read(path, io) else { return EXIT_ERROR };
    let (builder, spans) = match syntax::parse_kb_unvalidated(&text) {
        Ok(b) => b,
        Err(e) => {
            report_parse(path, &e, io);
            return EXIT_ERROR;
        }
    };
    let report = builder.validate();
    if report.issues.is_empty() {
        say!(io.out, "ok");
        return 0;
    }
    for issue in &report.issues {
        let span = syntax::locate(&text, &spans, issue.location);
        say!(io.out, "{}:{span}: {issue}", path.display());
    }
    1
}
