//! Command-line interface: inspect a category, enumerate closed subfunctors,
//! compute relative structures and defects, and run the verification suite.

use clap::{Args, Parser, Subcommand};
use extriang::category::{BasedCategory, Obj};
use extriang::defects::{
    co_defect_of, composition_factors, defect_of, duality_d, enumerate_closed, subfunctor_to_serre,
};
use extriang::io::{lattice_dot, lattice_json, load_category, load_subfunctor, subfunctor_to_toml};
use extriang::oracle::{
    composition_falsifier_with, composition_table, enumerate_additive_subfunctors,
};
use extriang::relative::{e_exact, e_l, e_r, is_closed, HalfExactFunctor, Subfunctor};
use extriang::verify::run_all;
use extriang::{Error, Result};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "extriang", version, about = "Relative extriangulated structures on two finite based categories")]
struct Cli {
    /// Category description file (TOML: backend, p, n, orientation).
    #[arg(short, long, global = true)]
    category: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize the category: objects, projectives, dimensions.
    Info,
    /// Print the table of E(C, A) dimensions.
    ExtTable,
    /// Work with the lattice of closed subfunctors.
    Closed {
        #[command(subcommand)]
        action: ClosedAction,
    },
    /// Validate a subfunctor given in a TOML file.
    Subfunctor {
        #[command(subcommand)]
        action: SubfunctorAction,
    },
    /// Compute a relative structure from a half exact functor.
    Relative(RelativeArgs),
    /// Compute the defect of an extension class.
    Defect(DefectArgs),
    /// Run verification criteria.
    Verify {
        #[command(subcommand)]
        action: VerifyAction,
    },
    /// Brute-force enumeration, independent of the structure theorems.
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
}

#[derive(Subcommand)]
enum ClosedAction {
    /// List every closed subfunctor.
    Enumerate {
        /// Output format: text, json, or dot.
        #[arg(long, default_value = "text")]
        format: String,
    },
}

#[derive(Subcommand)]
enum SubfunctorAction {
    /// Check action stability and closedness of a subfunctor file.
    Check { file: PathBuf },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct RelativeKind {
    /// Right locus of the restricted Yoneda functor of these objects.
    #[arg(long, value_name = "X1,X2,...")]
    yoneda: Option<String>,
    /// Left locus of the restricted co-Yoneda functor of these objects.
    #[arg(long, value_name = "X1,X2,...")]
    co_yoneda: Option<String>,
    /// Right locus of the projectivization at this set of objects.
    #[arg(long, value_name = "X1,X2,...", num_args = 0..=1, default_missing_value = "")]
    projectivize: Option<String>,
    /// Intersection of the mono and epi loci.
    #[arg(long)]
    exact: bool,
}

/// Splits a comma-separated object list, ignoring commas inside brackets so
/// interval names like `[1,2]` survive.
fn split_names(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out.retain(|t| !t.trim().is_empty());
    out
}

#[derive(Args)]
struct RelativeArgs {
    #[command(flatten)]
    kind: RelativeKind,
}

#[derive(Args)]
struct DefectArgs {
    /// Extension class: object C, object A, then its coordinates in E(C, A).
    #[arg(long = "ext", num_args = 2, value_names = ["C", "A"])]
    ext: Vec<String>,
    /// Coordinates of the class in the chosen basis of E(C, A).
    coords: Vec<u64>,
}

#[derive(Subcommand)]
enum VerifyAction {
    /// Run every verification criterion.
    All {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum OracleAction {
    /// Enumerate additive subfunctors and test each against composites.
    Enumerate {
        /// Abort if the candidate count exceeds this cap.
        #[arg(long, default_value_t = 1 << 20)]
        cap: u128,
        /// Skip composite middles with more than this many summands.
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
}

fn objs_by_name(cat: &BasedCategory, names: &[String]) -> Result<Vec<Obj>> {
    names
        .iter()
        .map(|s| Ok(Obj::single(cat.core.indec_by_name(s.trim())?)))
        .collect()
}

fn require_category(cli: &Cli) -> Result<BasedCategory> {
    let path = cli
        .category
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("this subcommand needs --category <FILE>".into()))?;
    load_category(path)
}

fn print_subfunctor_report(cat: &BasedCategory, f: &Subfunctor) -> Result<bool> {
    let core = &cat.core;
    print!("{}", subfunctor_to_toml(core, f));
    println!("total dimension: {}", f.total_dim());
    let closed = is_closed(cat, f)?;
    println!("closed: {closed}");
    if closed {
        let s = subfunctor_to_serre(cat, f)?;
        let names: Vec<String> =
            s.iter().map(|&x| core.obj_name(&Obj::single(x))).collect();
        println!("serre set: {{{}}}", names.join(", "));
    } else {
        let table = composition_table(cat, 3)?;
        match composition_falsifier_with(core, &table, f) {
            Some(w) => {
                println!(
                    "counterexample: member classes {:?} in E({}, {}) and {:?} in E({}, {}) compose to the non-member {:?} in E({}, {})",
                    w.outer.coords,
                    core.obj_name(&w.outer.c),
                    core.obj_name(&w.outer.a),
                    w.inner.coords,
                    core.obj_name(&w.inner.c),
                    core.obj_name(&w.inner.a),
                    w.composite.coords,
                    core.obj_name(&w.composite.c),
                    core.obj_name(&w.composite.a),
                );
            }
            None => {
                return Err(Error::InternalConsistency(
                    "Serre criterion calls this non-closed but no composite counterexample exists"
                        .into(),
                ))
            }
        }
    }
    Ok(closed)
}

fn cmd_info(cat: &BasedCategory) {
    let core = &cat.core;
    println!("category: {}", core.name);
    println!("field: F_{}", core.field.p);
    let n = core.n_indecs();
    println!("indecomposables ({n}):");
    let projectives = core.projective_ids();
    for x in 0..n {
        let tag = if projectives.contains(&x) { "  (projective)" } else { "" };
        println!("  {}{}", core.obj_name(&Obj::single(x)), tag);
    }
    let total: usize = (0..n).map(|j| (0..n).map(|i| core.ext_dims[j][i]).sum::<usize>()).sum();
    println!("total dim E over indecomposable pairs: {total}");
}

fn cmd_ext_table(cat: &BasedCategory) {
    let core = &cat.core;
    let n = core.n_indecs();
    let names: Vec<String> = (0..n).map(|x| core.obj_name(&Obj::single(x))).collect();
    let width = names.iter().map(|s| s.len()).max().unwrap_or(1).max(2);
    println!("dim E(C, A); rows C, columns A");
    print!("{:width$}", "");
    for a in &names {
        print!(" {a:>width$}");
    }
    println!();
    for (j, name) in names.iter().enumerate() {
        print!("{name:>width$}");
        for i in 0..n {
            print!(" {:>width$}", core.ext_dims[j][i]);
        }
        println!();
    }
}

fn cmd_closed(cat: &BasedCategory, format: &str) -> Result<()> {
    match format {
        "json" => print!("{}", lattice_json(cat)?),
        "dot" => print!("{}", lattice_dot(cat)?),
        "text" => {
            let core = &cat.core;
            let closed = enumerate_closed(cat)?;
            println!("{} closed subfunctors of {}", closed.len(), core.name);
            for (s, f) in &closed {
                let names: Vec<String> =
                    s.iter().map(|&x| core.obj_name(&Obj::single(x))).collect();
                println!("  {{{}}}  total dim {}", names.join(", "), f.total_dim());
            }
        }
        other => {
            return Err(Error::InvalidSpec(format!(
                "unknown format {other:?}; use text, json, or dot"
            )))
        }
    }
    Ok(())
}

fn cmd_subfunctor_check(cli: &Cli, file: &Path) -> Result<()> {
    let cat = require_category(cli)?;
    let core = &cat.core;
    let f = load_subfunctor(core, file)?;
    let violations = f.violations(core);
    if !violations.is_empty() {
        for v in &violations {
            println!("violation: {v}");
        }
        return Err(Error::InternalConsistency(format!(
            "{} action-stability violations",
            violations.len()
        )));
    }
    println!("additive subfunctor: ok");
    print_subfunctor_report(&cat, &f)?;
    Ok(())
}

fn cmd_relative(cli: &Cli, args: &RelativeArgs) -> Result<()> {
    let cat = require_category(cli)?;
    let f = if let Some(names) = &args.kind.yoneda {
        let d = objs_by_name(&cat, &split_names(names))?;
        let h = HalfExactFunctor::yoneda(&cat, &d)?;
        println!("right locus of {}", h.tag);
        e_r(&cat, &h)?
    } else if let Some(names) = &args.kind.co_yoneda {
        let d = objs_by_name(&cat, &split_names(names))?;
        let h = HalfExactFunctor::co_yoneda(&cat, &d)?;
        println!("left locus of {}", h.tag);
        e_l(&cat, &h)?
    } else if let Some(names) = &args.kind.projectivize {
        let d = objs_by_name(&cat, &split_names(names))?;
        let s: BTreeSet<usize> = d.iter().map(|o| o.summands[0]).collect();
        let h = HalfExactFunctor::projectivization(&cat, &s)?;
        println!("right locus of {}", h.tag);
        e_r(&cat, &h)?
    } else {
        println!("exact locus");
        e_exact(&cat)?
    };
    print_subfunctor_report(&cat, &f)?;
    Ok(())
}

fn cmd_defect(cli: &Cli, args: &DefectArgs) -> Result<()> {
    let cat = require_category(cli)?;
    let core = &cat.core;
    let c = Obj::single(core.indec_by_name(args.ext[0].trim())?);
    let a = Obj::single(core.indec_by_name(args.ext[1].trim())?);
    let delta = core.ext_from_coords(&c, &a, args.coords.clone())?;
    let d = defect_of(&cat, &delta)?;
    let n = core.n_indecs();
    println!("defect of the class {:?} in E({}, {})", delta.coords, core.obj_name(&c), core.obj_name(&a));
    for x in 0..n {
        println!("  dim at {}: {}", core.obj_name(&Obj::single(x)), d.functor.dims[x]);
    }
    match composition_factors(core, &d.functor) {
        Ok(factors) => {
            for (x, m) in factors {
                println!("  [defect : S_{}] = {}", core.obj_name(&Obj::single(x)), m);
            }
        }
        Err(Error::Inapplicable(why)) => println!("  composition factors: inapplicable ({why})"),
        Err(e) => return Err(e),
    }
    let co = co_defect_of(core, &delta)?;
    println!("co-defect dimensions: {:?}", co.dims);
    let dual = duality_d(core, &d)?;
    println!("dual of defect dimensions: {:?} (matches co-defect: {})", dual.dims, dual.dims == co.dims);
    Ok(())
}

fn cmd_verify(seed: u64) -> ExitCode {
    let outcomes = run_all(seed);
    let mut failed = 0;
    for o in &outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:2} {} — {} — {}", o.id, verdict, o.title, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {} criteria passed", outcomes.len());
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", outcomes.len());
        ExitCode::from(1)
    }
}

fn cmd_oracle(cli: &Cli, cap: u128, bound: usize) -> Result<()> {
    let cat = require_category(cli)?;
    let core = &cat.core;
    let additive = enumerate_additive_subfunctors(&cat, cap)?;
    let table = composition_table(&cat, bound)?;
    println!(
        "{} additive subfunctors on {} ({} composite probes)",
        additive.len(),
        core.name,
        table.len()
    );
    let mut closed_count = 0;
    for f in &additive {
        let witness = composition_falsifier_with(core, &table, f);
        let theorem = is_closed(&cat, f)?;
        if theorem != witness.is_none() {
            return Err(Error::InternalConsistency(
                "oracle and Serre criterion disagree on closedness".into(),
            ));
        }
        if theorem {
            closed_count += 1;
        }
        println!(
            "  total dim {:2}  closed: {}",
            f.total_dim(),
            if theorem { "yes" } else { "no (composite counterexample found)" }
        );
    }
    println!("{closed_count} closed, {} not closed", additive.len() - closed_count);
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Info => {
            cmd_info(&require_category(cli)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::ExtTable => {
            cmd_ext_table(&require_category(cli)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Closed { action: ClosedAction::Enumerate { format } } => {
            cmd_closed(&require_category(cli)?, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Subfunctor { action: SubfunctorAction::Check { file } } => {
            cmd_subfunctor_check(cli, file)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Relative(args) => {
            cmd_relative(cli, args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Defect(args) => {
            cmd_defect(cli, args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { action: VerifyAction::All { seed } } => Ok(cmd_verify(*seed)),
        Command::Oracle { action: OracleAction::Enumerate { cap, bound } } => {
            cmd_oracle(cli, *cap, *bound)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Input problems exit with 2, verification failures with 1.
fn exit_code_for(e: &Error) -> ExitCode {
    match e {
        Error::Parse(_)
        | Error::InvalidSpec(_)
        | Error::UnknownObject(_)
        | Error::Shape(_)
        | Error::EnumerationTooLarge { .. }
        | Error::Io(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    // die quietly when the consumer of a pipe goes away, as cat/grep do
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
