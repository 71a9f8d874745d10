use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use blockforge::amalgam::{amalgamate, parse_gamma, AmalgamOptions, Placement};
use blockforge::catalog::{build_fibonacci, build_surface_code, catalog, NAMES};
use blockforge::compiler::{compile, constrain_output, CompileOptions, Crossover, NorVariant};
use blockforge::expr::{f_fib, f_z2, BooleanFunction};
use blockforge::gsm::{enumerate_gsm_with, realizes_with, vdw_energies, GsmOptions, Verdict};
use blockforge::io::{complex_from_json, complex_to_json, language_from_json, language_to_json, ComplexDoc, LanguageDoc};
use blockforge::language::truth_table_language;
use blockforge::lattice::{tessellated_language, Boundary, LatticeKind, LatticeSpec};
use blockforge::metrics::geometry_report;
use blockforge::model::{format_rational, Complex};
use blockforge::optim::{optimize_geometry, Objective, OptimizeConfig};
use blockforge::render::render_svg;
use blockforge::search::{search_minimal, SearchOptions, SearchOutcome};
use blockforge::tessellate::{verify_tessellation, EdgeJoin};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Stdout writes that tolerate a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "blockforge", version, about = "Build, verify, search and lay out Rydberg-blockade complexes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized steps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress informational output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ground-state manifold of a complex.
    Gsm {
        complex: PathBuf,
        /// Also report classical van der Waals energies.
        #[arg(long, requires = "c6")]
        vdw: bool,
        #[arg(long)]
        c6: Option<f64>,
        /// Largest complex to enumerate.
        #[arg(long, default_value_t = 64)]
        max_atoms: usize,
    },
    /// Check that a complex realizes a language (exit 1 if not).
    Verify {
        complex: PathBuf,
        language: PathBuf,
        #[arg(long, default_value_t = 64)]
        max_atoms: usize,
    },
    /// Join two complexes along identified ports.
    Amalgamate {
        first: PathBuf,
        second: PathBuf,
        /// Port pairs such as "Q:A,R:B".
        #[arg(long)]
        gamma: String,
        /// Join the blockade graphs only.
        #[arg(long = "abstract", conflicts_with = "place")]
        abstract_only: bool,
        /// Rigid motion "dx,dy,theta" applied to the second complex.
        #[arg(long)]
        place: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile a Boolean expression into a complex.
    Compile {
        #[arg(long)]
        expr: String,
        /// Keep only the inputs where the expression takes this value.
        #[arg(long)]
        constrain: Option<u8>,
        #[arg(long = "abstract", conflicts_with = "geometric")]
        abstract_only: bool,
        /// Optimize a geometry for the result.
        #[arg(long)]
        geometric: bool,
        #[arg(long, value_enum, default_value_t = NorArg::Ring)]
        nor: NorArg,
        #[arg(long, value_enum, default_value_t = CrossArg::Complex)]
        crossover: CrossArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Minimal-complex search (exit 1 when infeasible).
    Search {
        language: PathBuf,
        /// Largest atom count to try.
        #[arg(long)]
        atoms: usize,
        /// Smallest atom count to try.
        #[arg(long)]
        min_atoms: Option<usize>,
        #[arg(long)]
        max_detuning_denominator: Option<i64>,
        /// Stop at the first complex instead of listing all.
        #[arg(long)]
        first: bool,
        /// Directory for found complexes (`found_<k>.json`).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Write the certificate log here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Robustness, spread and validity of a geometric complex.
    Metrics { complex: PathBuf },
    /// Anneal atom positions.
    Optimize {
        complex: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Robustness)]
        objective: ObjectiveArg,
        #[arg(long)]
        c6: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// CSV of iteration,best_objective,current_objective.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Languages from expressions and lattices.
    Lang {
        #[command(subcommand)]
        cmd: LangCmd,
    },
    /// Shipped primitives.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Tile a lattice with a catalog model.
    Tessellate {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize),
        #[arg(long, value_enum, default_value_t = BoundaryArg::Periodic)]
        boundary: BoundaryArg,
        /// How neighbouring Fibonacci sites meet.
        #[arg(long, value_enum, default_value_t = JoinArg::Direct)]
        join: JoinArg,
        /// Compare the ground manifold with the tessellated language.
        #[arg(long)]
        verify: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw a geometric complex as SVG.
    Render {
        complex: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum LangCmd {
    /// Truth-table language of an expression: inputs then output.
    TruthTable {
        #[arg(long)]
        expr: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Edge-variable language of a lattice under a local check.
    Tessellate {
        #[arg(long, value_enum)]
        lattice: LatticeArg,
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize),
        #[arg(long, value_enum, default_value_t = BoundaryArg::Periodic)]
        boundary: BoundaryArg,
        #[arg(long, value_enum)]
        check: CheckArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    Show {
        name: String,
        /// Write `<name>.json` and `<name>_lang.json` into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NorArg {
    Ring,
    Triangle,
}

#[derive(Clone, Copy, ValueEnum)]
enum CrossArg {
    Complex,
    Gates,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Robustness,
    Vdw,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    SurfaceCode,
    Fibonacci,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeArg {
    Square,
    Honeycomb,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Periodic,
    Open,
    OpenSmooth,
}

#[derive(Clone, Copy, ValueEnum)]
enum JoinArg {
    Direct,
    Interposer,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Z2,
    Fib,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Open => Boundary::OpenRough,
            BoundaryArg::OpenSmooth => Boundary::OpenSmoothSides,
        }
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("dimensions look like 2x3")?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad width `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad height `{b}`"))?;
    if a == 0 || b == 0 {
        return Err("dimensions must be positive".into());
    }
    Ok((a, b))
}

/// Result of a command that ran to completion.
enum Outcome {
    Ok,
    /// A computed negative answer.
    Negative,
}

struct Ctx {
    quiet: bool,
    json: bool,
    seed: Option<u64>,
}

impl Ctx {
    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    /// JSON in `--json` mode, text otherwise.
    fn emit(&self, value: &Value, text: impl FnOnce() -> String) {
        if self.json {
            outln!("{}", serde_json::to_string_pretty(value).expect("json"));
        } else {
            out!("{}", text());
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_complex(path: &Path) -> anyhow::Result<Complex> {
    complex_from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes `contents` to `-o` or prints it.
fn deliver(output: &Option<PathBuf>, contents: &str, ctx: &Ctx, what: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => {
            write(p, &(contents.to_string() + "\n"))?;
            ctx.info(format!("wrote {what} to {}", p.display()));
        }
        None => outln!("{contents}"),
    }
    Ok(())
}

fn gsm_opts(max_atoms: usize) -> GsmOptions {
    GsmOptions {
        max_atoms,
        ..GsmOptions::default()
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            bail!(blockforge::Error::invalid("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().ok();
    }
    let ctx = Ctx {
        quiet: cli.global.quiet,
        json: cli.global.json,
        seed: cli.global.seed,
    };
    match cli.cmd {
        Cmd::Gsm {
            complex,
            vdw,
            c6,
            max_atoms,
        } => cmd_gsm(&ctx, &load_complex(&complex)?, vdw.then_some(c6).flatten(), max_atoms),
        Cmd::Verify {
            complex,
            language,
            max_atoms,
        } => {
            let c = load_complex(&complex)?;
            let l = language_from_json(&read(&language)?).with_context(|| format!("in {}", language.display()))?;
            let gsm = enumerate_gsm_with(&c, &gsm_opts(max_atoms))?;
            let v = realizes_with(&c, &gsm, &l)?;
            let (yes, reason, counter) = match &v {
                Verdict::Yes { .. } => (true, None, None),
                Verdict::No { reason, counterexample } => (false, Some(reason.clone()), counterexample.map(|w| w.to_string())),
            };
            ctx.emit(
                &json!({"realized": yes, "reason": reason, "counterexample": counter, "ground_states": gsm.len(), "gap": format_rational(&gsm.gap)}),
                || if yes { "yes\n".into() } else { "no\n".into() },
            );
            if let Some(r) = reason {
                eprintln!("{r}");
                return Ok(Outcome::Negative);
            }
            Ok(Outcome::Ok)
        }
        Cmd::Amalgamate {
            first,
            second,
            gamma,
            abstract_only,
            place,
            output,
        } => {
            let c1 = load_complex(&first)?;
            let c2 = load_complex(&second)?;
            let placement = place.as_deref().map(parse_placement).transpose()?;
            let opts = AmalgamOptions {
                placement,
                abstract_only,
                ..AmalgamOptions::default()
            };
            let a = amalgamate(&c1, &c2, &parse_gamma(&gamma)?, &opts)?;
            ctx.info(format!(
                "{} atoms, {} ports, {} language words{}",
                a.complex.n_atoms(),
                a.complex.n_ports(),
                a.language.len(),
                if a.demoted { ", identified ports demoted" } else { "" }
            ));
            deliver(&output, &complex_to_json(&a.complex), &ctx, "amalgam")?;
            Ok(Outcome::Ok)
        }
        Cmd::Compile {
            expr,
            constrain,
            abstract_only: _,
            geometric,
            nor,
            crossover,
            output,
        } => {
            let mut f = BooleanFunction::parse(&expr)?;
            match constrain {
                None | Some(1) => {}
                Some(0) => f = BooleanFunction::from_fn(f.n_inputs(), |x| !f.eval(x))?,
                Some(v) => bail!(blockforge::Error::invalid(format!("--constrain takes 0 or 1, not {v}"))),
            }
            let mut optimize = OptimizeConfig::default();
            if let Some(s) = ctx.seed {
                optimize.anneal.seed = s;
            }
            let opts = CompileOptions {
                nor: match nor {
                    NorArg::Ring => NorVariant::Ring,
                    NorArg::Triangle => NorVariant::Triangle,
                },
                crossover: match crossover {
                    CrossArg::Complex => Crossover::Complex,
                    CrossArg::Gates => Crossover::Gates,
                },
                geometric,
                optimize,
            };
            let compiled = compile(&f, &opts)?;
            ctx.info(format!(
                "{} atoms, {} gates, {} crossings, max detuning {}, gap {}, verified {}",
                compiled.atoms, compiled.gates, compiled.crossings, compiled.max_detuning, compiled.gap, compiled.verified
            ));
            if !compiled.verified {
                bail!(blockforge::Error::invalid("compiled complex failed verification"));
            }
            let complex = match constrain {
                Some(_) => constrain_output(&compiled.complex, "y")?,
                None => compiled.complex,
            };
            deliver(&output, &complex_to_json(&complex), &ctx, "complex")?;
            Ok(Outcome::Ok)
        }
        Cmd::Search {
            language,
            atoms,
            min_atoms,
            max_detuning_denominator,
            first,
            out_dir,
            certificate,
        } => {
            let l = language_from_json(&read(&language)?).with_context(|| format!("in {}", language.display()))?;
            let opts = SearchOptions {
                max_atoms: atoms,
                exhaustive: !first,
                max_detuning_denominator,
                min_atoms,
                ..SearchOptions::default()
            };
            let outcome = search_minimal(&l, atoms, &opts)?;
            let cert = serde_json::to_value(outcome.certificate())?;
            if let Some(p) = &certificate {
                write(p, &(serde_json::to_string_pretty(&cert)? + "\n"))?;
            }
            match outcome {
                SearchOutcome::Found {
                    n_atoms,
                    complexes,
                    distinct_graphs,
                    ..
                } => {
                    if let Some(dir) = &out_dir {
                        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
                        for (k, f) in complexes.iter().enumerate() {
                            write(&dir.join(format!("found_{k}.json")), &(complex_to_json(&f.complex) + "\n"))?;
                        }
                    }
                    let docs: Vec<ComplexDoc> = complexes.iter().map(|f| ComplexDoc::from_complex(&f.complex)).collect();
                    ctx.info(format!(
                        "feasible at {n_atoms} atoms: {} complexes, {distinct_graphs} non-isomorphic graphs",
                        complexes.len()
                    ));
                    outln!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "feasible": true,
                            "n_atoms": n_atoms,
                            "distinct_graphs": distinct_graphs,
                            "complexes": docs,
                            "certificate": cert,
                        }))?
                    );
                    Ok(Outcome::Ok)
                }
                SearchOutcome::Infeasible(_) => {
                    ctx.info(format!("infeasible with at most {atoms} atoms"));
                    outln!(
                        "{}",
                        serde_json::to_string_pretty(&json!({"feasible": false, "max_atoms": atoms, "certificate": cert}))?
                    );
                    Ok(Outcome::Negative)
                }
            }
        }
        Cmd::Metrics { complex } => {
            let c = load_complex(&complex)?;
            let r = geometry_report(&c)?;
            ctx.emit(&serde_json::to_value(&r)?, || {
                let mut s = format!("xi {:.6}\ns {:.6}\nvalid {}\n", r.robustness, r.spread, r.valid);
                if let (Some(d), Some((i, j))) = (r.max_blockade_distance, r.max_blockade_pair) {
                    s += &format!("longest blockade edge {i}-{j} at {d:.6}\n");
                }
                if let (Some(d), Some((i, j))) = (r.min_nonblockade_distance, r.min_nonblockade_pair) {
                    s += &format!("closest non-edge {i}-{j} at {d:.6}\n");
                }
                if !r.graph_matches_radius {
                    s += "warning: positions at the stored radius give a different graph\n";
                }
                s
            });
            Ok(Outcome::Ok)
        }
        Cmd::Optimize {
            complex,
            objective,
            c6,
            iters,
            restarts,
            output,
            trace,
        } => {
            let c = load_complex(&complex)?;
            let objective = match objective {
                ObjectiveArg::Robustness => Objective::Robustness,
                ObjectiveArg::Vdw => Objective::VdwRatio {
                    c6: c6.ok_or_else(|| blockforge::Error::invalid("--objective vdw needs --c6"))?,
                },
            };
            let mut cfg = OptimizeConfig {
                restarts,
                ..OptimizeConfig::default()
            };
            cfg.anneal.max_iterations = iters;
            if let Some(s) = ctx.seed {
                cfg.anneal.seed = s;
            }
            let r = optimize_geometry(&c, objective, &cfg)?;
            if let Some(p) = &trace {
                let mut w = csv::Writer::from_path(p).with_context(|| format!("cannot write {}", p.display()))?;
                w.write_record(["iteration", "best_objective", "current_objective"])?;
                for row in &r.trace {
                    w.write_record([row.iteration.to_string(), row.best.to_string(), row.current.to_string()])?;
                }
                w.flush()?;
            }
            ctx.info(format!(
                "objective {:.6}, xi {:.6}, s {:.6}, valid {}",
                r.objective, r.report.robustness, r.report.spread, r.report.valid
            ));
            deliver(&output, &complex_to_json(&r.complex), &ctx, "optimized complex")?;
            Ok(if r.report.valid { Outcome::Ok } else { Outcome::Negative })
        }
        Cmd::Lang { cmd } => match cmd {
            LangCmd::TruthTable { expr, output } => {
                let f = BooleanFunction::parse(&expr)?;
                deliver(&output, &language_to_json(&truth_table_language(&f)?), &ctx, "language")?;
                Ok(Outcome::Ok)
            }
            LangCmd::Tessellate {
                lattice,
                dims,
                boundary,
                check,
                output,
            } => {
                let kind = match lattice {
                    LatticeArg::Square => LatticeKind::Square,
                    LatticeArg::Honeycomb => LatticeKind::Honeycomb,
                };
                let spec = LatticeSpec::new(kind, dims.0, dims.1, boundary.into());
                let check = match check {
                    CheckArg::Z2 => f_z2(spec.coordination()),
                    CheckArg::Fib => f_fib(),
                };
                let l = tessellated_language(&spec, &check)?;
                ctx.info(format!("{} words of length {}", l.len(), l.word_length()));
                deliver(&output, &language_to_json(&l), &ctx, "language")?;
                Ok(Outcome::Ok)
            }
        },
        Cmd::Catalog { cmd } => match cmd {
            CatalogCmd::List => {
                let mut rows = Vec::new();
                for name in NAMES {
                    let e = catalog(name)?;
                    rows.push(json!({
                        "name": name,
                        "atoms": e.complex.n_atoms(),
                        "ports": e.complex.n_ports(),
                        "minimal_atom_count": e.minimal_atom_count,
                    }));
                }
                ctx.emit(&Value::Array(rows.clone()), || {
                    let mut s = format!("{:13} {:>5} {:>5} {:>7}\n", "name", "atoms", "ports", "minimal");
                    for r in &rows {
                        s += &format!(
                            "{:13} {:>5} {:>5} {:>7}\n",
                            r["name"].as_str().unwrap_or(""),
                            r["atoms"].to_string(),
                            r["ports"].to_string(),
                            r["minimal_atom_count"].to_string()
                        );
                    }
                    s
                });
                Ok(Outcome::Ok)
            }
            CatalogCmd::Show { name, export } => {
                let e = catalog(&name)?;
                let rec = e.verify()?;
                if let Some(dir) = &export {
                    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
                    let stem = e.name.to_lowercase();
                    write(&dir.join(format!("{stem}.json")), &(complex_to_json(&e.complex) + "\n"))?;
                    write(&dir.join(format!("{stem}_lang.json")), &(language_to_json(&e.language) + "\n"))?;
                    ctx.info(format!("exported {stem}.json and {stem}_lang.json to {}", dir.display()));
                }
                let value = json!({
                    "name": e.name,
                    "minimal_atom_count": e.minimal_atom_count,
                    "complex": ComplexDoc::from_complex(&e.complex),
                    "language": LanguageDoc::from_language(&e.language),
                    "verification": rec,
                });
                ctx.emit(&value, || {
                    let labels: Vec<&str> = e.complex.ports().iter().map(|p| p.label.as_str()).collect();
                    let mut s = format!(
                        "{}: {} atoms ({} minimal), ports {}\n",
                        e.name,
                        e.complex.n_atoms(),
                        e.minimal_atom_count,
                        labels.join(",")
                    );
                    s += &format!(
                        "ground states {}, E0 {}, gap {}, realized {}\nxi {:.4}, s {:.4}, valid {}\nlanguage:",
                        rec.ground_states, rec.ground_energy, rec.gap, rec.realized, rec.robustness, rec.spread, rec.valid
                    );
                    for w in e.language.iter() {
                        s += &format!(" {w}");
                    }
                    s + "\n"
                });
                Ok(Outcome::Ok)
            }
        },
        Cmd::Tessellate {
            model,
            dims,
            boundary,
            join,
            verify,
            output,
        } => {
            let (t, check) = match model {
                ModelArg::SurfaceCode => {
                    let spec = LatticeSpec::new(LatticeKind::Square, dims.0, dims.1, boundary.into());
                    (build_surface_code(&spec)?, f_z2(4))
                }
                ModelArg::Fibonacci => {
                    let spec = LatticeSpec::new(LatticeKind::Honeycomb, dims.0, dims.1, boundary.into());
                    let join = match join {
                        JoinArg::Direct => EdgeJoin::Direct,
                        JoinArg::Interposer => EdgeJoin::Interposer,
                    };
                    (build_fibonacci(&spec, join)?, f_fib())
                }
            };
            let bulk: Vec<String> = t.bulk_detunings().iter().map(format_rational).collect();
            let mut summary = json!({
                "atoms": t.complex.n_atoms(),
                "ports": t.complex.n_ports(),
                "atoms_per_cell": t.atoms_per_cell(),
                "bulk_detunings": bulk,
                "geometric": t.geometric,
            });
            let mut outcome = Outcome::Ok;
            if verify {
                let c = verify_tessellation(&t, &check)?;
                if !c.realized {
                    outcome = Outcome::Negative;
                    if let Some(r) = &c.reason {
                        eprintln!("{r}");
                    }
                }
                summary["verification"] = serde_json::to_value(&c)?;
            }
            if let Some(p) = &output {
                write(p, &(complex_to_json(&t.complex) + "\n"))?;
                ctx.info(format!("wrote tessellation to {}", p.display()));
            }
            ctx.emit(&summary, || {
                let mut s = format!(
                    "{} atoms, {} ports, {:.2} atoms per cell, bulk detunings {}\n",
                    t.complex.n_atoms(),
                    t.complex.n_ports(),
                    t.atoms_per_cell(),
                    summary["bulk_detunings"]
                );
                if let Some(v) = summary.get("verification") {
                    s += &format!(
                        "ground configurations {}, language words {}, realized {}\n",
                        v["ground_configurations"], v["language_words"], v["realized"]
                    );
                }
                s
            });
            Ok(outcome)
        }
        Cmd::Render { complex, output } => {
            let svg = render_svg(&load_complex(&complex)?)?;
            write(&output, &svg)?;
            ctx.info(format!("wrote {}", output.display()));
            Ok(Outcome::Ok)
        }
    }
}

fn cmd_gsm(ctx: &Ctx, c: &Complex, c6: Option<f64>, max_atoms: usize) -> anyhow::Result<Outcome> {
    let gsm = enumerate_gsm_with(c, &gsm_opts(max_atoms))?;
    let ports = c.port_indices();
    let configs: Vec<Value> = gsm
        .configurations
        .iter()
        .map(|k| json!({"configuration": k.to_string(), "ports": k.project(&ports).to_string()}))
        .collect();
    let mut value = json!({
        "ground_energy": format_rational(&gsm.ground_energy),
        "gap": format_rational(&gsm.gap),
        "configurations": configs,
        "blockaded_ports": gsm.blockaded_ports,
    });
    let vdw = c6.map(|c6| vdw_energies(c, c6)).transpose()?;
    if let Some(v) = &vdw {
        value["vdw"] = json!({"width": v.width, "gap": v.gap, "ratio": v.ratio()});
    }
    ctx.emit(&value, || {
        let mut s = format!(
            "E0 {}\ngap {}\n{} ground configurations (atoms | ports):\n",
            format_rational(&gsm.ground_energy),
            format_rational(&gsm.gap),
            gsm.len()
        );
        for k in &gsm.configurations {
            s += &format!("  {} | {}\n", k, k.project(&ports));
        }
        if let Some(v) = &vdw {
            s += &format!("vdW width {:.6e}, gap {:.6e}, ratio {:.6}\n", v.width, v.gap, v.ratio());
        }
        s
    });
    Ok(Outcome::Ok)
}

fn parse_placement(s: &str) -> anyhow::Result<Placement> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| blockforge::Error::invalid(format!("placement `{s}` is not dx,dy,theta")))?;
    match v[..] {
        [dx, dy, theta] => Ok(Placement::new(dx, dy, theta)),
        _ => bail!(blockforge::Error::invalid(format!("placement `{s}` is not dx,dy,theta"))),
    }
}

/// 1 for computed negatives, 3 for exhausted budgets, 2 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<blockforge::Error>() {
        Some(blockforge::Error::Resource(_)) => 3,
        Some(blockforge::Error::EmptyLanguage(_) | blockforge::Error::Collision { .. }) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_placements() {
        assert_eq!(parse_dims("2x3"), Ok((2, 3)));
        assert!(parse_dims("0x3").is_err() && parse_dims("2by3").is_err());
        let p = parse_placement("1, -2.5, 0.5").unwrap();
        assert_eq!((p.dx, p.dy, p.theta), (1.0, -2.5, 0.5));
        assert!(parse_placement("1,2").is_err());
    }

    #[test]
    fn exit_codes_follow_error_kinds() {
        let e = |x: blockforge::Error| exit_code(&anyhow::Error::new(x));
        assert_eq!(e(blockforge::Error::Resource("budget".into())), 3);
        assert_eq!(e(blockforge::Error::EmptyLanguage("none".into())), 1);
        assert_eq!(e(blockforge::Error::invalid("bad")), 2);
        let wrapped = anyhow::Error::new(blockforge::Error::Resource("x".into())).context("in file");
        assert_eq!(exit_code(&wrapped), 3);
    }
}
