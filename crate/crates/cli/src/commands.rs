use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use formal_inverse::flow::{
    check_bcw_quadratic_nilpotent, check_euler_identities, check_gpde, check_lemma31, check_newp,
    check_prop310, deformation_inverse, formal_flow, pde_residual, polynomiality_probe, power_map,
    PMap, PSeries,
};
use formal_inverse::inversion::{cross_check, Method};
use formal_inverse::rat::parse_rat;
use formal_inverse::trees::{enumerate_trees, order_polynomial};
use formal_inverse::{IdentityCheck, MSeries, MapF, PolyMap, Report};

use crate::bench::{bench, to_csv, to_table, BenchInput, DEFAULT_METHODS};
use crate::doc::{parse_documents, MapDocument};
use crate::error::CliError;
use crate::gen::{corpus, homogeneous_corpus, preset};

const DEFAULT_DEGREE: u32 = 8;
const MAX_TREE_SIZE: usize = 14;

#[derive(Debug, Parser)]
#[command(
    name = "finv",
    version,
    about = "Exact formal inversion of maps z - H(z) over the rationals"
)]
pub struct Cli {
    /// Map document to read (`-` for standard input).
    #[arg(long, global = true, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    /// Built-in map: catalan, dense-cubic, nilpotent-square or nilpotent-chain.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Worker threads for parallel library operations (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemma31,
    Newp,
    Prop310,
    Gpde,
    Euler,
    Pde,
    Quadratic,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the inverse G with one method or cross-check all of them.
    Invert {
        #[arg(long, default_value = "all")]
        method: String,
        #[arg(long)]
        deg: Option<u32>,
        /// Print the result as a map document.
        #[arg(long)]
        json: bool,
        /// Report per-method wall time.
        #[arg(long)]
        timings: bool,
        /// Run the methods of `all` concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Run an identity suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        deg: Option<u32>,
        /// Initial condition for the gpde suite (defaults to F).
        #[arg(long)]
        u0: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        s_order: u32,
        #[arg(long, default_value_t = 3)]
        t_order: u32,
        #[arg(long)]
        json: bool,
    },
    /// The formal flow F(z; t), symbolic (`--t t`) or at a rational value.
    Flow {
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        deg: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// The m-th composition power of F (m < 0 uses the inverse).
    Power {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        deg: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// List rooted trees with automorphism counts and order polynomials.
    Trees {
        #[arg(long)]
        max_size: usize,
    },
    /// Compute N_[1..=M] for a homogeneous H with nilpotent Jacobian.
    Probe {
        #[arg(long)]
        layers: u32,
        #[arg(long)]
        json: bool,
    },
    /// Time methods against each other.
    Bench {
        /// Inclusive degree range `A..B`.
        #[arg(long, default_value = "4..10")]
        deg_range: String,
        #[arg(long, default_value_t = 2)]
        step: u32,
        /// Comma-separated method names.
        #[arg(long, default_value = "recurrent,homog,ag,bcw")]
        methods: String,
        #[arg(long, default_value_t = 3)]
        runs: usize,
        /// Write the CSV here (`-` prints it instead of the table).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Let the library use more than one thread while timing.
        #[arg(long)]
        parallel: bool,
    },
    /// Print a seeded random corpus of map documents.
    Corpus {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long)]
        deg: Option<u32>,
        /// Homogeneous H of degree 2 or 3 instead.
        #[arg(long)]
        homogeneous: bool,
    },
}

/// Exit code plus the text for standard output and standard error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let threads = match &cli.command {
        Command::Bench {
            parallel: false, ..
        } => 1,
        _ => cli.threads,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => return failure(CliError::Input(format!("thread pool: {e}"))),
    };
    match pool.install(|| execute(cli)) {
        Ok(o) => o,
        Err(e) => failure(e),
    }
}

fn failure(e: CliError) -> Outcome {
    Outcome {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: format!("error: {}\n", e.message()),
    }
}

fn read_text(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// The input documents, or the preset at truncation `deg`.
fn load_documents(cli: &Cli, deg: Option<u32>) -> Result<Vec<MapDocument>, CliError> {
    match (&cli.input, &cli.preset) {
        (Some(path), _) => parse_documents(&read_text(path)?),
        (None, Some(name)) => {
            let f = preset(name, deg.unwrap_or(DEFAULT_DEGREE))?;
            Ok(vec![MapDocument::from_map(f.f()).with_source(name.clone())])
        }
        (None, None) => Err(CliError::Input(
            "no map given: use --input FILE or --preset NAME".into(),
        )),
    }
}

fn load_one(cli: &Cli, deg: Option<u32>) -> Result<(MapDocument, MapF, u32), CliError> {
    let mut docs = load_documents(cli, deg)?;
    if docs.len() != 1 {
        return Err(CliError::Input(format!(
            "expected one map document, found {}",
            docs.len()
        )));
    }
    let doc = docs.remove(0);
    let f = doc.to_map_f()?;
    let d = deg.unwrap_or(doc.d);
    Ok((doc, f, d))
}

fn render_series(s: &MSeries, names: &[String], d: u32) -> String {
    let body = s.display_with(names);
    if body == "0" {
        format!("O(|z|^{})", d + 1)
    } else {
        format!("{body} + O(|z|^{})", d + 1)
    }
}

fn render_map(m: &PolyMap, names: &[String], d: u32) -> String {
    let m = m.truncate(d);
    let mut s = String::new();
    for (i, c) in m.components().iter().enumerate() {
        let _ = writeln!(s, "[{}] {}", i + 1, render_series(c, names, d));
    }
    s
}

fn render_pseries(p: &PSeries, names: &[String], d: u32) -> String {
    let t = ["t".to_string()];
    let mut parts: Vec<String> = Vec::new();
    for (e, c) in p.terms() {
        if e.degree() > d {
            continue;
        }
        let mono = MSeries::monomial(p.nvars(), d, e.clone(), formal_inverse::rat::rat(1))
            .display_with(names);
        let coeff = c.display_with(&t);
        parts.push(match coeff.as_str() {
            "1" => mono,
            _ => format!("({coeff})*{mono}"),
        });
    }
    parts.push(format!("O(|z|^{})", d + 1));
    parts.join(" + ")
}

fn render_pmap(m: &PMap, names: &[String], d: u32) -> String {
    let mut s = String::new();
    for (i, c) in m.components().iter().enumerate() {
        let _ = writeln!(s, "[{}] {}", i + 1, render_pseries(c, names, d));
    }
    s
}

fn emit_map(m: &PolyMap, names: &[String], d: u32, json: bool) -> String {
    if json {
        format!("{}\n", MapDocument::from_map(&m.truncate(d)).to_line())
    } else {
        render_map(m, names, d)
    }
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Invert {
            method,
            deg,
            json,
            timings,
            parallel,
        } => {
            let (doc, f, d) = load_one(cli, *deg)?;
            let names = doc.var_names();
            if method == "all" {
                let cc = cross_check(&f, d, &Method::ALL, *parallel)?;
                let mut out = emit_map(&cc.inverse, &names, d, *json);
                if !json {
                    let ran: Vec<&str> = cc.runs.iter().map(|r| r.method.name()).collect();
                    let _ = writeln!(
                        out,
                        "all methods agree through degree {d}: {}",
                        ran.join(", ")
                    );
                    for (m, why) in &cc.skipped {
                        let _ = writeln!(out, "skipped {m}: {why}");
                    }
                    if *timings {
                        for r in &cc.runs {
                            let _ = writeln!(
                                out,
                                "time {}: {:.3} ms",
                                r.method,
                                r.elapsed.as_secs_f64() * 1000.0
                            );
                        }
                    }
                }
                Ok(Outcome::ok(out))
            } else {
                let m: Method = method.parse()?;
                let start = std::time::Instant::now();
                let g = m.invert(&f, d)?;
                let elapsed = start.elapsed();
                let mut out = emit_map(&g, &names, d, *json);
                if *timings && !json {
                    let _ = writeln!(out, "time {m}: {:.3} ms", elapsed.as_secs_f64() * 1000.0);
                }
                Ok(Outcome::ok(out))
            }
        }
        Command::Verify {
            suite,
            deg,
            u0,
            s_order,
            t_order,
            json,
        } => {
            let (_, f, d) = load_one(cli, *deg)?;
            let u0 = match u0 {
                Some(p) => {
                    let docs = parse_documents(&read_text(p)?)?;
                    docs[0].to_map()?
                }
                None => f.f().clone(),
            };
            let reports = run_suites(*suite, &f, d, &u0, *s_order, *t_order)?;
            let passed = reports.iter().all(Report::passed);
            let out = if *json {
                let v: Vec<&Report> = reports.iter().collect();
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&v).expect("reports serialize")
                )
            } else {
                reports.iter().map(ToString::to_string).collect()
            };
            Ok(Outcome {
                code: if passed { 0 } else { 1 },
                stdout: out,
                stderr: if passed {
                    String::new()
                } else {
                    "error: verification failed\n".into()
                },
            })
        }
        Command::Flow { t, deg, json } => {
            let (doc, f, d) = load_one(cli, *deg)?;
            let names = doc.var_names();
            let flow = formal_flow(&f, d)?;
            if t == "t" {
                if *json {
                    return Err(CliError::Input("--json needs a rational --t".into()));
                }
                Ok(Outcome::ok(render_pmap(flow.map(), &names, d)))
            } else {
                let v = parse_rat(t).ok_or_else(|| {
                    CliError::Input(format!("--t expects a rational or 't', got {t:?}"))
                })?;
                Ok(Outcome::ok(emit_map(&flow.at(&v), &names, d, *json)))
            }
        }
        Command::Power { m, deg, json } => {
            let (doc, f, d) = load_one(cli, *deg)?;
            Ok(Outcome::ok(emit_map(
                &power_map(&f, *m, d)?,
                &doc.var_names(),
                d,
                *json,
            )))
        }
        Command::Trees { max_size } => {
            if *max_size > MAX_TREE_SIZE {
                return Err(CliError::Input(format!(
                    "--max-size is limited to {MAX_TREE_SIZE}"
                )));
            }
            let mut out = String::new();
            let mut total = 0;
            for trees in enumerate_trees(*max_size) {
                for t in trees {
                    total += 1;
                    let _ = writeln!(
                        out,
                        "{:>2}  aut={:<4} {:<16} {}",
                        t.size(),
                        t.aut_order(),
                        t.encoding(),
                        order_polynomial(&t)
                    );
                }
            }
            let _ = writeln!(out, "{total} trees with at most {max_size} vertices");
            Ok(Outcome::ok(out))
        }
        Command::Probe { layers, json } => {
            let (_, f, _) = load_one(cli, None)?;
            let probe = polynomiality_probe(f.h(), *layers)?;
            let out = if *json {
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&probe).expect("probe serializes")
                )
            } else {
                let mut s = probe.report().to_string();
                let terms: Vec<String> =
                    probe.layer_terms.iter().map(ToString::to_string).collect();
                let _ = writeln!(s, "  terms per layer: {}", terms.join(" "));
                s
            };
            Ok(Outcome::ok(out))
        }
        Command::Bench {
            deg_range,
            step,
            methods,
            runs,
            csv,
            ..
        } => {
            let degrees = parse_range(deg_range, *step)?;
            let methods = parse_methods(methods)?;
            let max = *degrees.last().expect("non-empty range");
            let inputs: Vec<BenchInput> = if cli.input.is_none() && cli.preset.is_none() {
                vec![BenchInput {
                    id: "dense-cubic".into(),
                    map: preset("dense-cubic", max)?,
                }]
            } else {
                load_documents(cli, Some(max))?
                    .into_iter()
                    .enumerate()
                    .map(|(i, doc)| {
                        let id = doc
                            .meta
                            .as_ref()
                            .and_then(|m| m.source.clone())
                            .unwrap_or_else(|| format!("input{}", i + 1));
                        Ok(BenchInput {
                            id,
                            map: doc.to_map_f()?,
                        })
                    })
                    .collect::<Result<_, CliError>>()?
            };
            let outcome = bench(&inputs, &methods, &degrees, *runs)?;
            let csv_text = to_csv(&outcome.records);
            let out = match csv {
                Some(p) if p.as_os_str() == "-" => csv_text,
                Some(p) => {
                    std::fs::write(p, &csv_text)?;
                    to_table(&outcome)
                }
                None => to_table(&outcome),
            };
            Ok(Outcome::ok(out))
        }
        Command::Corpus {
            seed,
            count,
            deg,
            homogeneous,
        } => {
            let d = deg.unwrap_or(DEFAULT_DEGREE);
            let maps: Vec<PolyMap> = if *homogeneous {
                homogeneous_corpus(*seed, *count, d)
                    .into_iter()
                    .map(|h| MapF::from_h(h).map(|f| f.f().clone()))
                    .collect::<Result<_, _>>()?
            } else {
                corpus(*seed, *count, d)
                    .into_iter()
                    .map(|f| f.f().clone())
                    .collect()
            };
            let mut out = String::new();
            for (i, m) in maps.iter().enumerate() {
                let doc = MapDocument::from_map(m).with_source(format!("seed{seed}-{}", i + 1));
                let _ = writeln!(out, "{}", doc.to_line());
            }
            Ok(Outcome::ok(out))
        }
    }
}

fn run_suites(
    suite: Suite,
    f: &MapF,
    d: u32,
    u0: &PolyMap,
    s_order: u32,
    t_order: u32,
) -> Result<Vec<Report>, CliError> {
    let one = |s: Suite| -> Result<Report, CliError> {
        Ok(match s {
            Suite::Lemma31 => check_lemma31(f, d)?,
            Suite::Newp => check_newp(f.h(), d)?,
            Suite::Prop310 => check_prop310(f, d, s_order, t_order)?,
            Suite::Gpde => check_gpde(u0, f.h(), d)?,
            Suite::Euler => check_euler_identities(f.h(), d)?,
            Suite::Quadratic => check_bcw_quadratic_nilpotent(f.h(), d)?,
            Suite::Pde => pde_report(f, d)?,
            Suite::All => unreachable!("expanded by the caller"),
        })
    };
    if suite != Suite::All {
        return Ok(vec![one(suite)?]);
    }
    let homogeneous = f.homogeneous_degree().is_some_and(|k| k >= 2);
    let mut out = Vec::new();
    for s in [
        Suite::Lemma31,
        Suite::Newp,
        Suite::Prop310,
        Suite::Gpde,
        Suite::Pde,
    ] {
        out.push(one(s)?);
    }
    if homogeneous {
        out.push(one(Suite::Euler)?);
        out.push(one(Suite::Quadratic)?);
    }
    Ok(out)
}

fn pde_report(f: &MapF, d: u32) -> Result<Report, CliError> {
    let di = deformation_inverse(f, d)?;
    let residual = pde_residual(&di);
    let mut r = Report::new("pde");
    let zero = PMap::zero(f.n(), 1, d);
    let mut check = match residual.first_difference(&zero, d, None) {
        None => IdentityCheck::pass("dN_t/dt - JN_t N_t = 0"),
        Some((i, e, a, _)) => IdentityCheck::fail(
            "dN_t/dt - JN_t N_t = 0",
            format!(
                "component {}, exponent {:?}: {}",
                i + 1,
                e.as_slice(),
                a.display_with(&["t".to_string()])
            ),
        ),
    };
    check.through_degree = Some(d);
    r.push(check.with_note(format!("exact in t (t-degree at most {})", di.t_order())));
    Ok(r)
}

fn parse_range(s: &str, step: u32) -> Result<Vec<u32>, CliError> {
    let bad = || {
        CliError::Input(format!(
            "--deg-range expects A..B with 2 <= A <= B, got {s:?}"
        ))
    };
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a < 2 || a > b {
        return Err(bad());
    }
    if step == 0 {
        return Err(CliError::Input("--step must be positive".into()));
    }
    Ok((a..=b).step_by(step as usize).collect())
}

fn parse_methods(s: &str) -> Result<Vec<Method>, CliError> {
    if s == "default" {
        return Ok(DEFAULT_METHODS.to_vec());
    }
    if s == "all" {
        return Ok(Method::ALL.to_vec());
    }
    s.split(',')
        .map(|m| m.trim().parse::<Method>().map_err(CliError::from))
        .collect()
}
