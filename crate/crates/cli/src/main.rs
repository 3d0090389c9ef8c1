//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 false verdict, 2 input error, 3 internal invariant
//! failure.

use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use pathmoment::io::{self, OrderFile, QuiverRef};
use pathmoment::{
    build_representation, check_relations, compress_representation, flat_extend_tip_maximal, from_groebner,
    kernel_groebner, rep_kernel, right_groebner, sos, DoubleQuiver, Error, FlatExtension, Path, PathAlgebra,
    Representation, TruncatedFunctional,
};

#[derive(Parser)]
#[command(name = "pathmoment", version, about = "Exact truncated moment problems on path *-algebras")]
struct Cli {
    /// Basis window: with or without the trivial paths.
    #[arg(long, global = true, value_enum)]
    window: Option<WindowArg>,

    /// JSON file listing vertices and letters from lowest to highest.
    #[arg(long, global = true)]
    order_file: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Trivial,
    Nontrivial,
}

#[derive(Subcommand)]
enum Command {
    /// Samples random path triples and checks the admissible-order axioms.
    OrderCheck {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Moment matrix verdicts.
    Moment {
        #[arg(value_enum)]
        test: MomentTest,
        functional: PathBuf,
    },
    /// Echelon basis of the moment matrix kernel.
    Kernel { functional: PathBuf },
    /// Right Gröbner basis of a generator list or of a flat kernel.
    Groebner(GroebnerArgs),
    /// Flat extension of a tip-maximal functional by one order.
    Extend {
        #[arg(long = "tip-maximal")]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        general_quiver: bool,
    },
    /// Value of the flat extension on a path of any length.
    Evaluate {
        #[arg(long)]
        functional: PathBuf,
        #[arg(long)]
        path: String,
    },
    /// Representations.
    #[command(subcommand)]
    Gns(GnsCommand),
    /// Sum-of-squares certificates.
    #[command(subcommand)]
    Sos(SosCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum MomentTest {
    Rank,
    Psd,
    Flat,
    Tipmax,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct GroebnerSource {
    #[arg(long)]
    generators: Option<PathBuf>,
    #[arg(long)]
    from_kernel: Option<PathBuf>,
}

#[derive(Args)]
struct GroebnerArgs {
    #[command(flatten)]
    source: GroebnerSource,
    /// One JSON line per reduction on standard error.
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand)]
enum GnsCommand {
    /// Representation on the quotient by the kernel ideal.
    Build {
        #[arg(long, conflicts_with = "quotient", required_unless_present = "quotient")]
        functional: Option<PathBuf>,
        #[arg(long)]
        quotient: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compression of a positive functional with a cyclic vector.
    Compress {
        #[arg(long)]
        functional: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Relation, adjointness and positivity report.
    Check { representation: PathBuf },
    /// Elements of bounded degree acting as zero.
    Kernel {
        representation: PathBuf,
        #[arg(long)]
        degree: usize,
    },
}

#[derive(Subcommand)]
enum SosCommand {
    /// Verifies a certificate, optionally checking positivity in representations.
    Verify {
        certificate: PathBuf,
        #[arg(long)]
        representation: Vec<PathBuf>,
    },
}

enum Outcome {
    Pass(Value),
    Fail(Value),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Pass(v)) => {
            println!("{v}");
            ExitCode::from(0)
        }
        Ok(Outcome::Fail(v)) => {
            println!("{v}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_invariant() { 3 } else { 2 })
        }
    }
}

fn verdict(ok: bool, v: Value) -> Outcome {
    if ok {
        Outcome::Pass(v)
    } else {
        Outcome::Fail(v)
    }
}

fn dir_of(file: &FsPath) -> PathBuf {
    file.parent().map(FsPath::to_path_buf).unwrap_or_default()
}

struct Ctx {
    order: Option<OrderFile>,
    window: Option<bool>,
}

impl Ctx {
    fn order(&self) -> Option<&OrderFile> {
        self.order.as_ref()
    }

    fn functional(&self, file: &FsPath) -> pathmoment::Result<(TruncatedFunctional, QuiverRef)> {
        let mut j: io::FunctionalJson = io::read_json(file)?;
        if let Some(w) = self.window {
            j.include_trivial = w;
        }
        let l = io::functional_from_json(&j, &dir_of(file), self.order())?;
        Ok((l, j.quiver))
    }
}

/// A quiver reference that stays valid from `out_dir`.
fn relocate(q: &QuiverRef, from_dir: &FsPath, out_dir: &FsPath) -> QuiverRef {
    let QuiverRef::File(f) = q else { return q.clone() };
    let Ok(abs) = std::fs::canonicalize(from_dir.join(f)) else { return q.clone() };
    let out_dir = if out_dir.as_os_str().is_empty() { FsPath::new(".") } else { out_dir };
    match (abs.parent(), std::fs::canonicalize(out_dir)) {
        (Some(p), Ok(o)) if p == o => QuiverRef::File(abs.file_name().unwrap().to_string_lossy().into_owned()),
        _ => QuiverRef::File(abs.to_string_lossy().into_owned()),
    }
}

/// Output on stdout refers to files from the working directory.
fn for_stdout(q: &QuiverRef, from_dir: &FsPath) -> QuiverRef {
    relocate(q, from_dir, FsPath::new("."))
}

fn write_file(path: &FsPath, text: &str) -> pathmoment::Result<()> {
    std::fs::write(path, format!("{text}\n")).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> pathmoment::Result<Outcome> {
    let ctx = Ctx {
        order: cli.order_file.as_deref().map(io::load_order).transpose()?,
        window: cli.window.map(|w| matches!(w, WindowArg::Trivial)),
    };
    match &cli.command {
        Command::OrderCheck { quiver, samples, seed, max_len } => {
            let alg = io::load_algebra(
                &QuiverRef::File(quiver.to_string_lossy().into_owned()),
                FsPath::new(""),
                ctx.order(),
            )?;
            Ok(order_check(&alg, *samples, *seed, *max_len))
        }
        Command::Moment { test, functional } => {
            let (l, _) = ctx.functional(functional)?;
            match test {
                MomentTest::Rank => {
                    let k = l.order();
                    let rk = pathmoment::rank(&l.moment_matrix(k)?.matrix);
                    let rkm1 = if k == 0 { 0 } else { pathmoment::rank(&l.block_decompose()?.a) };
                    Ok(Outcome::Pass(json!({"k": k, "rank_k": rk, "rank_km1": rkm1, "window": l.window()})))
                }
                MomentTest::Psd => {
                    let ok = l.is_psd()?;
                    Ok(verdict(ok, json!({"psd": ok, "window": l.window()})))
                }
                MomentTest::Flat => {
                    let r = l.is_flat()?;
                    Ok(verdict(r.flat, serde_json::to_value(&r).expect("serializable")))
                }
                MomentTest::Tipmax => {
                    let ok = l.is_tip_maximal()?;
                    Ok(verdict(ok, json!({"tip_maximal": ok, "window": l.window()})))
                }
            }
        }
        Command::Kernel { functional } => {
            let (l, q) = ctx.functional(functional)?;
            let ker = l.kernel_basis()?;
            let out = io::generators_to_json(l.algebra(), &ker, for_stdout(&q, &dir_of(functional)));
            Ok(Outcome::Pass(serde_json::to_value(out).expect("serializable")))
        }
        Command::Groebner(args) => {
            let (alg, gb, q) = if let Some(g) = &args.source.generators {
                let j: io::GeneratorsJson = io::read_json(g)?;
                let (alg, gens) = io::load_generators(g, ctx.order())?;
                let gb = right_groebner(&gens, &alg.order);
                (alg, gb, for_stdout(&j.quiver, &dir_of(g)))
            } else {
                let f = args.source.from_kernel.as_ref().expect("clap group");
                let (l, q) = ctx.functional(f)?;
                (l.algebra().clone(), kernel_groebner(&l)?, for_stdout(&q, &dir_of(f)))
            };
            if args.trace {
                for r in gb.trace() {
                    eprintln!(
                        "{}",
                        json!({"target": alg.fmt_path(&r.target), "by": alg.fmt_path(&r.by), "cofactor": alg.fmt_path(&r.cofactor)})
                    );
                }
            }
            let out = io::generators_to_json(&alg, gb.elements(), q);
            Ok(Outcome::Pass(serde_json::to_value(out).expect("serializable")))
        }
        Command::Extend { input, output, general_quiver } => {
            let (l, q) = ctx.functional(input)?;
            let ext = flat_extend_tip_maximal(&l, *general_quiver)?;
            let j = io::functional_to_json(&ext, relocate(&q, &dir_of(input), &dir_of(output)));
            write_file(output, &io::to_json_string(&j))?;
            let r = ext.is_flat()?;
            Ok(Outcome::Pass(
                json!({"output": output.to_string_lossy(), "k": ext.order(), "flat": r.flat, "rank_k": r.rank_k, "rank_km1": r.rank_km1}),
            ))
        }
        Command::Evaluate { functional, path } => {
            let (l, _) = ctx.functional(functional)?;
            let p = l.algebra().path(path)?;
            let fe = FlatExtension::new(l)?;
            let v = fe.evaluate(&p)?;
            Ok(Outcome::Pass(json!({"path": fe.base().algebra().fmt_path(&p), "value": v.to_string()})))
        }
        Command::Gns(g) => gns(&ctx, g),
        Command::Sos(SosCommand::Verify { certificate, representation }) => {
            let (alg, cert) = io::load_certificate(certificate, ctx.order())?;
            let v = cert.verify()?;
            let mut positive = Vec::new();
            let mut all_positive = true;
            if v.valid {
                for r in representation {
                    let rep = io::load_representation(r, ctx.order())?;
                    if rep.algebra.double != alg.double {
                        return Err(Error::invalid("representation and certificate use different quivers"));
                    }
                    let ok = sos::positive_in(&rep, &cert.target)?;
                    all_positive &= ok;
                    positive.push(json!({"representation": r.to_string_lossy(), "positive": ok}));
                }
            }
            let squares = v.squares.as_ref().map(|s| io::squares_to_json(&alg, s));
            Ok(verdict(v.valid && all_positive, json!({"valid": v.valid, "squares": squares, "positivity": positive})))
        }
    }
}

fn rep_summary(
    rep: &Representation,
    q: QuiverRef,
    output: Option<&PathBuf>,
    from_dir: &FsPath,
) -> pathmoment::Result<Outcome> {
    let report = check_relations(rep);
    let failures: Vec<&str> = report.failures().map(|c| c.relation.as_str()).collect();
    let mut out = json!({"dimension": rep.dim(), "relations_pass": report.all_pass(), "failures": failures});
    match output {
        Some(o) => {
            let j = io::representation_to_json(rep, relocate(&q, from_dir, &dir_of(o)));
            write_file(o, &io::to_json_string(&j))?;
            out["output"] = json!(o.to_string_lossy());
        }
        None => {
            let j = io::representation_to_json(rep, for_stdout(&q, from_dir));
            out["representation"] = serde_json::to_value(j).expect("serializable");
        }
    }
    Ok(verdict(report.all_pass(), out))
}

fn gns(ctx: &Ctx, g: &GnsCommand) -> pathmoment::Result<Outcome> {
    match g {
        GnsCommand::Build { functional, quotient, output } => {
            if let Some(f) = functional {
                let (l, q) = ctx.functional(f)?;
                let rep = build_representation(&l)?;
                rep_summary(&rep, q, output.as_ref(), &dir_of(f))
            } else {
                let qf = quotient.as_ref().expect("clap requires one source");
                let j: io::QuotientJson = io::read_json(qf)?;
                let quo = io::load_quotient(qf, ctx.order())?;
                let rep = from_groebner(quo.algebra, &quo.groebner, quo.basis, quo.gram)?;
                rep_summary(&rep, j.quiver, output.as_ref(), &dir_of(qf))
            }
        }
        GnsCommand::Compress { functional, output } => {
            let (l, q) = ctx.functional(functional)?;
            let rep = compress_representation(&l)?;
            rep_summary(&rep, q, output.as_ref(), &dir_of(functional))
        }
        GnsCommand::Check { representation } => {
            let rep = io::load_representation(representation, ctx.order())?;
            let report = check_relations(&rep);
            Ok(verdict(report.all_pass(), serde_json::to_value(&report).expect("serializable")))
        }
        GnsCommand::Kernel { representation, degree } => {
            if *degree == 0 {
                return Err(Error::invalid("degree must be at least 1"));
            }
            let j: io::RepresentationJson = io::read_json(representation)?;
            let rep = io::representation_from_json(&j, &dir_of(representation), ctx.order())?;
            let ker = rep_kernel(&rep, *degree, ctx.window.unwrap_or(true));
            let out = io::generators_to_json(&rep.algebra, &ker, for_stdout(&j.quiver, &dir_of(representation)));
            Ok(Outcome::Pass(serde_json::to_value(out).expect("serializable")))
        }
    }
}

/// Random path: random start vertex, then up to `max_len` random letters.
fn random_path(d: &DoubleQuiver, rng: &mut ChaCha8Rng, max_len: usize) -> Path {
    let start = rng.gen_range(0..d.vertex_count());
    random_walk_from(d, rng, start, max_len)
}

fn random_walk_from(d: &DoubleQuiver, rng: &mut ChaCha8Rng, start: usize, max_len: usize) -> Path {
    let len = rng.gen_range(0..=max_len);
    let mut p = Path::trivial(start);
    for _ in 0..len {
        let options: Vec<_> = d.letters().into_iter().filter(|l| d.letter_origin(*l) == p.terminal()).collect();
        if options.is_empty() {
            break;
        }
        let l = options[rng.gen_range(0..options.len())];
        p = p.compose(&d.letter_path(l)).expect("composable by construction");
    }
    p
}

fn order_check(alg: &PathAlgebra, samples: usize, seed: u64, max_len: usize) -> Outcome {
    let d = &alg.double;
    let o = &alg.order;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = [0usize; 3];
    for _ in 0..samples {
        // A1: b1, b2 end where b3 starts
        let b3 = random_path(d, &mut rng, max_len);
        let b1 = random_walk_from(d, &mut rng, b3.origin(), max_len).star();
        let b2 = random_walk_from(d, &mut rng, b3.origin(), max_len).star();
        if !(o.a1_holds(&b1, &b2, &b3) && o.a1_holds(&b2, &b1, &b3)) {
            violations[0] += 1;
        }
        // A2: b1, b2 start where b3 ends
        let b3 = random_path(d, &mut rng, max_len);
        let b1 = random_walk_from(d, &mut rng, b3.terminal(), max_len);
        let b2 = random_walk_from(d, &mut rng, b3.terminal(), max_len);
        if !(o.a2_holds(&b1, &b2, &b3) && o.a2_holds(&b2, &b1, &b3)) {
            violations[1] += 1;
        }
        // A3: composable b2 b3 b4
        let b3 = random_path(d, &mut rng, max_len);
        let b2 = random_walk_from(d, &mut rng, b3.origin(), max_len).star();
        let b4 = random_walk_from(d, &mut rng, b3.terminal(), max_len);
        if !o.a3_holds(&b2, &b3, &b4) {
            violations[2] += 1;
        }
    }
    let ok = violations.iter().all(|&v| v == 0);
    verdict(
        ok,
        json!({
            "samples": samples,
            "a1_violations": violations[0],
            "a2_violations": violations[1],
            "a3_violations": violations[2],
            "pass": ok,
        }),
    )
}
