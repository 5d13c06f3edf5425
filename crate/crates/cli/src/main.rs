use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use symplecta::darboux::darboux_extend;
use symplecta::demo::{equator_sweep, sphere_demo, SpherePoint};
use symplecta::fibration::{beta_j, eta_j, gamma_j, is_gr_j, is_lag_j, is_lag_j_split, Route};
use symplecta::heisenberg::{heisenberg_dim, HeisenbergElement, HeisenbergForm};
use symplecta::lagrangian::{ComplexBackend, ComplexLagrangian, SplitLagrangian};
use symplecta::lie::{cayley_basepoint_frame, cayley_transforms, root_data, CartanKind};
use symplecta::numeric::RealBackend;
use symplecta::orbit::{incidence, orbit_dim, sp_dim, stabilizer_dim, OrbitKind};
use symplecta::space::reduce_at;
use symplecta::{CompatibleJ, Error, Matrix, OrbitType, Subspace, SymplecticSpace, TolerancePolicy, Q};

#[derive(Parser)]
#[command(name = "symplecta", version, about = "Orbit types, Darboux bases, reduction and retractions for linear symplectic spaces")]
struct Cli {
    /// Arithmetic for structural commands. `rational` rejects float input.
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Rational)]
    backend: BackendArg,
    /// Worker threads for batch input (output order is unaffected).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Rational,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    Gamma,
    Beta,
    Eta,
}

#[derive(Subcommand)]
enum Cmd {
    /// Orbit type of subspaces, complex Lagrangians or split Lagrangians.
    /// INPUT holds one JSON document, an array of them, or JSON lines.
    Classify {
        input: Option<PathBuf>,
        /// Also report the dimensions behind the type.
        #[arg(long)]
        explain: bool,
    },
    /// Symplectic complement of a subspace.
    Complement { input: Option<PathBuf> },
    /// Darboux basis adapted to a subspace.
    Darboux { input: Option<PathBuf> },
    /// Reduce at the radical of a subspace and report its image.
    Reduce {
        input: Option<PathBuf>,
        /// Use the standard compatible J to pick the complement.
        #[arg(long)]
        with_j: bool,
    },
    /// Retract onto the compact suborbit determined by J.
    Retract {
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        map: MapArg,
        /// mostow | projection
        #[arg(long, default_value = "mostow")]
        route: String,
        /// File holding the matrix of J (default: the standard J).
        #[arg(long)]
        j: Option<PathBuf>,
    },
    /// Orbit and stabilizer dimensions of a type.
    OrbitDim {
        /// gr | lag | lagsplit
        #[arg(long)]
        kind: String,
        /// n0,nplus,nminus
        #[arg(long = "type")]
        ty: String,
    },
    /// Whether the orbit of TO lies in the closure of the orbit of FROM.
    Incidence {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// CSV of random points of the projective line with their types.
    SphereDemo {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit K evenly spaced real lines instead of random samples.
        #[arg(long, value_name = "K")]
        equator_sweep: Option<usize>,
    },
    /// Root datum of sp(2n) for a Cartan subalgebra.
    Roots {
        #[arg(long)]
        n: usize,
        /// a | h | t
        #[arg(long, default_value = "a")]
        cartan: String,
    },
    /// Partial Cayley transforms and the basepoint they produce.
    Cayley {
        #[arg(long)]
        gamma: usize,
        #[arg(long)]
        sigma: usize,
        /// Half-dimension (default gamma + sigma).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Matrix forms and Ziegler parameters of Heisenberg elements. With
    /// `--type` and no INPUT, reports the identity of that type.
    Heisenberg {
        input: Option<PathBuf>,
        /// darboux | triangular | ziegler
        #[arg(long, default_value = "darboux")]
        form: String,
        #[arg(long = "type")]
        ty: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let pol = TolerancePolicy::from_env();
    match run(&cli, &pol) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if cli.backend == BackendArg::Rational && format!("{e:#}").contains("not accepted") {
                eprintln!("hint: pass --backend float for floating-point input");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse(_)) | None => 2,
        Some(Error::NoConvergence { .. }) => 4,
        Some(_) => 3,
    }
}

fn run(cli: &Cli, pol: &TolerancePolicy) -> anyhow::Result<()> {
    let rational = cli.backend == BackendArg::Rational;
    match &cli.cmd {
        Cmd::Classify { input, explain } => {
            let docs = documents(&read_input(input.as_ref())?)?;
            let out: Vec<_> = docs
                .par_iter()
                .map(|d| if rational { classify::<Q>(d, *explain, pol) } else { classify::<f64>(d, *explain, pol) })
                .collect();
            emit(out, |(v, human)| {
                eprintln!("{human}");
                v
            })
        }
        Cmd::Complement { input } => per_doc(input.as_ref(), |d| {
            if rational {
                complement::<Q>(d, pol)
            } else {
                complement::<f64>(d, pol)
            }
        }),
        Cmd::Darboux { input } => per_doc(input.as_ref(), |d| if rational { darboux::<Q>(d, pol) } else { darboux::<f64>(d, pol) }),
        Cmd::Reduce { input, with_j } => per_doc(input.as_ref(), |d| {
            if rational {
                reduce::<Q>(d, *with_j, pol)
            } else {
                reduce::<f64>(d, *with_j, pol)
            }
        }),
        Cmd::Retract { input, map, route, j } => {
            let route: Route = route.parse()?;
            let jm = match j {
                Some(p) => Some(Matrix::from_json(&parse_json(&read_input(Some(p))?)?)?),
                None => None,
            };
            per_doc(input.as_ref(), |d| retract(d, *map, route, jm.as_ref(), pol))
        }
        Cmd::OrbitDim { kind, ty } => {
            let kind: OrbitKind = kind.parse()?;
            let t = parse_type(ty)?;
            print_line(&json!({
                "kind": kind,
                "type": t,
                "orbit_dim": orbit_dim(kind, t),
                "stabilizer_dim": stabilizer_dim(kind, t),
                "group_dim": sp_dim(t.n()),
            }))
        }
        Cmd::Incidence { kind, from, to } => {
            let kind: OrbitKind = kind.parse()?;
            let (a, b) = (parse_type(from)?, parse_type(to)?);
            print_line(&json!({ "kind": kind, "from": a, "to": b, "in_closure": incidence(kind, a, b)? }))
        }
        Cmd::SphereDemo { samples, seed, equator_sweep: sweep } => {
            let pts = match sweep {
                Some(k) => equator_sweep(*k, pol)?,
                None => sphere_demo(&mut ChaCha8Rng::seed_from_u64(*seed), *samples, pol)?,
            };
            let mut out = io::stdout().lock();
            writeln!(out, "{}", SpherePoint::CSV_HEADER)?;
            for p in &pts {
                writeln!(out, "{}", p.csv_row())?;
            }
            Ok(())
        }
        Cmd::Roots { n, cartan } => {
            let kind: CartanKind = cartan.parse()?;
            print_line(&root_data(kind, *n)?.to_json())
        }
        Cmd::Cayley { gamma, sigma, n } => {
            let n = n.unwrap_or(gamma + sigma);
            let c = cayley_transforms(*gamma, *sigma, n, pol)?;
            print_line(&json!({
                "n": n,
                "c_gamma": Matrix::Complex(c.c_gamma).to_json(),
                "c_sigma": Matrix::Complex(c.c_sigma).to_json(),
                "basepoint": c.basepoint.to_json(),
                "basepoint_exact": { "frame": Matrix::Gaussian(cayley_basepoint_frame(*gamma, *sigma, n)?).to_json() },
                "basepoint_type": c.basepoint_type,
            }))
        }
        Cmd::Heisenberg { input, form, ty } => {
            let form: HeisenbergForm = form.parse()?;
            match (input, ty) {
                (None, Some(ty)) => print_line(&heisenberg_report(&HeisenbergElement::identity(parse_type(ty)?), form, true)),
                _ => per_doc(input.as_ref(), |d| Ok(heisenberg_report(&HeisenbergElement::<Q>::from_json(d, pol)?, form, false))),
            }
        }
    }
}

fn read_input(path: Option<&PathBuf>) -> anyhow::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display())),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("cannot read stdin")?;
            Ok(s)
        }
    }
}

fn parse_json(text: &str) -> Result<Value, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))
}

/// A single document, a top-level array of documents, or a stream of them.
fn documents(text: &str) -> Result<Vec<Value>, Error> {
    let docs = serde_json::Deserializer::from_str(text)
        .into_iter::<Value>()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("malformed JSON: {e}")))?;
    match docs.as_slice() {
        [] => Err(Error::Parse("empty input".into())),
        [Value::Array(items)] => Ok(items.clone()),
        _ => Ok(docs),
    }
}

fn print_line(v: &Value) -> anyhow::Result<()> {
    writeln!(io::stdout().lock(), "{}", serde_json::to_string(v)?)?;
    Ok(())
}

/// Prints results in input order up to the first failure.
fn emit<T>(results: Vec<symplecta::Result<T>>, mut show: impl FnMut(T) -> Value) -> anyhow::Result<()> {
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(x) => print_line(&show(x))?,
            Err(e) => return Err(anyhow::Error::new(e).context(format!("document {}", i + 1))),
        }
    }
    Ok(())
}

fn per_doc(input: Option<&PathBuf>, f: impl Fn(&Value) -> symplecta::Result<Value> + Sync + Send) -> anyhow::Result<()> {
    let docs = documents(&read_input(input)?)?;
    emit(docs.par_iter().map(f).collect(), |v| v)
}

fn parse_type(s: &str) -> Result<OrbitType, Error> {
    let parts: Vec<&str> = s.trim().trim_matches(|c| matches!(c, '[' | ']' | '(' | ')')).split(',').collect();
    match parts.iter().map(|p| p.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>() {
        Ok(v) if v.len() == 3 => Ok(OrbitType::new(v[0], v[1], v[2])),
        _ => Err(Error::Parse(format!("type '{s}' is not of the form n0,nplus,nminus"))),
    }
}

enum Doc {
    Subspace,
    Lagrangian,
    Split,
}

fn doc_kind(d: &Value) -> Result<Doc, Error> {
    let has = |k| d.get(k).is_some();
    if has("basis") {
        Ok(Doc::Subspace)
    } else if has("frame") {
        Ok(Doc::Lagrangian)
    } else if has("geq0") {
        Ok(Doc::Split)
    } else {
        Err(Error::Parse("expected a subspace ('basis'), a Lagrangian ('frame') or a split Lagrangian ('geq0', 'leq0')".into()))
    }
}

fn subspace_only<R: RealBackend>(d: &Value, pol: &TolerancePolicy) -> symplecta::Result<Subspace<R>> {
    match doc_kind(d)? {
        Doc::Subspace => Subspace::from_json(d, pol),
        _ => Err(Error::Parse("this command takes a subspace ('basis')".into())),
    }
}

fn type_str(t: OrbitType) -> String {
    format!("({},{},{})", t.n0, t.nplus, t.nminus)
}

fn classify<R>(d: &Value, explain: bool, pol: &TolerancePolicy) -> symplecta::Result<(Value, String)>
where
    R: RealBackend,
    R::Cx: ComplexBackend,
{
    match doc_kind(d)? {
        Doc::Subspace => {
            let w = Subspace::<R>::from_json(d, pol)?;
            let r = w.type_report(pol);
            let n = w.space().n();
            let human = format!("subspace of dimension {} in R^{}: type {}", r.dim, 2 * n, type_str(r.orbit_type));
            let v = if explain {
                json!({
                    "type": r.orbit_type,
                    "n": n,
                    "dim": r.dim,
                    "dim_complement": 2 * n - r.dim,
                    "dim_intersection": r.dim_radical,
                    "dim_sum": 2 * n - r.dim_radical,
                    "isotropic": r.isotropic,
                    "coisotropic": r.coisotropic,
                    "lagrangian": r.lagrangian,
                    "symplectic": r.symplectic,
                })
            } else {
                json!(r.orbit_type)
            };
            Ok((v, human))
        }
        Doc::Lagrangian => {
            let f = ComplexLagrangian::<R::Cx>::from_json(d, pol)?;
            let t = f.lag_type(pol);
            let human = format!("complex Lagrangian in C^{}: type {}", 2 * f.n(), type_str(t));
            let v = if explain {
                json!({
                    "type": t,
                    "n": f.n(),
                    "dim_real_part": f.kernel(pol).cols(),
                    "kappa_rank": t.nplus + t.nminus,
                    "kappa_signature": [t.nplus, t.nminus],
                })
            } else {
                json!(t)
            };
            Ok((v, human))
        }
        Doc::Split => {
            let s = SplitLagrangian::<R::Cx>::from_json(d, pol)?;
            let t = s.lag_type(pol);
            let human = format!("split complex Lagrangian in C^{}: type {}", 2 * s.n(), type_str(t));
            let v = if explain {
                json!({ "type": t, "n": s.n(), "dim_geq0": s.geq0().cols(), "dim_leq0": s.leq0().cols() })
            } else {
                json!(t)
            };
            Ok((v, human))
        }
    }
}

fn complement<R: RealBackend>(d: &Value, pol: &TolerancePolicy) -> symplecta::Result<Value> {
    Ok(subspace_only::<R>(d, pol)?.symplectic_complement(pol).to_json())
}

fn darboux<R: RealBackend>(d: &Value, pol: &TolerancePolicy) -> symplecta::Result<Value> {
    Ok(darboux_extend(&subspace_only::<R>(d, pol)?, None, pol)?.to_json())
}

fn reduce<R: RealBackend>(d: &Value, with_j: bool, pol: &TolerancePolicy) -> symplecta::Result<Value> {
    let w = subspace_only::<R>(d, pol)?;
    let w0 = w.radical(pol);
    let j = with_j.then(|| CompatibleJ::<R>::standard(w.space().n()));
    let red = reduce_at(&w0, j.as_ref(), pol)?;
    let image = red.project_subspace(&w, pol)?;
    Ok(json!({
        "w0": w0.to_json(),
        "m": red.m(),
        "complement_basis": R::wrap(red.complement_basis().clone()).to_json(),
        "omega_tilde": R::wrap(red.omega_tilde()).to_json(),
        "j_tilde": red.j_tilde().map(|m| R::wrap(m.clone()).to_json()),
        "image": image.to_json(),
        "image_type": image.subspace_type(pol),
    }))
}

fn retract(d: &Value, map: MapArg, route: Route, jm: Option<&Matrix>, pol: &TolerancePolicy) -> symplecta::Result<Value> {
    let n = match doc_kind(d)? {
        Doc::Subspace => Subspace::<f64>::from_json(d, pol)?.space().n(),
        Doc::Lagrangian => ComplexLagrangian::<symplecta::C64>::from_json(d, pol)?.n(),
        Doc::Split => SplitLagrangian::<symplecta::C64>::from_json(d, pol)?.n(),
    };
    let j = match jm {
        Some(m) => {
            let m = f64::unwrap(m).ok_or_else(|| Error::Parse("J must be a real matrix".into()))?;
            CompatibleJ::check(m, &SymplecticSpace::standard(n), pol)?
        }
        None => CompatibleJ::standard(n),
    };
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    let (name, value, residual, member, before, after) = match map {
        MapArg::Gamma => {
            let w = subspace_only::<f64>(d, pol)?;
            let r = gamma_j(&w, &j, route, pol)?;
            let ok = is_gr_j(&r.value, &j, pol);
            ("gamma", r.value.to_json(), r.residual, ok, w.subspace_type(pol), r.value.subspace_type(pol))
        }
        MapArg::Beta => {
            let f = match doc_kind(d)? {
                Doc::Lagrangian => ComplexLagrangian::from_json(d, pol)?,
                _ => return Err(Error::Parse("beta takes a complex Lagrangian ('frame')".into())),
            };
            let r = beta_j(&f, &j, route, pol)?;
            let ok = is_lag_j(&r.value, &j, pol);
            ("beta", r.value.to_json(), r.residual, ok, f.lag_type(pol), r.value.lag_type(pol))
        }
        MapArg::Eta => {
            let s = match doc_kind(d)? {
                Doc::Split => SplitLagrangian::from_json(d, pol)?,
                _ => return Err(Error::Parse("eta takes a split Lagrangian ('geq0', 'leq0')".into())),
            };
            let r = eta_j(&s, &j, route, pol)?;
            let ok = is_lag_j_split(&r.value, &j, pol);
            ("eta", r.value.to_json(), r.residual, ok, s.lag_type(pol), r.value.lag_type(pol))
        }
    };
    Ok(json!({
        "map": name,
        "route": route.to_string(),
        "value": value,
        "residual": residual,
        "membership": verdict(member),
        "input_type": before,
        "output_type": after,
    }))
}

fn heisenberg_report(h: &HeisenbergElement<Q>, form: HeisenbergForm, with_element: bool) -> Value {
    let t = h.t;
    let (lambda, mu, x) = h.ziegler();
    let m = |a: Mat| Matrix::Rational(a).to_json();
    let mut v = json!({
        "type": t,
        "dim": heisenberg_dim(t),
        "form": format!("{form:?}").to_lowercase(),
        "matrix": m(h.to_matrix(form)),
        "ziegler": { "lambda": m(lambda), "mu": m(mu), "x": m(x) },
    });
    if with_element {
        v["element"] = h.to_json();
    }
    v
}

type Mat = symplecta::Mat<Q>;
