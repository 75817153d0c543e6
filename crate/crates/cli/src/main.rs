mod output;

use std::io::{self, BufWriter};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fubini_core::exactnum::{format_rational, int, parse_rational, to_f64, RatPoly};
use fubini_core::fubini::{prob_bell_poly, prob_fubini_higher, prob_fubini_poly};
use fubini_core::identities::{self as ids, GSpec, McConfig, TailReport};
use fubini_core::stirling::TriTable;
use fubini_core::{DistSpec, Error, Execution, Rational, Route};

use output::{Cell, Format, Record, Writer};

const THREADS_ENV: &str = "FUBINI_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "fubini",
    version,
    about = "Exact probabilistic Stirling, Bell and Fubini polynomials",
    after_help = "Distributions: degenerate:<c> | bernoulli:<p> | poisson:<lambda> | geometric:<r> | exponential\n\
                  Worker threads default to the FUBINI_THREADS environment variable."
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Print exact rationals as decimals.
    #[arg(long, global = true)]
    float: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Table of S(n,k), or S_Y(n,k) when a distribution is given, for n up to N.
    Stirling {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dist: Option<DistSpec>,
    },
    /// Probabilistic Fubini polynomial W_n^Y at a point, by one or all routes.
    Fubini {
        #[arg(long)]
        dist: DistSpec,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = rational, default_value = "1")]
        x: Rational,
        /// Order of the higher-order polynomial; only the `def` route supports orders other than 1.
        #[arg(long, allow_hyphen_values = true, value_parser = rational, default_value = "1")]
        order: Rational,
        #[arg(long, value_enum, default_value_t = RouteArg::Def)]
        route: RouteArg,
        /// Print coefficients instead of a value.
        #[arg(long)]
        poly: bool,
    },
    /// Probabilistic Bell polynomial B_n^Y at a point.
    Bell {
        #[arg(long)]
        dist: DistSpec,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = rational, default_value = "1")]
        x: Rational,
        #[arg(long)]
        poly: bool,
    },
    /// Check identities; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Monte Carlo estimate of W_n^Y(x).
    Mc {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = ids::montecarlo::DEFAULT_CHUNK_SIZE)]
        chunk_size: u64,
        #[arg(long)]
        dist: DistSpec,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = rational, default_value = "1")]
        x: Rational,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Def,
    Rec,
    Det,
    Trudi,
    All,
}

impl RouteArg {
    fn routes(self) -> Vec<Route> {
        match self {
            RouteArg::Def => vec![Route::Definition],
            RouteArg::Rec => vec![Route::Recurrence],
            RouteArg::Det => vec![Route::Determinant],
            RouteArg::Trudi => vec![Route::Trudi],
            RouteArg::All => Route::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Identity {
    Transform,
    Powersum,
    FubiniSeries,
    Negbin,
    Dobinski,
    Mixture,
    Polylog,
    Apostol,
    Prop31,
    Prop32,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One or more identities, comma separated or repeated.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    identity: Vec<Identity>,
    #[arg(long, default_value = "degenerate:1")]
    dist: DistSpec,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, allow_hyphen_values = true, value_parser = rational, default_value = "1/2")]
    x: Rational,
    /// Order for `negbin`, geometric parameter for `polylog`.
    #[arg(long, allow_hyphen_values = true, value_parser = rational, default_value = "1/2")]
    r: Rational,
    /// Scale c for `apostol`; the Bernoulli parameter comes from --dist.
    #[arg(long, allow_hyphen_values = true, value_parser = rational, default_value = "-1")]
    c: Rational,
    /// Differential order k for `prop31` and `prop32`.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Scale v for `prop31`.
    #[arg(long, allow_hyphen_values = true, value_parser = rational, default_value = "1")]
    v: Rational,
    /// Polynomial f for `transform`, as coefficients `c0,c1,...`.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,1")]
    f: String,
    /// Outer function for `transform`: exp | geom | negbin:<r>.
    #[arg(long, default_value = "exp")]
    g: GSpec,
    #[arg(long, default_value_t = ids::DEFAULT_TRUNC)]
    trunc: usize,
    #[arg(long, default_value_t = ids::DEFAULT_TOL)]
    tol: f64,
    /// Series order for `apostol`, `prop31` and `prop32`.
    #[arg(long, default_value_t = 8)]
    order: usize,
}

fn rational(s: &str) -> Result<Rational, Error> {
    parse_rational(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(t) if t > 0 => {
                fubini_core::par::configure_threads(t);
            }
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    let stdout = io::stdout();
    let mut out = Writer::new(BufWriter::new(stdout.lock()), cli.format, cli.float);
    let result = run(cli.command, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(true), Ok(())) => ExitCode::SUCCESS,
        (Ok(false), Ok(())) => ExitCode::from(1),
        (Err(RunError::Io(e)), _) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        (Err(e), _) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        (_, Err(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        (_, Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[derive(Debug)]
enum RunError {
    Core(Error),
    Io(io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Core(e) => e.fmt(f),
            RunError::Io(e) => e.fmt(f),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Core(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

type Out<'a> = Writer<BufWriter<io::StdoutLock<'a>>>;

/// Returns whether every check passed.
fn run(cmd: Command, out: &mut Out<'_>) -> Result<bool, RunError> {
    match cmd {
        Command::Stirling { n, dist } => {
            let table = match &dist {
                Some(d) => TriTable::prob_stirling(d, n),
                None => TriTable::stirling(n),
            };
            for (row_n, k, v) in table.entries() {
                out.write(&vec![
                    ("n", Cell::Int(row_n as u64)),
                    ("k", Cell::Int(k as u64)),
                    ("value", Cell::Exact(v.clone())),
                ])?;
            }
            Ok(true)
        }
        Command::Fubini {
            dist,
            n,
            x,
            order,
            route,
            poly,
        } => fubini_cmd(out, &dist, n, &x, &order, route, poly),
        Command::Bell { dist, n, x, poly } => {
            let p = prob_bell_poly(&dist, n);
            if poly {
                write_poly(out, &dist, n, None, &p)?;
            } else {
                out.write(&vec![
                    ("dist", Cell::Text(dist.to_string())),
                    ("n", Cell::Int(n as u64)),
                    ("x", Cell::Exact(x.clone())),
                    ("value", Cell::Exact(p.eval(&x))),
                ])?;
            }
            Ok(true)
        }
        Command::Verify(args) => verify_cmd(out, &args),
        Command::Mc {
            samples,
            seed,
            chunk_size,
            dist,
            n,
            x,
        } => {
            let cfg = McConfig::new(samples, seed)
                .with_chunk_size(chunk_size)
                .with_execution(Execution::default());
            let est = ids::mc_fubini_with(&dist, n, &x, cfg)?;
            let exact = prob_fubini_poly(&dist, n).eval(&x);
            let z = est.zscore(to_f64(&exact));
            out.write(&vec![
                ("dist", Cell::Text(dist.to_string())),
                ("n", Cell::Int(n as u64)),
                ("x", Cell::Exact(x)),
                ("samples", Cell::Int(samples)),
                ("seed", Cell::Int(seed)),
                ("estimate", Cell::Float(est.value)),
                ("stderr", Cell::Float(est.stderr)),
                ("exact", Cell::Exact(exact)),
                ("zscore", Cell::Float(z)),
            ])?;
            Ok(true)
        }
    }
}

fn write_poly(
    out: &mut Out<'_>,
    dist: &DistSpec,
    n: usize,
    route: Option<Route>,
    p: &RatPoly,
) -> Result<(), RunError> {
    for k in 0..=n {
        let mut rec: Record = vec![
            ("dist", Cell::Text(dist.to_string())),
            ("n", Cell::Int(n as u64)),
        ];
        if let Some(r) = route {
            rec.push(("route", Cell::Text(r.name().into())));
        }
        rec.push(("k", Cell::Int(k as u64)));
        rec.push(("coeff", Cell::Exact(p.coeff(k))));
        out.write(&rec)?;
    }
    Ok(())
}

fn fubini_cmd(
    out: &mut Out<'_>,
    dist: &DistSpec,
    n: usize,
    x: &Rational,
    order: &Rational,
    route: RouteArg,
    poly: bool,
) -> Result<bool, RunError> {
    let routes = route.routes();
    let unit_order = order == &int(1);
    if !unit_order && routes != [Route::Definition] {
        return Err(Error::Usage(format!(
            "order {} is only supported by the def route",
            format_rational(order)
        ))
        .into());
    }
    let exec = Execution::default();
    if poly {
        let polys = exec.map(&routes, |r| -> Result<RatPoly, Error> {
            if !unit_order {
                return Ok(prob_fubini_higher(dist, n, order));
            }
            // sample points 0..=n determine a degree-n polynomial
            let points: Vec<(Rational, Rational)> = (0..=n)
                .map(|j| {
                    let xj = int(j as i64);
                    let v = r.eval(dist, n, &xj);
                    (xj, v)
                })
                .collect();
            RatPoly::interpolate(&points)
        });
        for (r, p) in routes.iter().zip(polys) {
            write_poly(out, dist, n, Some(*r), &p?)?;
        }
        return Ok(true);
    }
    let values = exec.map(&routes, |r| {
        if unit_order {
            r.eval(dist, n, x)
        } else {
            prob_fubini_higher(dist, n, order).eval(x)
        }
    });
    for (r, v) in routes.iter().zip(values) {
        let mut rec: Record = vec![
            ("dist", Cell::Text(dist.to_string())),
            ("n", Cell::Int(n as u64)),
            ("x", Cell::Exact(x.clone())),
        ];
        if !unit_order {
            rec.push(("order", Cell::Exact(order.clone())));
        }
        rec.push(("route", Cell::Text(r.name().into())));
        rec.push(("value", Cell::Exact(v)));
        out.write(&rec)?;
    }
    Ok(true)
}

type Checks = Vec<(&'static str, Result<Outcome, Error>)>;

enum Outcome {
    Tail(TailReport),
    Exact(bool),
}

fn parse_poly(s: &str) -> Result<RatPoly, Error> {
    let coeffs = s
        .split(',')
        .map(|c| parse_rational(c.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RatPoly::new(coeffs))
}

fn blank_tail() -> Record {
    vec![
        ("exact", Cell::Null),
        ("terms_used", Cell::Null),
        ("last_term", Cell::Null),
    ]
}

fn verify_cmd(out: &mut Out<'_>, a: &VerifyArgs) -> Result<bool, RunError> {
    let mut identities = a.identity.clone();
    identities.sort();
    identities.dedup();
    let mut all_ok = true;
    for id in identities {
        let q = |v: &Rational| format_rational(v);
        let mut inputs: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| inputs.push((k.to_string(), v));
        let series = |name: &str| !matches!(name, "apostol" | "prop31");
        let (name, outcomes): (&str, Checks) = match id {
            Identity::Transform => {
                let f = parse_poly(&a.f)?;
                put("dist", a.dist.to_string());
                put("f", a.f.clone());
                put("g", a.g.to_string());
                put("x", q(&a.x));
                let r = ids::series_transform_check(&f, &a.g, &a.dist, &a.x, a.trunc, a.tol);
                ("transform", vec![("transform", r.map(Outcome::Tail))])
            }
            Identity::Powersum => {
                put("dist", a.dist.to_string());
                put("n", a.n.to_string());
                put("x", q(&a.x));
                let r = ids::power_sum_identity(&a.dist, a.n, &a.x, a.trunc, a.tol);
                ("powersum", vec![("powersum", r.map(Outcome::Tail))])
            }
            Identity::FubiniSeries => {
                put("dist", a.dist.to_string());
                put("n", a.n.to_string());
                let r = ids::fubini_number_series_check(&a.dist, a.n, a.trunc, a.tol);
                (
                    "fubini-series",
                    vec![("fubini-series", r.map(Outcome::Tail))],
                )
            }
            Identity::Negbin => {
                put("dist", a.dist.to_string());
                put("n", a.n.to_string());
                put("r", q(&a.r));
                put("x", q(&a.x));
                let r = ids::negbin_transform_check(&a.dist, a.n, &a.r, &a.x, a.trunc, a.tol);
                ("negbin", vec![("negbin", r.map(Outcome::Tail))])
            }
            Identity::Dobinski => {
                put("dist", a.dist.to_string());
                put("n", a.n.to_string());
                put("x", q(&a.x));
                let r = ids::dobinski_check(&a.dist, a.n, &a.x, a.trunc, a.tol);
                ("dobinski", vec![("dobinski", r.map(Outcome::Tail))])
            }
            Identity::Mixture => {
                put("dist", a.dist.to_string());
                put("n", a.n.to_string());
                put("x", q(&a.x));
                let r = ids::geometric_mixture_check(&a.dist, a.n, &a.x, a.trunc, a.tol);
                ("mixture", vec![("mixture", r.map(Outcome::Tail))])
            }
            Identity::Polylog => {
                put("r", q(&a.r));
                put("n", a.n.to_string());
                put("x", q(&a.x));
                let main = ids::polylog_limit_check(&a.r, a.n, &a.x, a.trunc, a.tol);
                let variant = ids::polylog_limit_variant_check(&a.r, a.n, &a.x, a.trunc, a.tol);
                (
                    "polylog",
                    vec![
                        ("polylog", main.map(Outcome::Tail)),
                        ("polylog-variant", variant.map(Outcome::Tail)),
                    ],
                )
            }
            Identity::Apostol => {
                let DistSpec::Bernoulli(p) = &a.dist else {
                    return Err(Error::Usage("apostol needs --dist bernoulli:<p>".into()).into());
                };
                put("dist", a.dist.to_string());
                put("c", q(&a.c));
                put("n", a.n.to_string());
                put("order", a.order.max(a.n).to_string());
                let r = ids::apostol_euler_check(p, &a.c, a.n, a.order.max(a.n));
                ("apostol", vec![("apostol", r.map(Outcome::Exact))])
            }
            Identity::Prop31 => {
                put("dist", a.dist.to_string());
                put("k", a.k.to_string());
                put("x", q(&a.x));
                put("v", q(&a.v));
                put("order", a.order.to_string());
                let r = ids::prop31_check(&a.dist, a.k, &a.x, &a.v, a.order);
                ("prop31", vec![("prop31", r.map(Outcome::Exact))])
            }
            Identity::Prop32 => {
                put("dist", a.dist.to_string());
                put("k", a.k.to_string());
                put("x", q(&a.x));
                put("order", a.order.to_string());
                let r = ids::prop32_check(&a.dist, a.k, &a.x, a.trunc, a.order, a.tol);
                ("prop32", vec![("prop32", r.map(Outcome::Tail))])
            }
        };
        if matches!(
            id,
            Identity::Transform
                | Identity::Powersum
                | Identity::FubiniSeries
                | Identity::Negbin
                | Identity::Dobinski
                | Identity::Mixture
                | Identity::Polylog
                | Identity::Prop32
        ) {
            inputs.push(("trunc".into(), a.trunc.to_string()));
            inputs.push(("tol".into(), output::float_text(a.tol)));
        }
        for (label, outcome) in outcomes {
            let mut rec: Record = vec![
                ("command", Cell::Text("verify".into())),
                ("identity", Cell::Text(label.into())),
                ("inputs", Cell::Map(inputs.clone())),
            ];
            let ok = match outcome {
                Ok(Outcome::Tail(t)) => {
                    rec.push((
                        "status",
                        Cell::Text(if t.converged { "ok" } else { "failed" }.into()),
                    ));
                    rec.push(("result", Cell::Float(t.partial_sum)));
                    rec.push(("exact", Cell::Float(t.exact)));
                    rec.push(("terms_used", Cell::Int(t.terms_used as u64)));
                    rec.push(("last_term", Cell::Float(t.last_term_magnitude)));
                    t.converged
                }
                Ok(Outcome::Exact(holds)) => {
                    rec.push((
                        "status",
                        Cell::Text(if holds { "ok" } else { "failed" }.into()),
                    ));
                    rec.push(("result", Cell::Bool(holds)));
                    rec.extend(blank_tail());
                    holds
                }
                Err(Error::Domain(msg)) if series(name) => {
                    rec.push(("status", Cell::Text("diverged".into())));
                    rec.push(("result", Cell::Text(msg)));
                    rec.extend(blank_tail());
                    false
                }
                Err(e) => return Err(e.into()),
            };
            out.write(&rec)?;
            all_ok &= ok;
        }
    }
    Ok(all_ok)
}
