//! Acceptance suite. Runs without the libtest harness so that one line per
//! criterion is always printed; exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};

use fubini_core::exactnum::{binomial, factorial, falling, int, pow, ratio, to_f64};
use fubini_core::fubini::{
    classical_fubini_poly, prob_fubini_number, prob_fubini_poly, route_agreement,
};
use fubini_core::identities::{
    apostol_euler_check, dobinski_check, fubini_number_series_check, geometric_mixture_check,
    mc_fubini_with, polylog_conv, polylog_limit_check, prop31_check, prop32_check, McConfig,
    TailReport,
};
use fubini_core::stirling::{
    bell_partial, prob_stirling, prob_stirling_alternating, prob_stirling_egf,
};
use fubini_core::{DistSpec, Execution, RatPoly, Rational};

const SERIES_TOL: f64 = 1e-9;
const SERIES_TERMS: usize = 500;
const PROP32_TOL: f64 = 1e-8;
const MC_SAMPLES: u64 = 1_000_000;
const MC_SEED: u64 = 20_240_601;
const MC_MAX_Z: f64 = 4.0;
const ROUTE_BUDGET: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn catalog() -> Vec<DistSpec> {
    vec![
        DistSpec::Degenerate(int(1)),
        DistSpec::Bernoulli(ratio(1, 2)),
        DistSpec::Poisson(int(1)),
        DistSpec::GeometricOnSupport1(ratio(1, 2)),
        DistSpec::StdExponential,
    ]
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// Independent oracles

/// `S(n,k) = (1/k!) Σ_j (-1)^{k-j} C(k,j) j^n`.
fn stirling_oracle(n: usize, k: usize) -> Rational {
    let mut acc = Rational::zero();
    for j in 0..=k {
        let term = Rational::from_integer(binomial(k, j)) * pow(&int(j as i64), n);
        if (k - j).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc / Rational::from_integer(factorial(k))
}

/// `W_n(x) = Σ_k S(n,k) k! x^k`.
fn classical_fubini_oracle(n: usize) -> RatPoly {
    RatPoly::new(
        (0..=n)
            .map(|k| stirling_oracle(n, k) * Rational::from_integer(factorial(k)))
            .collect(),
    )
}

/// `L(n,k) = C(n-1,k-1) n!/k!`, with `L(0,0) = 1`.
fn lah_oracle(n: usize, k: usize) -> Rational {
    match (n, k) {
        (0, 0) => Rational::one(),
        (_, 0) => Rational::zero(),
        _ if k > n => Rational::zero(),
        _ => {
            Rational::from_integer(binomial(n - 1, k - 1) * factorial(n))
                / Rational::from_integer(factorial(k))
        }
    }
}

/// `E S_j^m` for all `j ≤ max_j`, `m ≤ max_n`, by
/// `E S_j^m = Σ_i C(m,i) E S_{j-1}^i E Y^{m-i}`.
fn sum_moment_oracle(dist: &DistSpec, max_j: usize, max_n: usize) -> Vec<Vec<Rational>> {
    let mom = dist.moments(max_n);
    let mut rows = vec![(0..=max_n)
        .map(|m| {
            if m == 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect::<Vec<_>>()];
    for j in 1..=max_j {
        let prev = &rows[j - 1];
        let row = (0..=max_n)
            .map(|m| {
                (0..=m)
                    .map(|i| Rational::from_integer(binomial(m, i)) * &prev[i] * &mom[m - i])
                    .sum()
            })
            .collect();
        rows.push(row);
    }
    rows
}

// Criteria

fn classical_reduction() -> Outcome {
    let expected = [1, 1, 3, 13, 75, 541];
    let deg = DistSpec::Degenerate(int(1));
    for (n, &want) in expected.iter().enumerate() {
        let oracle = classical_fubini_oracle(n).eval(&Rational::one());
        ensure(oracle == int(want), || {
            format!("oracle W_{n} = {oracle}, expected {want}")
        })?;
        let got = prob_fubini_number(&deg, n);
        ensure(got == oracle, || format!("W_{n} = {got}, oracle {oracle}"))?;
    }
    Ok("W_0..W_5 = 1, 1, 3, 13, 75, 541".into())
}

fn four_routes() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for x in [int(1), ratio(-2, 3)] {
        for ra in route_agreement(&catalog(), 12, &x, Execution::default()) {
            ensure(ra.agrees(), || {
                format!("{} n={} x={x}: {:?}", ra.dist, ra.n, ra.values)
            })?;
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < ROUTE_BUDGET, || {
        format!("took {elapsed:?}, budget {ROUTE_BUDGET:?}")
    })?;
    Ok(format!(
        "{checked} (dist, n, x) cases agree in {:.2?}",
        elapsed
    ))
}

fn three_stirling_routes() -> Outcome {
    let mut checked = 0;
    for d in catalog() {
        let mom = d.moments(12);
        for n in 0..=12 {
            for k in 0..=n {
                let via_bell = if n == 0 {
                    Rational::one()
                } else if k == 0 {
                    Rational::zero()
                } else {
                    bell_partial(&mom[1..], n, k).map_err(|e| e.to_string())?
                };
                let alt = prob_stirling_alternating(&d, n, k);
                let egf = prob_stirling_egf(&d, n, k);
                ensure(via_bell == alt && alt == egf, || {
                    format!("{d} S_Y({n},{k}): bell {via_bell}, alternating {alt}, egf {egf}")
                })?;
                ensure(prob_stirling(&d, n, k) == via_bell, || {
                    format!("{d} S_Y({n},{k}) table mismatch")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} entries agree across three routes"))
}

fn distribution_identities() -> Outcome {
    for p in [ratio(1, 2), ratio(1, 3), int(1)] {
        let d = DistSpec::Bernoulli(p.clone());
        for n in 0..=10 {
            let want = classical_fubini_oracle(n).dilate(&p);
            ensure(prob_fubini_poly(&d, n) == want, || {
                format!("Bernoulli({p}) n={n}")
            })?;
            ensure(
                classical_fubini_poly(n) == classical_fubini_oracle(n),
                || format!("classical n={n}"),
            )?;
        }
    }
    for lambda in [int(1), ratio(1, 2), int(3)] {
        let d = DistSpec::Poisson(lambda.clone());
        for n in 0..=10 {
            let mut want = RatPoly::zero();
            for i in 0..=n {
                let c = pow(&lambda, i) * stirling_oracle(n, i);
                want = &want + &classical_fubini_oracle(i).scale(&c);
            }
            ensure(prob_fubini_poly(&d, n) == want, || {
                format!("Poisson({lambda}) n={n}")
            })?;
        }
    }
    let e = DistSpec::StdExponential;
    for n in 0..=10 {
        for k in 0..=n {
            ensure(prob_stirling(&e, n, k) == lah_oracle(n, k), || {
                format!("exponential S_Y({n},{k})")
            })?;
        }
    }
    Ok("Bernoulli, Poisson and exponential reductions hold for n <= 10".into())
}

fn moment_identity() -> Outcome {
    for d in catalog() {
        let oracle = sum_moment_oracle(&d, 10, 10);
        for (j, row) in oracle.iter().enumerate() {
            for (n, want) in row.iter().enumerate() {
                let via_stirling: Rational = (0..=n)
                    .map(|k| prob_stirling(&d, n, k) * falling(&int(j as i64), k))
                    .sum();
                let lib = d.sum_moment(j, n);
                ensure(&via_stirling == want && &lib == want, || {
                    format!(
                        "{d} j={j} n={n}: stirling {via_stirling}, library {lib}, oracle {want}"
                    )
                })?;
            }
        }
    }
    Ok("E S_j^n = Σ_k S_Y(n,k)(j)_k for j, n <= 10".into())
}

fn series_ok(label: &str, r: Result<TailReport, fubini_core::Error>) -> Result<f64, String> {
    let r = r.map_err(|e| format!("{label}: {e}"))?;
    ensure(
        r.gap() <= SERIES_TOL && r.converged && r.terms_used <= SERIES_TERMS + 1,
        || format!("{label}: {r:?}"),
    )?;
    Ok(r.gap())
}

fn truncated_series() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for d in catalog() {
        for n in 0..=6 {
            worst = worst.max(series_ok(
                &format!("dobinski {d} n={n}"),
                dobinski_check(&d, n, &int(1), SERIES_TERMS, SERIES_TOL),
            )?);
            for x in [ratio(1, 2), int(1)] {
                worst = worst.max(series_ok(
                    &format!("mixture {d} n={n} x={x}"),
                    geometric_mixture_check(&d, n, &x, SERIES_TERMS, SERIES_TOL),
                )?);
            }
            worst = worst.max(series_ok(
                &format!("fubini series {d} n={n}"),
                fubini_number_series_check(&d, n, SERIES_TERMS, SERIES_TOL),
            )?);
            count += 4;
        }
    }
    Ok(format!(
        "{count} truncated sums within {SERIES_TOL:e}, worst gap {worst:e}"
    ))
}

fn polylog_suite() -> Outcome {
    let s = ratio(1, 2);
    let r = Rational::one() - &s;
    let geo = DistSpec::GeometricOnSupport1(r.clone());
    let oracle = sum_moment_oracle(&geo, 6, 8);
    let scale = &s / &r;
    for (k, row) in oracle.iter().enumerate() {
        for (n, moment) in row.iter().enumerate() {
            let conv = polylog_conv(n, k, &s).map_err(|e| e.to_string())?;
            let want = pow(&scale, k) * moment;
            ensure(conv == want, || {
                format!("Li^*{k}_-{n}(1/2) = {conv}, expected {want}")
            })?;
        }
    }
    let mut worst = 0.0f64;
    for n in 0..=4 {
        for x in [ratio(1, 2), int(1), ratio(1, 5)] {
            let rep = polylog_limit_check(&r, n, &x, SERIES_TERMS, SERIES_TOL)
                .map_err(|e| e.to_string())?;
            let exact = to_f64(&prob_fubini_poly(&geo, n).eval(&x));
            ensure(
                rep.converged && (rep.partial_sum - exact).abs() <= SERIES_TOL,
                || format!("limit n={n} x={x}: {rep:?}"),
            )?;
            worst = worst.max(rep.gap());
        }
    }
    Ok(format!(
        "convolutions exact for n <= 8, k <= 6; limit worst gap {worst:e}"
    ))
}

fn apostol_euler() -> Outcome {
    for (p, c) in [
        (int(1), int(-1)),
        (ratio(1, 2), ratio(-1, 2)),
        (ratio(1, 3), int(-1)),
    ] {
        for n in 0..=10 {
            let holds = apostol_euler_check(&p, &c, n, n).map_err(|e| e.to_string())?;
            ensure(holds, || format!("p={p} c={c} n={n}"))?;
        }
    }
    // With c p = -1 the generating function is e^{(x-1)t}, so the right side
    // must expand (x - 1)^n.
    let bern1 = DistSpec::Bernoulli(int(1));
    for n in 0..=10 {
        let mut rhs = RatPoly::zero();
        for k in 0..=n {
            let w = prob_fubini_poly(&bern1, k).eval(&int(-1));
            rhs = &rhs + &RatPoly::monomial(Rational::from_integer(binomial(n, k)) * w, n - k);
        }
        let want = RatPoly::new(
            (0..=n)
                .map(|j| {
                    let sign = if (n - j) % 2 == 0 { 1 } else { -1 };
                    Rational::from_integer(binomial(n, j)) * int(sign)
                })
                .collect(),
        );
        ensure(rhs == want, || format!("(x-1)^{n} oracle"))?;
    }
    Ok("exact polynomial identity for n <= 10 on all three (p, c)".into())
}

fn propositions() -> Outcome {
    let x0 = ratio(1, 3);
    for d in catalog() {
        for k in 0..=4 {
            for v in [int(1), ratio(2, 5)] {
                let holds = prop31_check(&d, k, &x0, &v, 10).map_err(|e| e.to_string())?;
                ensure(holds, || format!("first: {d} k={k} v={v}"))?;
            }
        }
    }
    let mut worst = 0.0f64;
    for d in catalog() {
        for k in 0..=2 {
            let rep = prop32_check(&d, k, &x0, 120, 6, PROP32_TOL).map_err(|e| e.to_string())?;
            ensure(rep.converged && rep.gap() <= PROP32_TOL, || {
                format!("second: {d} k={k}: {rep:?}")
            })?;
            worst = worst.max(rep.gap());
        }
    }
    Ok(format!(
        "exact for k <= 4 at order 10; converged for k <= 2, worst gap {worst:e}"
    ))
}

fn monte_carlo() -> Outcome {
    let mut lines = Vec::new();
    for (d, exact) in [
        (DistSpec::Degenerate(int(1)), 3.0),
        (DistSpec::StdExponential, 4.0),
    ] {
        let cfg = McConfig::new(MC_SAMPLES, MC_SEED);
        let run = |exec| {
            mc_fubini_with(&d, 2, &int(1), cfg.with_execution(exec)).map_err(|e| e.to_string())
        };
        let a = run(Execution::default())?;
        let b = run(Execution::default())?;
        let seq = run(Execution::Sequential)?;
        ensure(
            a.value.to_bits() == b.value.to_bits() && a.stderr.to_bits() == b.stderr.to_bits(),
            || format!("{d}: reruns differ"),
        )?;
        ensure(a.value.to_bits() == seq.value.to_bits(), || {
            format!("{d}: sequential run differs")
        })?;
        let z = a.zscore(exact);
        ensure(z.abs() <= MC_MAX_Z, || {
            format!("{d}: estimate {} stderr {} z {z}", a.value, a.stderr)
        })?;
        lines.push(format!("{d} z={z:.3}"));
    }
    Ok(lines.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("classical reduction", classical_reduction),
        ("four-route agreement", four_routes),
        ("three-route Stirling agreement", three_stirling_routes),
        ("distribution identities", distribution_identities),
        ("moment identity", moment_identity),
        ("truncated series", truncated_series),
        ("polylog suite", polylog_suite),
        ("Apostol-Euler", apostol_euler),
        ("operator propositions", propositions),
        ("Monte Carlo", monte_carlo),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
