//! Subcommand logic, kept out of `main` so it can be driven with arbitrary
//! (including deliberately broken) pipelines.

use std::fmt::Write as _;
use std::time::Instant;

use octofast::linearizer::{emit_csv, emit_text, flatten};
use octofast::scalar::Plain;
use octofast::{
    basis_mul, certified_pipeline, certify, count_algorithm, mul_fast, mul_naive, Algorithm, ExactOcto, FloatOcto,
    Octo, Pipeline, Rational, Scalar,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
}

pub fn multiply(x: &str, b: &str, algo: Algorithm, mode: Mode) -> octofast::Result<String> {
    fn run<T: Scalar>(x: &str, b: &str, algo: Algorithm) -> octofast::Result<String> {
        let (x, b) = (Octo::<T>::parse(x)?, Octo::<T>::parse(b)?);
        let y = match algo {
            Algorithm::Naive => mul_naive(&x, &b),
            Algorithm::Fast => mul_fast(&x, &b),
        };
        Ok(y.to_string())
    }
    match mode {
        Mode::Exact => run::<Rational>(x, b, algo),
        Mode::Float => run::<f64>(x, b, algo),
    }
}

pub fn count(algo: Algorithm) -> String {
    count_algorithm(algo).to_string()
}

pub fn emit(format: Format) -> String {
    let prog = flatten(certified_pipeline());
    match format {
        Format::Text => emit_text(&prog),
        Format::Csv => emit_csv(&prog),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub trials: u64,
    pub seed: u64,
    pub mode: Mode,
    /// Random integer coefficients are drawn from `[-range, range]`.
    pub range: i64,
}

/// Per-suite result lines and the overall verdict.
#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub lines: Vec<String>,
    pub passed: bool,
}

fn product<T: Scalar>(p: &Pipeline, x: &Octo<T>, b: &Octo<T>) -> Octo<T> {
    let y = p.execute(&mut Plain::<T>::new(), x.coeffs(), b.coeffs());
    Octo::new(y.try_into().expect("pipeline yields 8 lanes"))
}

fn basis_suite(p: &Pipeline) -> Result<String, String> {
    for i in 0..8 {
        for j in 0..8 {
            let (ei, ej) = (ExactOcto::unit(i), ExactOcto::unit(j));
            let want = basis_mul(i, j).to_octo::<Rational>();
            let got = product(p, &ei, &ej);
            if got != want {
                return Err(format!("unit {i} * unit {j}: got {got}, expected {want}"));
            }
        }
    }
    Ok("64 pairs".into())
}

fn random_suite(p: &Pipeline, opts: &VerifyOptions) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.trials {
        let mut draw = || -> [i64; 8] { std::array::from_fn(|_| rng.gen_range(-opts.range..=opts.range)) };
        let (xi, bi) = (draw(), draw());
        let agree = match opts.mode {
            Mode::Exact => {
                let (x, b) = (ExactOcto::from_ints(xi), ExactOcto::from_ints(bi));
                let (f, n) = (product(p, &x, &b), mul_naive(&x, &b));
                (f == n)
                    .then_some(())
                    .ok_or_else(|| format!("x={x} b={b}: fast {f}, naive {n}"))
            }
            Mode::Float => {
                let scale = 1.0 / opts.range.max(1) as f64;
                let (x, b) = (
                    FloatOcto::new(xi.map(|v| v as f64 * scale)),
                    FloatOcto::new(bi.map(|v| v as f64 * scale)),
                );
                let (f, n) = (product(p, &x, &b), mul_naive(&x, &b));
                f.coeffs()
                    .iter()
                    .zip(n.coeffs())
                    .all(|(a, e)| (a - e).abs() <= 1e-12 * (1.0 + e.abs()))
                    .then_some(())
                    .ok_or_else(|| format!("x={x} b={b}: fast {f}, naive {n}"))
            }
        };
        agree?;
    }
    let mode = match opts.mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    };
    Ok(format!("{} trials, {mode}, seed {}", opts.trials, opts.seed))
}

fn symbolic_suite(p: &Pipeline) -> Result<String, String> {
    let report = certify(p);
    if report.is_certified() {
        Ok("64 of 64 entries match".into())
    } else {
        Err(format!("\n{}", report.to_string().trim_end()))
    }
}

/// Runs the basis, random and symbolic suites against `p`. With zero
/// trials the random suite is skipped.
pub fn verify(p: &Pipeline, opts: &VerifyOptions) -> VerifyOutcome {
    let mut suites = vec![("basis", basis_suite(p))];
    if opts.trials > 0 {
        suites.push(("random", random_suite(p, opts)));
    }
    suites.push(("symbolic", symbolic_suite(p)));
    let passed = suites.iter().all(|(_, r)| r.is_ok());
    let lines = suites
        .into_iter()
        .map(|(name, r)| match r {
            Ok(detail) => format!("{name}: PASS ({detail})"),
            Err(detail) => format!("{name}: FAIL {detail}"),
        })
        .collect();
    VerifyOutcome { lines, passed }
}

/// Times both kernels on the same seeded float operands; CSV with a
/// header and one row per kernel.
pub fn bench(trials: u64, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || FloatOcto::new(std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)));
    let pairs: Vec<_> = (0..trials).map(|_| (draw(), draw())).collect();
    let mut out = String::from("algo,trials,total_ns,ns_per_mul\n");
    for algo in [Algorithm::Naive, Algorithm::Fast] {
        let start = Instant::now();
        for (x, b) in &pairs {
            let y = match algo {
                Algorithm::Naive => mul_naive(x, b),
                Algorithm::Fast => mul_fast(x, b),
            };
            std::hint::black_box(y);
        }
        let total = start.elapsed().as_nanos().max(1);
        let per = total as f64 / trials as f64;
        writeln!(out, "{},{trials},{total},{per:.3}", algo.name()).expect("writing to a String");
    }
    out
}
