//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::process::ExitCode;

use octofast::kernel::{build_pipeline, OUTER_ZERO_ROWS};
use octofast::linearizer::{eval_program, flatten};
use octofast::verify::{compose_symbolic, Composition};
use octofast::{
    basis_mul, certified_pipeline, certify, count_algorithm, count_pipeline, mul_fast, mul_naive, precompute_s,
    schoolbook_matrix, Algorithm, ExactOcto, FloatOcto, OpCount, Rational, Scalar,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const EXACT_TRIALS: usize = 100_000;
const FLOAT_TRIALS: usize = 10_000;
const MUTATIONS: usize = 64;
const REFERENCE_ADDS: usize = 92;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn exact_corpus() -> Vec<(ExactOcto, ExactOcto)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut draw = || ExactOcto::from_ints(std::array::from_fn(|_| rng.gen_range(-1000..=1000)));
    let basis = (0..8).flat_map(|i| (0..8).map(move |j| (ExactOcto::unit(i), ExactOcto::unit(j))));
    let random: Vec<_> = (0..EXACT_TRIALS).map(|_| (draw(), draw())).collect();
    basis.chain(random).collect()
}

fn exactness(corpus: &[(ExactOcto, ExactOcto)]) -> Outcome {
    for i in 0..8 {
        for j in 0..8 {
            let want = basis_mul(i, j).to_octo::<Rational>();
            let got = mul_fast(&ExactOcto::unit(i), &ExactOcto::unit(j));
            if got != want || mul_naive(&ExactOcto::unit(i), &ExactOcto::unit(j)) != want {
                return Err(format!("basis pair ({i},{j}): got {got}, table says {want}"));
            }
        }
    }
    for (x, b) in corpus {
        if mul_fast(x, b) != mul_naive(x, b) {
            return Err(format!("x={x} b={b}"));
        }
    }
    Ok(format!(
        "64 basis pairs + {EXACT_TRIALS} random pairs in [-1000,1000], seed {SEED}"
    ))
}

fn certification() -> Outcome {
    let composed = match compose_symbolic(&build_pipeline()) {
        Ok(Composition::Linear(m)) => m,
        Ok(Composition::Constant(_)) => return Err("composition is constant".into()),
        Err(e) => return Err(e.to_string()),
    };
    let expected = schoolbook_matrix();
    let mismatches = (0..64)
        .filter(|k| composed.get(k / 8, k % 8) != expected.get(k / 8, k % 8))
        .count();
    let report = certify(&build_pipeline());
    if mismatches == 0 && report.is_certified() {
        Ok("64 of 64 entries equal as linear forms over Q".into())
    } else {
        Err(format!("{mismatches} entries differ\n{report}"))
    }
}

fn naive_complexity() -> Outcome {
    match count_algorithm(Algorithm::Naive) {
        c if c == OpCount::new(64, 56) => Ok(c.to_string()),
        c => Err(format!("{c}, expected mults=64 adds=56")),
    }
}

fn fast_complexity() -> Outcome {
    let split = count_pipeline(certified_pipeline());
    let c = count_algorithm(Algorithm::Fast);
    if c != split.total() || c.mults != 26 || c.adds > 100 {
        return Err(format!("{c}, expected mults=26 and adds<=100"));
    }
    if c.adds != 90 || c.adds + OUTER_ZERO_ROWS != REFERENCE_ADDS {
        return Err(format!(
            "{c}, expected adds=90 (= {REFERENCE_ADDS} - {OUTER_ZERO_ROWS} pruned zero-row merges)"
        ));
    }
    Ok(format!(
        "{c} (precompute {}, main {}); reference adds={REFERENCE_ADDS} = {} + {OUTER_ZERO_ROWS} merges of identically zero rows",
        split.precompute, split.main, c.adds
    ))
}

fn savings() -> Outcome {
    let saved = count_algorithm(Algorithm::Naive).mults - count_algorithm(Algorithm::Fast).mults;
    if saved == 38 {
        Ok(format!("{saved} multiplications saved"))
    } else {
        Err(format!("{saved} multiplications saved, expected 38"))
    }
}

fn float_accuracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut draw = || FloatOcto::new(std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)));
    let mut worst = 0.0f64;
    for _ in 0..FLOAT_TRIALS {
        let (x, b) = (draw(), draw());
        let (f, n) = (mul_fast(&x, &b), mul_naive(&x, &b));
        for (a, e) in f.coeffs().iter().zip(n.coeffs()) {
            let ratio = (a - e).abs() / (1.0 + e.abs());
            worst = worst.max(ratio);
            if ratio > 1e-12 {
                return Err(format!("x={x} b={b}: {a} vs {e}"));
            }
        }
    }
    Ok(format!(
        "{FLOAT_TRIALS} pairs in [-1,1], worst |fast-naive|/(1+|naive|) = {worst:.2e}"
    ))
}

fn program_fidelity(corpus: &[(ExactOcto, ExactOcto)]) -> Outcome {
    let prog = flatten(certified_pipeline());
    prog.validate()?;
    for (x, b) in corpus {
        if eval_program(&prog, x, b) != mul_fast(x, b) {
            return Err(format!("x={x} b={b}"));
        }
    }
    let (tally, counted) = (prog.op_count(), count_algorithm(Algorithm::Fast));
    if tally != counted {
        return Err(format!("program tallies {tally}, instrumented count {counted}"));
    }
    Ok(format!(
        "{} instructions, {tally}, {} pairs",
        prog.instrs.len(),
        corpus.len()
    ))
}

fn precompute_spots() -> Outcome {
    let q = |n: i64, d: i64| Rational::from_i64(n) / Rational::from_i64(d);
    let ones = precompute_s(&ExactOcto::from_ints([1; 8]));
    let want_ones = [
        q(1, 2),
        q(-1, 2),
        q(-1, 2),
        q(-1, 2),
        q(0, 1),
        q(0, 1),
        q(0, 1),
        q(0, 1),
    ];
    let unit = precompute_s(&ExactOcto::one());
    let want_unit: [Rational; 8] = std::array::from_fn(|_| q(-1, 8));
    let show = |v: &[Rational; 8]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
    if ones != want_ones {
        return Err(format!("all-ones b: got ({})", show(&ones)));
    }
    if unit != want_unit {
        return Err(format!("b=e0: got ({})", show(&unit)));
    }
    Ok(format!("all-ones -> ({}); e0 -> ({})", show(&ones), show(&unit)))
}

fn mutation_sensitivity() -> Outcome {
    let p = build_pipeline();
    let mut locations = p.entry_locations();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    locations.shuffle(&mut rng);
    let sample = &locations[..MUTATIONS.min(locations.len())];
    let mut rows_hit = 0;
    for &at in sample {
        let report = certify(&p.with_flipped_entry(at));
        if report.is_certified() {
            return Err(format!(
                "flip at stage {} ({},{}) still certifies",
                at.stage, at.row, at.col
            ));
        }
        rows_hit += report.rows().len();
    }
    let unsampled = locations.len() - sample.len();
    let all_detected = locations[sample.len()..]
        .iter()
        .all(|&at| !certify(&p.with_flipped_entry(at)).is_certified());
    if !all_detected {
        return Err("an entry outside the random sample survived its flip".into());
    }
    Ok(format!(
        "{} random flips (seed {SEED}) detected, {rows_hit} residual rows; remaining {unsampled} entries also detected",
        sample.len()
    ))
}

fn main() -> ExitCode {
    let corpus = exact_corpus();
    let criteria: [Criterion; 9] = [
        ("1 exactness", Box::new(|| exactness(&corpus))),
        ("2 symbolic certification", Box::new(certification)),
        ("3 naive complexity", Box::new(naive_complexity)),
        ("4 fast complexity", Box::new(fast_complexity)),
        ("5 savings", Box::new(savings)),
        ("6 float accuracy", Box::new(float_accuracy)),
        ("7 program fidelity", Box::new(|| program_fidelity(&corpus))),
        ("8 precompute spot values", Box::new(precompute_spots)),
        ("9 mutation sensitivity", Box::new(mutation_sensitivity)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
