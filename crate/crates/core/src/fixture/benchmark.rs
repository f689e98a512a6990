//! Deterministic 500-problem benchmark generator.
//!
//! One problem per row of the released score table, in table order, so that
//! problem index `i` lines up with score row `i`. Statements are plain-text
//! competition-style questions whose wording carries extractable concept
//! terms; every ground truth is a nonzero integer or reduced fraction.

use std::collections::BTreeSet;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::released_table::RELEASED_MAX_SCORES;
use crate::bench::{Problem, SubjectType};
use crate::util::{self, UtilError};

/// Seed for the benchmark statement stream.
const BENCH_SEED: u64 = 0x6d61_7468_3530_3030;

/// Number of problems in the bundled quick-run subset.
pub const SUBSET_SIZE: usize = 20;

/// (type, levels) quotas for the quick-run subset: 20 problems covering all
/// seven subject types and all five difficulty levels.
const SUBSET_QUOTAS: &[(SubjectType, &[u8])] = &[
    (SubjectType::Algebra, &[1, 2, 3, 4, 5]),
    (SubjectType::CountingAndProbability, &[1, 2]),
    (SubjectType::Geometry, &[1, 2]),
    (SubjectType::IntermediateAlgebra, &[1, 3, 4, 5]),
    (SubjectType::NumberTheory, &[2, 3]),
    (SubjectType::Prealgebra, &[1, 4, 5]),
    (SubjectType::Precalculus, &[2, 3]),
];

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xd1b5_4a32_d192_ed03)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn factorial(n: u64) -> u64 {
    (2..=n).product::<u64>().max(1)
}

fn units_digit_pow(a: u64, b: u64) -> u64 {
    let mut acc = 1u64;
    for _ in 0..b {
        acc = (acc * a) % 10;
    }
    acc
}

fn fraction(num: u64, den: u64) -> String {
    let g = gcd(num, den);
    format!("{}/{}", num / g, den / g)
}

/// Small coprime (p, q) pairs with p < q.
const COPRIME_PAIRS: &[(u64, u64)] = &[
    (2, 3),
    (2, 5),
    (3, 4),
    (3, 5),
    (4, 5),
    (5, 6),
    (5, 7),
    (7, 8),
    (7, 9),
    (8, 9),
];

/// Pythagorean triples (legs, hypotenuse).
const TRIPLES: &[(u64, u64, u64)] = &[
    (3, 4, 5),
    (5, 12, 13),
    (8, 15, 17),
    (7, 24, 25),
    (20, 21, 29),
];

/// (statement, answer, solution) for one draw.
type Draft = (String, String, String);

fn algebra(rng: &mut ChaCha8Rng) -> Draft {
    match rng.random_range(0..4u8) {
        0 => {
            let a = rng.random_range(2..=9u64);
            let x = rng.random_range(2..=12u64);
            let b = rng.random_range(1..=15u64);
            let c = a * x + b;
            (
                format!("Solve the equation {a}x + {b} = {c} for x."),
                x.to_string(),
                format!("Subtract {b} from both sides and divide by {a} to get x = {x}."),
            )
        }
        1 => {
            let a = rng.random_range(2..=7u64);
            let b = rng.random_range(1..=9u64);
            let x0 = rng.random_range(2..=6u64);
            let v = a * x0 + b;
            (
                format!(
                    "The linear polynomial f(x) = {a}x + {b} is evaluated at x = {x0}. \
                     What is f({x0})?"
                ),
                v.to_string(),
                format!("Substitute x = {x0} into the polynomial: {a}({x0}) + {b} = {v}."),
            )
        }
        2 => {
            let a1 = rng.random_range(1..=9u64);
            let d = rng.random_range(2..=6u64);
            let n = rng.random_range(5..=12u64);
            let sum = n * (2 * a1 + (n - 1) * d) / 2;
            (
                format!(
                    "An arithmetic sequence has first term {a1} and common difference {d}. \
                     What is the sum of the first {n} terms of the series?"
                ),
                sum.to_string(),
                format!("The sum of the series is n/2 times (2a + (n-1)d), which gives {sum}."),
            )
        }
        _ => {
            let p = rng.random_range(2..=9u64);
            let q = rng.random_range(2..=9u64);
            let (s, c) = (p + q, p * q);
            (
                format!(
                    "The quadratic equation x^2 - {s}x + {c} = 0 has two roots. \
                     What is the product of the roots?"
                ),
                c.to_string(),
                format!("By Vieta's formulas the product of the roots is the constant term {c}."),
            )
        }
    }
}

fn counting(rng: &mut ChaCha8Rng) -> Draft {
    match rng.random_range(0..4u8) {
        0 => {
            let n = rng.random_range(6..=12u64);
            let k = rng.random_range(2..=4u64);
            let ways = binomial(n, k);
            (
                format!(
                    "A committee of {k} people must be chosen from a group of {n} people. \
                     In how many ways can the committee be formed?"
                ),
                ways.to_string(),
                format!("The number of ways is the combination {n} choose {k}, which is {ways}."),
            )
        }
        1 => {
            let n = rng.random_range(3..=8u64);
            let k = rng.random_range(1..n);
            let ans = fraction(binomial(n, k), 1 << n);
            (
                format!(
                    "A fair coin is flipped {n} times. What is the probability of getting \
                     exactly {k} heads, expressed as a fraction in lowest terms?"
                ),
                ans.clone(),
                format!("Each outcome has probability 1/2^{n}; counting arrangements gives {ans}."),
            )
        }
        2 => {
            let n = rng.random_range(5..=9u64);
            let f = factorial(n);
            (
                format!("Evaluate the factorial of {n}."),
                f.to_string(),
                format!("Multiplying the integers from 1 through {n} gives {f}."),
            )
        }
        _ => {
            let s = rng.random_range(4..=10u64);
            let ways = 6 - s.abs_diff(7);
            let ans = fraction(ways, 36);
            (
                format!(
                    "Two fair six-sided dice are rolled. What is the probability that the \
                     sum of the two dice equals {s}, expressed as a fraction in lowest terms?"
                ),
                ans.clone(),
                format!("There are {ways} of the 36 equally likely rolls with sum {s}, so {ans}."),
            )
        }
    }
}

fn geometry(rng: &mut ChaCha8Rng) -> Draft {
    match rng.random_range(0..4u8) {
        0 => {
            let b = rng.random_range(3..=12u64);
            let h = 2 * rng.random_range(2..=6u64);
            let area = b * h / 2;
            (
                format!(
                    "A triangle has base {b} and height {h}. What is the area of the triangle?"
                ),
                area.to_string(),
                format!(
                    "The area is half the base times the height: {b} times {h} over 2 is {area}."
                ),
            )
        }
        1 => {
            let l = rng.random_range(4..=15u64);
            let w = rng.random_range(2..l);
            let p = 2 * (l + w);
            (
                format!(
                    "A rectangle has length {l} and width {w}. What is the perimeter of the rectangle?"
                ),
                p.to_string(),
                format!("The perimeter is twice the sum of length and width, {p}."),
            )
        }
        2 => {
            let d = 2 * rng.random_range(2..=9u64);
            let r = d / 2;
            (
                format!("A circle has diameter {d}. What is the radius of the circle?"),
                r.to_string(),
                format!("The radius is half the diameter, so {r}."),
            )
        }
        _ => {
            let (a, b, c) = TRIPLES[rng.random_range(0..3usize)];
            let s = rng.random_range(1..=3u64);
            (
                format!(
                    "A right triangle has legs of length {} and {}. What is the length of \
                     the hypotenuse of this triangle?",
                    s * a,
                    s * b
                ),
                (s * c).to_string(),
                format!("By the Pythagorean theorem the hypotenuse is {}.", s * c),
            )
        }
    }
}

fn intermediate_algebra(rng: &mut ChaCha8Rng) -> Draft {
    match rng.random_range(0..4u8) {
        0 => {
            let h = rng.random_range(2..=7u64);
            let k = rng.random_range(1..=9u64);
            let (b, c) = (2 * h, h * h + k);
            (
                format!(
                    "Find the x-coordinate of the vertex of the parabola y = x^2 - {b}x + {c}."
                ),
                h.to_string(),
                format!("The vertex sits at x = {b}/2 = {h}."),
            )
        }
        1 => {
            let r = rng.random_range(2..=6u64);
            let m = rng.random_range(2..=9u64);
            let a = m * (r - 1);
            let sum = m * r;
            (
                format!(
                    "An infinite geometric series has first term {a} and common ratio 1/{r}. \
                     What is the sum of the series?"
                ),
                sum.to_string(),
                format!("The sum is the first term over one minus the ratio: {sum}."),
            )
        }
        2 => {
            let a = rng.random_range(2..=9u64);
            let b = rng.random_range(1..=8u64);
            (
                format!(
                    "The absolute value equation |x - {a}| = {b} has two solutions. \
                     What is the sum of the two solutions?"
                ),
                (2 * a).to_string(),
                format!(
                    "The solutions are {a} plus and minus {b}; they sum to {}.",
                    2 * a
                ),
            )
        }
        _ => {
            let t = rng.random_range(3..=9u64);
            let v = t * t - 2;
            (
                format!(
                    "Let x be a nonzero real number with x + 1/x = {t}. Using the polynomial \
                     identity for squares, find the value of x^2 + 1/x^2."
                ),
                v.to_string(),
                format!(
                    "Squaring gives x^2 + 2 + 1/x^2 = {}, so the value is {v}.",
                    t * t
                ),
            )
        }
    }
}

fn number_theory(rng: &mut ChaCha8Rng) -> Draft {
    match rng.random_range(0..4u8) {
        0 => {
            let g = rng.random_range(2..=9u64);
            let (p, q) = COPRIME_PAIRS[rng.random_range(0..COPRIME_PAIRS.len())];
            (
                format!(
                    "What is the greatest common divisor of {} and {}?",
                    g * p,
                    g * q
                ),
                g.to_string(),
                format!(
                    "Factoring out the shared divisor leaves coprime parts, so the gcd is {g}."
                ),
            )
        }
        1 => {
            let g = rng.random_range(2..=9u64);
            let (p, q) = COPRIME_PAIRS[rng.random_range(0..COPRIME_PAIRS.len())];
            let l = g * p * q;
            (
                format!(
                    "What is the least common multiple of {} and {}?",
                    g * p,
                    g * q
                ),
                l.to_string(),
                format!("The lcm is the product over the gcd, which is {l}."),
            )
        }
        2 => {
            let m = rng.random_range(5..=12u64);
            let q = rng.random_range(4..=15u64);
            let r = rng.random_range(1..m);
            let n = q * m + r;
            (
                format!("What is the remainder when {n} is divided by {m}?"),
                r.to_string(),
                format!("{n} = {q} times {m} plus {r}, so the remainder is {r}."),
            )
        }
        _ => {
            let a = rng.random_range(2..=9u64);
            let b = rng.random_range(3..=12u64);
            let u = units_digit_pow(a, b);
            (
                format!("What is the units digit of {a}^{b}?"),
                u.to_string(),
                format!("The units digit of powers of {a} cycles; the {b}th power ends in {u}."),
            )
        }
    }
}

fn prealgebra(rng: &mut ChaCha8Rng) -> Draft {
    match rng.random_range(0..4u8) {
        0 => {
            let p = 5 * rng.random_range(1..=12u64);
            let b = 20 * rng.random_range(1..=10u64);
            let v = p * b / 100;
            (
                format!("What is {p} percent of {b}? Work out the percentage directly."),
                v.to_string(),
                format!("{p} percent of {b} is {p}/100 times {b}, which is {v}."),
            )
        }
        1 => {
            let m = rng.random_range(5..=40u64);
            let d = rng.random_range(1..=4u64);
            (
                format!(
                    "What is the average of the three numbers {}, {m}, and {}?",
                    m - d,
                    m + d
                ),
                m.to_string(),
                format!("The three numbers are symmetric about {m}, so the average is {m}."),
            )
        }
        2 => {
            let k = rng.random_range(2..=6u64);
            let (a, b) = COPRIME_PAIRS[rng.random_range(0..COPRIME_PAIRS.len())];
            (
                format!("Simplify the fraction {}/{} to lowest terms.", k * a, k * b),
                format!("{a}/{b}"),
                format!("Dividing numerator and denominator by {k} gives {a}/{b}."),
            )
        }
        _ => {
            let a = rng.random_range(2..=9u64);
            let b = rng.random_range(2..=9u64);
            let c = rng.random_range(2..=9u64);
            let v = a + b * c;
            (
                format!(
                    "Using the order of operations, where multiplication comes before \
                     addition, evaluate {a} + {b} * {c}."
                ),
                v.to_string(),
                format!(
                    "Multiply first ({b} times {c} is {}), then add {a} to get {v}.",
                    b * c
                ),
            )
        }
    }
}

fn precalculus(rng: &mut ChaCha8Rng) -> Draft {
    match rng.random_range(0..4u8) {
        0 => {
            let m = rng.random_range(2..=6u64);
            let p = 360 / m;
            (
                format!("Measured in degrees, what is the period of the function sin({m}x)?"),
                p.to_string(),
                format!("The period of sin({m}x) is 360 degrees divided by {m}, which is {p}."),
            )
        }
        1 => loop {
            let a = rng.random_range(1..=9i64);
            let b = rng.random_range(1..=9i64);
            let c = rng.random_range(1..=9i64);
            let d = rng.random_range(1..=9i64);
            let det = a * d - b * c;
            if det != 0 {
                return (
                    format!(
                        "Compute the determinant of the 2 by 2 matrix with first row \
                         ({a}, {b}) and second row ({c}, {d})."
                    ),
                    det.to_string(),
                    format!("The determinant is {a}({d}) - {b}({c}) = {det}."),
                );
            }
        },
        2 => {
            let (a, b, c) = TRIPLES[rng.random_range(0..TRIPLES.len())];
            let s = rng.random_range(1..=3u64);
            (
                format!(
                    "What is the magnitude of the complex number {} + {}i?",
                    s * a,
                    s * b
                ),
                (s * c).to_string(),
                format!(
                    "The magnitude is the square root of the sum of squares, {}.",
                    s * c
                ),
            )
        }
        _ => {
            let m = rng.random_range(3..=12u64);
            (
                format!("Given that tan of 45 degrees equals 1, evaluate {m} tan(45 degrees)."),
                m.to_string(),
                format!("Since tan(45 degrees) is 1, the product is {m}."),
            )
        }
    }
}

fn draw(subject: SubjectType, rng: &mut ChaCha8Rng) -> Draft {
    match subject {
        SubjectType::Algebra => algebra(rng),
        SubjectType::CountingAndProbability => counting(rng),
        SubjectType::Geometry => geometry(rng),
        SubjectType::IntermediateAlgebra => intermediate_algebra(rng),
        SubjectType::NumberTheory => number_theory(rng),
        SubjectType::Prealgebra => prealgebra(rng),
        SubjectType::Precalculus => precalculus(rng),
    }
}

/// Generate the full 500-problem benchmark, aligned row-for-row with the
/// released score table. Statements are globally unique and ground truths
/// are never the literal string "0".
pub fn generate_benchmark() -> Vec<Problem> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut problems = Vec::with_capacity(RELEASED_MAX_SCORES.len());
    for (i, &(subject_idx, level, _, _)) in RELEASED_MAX_SCORES.iter().enumerate() {
        let subject = SubjectType::ALL[subject_idx as usize];
        let mut placed = false;
        for salt in 0..10_000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(BENCH_SEED, i as u64, salt));
            let (statement, answer, solution) = draw(subject, &mut rng);
            if seen.insert(statement.clone()) {
                debug_assert_ne!(answer.trim(), "0");
                problems.push(Problem {
                    problem_id: format!("math500_{:04}", i + 1),
                    statement,
                    subject_type: subject,
                    level,
                    ground_truth: answer,
                    solution: Some(solution),
                });
                placed = true;
                break;
            }
        }
        assert!(placed, "could not draw a unique statement for problem {i}");
    }
    problems
}

/// The bundled quick-run subset: the first problem of each quota
/// (type, level) cell in table order.
pub fn benchmark_subset(problems: &[Problem]) -> Vec<Problem> {
    let mut out = Vec::with_capacity(SUBSET_SIZE);
    for &(subject, levels) in SUBSET_QUOTAS {
        for &level in levels {
            let found = problems
                .iter()
                .find(|p| p.subject_type == subject && p.level == level)
                .unwrap_or_else(|| panic!("no problem for {subject} level {level}"));
            out.push(found.clone());
        }
    }
    out
}

/// Write problems as JSONL in the loader's default field names.
pub fn write_benchmark_jsonl(problems: &[Problem], path: &Path) -> Result<(), UtilError> {
    let records: Vec<serde_json::Value> = problems
        .iter()
        .map(|p| {
            serde_json::json!({
                "unique_id": p.problem_id,
                "problem": p.statement,
                "subject": p.subject_type.display_name(),
                "level": p.level,
                "answer": p.ground_truth,
                "solution": p.solution,
            })
        })
        .collect();
    util::write_jsonl(path, &records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{validate_distribution, FieldMap};
    use crate::mocks::scripted_concepts;

    #[test]
    fn five_hundred_problems_matching_expected_distribution() {
        let problems = generate_benchmark();
        validate_distribution(&problems).unwrap();
    }

    #[test]
    fn statements_unique_and_ground_truths_nonzero() {
        let problems = generate_benchmark();
        let statements: BTreeSet<&str> = problems.iter().map(|p| p.statement.as_str()).collect();
        assert_eq!(statements.len(), problems.len());
        assert!(problems.iter().all(|p| p.ground_truth.trim() != "0"));
        assert!(problems.iter().all(|p| !p.ground_truth.is_empty()));
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate_benchmark(), generate_benchmark());
    }

    #[test]
    fn every_statement_yields_specific_concepts() {
        // the scripted extractor should find at least one lexicon term (not
        // just generic padding) in every statement
        let generic = ["algebra", "arithmetic", "number", "computation"];
        let problems = generate_benchmark();
        for p in &problems {
            let concepts = scripted_concepts(&p.statement);
            assert!(
                concepts.iter().any(|c| !generic.contains(&c.as_str())),
                "only generic concepts for: {}",
                p.statement
            );
        }
    }

    #[test]
    fn subset_covers_all_types_and_levels() {
        let problems = generate_benchmark();
        let subset = benchmark_subset(&problems);
        assert_eq!(subset.len(), SUBSET_SIZE);
        let types: BTreeSet<_> = subset.iter().map(|p| p.subject_type).collect();
        let levels: BTreeSet<_> = subset.iter().map(|p| p.level).collect();
        assert_eq!(types.len(), 7);
        assert_eq!(levels, BTreeSet::from([1, 2, 3, 4, 5]));
        let ids: BTreeSet<_> = subset.iter().map(|p| p.problem_id.as_str()).collect();
        assert_eq!(ids.len(), SUBSET_SIZE, "subset problems must be distinct");
    }

    #[test]
    fn jsonl_round_trips_through_the_loader() {
        let problems = generate_benchmark();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bench.jsonl");
        write_benchmark_jsonl(&problems, &path).unwrap();
        let loaded = crate::bench::load_benchmark(&path, &FieldMap::default()).unwrap();
        assert_eq!(loaded, problems);
    }
}
