//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use quasihom::exhaustive::{count_congruence, count_mod, decompose, i1_closed_form, value_histogram, char_sum, Limits};
use quasihom::funcfield::{ff_count, ff_histogram, ff_sum_from_histogram, FFCharacter, FFModulus};
use quasihom::numeric::{is_prime, pow_u64};
use quasihom::padic::{local_exponents, PrimeContext};
use quasihom::quasi::{canonical_form, exponents};
use quasihom::sublevel::{verify_cluster_decomposition, FactoredPoly1D};
use quasihom::verify::{
    build_grid, evaluate_grid, lower_from_evaluations, run_regressions, scan_from_evaluations, Analysis, Corpus,
    ScanConfig, Target,
};
use quasihom::BivariatePoly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BUDGET: u128 = 100_000_000;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn q_pow(q: u64, e: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(q)).pow(e as i32)
}

fn criterion_1() -> Outcome {
    let results = run_regressions(&Corpus::builtin(), &Limits::with_budget(BUDGET));
    let points: usize = results.iter().map(|r| r.points.len()).sum();
    let mut details = Vec::new();
    for r in results.iter().filter(|r| !r.pass) {
        let bad: Vec<String> = r
            .points
            .iter()
            .filter(|pt| !pt.pass)
            .map(|pt| format!("p={} s={} got {} want {}", pt.p, pt.s, pt.computed, pt.expected))
            .collect();
        details.push(format!("{} [{}]: {} {}", r.name, r.poly, r.error.clone().unwrap_or_default(), bad.join("; ")));
    }
    Outcome {
        pass: results.len() >= 12 && details.is_empty(),
        summary: format!("{} vectors, {} (p, s) points", results.len(), points),
        details,
    }
}

fn criterion_2() -> Outcome {
    let f = BivariatePoly::parse("y^4 - 4*x^2*y^2 + 4*x^4").unwrap();
    let qs = canonical_form(&f).unwrap();
    let rep = exponents(&qs);
    let mut details = Vec::new();
    let mut local = BTreeMap::new();
    for (primes, want) in [([7u64, 17, 23, 31, 41], 1u8), ([5, 11, 13, 29, 37], 0)] {
        for p in primes {
            let got = local_exponents(&rep, &qs, PrimeContext::new(p).unwrap());
            match got {
                Ok((i, nu)) if i == want && nu == want => {
                    local.insert(p, want);
                }
                other => details.push(format!("p={p}: local exponents {other:?}, want {want}")),
            }
        }
    }
    // N(f; p^2)·q^{s/2}/s at s = 2, each split prime against the nearest inert one.
    let limits = Limits::with_budget(BUDGET);
    let normalized = |p: u64| {
        let hist = value_histogram(&f, PrimeContext::new(p).unwrap(), 2, &limits).unwrap();
        let n = count_congruence(&hist);
        n.numer().to_string().parse::<f64>().unwrap() / n.denom().to_string().parse::<f64>().unwrap() * p as f64 / 2.0
    };
    let mut pairs = Vec::new();
    for (&p, _) in local.iter().filter(|(_, &v)| v == 1) {
        let inert = *local
            .iter()
            .filter(|(_, &v)| v == 0)
            .map(|(q, _)| q)
            .min_by_key(|&&q| q.abs_diff(p))
            .unwrap();
        let (a, b) = (normalized(p), normalized(inert));
        pairs.push(format!("{p}/{inert}: {:.2}", a / b));
        if a < 2.0 * b {
            details.push(format!("ratio at {p} vs {inert} is {:.3} < 2", a / b));
        }
    }
    Outcome { pass: details.is_empty(), summary: format!("10 primes classified; ratios {}", pairs.join(", ")), details }
}

fn random_factored(rng: &mut ChaCha8Rng, p: u64) -> FactoredPoly1D {
    let k = rng.gen_range(1..=4);
    let mut roots: Vec<(BigRational, u32)> = Vec::new();
    while roots.len() < k {
        let num = rng.gen_range(-40i64..=40);
        let den = if rng.gen_bool(0.25) { [2i64, 3, 4][rng.gen_range(0..3)] } else { 1 };
        if (den as u64).is_multiple_of(p) {
            continue;
        }
        let r = rat(num, den);
        if roots.iter().all(|(x, _)| *x != r) {
            roots.push((r, rng.gen_range(1..=3)));
        }
    }
    let mut lead;
    loop {
        lead = rng.gen_range(-12i64..=12);
        if lead != 0 && lead.unsigned_abs() % p != 0 {
            break;
        }
    }
    // Leading coefficient must clear the root denominators for an integer polynomial.
    let den_lcm = roots.iter().fold(1i64, |acc, (x, e)| {
        let d: i64 = x.denom().to_string().parse().unwrap();
        acc * d.pow(*e)
    });
    FactoredPoly1D::new(BigInt::from(lead * den_lcm), roots).unwrap()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut details = Vec::new();
    let mut checks = 0;
    for _ in 0..100 {
        let p = [5u64, 7, 11][rng.gen_range(0..3)];
        let s = rng.gen_range(1..=5u32);
        let poly = random_factored(&mut rng, p);
        for ell in 0..=s {
            checks += 1;
            let ctx = PrimeContext::new(p).unwrap();
            match verify_cluster_decomposition(&poly, ctx, s, ell, BUDGET) {
                Ok(rep) if rep.matches && rep.missing.is_empty() && rep.extra.is_empty() => {}
                other => details.push(format!("{poly:?} p={p} s={s} ell={ell}: {other:?}")),
            }
        }
    }
    Outcome { pass: details.is_empty(), summary: format!("100 instances, {checks} (instance, ell) checks"), details }
}

fn criterion_4() -> Outcome {
    let polys = ["y^2 - x^3", "x*y^2 - 2*x^2*y + x^3", "y^4 - 2*x^6", "x*y - 3*x^2", "y^3 - 3*x*y^2 + 3*x^2*y - x^3", "y^3 - 2*x^3"];
    let points = [(5u64, 1u32), (5, 2), (5, 3), (7, 2), (11, 2)];
    let limits = Limits::with_budget(BUDGET);
    let mut details = Vec::new();
    let mut cases = 0;
    for text in polys {
        let f = BivariatePoly::parse(text).unwrap();
        let qs = canonical_form(&f).unwrap();
        for (p, s) in points {
            cases += 1;
            let ctx = PrimeContext::new(p).unwrap();
            let rep = decompose(&f, ctx, s, &qs, &limits).unwrap();
            let hist = value_histogram(&f, ctx, s, &limits).unwrap();
            let direct_n = count_congruence(&hist);
            let direct_s = char_sum(&hist);
            let parts_n = &rep.part_i.count + &rep.part_ii.count + &rep.part_iii.count;
            let parts_re = rep.part_i.re + rep.part_ii.re + rep.part_iii.re;
            let parts_im = rep.part_i.im + rep.part_ii.im + rep.part_iii.im;
            if parts_n != direct_n {
                details.push(format!("{text} p={p} s={s}: count parts {parts_n} != {direct_n}"));
            }
            if (parts_re - direct_s.real).abs() > 1e-10 || (parts_im - direct_s.imag).abs() > 1e-10 {
                details.push(format!("{text} p={p} s={s}: sum parts differ"));
            }
            let closed = i1_closed_form(p, s, rep.t, rep.r, rep.n_weight);
            if rep.part_i1.count != closed || rep.part_i1_closed_form != closed {
                details.push(format!("{text} p={p} s={s}: I1 {} != closed form {closed}", rep.part_i1.count));
            }
        }
    }
    Outcome { pass: details.is_empty() && cases == 30, summary: format!("{cases} cases"), details }
}

const SCAN_SUITE: [&str; 10] = [
    "y^2 - x^3",
    "y^4 - 2*x^6",
    "y^3 - x^3",
    "y^3 - 2*x^3",
    "x*y - 3*x^2",
    "y^3 - 3*x^2*y + 2*x^3",
    "y^3 - 3*x*y^2 + 3*x^2*y - x^3",
    "x*y^2 - x^2*y",
    "y^2 - x^5",
    "x*y^2 - x^4",
];

fn criteria_5_and_6() -> (Outcome, Outcome) {
    let cfg = ScanConfig { limits: Limits::with_budget(BUDGET), ..ScanConfig::default() };
    let (mut d5, mut d6) = (Vec::new(), Vec::new());
    let mut summary5 = Vec::new();
    let (mut admissible, mut strengthened, mut bound_points) = (0usize, 0usize, 0usize);
    for text in SCAN_SUITE {
        let a = Analysis::parse(text).unwrap();
        let grid = build_grid(&a, 5, 31, None, BUDGET);
        let evals = evaluate_grid(&a, &grid, &cfg.limits).unwrap();
        for target in [Target::Sum, Target::Count] {
            let scan = scan_from_evaluations(&a, target, &evals, &cfg).unwrap();
            summary5.push(format!("{text} {target}: c_max {:.3} slope {:.3}", scan.c_max, scan.max_slope));
            if !scan.pass {
                d5.push(format!("{text} {target}: {}", scan.failures.join("; ")));
            }
            let mut primes: Vec<u64> = grid.iter().map(|g| g.0).collect();
            primes.dedup();
            for p in primes {
                let rep = lower_from_evaluations(&a, target, PrimeContext::new(p).unwrap(), &evals, &cfg).unwrap();
                admissible += rep.subsequence.len();
                bound_points += rep.count_bound.len();
                strengthened += rep.strengthened.as_ref().map_or(0, |v| v.len());
                if !rep.pass {
                    let bad: Vec<String> = rep
                        .subsequence
                        .iter()
                        .map(|b| ("subsequence", b))
                        .chain(rep.count_bound.iter().map(|b| ("count", b)))
                        .chain(rep.strengthened.iter().flatten().map(|b| ("strengthened", b)))
                        .filter(|(_, b)| !b.holds)
                        .map(|(k, b)| format!("{k} s={} value {:.3e} < {:.3e}", b.s, b.value, b.bound))
                        .collect();
                    d6.push(format!("{text} {target} p={p}: {}", bad.join("; ")));
                }
            }
        }
    }
    let o5 = Outcome {
        pass: d5.is_empty(),
        summary: format!("{} scans", summary5.len()),
        details: if d5.is_empty() { Vec::new() } else { summary5.into_iter().chain(d5).collect() },
    };
    let o6 = Outcome {
        pass: d6.is_empty(),
        summary: format!(
            "{bound_points} count-bound points, {admissible} admissible subsequence points, {strengthened} strengthened points"
        ),
        details: d6,
    };
    (o5, o6)
}

fn criterion_7() -> Outcome {
    let limits = Limits::with_budget(BUDGET);
    let mut details = Vec::new();
    let mut checks = 0;
    for (p, pi) in [(3u64, vec![0u64, 1]), (3, vec![1, 0, 1]), (5, vec![0, 1])] {
        for s in 1..=3u32 {
            let m = FFModulus::new(p, &pi, s).unwrap();
            let q = m.q;
            let qs = q_pow(q, s).recip();
            let mono_count = rat(1, 1) - rat(1, q as i64);
            let mut cases: Vec<(&str, BigRational, f64)> = vec![
                ("x*y", mono_count.clone() * BigRational::from_integer(s.into()) * &qs + &qs, 1.0 / pow_u64(q, s) as f64),
                ("x", qs.clone(), 0.0),
                ("x + 2*y", qs.clone(), 0.0),
            ];
            if p > 4 && s % 2 == 0 {
                // x²y² at s = 2m: q^{-m}(1 + (1 - q^{-1})m) for both N and |S|.
                let half = q_pow(q, s / 2).recip();
                let v = &half + mono_count * BigRational::from_integer((s / 2).into()) * &half;
                let f = v.numer().to_string().parse::<f64>().unwrap() / v.denom().to_string().parse::<f64>().unwrap();
                cases.push(("x^2*y^2", v, f));
            }
            for (text, want_n, want_s) in cases {
                checks += 1;
                let f = BivariatePoly::parse(text).unwrap();
                let got_n = ff_count(&f, &m, &limits).unwrap();
                if got_n != want_n {
                    details.push(format!("{text} p={p} pi={pi:?} s={s}: N {got_n} != {want_n}"));
                }
                let hist = ff_histogram(&f, &m, &limits).unwrap();
                let mags: Vec<f64> =
                    FFCharacter::all_primitive(&m).iter().map(|c| ff_sum_from_histogram(&hist, c).magnitude).collect();
                if mags.is_empty() {
                    details.push(format!("p={p} pi={pi:?} s={s}: no primitive character"));
                }
                for mag in &mags {
                    let ok = if want_s == 0.0 { mag.abs() < 1e-12 } else { (mag - want_s).abs() <= 1e-10 * want_s };
                    if !ok {
                        details.push(format!("{text} p={p} pi={pi:?} s={s}: |S| {mag} != {want_s}"));
                    }
                    if (mag - mags[0]).abs() > 1e-10 {
                        details.push(format!("{text} p={p} pi={pi:?} s={s}: character dependence"));
                    }
                }
            }
        }
    }
    Outcome { pass: details.is_empty(), summary: format!("{checks} (f, modulus) checks over 3 residue fields"), details }
}

fn random_poly(rng: &mut ChaCha8Rng) -> BivariatePoly {
    loop {
        let n = rng.gen_range(1..=4);
        let terms: Vec<(u32, u32, i64)> =
            (0..n).map(|_| (rng.gen_range(0..=4), rng.gen_range(0..=4), rng.gen_range(-6..=6))).collect();
        let f = BivariatePoly::from_terms(terms);
        if !f.is_zero() {
            return f;
        }
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    // Pairs are drawn from the part of the range the enumeration budget covers:
    // N(f; m) costs m² evaluations.
    let max_product = 10_000u64;
    let mut prime_powers = Vec::new();
    for p in (2..max_product).filter(|&p| is_prime(p)) {
        let mut pk = p;
        while pk <= max_product / 2 {
            prime_powers.push((p, pk));
            pk *= p;
        }
    }
    let limits = Limits::with_budget(BUDGET);
    let mut details = Vec::new();
    let mut shown = Vec::new();
    for _ in 0..20 {
        let f = random_poly(&mut rng);
        let (m1, m2) = loop {
            let (p1, a) = prime_powers[rng.gen_range(0..prime_powers.len())];
            let (p2, b) = prime_powers[rng.gen_range(0..prime_powers.len())];
            if p1 != p2 && a * b <= max_product {
                break (a, b);
            }
        };
        let whole = count_mod(&f, m1 * m2, &limits).unwrap();
        let split = count_mod(&f, m1, &limits).unwrap() * count_mod(&f, m2, &limits).unwrap();
        if whole != split || whole.is_zero() && !split.is_zero() {
            details.push(format!("{f} at {m1}·{m2}: {whole} != {split}"));
        }
        shown.push(format!("{m1}·{m2}"));
    }
    Outcome { pass: details.is_empty(), summary: format!("20 polynomials, moduli {}", shown.join(" ")), details }
}

fn report(n: &str, desc: &str, started: Instant, o: &Outcome) -> bool {
    println!(
        "criterion {n} {}: {desc} ({}; {:.1}s)",
        if o.pass { "PASS" } else { "FAIL" },
        o.summary,
        started.elapsed().as_secs_f64()
    );
    for d in &o.details {
        println!("    {d}");
    }
    o.pass
}

fn main() {
    let mut ok = true;
    let t = Instant::now();
    ok &= report("1", "closed-form regression corpus", t, &criterion_1());
    let t = Instant::now();
    ok &= report("2", "exceptional-class dichotomy", t, &criterion_2());
    let t = Instant::now();
    ok &= report("3", "cluster-ball description of sublevel sets", t, &criterion_3());
    let t = Instant::now();
    ok &= report("4", "three-region decomposition and I1 closed form", t, &criterion_4());
    let t = Instant::now();
    let (o5, o6) = criteria_5_and_6();
    ok &= report("5", "upper-bound scans", t, &o5);
    ok &= report("6", "lower bounds", t, &o6);
    let t = Instant::now();
    ok &= report("7", "function-field parity", t, &criterion_7());
    let t = Instant::now();
    ok &= report("8", "multiplicativity of N", t, &criterion_8());
    if !ok {
        std::process::exit(1);
    }
}
