//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circlegather::algorithm::{gathering_decision, Algorithm, Decision, Multiplicity, Registry, Rule, Snapshot};
use circlegather::engine::{self, read_trace, write_trace, Outcome, RunOptions, SchedulerSpec, TraceHeader};
use circlegather::impossibility::{
    self, derandomize, epsilon, find_compatible, forge, is_compatible, isomorphism_check, perturb, Certificate,
    Coefficients, DerandGrid, Evidence, ForgeOptions, Point,
};
use circlegather::{Angle, Configuration, Visibility};

type Verdict = Result<String, String>;

fn a(s: &str) -> Angle {
    s.parse().unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Shorter-arc distance in turns, from raw rationals.
fn dist(x: &BigRational, y: &BigRational) -> BigRational {
    let d = frac(&(y - x));
    let other = BigRational::one() - &d;
    if d < other {
        d
    } else {
        other
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let initial = Configuration::parse_inline("0/1,1/10,2/5").unwrap();
    let registry = Registry::with_builtins();
    let alg = registry.get("listing1").unwrap();
    let vis = Visibility::half_circle();

    // Worked out by hand: the robot at 0 heads both its visible and its ghost
    // configuration and steps onto 1/10; the other two head neither.
    let d = engine::hypothetical_decisions(&initial, alg.as_ref(), &vis).map_err(|e| e.to_string())?;
    ensure(d[&a("0")] == Decision::new(a("1/10"), Rule::R3), || format!("robot at 0 decided {:?}", d[&a("0")]))?;
    ensure(d[&a("1/10")].is_null() && d[&a("2/5")].is_null(), || format!("others moved: {d:?}"))?;

    let mut sched = SchedulerSpec::Full.build(3).unwrap();
    let res = engine::run(&initial.expanded(), &mut sched, &RunOptions::new(alg.as_ref(), &vis))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(res.outcome == Outcome::Gathered { point: a("1/10"), step: 2 }, || format!("outcome {:?}", res.outcome))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("gathered at 1/10 step 2 in {elapsed:?}"))
}

fn criterion_2() -> Verdict {
    use Multiplicity::One;
    let cases: [(&[&str], &str, Rule); 5] = [
        (&["1/10", "2/5"], "1/10", Rule::R3),
        (&["1/100", "51/100", "3/4"], "1/75", Rule::R4a),
        (&["1/10", "11/20"], "2/35", Rule::R4b),
        (&["1/10", "14/25"], "1/20", Rule::R4c),
        (&[], "1/4", Rule::R2),
    ];
    for (visible, want, rule) in cases {
        let snap = Snapshot::new(Visibility::half_circle(), One, visible.iter().map(|o| (a(o), One)).collect())
            .map_err(|e| e.to_string())?;
        let got = gathering_decision(&snap).map_err(|e| e.to_string())?;
        ensure(got == Decision::new(a(want), rule), || format!("{visible:?}: expected {want} by {rule}, got {got:?}"))?;
    }
    Ok("rules 3, 4a, 4b, 4c, 2 exact".into())
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let registry = Registry::with_builtins();
    let alg = registry.get("listing1").unwrap();
    let vis = Visibility::half_circle();
    for k in [4usize, 6] {
        let initial = Configuration::regular(k);
        let all: BTreeSet<usize> = (0..k).collect();
        let mut positions = initial.expanded();
        for s in 1..=100 {
            let rec = engine::step(&positions, &all, alg.as_ref(), &vis, s).map_err(|e| e.to_string())?;
            ensure(rec.configuration == initial, || format!("{k}-gon changed at step {s}"))?;
            ensure(rec.configuration.symmetry_order() == k, || format!("{k}-gon lost symmetry at step {s}"))?;
            positions = rec.positions;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("square and hexagon fixed for 100 steps in {elapsed:?}"))
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let schedulers = ["full", "round-robin", "random:1/2"];
    let failures: Vec<String> = std::thread::scope(|scope| {
        let handles: Vec<_> = (2usize..=10)
            .map(|n| {
                scope.spawn(move || {
                    let registry = Registry::with_builtins();
                    let alg = registry.get("listing1").unwrap();
                    let vis = Visibility::half_circle();
                    let mut failed = Vec::new();
                    for seed in 0..100u64 {
                        let initial = Configuration::random_asymmetric(n, seed, 1000).unwrap();
                        for sched in schedulers {
                            let mut s = SchedulerSpec::parse(sched, seed).unwrap().build(n).unwrap();
                            let mut opts = RunOptions::new(alg.as_ref(), &vis);
                            opts.monitor = true;
                            opts.step_cap = 10_000;
                            match engine::run(&initial.expanded(), &mut s, &opts) {
                                Ok(r) if matches!(r.outcome, Outcome::Gathered { .. }) => {}
                                Ok(r) => failed.push(format!("n={n} seed={seed} {sched}: {:?}", r.outcome)),
                                Err(e) => failed.push(format!("n={n} seed={seed} {sched}: {e}")),
                            }
                        }
                    }
                    failed
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    let elapsed = start.elapsed();
    ensure(failures.is_empty(), || format!("{} of 2700 runs failed, first: {}", failures.len(), failures[0]))?;
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("2700 monitored runs gathered in {elapsed:?}"))
}

/// The three conditions on the regular `n`-set, checked over all points and
/// pairs with integer arithmetic: point `k/n` lies at distance
/// `min(k, n-k)/n` from the origin.
fn brute_compatible(n: usize, theta: (i64, i64)) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as i64;
    let (tn, td) = theta;
    let steps = |i: i64, j: i64| {
        let k = (j - i).rem_euclid(n);
        k.min(n - k)
    };
    let half = (0..n).all(|i| (0..n).filter(|&j| 4 * steps(i, j) < n).count() as i64 * 2 == n);
    let pairs = || (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| steps(i, j)));
    let never_theta = pairs().all(|s| s * td != tn * n);
    let some_closer = pairs().any(|s| s * td < tn * n);
    half && never_theta && some_closer
}

fn criterion_5() -> Verdict {
    for (tn, td) in [(1i64, 4i64), (1, 5), (1, 6)] {
        let theta = Angle::new(tn, td);
        for n in 1..=200 {
            let got = is_compatible(n, &theta).map_err(|e| e.to_string())?;
            ensure(got == brute_compatible(n, (tn, td)), || format!("n={n} theta={theta}: got {got}"))?;
        }
        for k in 2..=150 {
            let found = find_compatible(&theta, k).map_err(|e| e.to_string())?;
            let oracle = (k..).find(|&m| brute_compatible(m, (tn, td))).unwrap();
            ensure(found == oracle, || format!("find_compatible({theta}, {k}) = {found}, oracle {oracle}"))?;
        }
    }
    let q = Angle::quarter();
    ensure(find_compatible(&q, 2).unwrap() == 6, || "find_compatible(1/4, 2) != 6".into())?;
    ensure(find_compatible(&q, 7).unwrap() == 10, || "find_compatible(1/4, 7) != 10".into())?;
    Ok("agrees with brute force for n <= 200 at 1/4, 1/5, 1/6".into())
}

fn criterion_6() -> Verdict {
    let theta = Angle::quarter();
    let vis = Visibility::limited(theta.clone()).unwrap();
    let quarter = q(1, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for n in [6usize, 10] {
        let eps = epsilon(&theta, n).map_err(|e| e.to_string())?;
        let regular = Configuration::regular(n);
        let reg: Vec<BigRational> = (0..n).map(|i| q(i as i64, n as i64)).collect();
        for _ in 0..200 {
            let gamma = Coefficients::sample_distinct(n, 1000, &mut rng);
            let p = perturb(n, &eps, &gamma).map_err(|e| e.to_string())?;
            let copies: Vec<BigRational> =
                (0..n).map(|i| frac(&(&reg[i] + gamma.get(i) * eps.turns()))).collect();
            ensure(p.copies().iter().map(|c| c.turns().clone()).eq(copies.iter().cloned()), || {
                format!("n={n}: copies differ from i/n + gamma_i * eps")
            })?;
            for c in 0..n {
                let inside: BTreeSet<usize> = (0..n).filter(|&j| dist(&reg[c], &copies[j]) < quarter).collect();
                let original: BTreeSet<usize> = (0..n).filter(|&j| dist(&reg[c], &reg[j]) < quarter).collect();
                ensure(inside.len() * 2 == n && inside == original, || {
                    format!("n={n} gamma={:?}: semicircle at {c}/{n} holds {inside:?}", gamma.values())
                })?;
            }
            for i in 0..n {
                for j in 0..n {
                    let before = dist(&reg[i], &reg[j]) < *theta.turns();
                    let after = dist(&copies[i], &copies[j]) < *theta.turns();
                    ensure(before == after, || format!("n={n}: neighborhood of {i},{j} changed"))?;
                }
            }
            ensure(isomorphism_check(&regular, &p, &vis).map_err(|e| e.to_string())?, || {
                format!("n={n}: isomorphism check failed for {:?}", gamma.values())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} perturbations preserve semicircles, neighborhoods and the visibility graph"))
}

fn is_asymmetric(points: &[BigRational]) -> bool {
    let set: BTreeSet<&BigRational> = points.iter().collect();
    points[1..].iter().all(|p| {
        let r = p - &points[0];
        !points.iter().all(|x| set.contains(&frac(&(x + &r))))
    })
}

fn is_connected(points: &[BigRational], theta: &BigRational) -> bool {
    let mut seen = vec![false; points.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..points.len() {
            if !seen[j] && dist(&points[i], &points[j]) < *theta {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn turns(c: &Configuration) -> Vec<BigRational> {
    c.locations().map(|p| p.turns().clone()).collect()
}

/// Re-checks a certificate without the library's verifier.
fn independent_check(cert: &Certificate, alg: &dyn Algorithm) -> Result<(), String> {
    let vis = Visibility::limited(cert.theta.clone()).map_err(|e| e.to_string())?;
    let theta = cert.theta.turns().clone();
    match &cert.evidence {
        Evidence::Frozen { config, .. } => {
            let pts = turns(config);
            ensure(pts.len() == cert.n && config.is_set(), || "frozen configuration has the wrong size".into())?;
            ensure(is_asymmetric(&pts), || "frozen configuration is symmetric".into())?;
            ensure(is_connected(&pts, &theta), || "frozen configuration is disconnected".into())?;
            for p in config.locations() {
                let d = alg.decide(&Snapshot::observe(config, p, &vis)).map_err(|e| e.to_string())?;
                ensure(d.is_null(), || format!("robot at {p} moves"))?;
            }
        }
        Evidence::Lemma1 { combined, activated, successor, rotation, .. }
        | Evidence::Lemma2 { combined, activated, successor, rotation, .. } => {
            let pts = turns(combined);
            ensure(pts.len() == cert.n && combined.is_set(), || "Q has the wrong size".into())?;
            ensure(is_asymmetric(&pts), || "Q is symmetric".into())?;
            ensure(is_connected(&pts, &theta), || "Q is disconnected".into())?;
            let mut next: BTreeMap<Angle, usize> = combined.iter().map(|(p, c)| (p.clone(), c)).collect();
            for p in activated {
                ensure(combined.contains(p), || format!("activated {p} not in Q"))?;
                let d = alg.decide(&Snapshot::observe(combined, p, &vis)).map_err(|e| e.to_string())?;
                *next.get_mut(p).unwrap() -= 1;
                *next.entry(p + &d.destination).or_insert(0) += 1;
            }
            next.retain(|_, c| *c > 0);
            let stepped = Configuration::from_counts(next).map_err(|e| e.to_string())?;
            ensure(stepped == *successor, || format!("successor mismatch: {stepped} vs {successor}"))?;
            ensure(*rotation == Angle::half(), || format!("rotation witness {rotation}"))?;
            for (p, c) in successor.iter() {
                ensure(successor.count(&(p + &Angle::half())) == c, || format!("{p} has no antipodal twin"))?;
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let registry = Registry::any_visibility();
    let theta = Angle::quarter();
    let opts = ForgeOptions::default();
    let mut summary = Vec::new();
    for (name, variant, max_sample) in [
        ("midpoint", Some("Lemma1"), 10),
        ("stay", Some("Frozen"), 1),
        ("nearest", None, opts.max_samples),
        ("listing1", None, opts.max_samples),
    ] {
        let alg = registry.get(name).unwrap();
        let cert = forge(alg.as_ref(), &theta, 6, &opts).map_err(|e| format!("{name}: {e}"))?;
        ensure(cert.is_verified(), || format!("{name}: certificate not verified"))?;
        if let Some(v) = variant {
            ensure(cert.variant() == v, || format!("{name}: expected {v}, got {}", cert.variant()))?;
        }
        let sample = cert.sample.unwrap_or(usize::MAX);
        ensure(sample <= max_sample, || format!("{name}: needed {sample} samples"))?;
        independent_check(&cert, alg.as_ref()).map_err(|e| format!("{name}: {e}"))?;
        let reparsed = Certificate::from_json(&cert.to_json()).map_err(|e| e.to_string())?;
        let checks = impossibility::verify_certificate(&reparsed, alg.as_ref()).map_err(|e| e.to_string())?;
        ensure(checks.iter().all(|c| c.passed), || format!("{name}: reparsed certificate fails"))?;
        summary.push(format!("{name}={}@{sample}", cert.variant()));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{} in {elapsed:?}", summary.join(" ")))
}

fn grid_points(grid: &DerandGrid) -> Vec<Point> {
    let mut points: Vec<Point> = vec![vec![]];
    for i in 1..=grid.n() {
        points = points
            .into_iter()
            .flat_map(|p| grid.y(i).into_iter().map(move |y| [p.clone(), vec![y]].concat()))
            .collect();
    }
    points
}

fn random_obstacles(m: u64, n: usize, grid: &[Point], rng: &mut ChaCha8Rng) -> Vec<Vec<Point>> {
    (0..n)
        .map(|axis| {
            let mut lines: BTreeMap<Point, u64> = BTreeMap::new();
            let mut set = BTreeSet::new();
            for _ in 0..rng.gen_range(0..2 * grid.len()) {
                let p = if rng.gen_bool(0.8) {
                    grid[rng.gen_range(0..grid.len())].clone()
                } else {
                    (0..n).map(|_| q(rng.gen_range(0..=12), 12)).collect()
                };
                if set.contains(&p) {
                    continue;
                }
                let mut key = p.clone();
                key.remove(axis);
                let count = lines.entry(key).or_insert(0);
                if *count + 1 < m {
                    *count += 1;
                    set.insert(p);
                }
            }
            set.into_iter().collect()
        })
        .collect()
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut instances = 0;
    for (m, n) in [(2u64, 2usize), (3, 2), (2, 3)] {
        let grid = DerandGrid::new(m, n).map_err(|e| e.to_string())?;
        let points = grid_points(&grid);
        for _ in 0..50 {
            let obstacles = random_obstacles(m, n, &points, &mut rng);
            let blocked: BTreeSet<&Point> = obstacles.iter().flatten().collect();
            let solutions: BTreeSet<&Point> = points
                .iter()
                .filter(|p| p.iter().collect::<BTreeSet<_>>().len() == n && !blocked.contains(p))
                .collect();
            ensure(!solutions.is_empty(), || format!("(m,n)=({m},{n}): exhaustive search found nothing"))?;
            let got = derandomize(m, n, &obstacles).map_err(|e| e.to_string())?;
            ensure(solutions.contains(&got), || format!("(m,n)=({m},{n}): {got:?} is not a solution"))?;
            instances += 1;
        }
    }
    Ok(format!("{instances} instances inside the exhaustive solution set"))
}

fn criterion_9() -> Verdict {
    let registry = Registry::with_builtins();
    let alg = registry.get("listing1").unwrap();
    let vis = Visibility::half_circle();
    let traced = |seed: u64| -> Result<String, String> {
        let initial = Configuration::random_asymmetric(7, seed, 1000).map_err(|e| e.to_string())?;
        let spec = SchedulerSpec::parse("random:1/2", seed).map_err(|e| e.to_string())?;
        let mut sched = spec.build(7).map_err(|e| e.to_string())?;
        let mut opts = RunOptions::new(alg.as_ref(), &vis);
        opts.record_trace = true;
        let res = engine::run(&initial.expanded(), &mut sched, &opts).map_err(|e| e.to_string())?;
        let header = TraceHeader {
            n: 7,
            theta: vis.clone(),
            algorithm: "listing1".into(),
            scheduler: spec.to_string(),
            seed,
            step_cap: opts.step_cap,
        };
        Ok(write_trace(&header, &res.trace))
    };
    for seed in [1u64, 2, 3] {
        let first = traced(seed)?;
        ensure(first == traced(seed)?, || format!("seed {seed}: traces differ"))?;
        let (header, records) = read_trace(first.as_bytes()).map_err(|e| e.to_string())?;
        ensure(write_trace(&header, &records) == first, || format!("seed {seed}: trace does not round-trip"))?;
    }
    ensure(traced(1)? != traced(2)?, || "different seeds gave the same trace".into())?;

    for seed in 0..20u64 {
        let c = Configuration::random_asymmetric(5, seed, 997).map_err(|e| e.to_string())?;
        let c = c.with_point(c.locations().next().unwrap().clone());
        let file = c.to_file_string();
        let back = Configuration::parse_file(&file).map_err(|e| e.to_string())?;
        ensure(back == c && back.to_file_string() == file, || format!("config file round-trip failed: {file}"))?;
        let inline = c.entries().join(",");
        ensure(Configuration::parse_inline(&inline).map_err(|e| e.to_string())? == c, || {
            format!("inline round-trip failed: {inline}")
        })?;
    }

    let any = Registry::any_visibility();
    for name in ["midpoint", "stay", "nearest"] {
        let cert = forge(any.get(name).unwrap().as_ref(), &Angle::quarter(), 6, &ForgeOptions::default())
            .map_err(|e| e.to_string())?;
        let json = cert.to_json();
        let back = Certificate::from_json(&json).map_err(|e| e.to_string())?;
        ensure(back == cert && back.to_json() == json, || format!("{name}: certificate round-trip failed"))?;
    }
    Ok("traces byte-identical; config, trace and certificate files round-trip".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Verdict); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = 0;
    for (k, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {k}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {k}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
