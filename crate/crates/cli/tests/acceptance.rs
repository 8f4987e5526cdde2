//! Acceptance criteria A1 to A10, one line each. Exits non-zero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use formal_inverse::flow::{
    check_bcw_quadratic_nilpotent, check_euler_identities, check_gpde, check_newp, check_prop310,
    deformation_inverse, formal_flow, pde_residual, power_map,
};
use formal_inverse::inversion::{
    cross_check, invert_bcw, invert_homogeneous, invert_recurrent, jacobi_coefficients,
    lagrange_coefficients, Method,
};
use formal_inverse::rat::{binomial, rat};
use formal_inverse::series::exponents_of_degree;
use formal_inverse::trees::{enumerate_trees, order_polynomial, RootedTree};
use formal_inverse::{CheckStatus, MSeries, MapF, PolyMap};
use formal_inverse_cli::gen::{corpus, homogeneous_corpus, preset, random_h};
use formal_inverse_cli::run_command;
use num::{BigInt, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn a1_method_agreement() -> Outcome {
    let maps = corpus(SEED, 50, 8);
    let mut runs = 0;
    let mut skipped = 0;
    for (idx, f) in maps.iter().enumerate() {
        let cc =
            cross_check(f, 8, &Method::ALL, false).map_err(|e| format!("map {}: {e}", idx + 1))?;
        let id = PolyMap::identity(f.n(), 8);
        let fg = f
            .f()
            .compose_to(&cc.inverse, 8)
            .map_err(|e| e.to_string())?;
        let gf = cc.inverse.compose_to(f.f(), 8).map_err(|e| e.to_string())?;
        ensure(
            fg.agrees_through(&id, 8) && gf.agrees_through(&id, 8),
            || format!("map {}: F(G) or G(F) differs from z", idx + 1),
        )?;
        runs += cc.runs.len();
        skipped += cc.skipped.len();
    }
    Ok(format!(
        "50 maps, {runs} method runs agree, {skipped} inapplicable runs skipped"
    ))
}

fn a2_catalan() -> Outcome {
    let golden: [i64; 12] = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786];
    for (k, g) in golden.iter().enumerate() {
        let oracle = binomial(2 * k as u64, k as u64) / BigInt::from(k + 1);
        ensure(oracle == BigInt::from(*g), || {
            format!("golden {k} disagrees with the closed form")
        })?;
    }
    let f = preset("catalan", 12).map_err(|e| e.to_string())?;
    for m in Method::ALL {
        let g = m.invert(&f, 12).map_err(|e| format!("{m}: {e}"))?;
        for (k, want) in golden.iter().enumerate() {
            let got = g.component(0).coeff_of(&[k as u32 + 1]);
            ensure(got == rat(*want), || {
                format!("{m}: [z^{}] = {got}, want {want}", k + 1)
            })?;
        }
    }
    Ok("all 7 methods give Catalan(k-1) for k = 1..12".into())
}

fn brute_strict_count(t: &RootedTree, m: usize) -> usize {
    let p = t.parents();
    let k = t.size();
    let mut label = vec![0usize; k];
    let mut count = 0;
    'outer: loop {
        if (1..k).all(|v| label[p[v].expect("non-root")] < label[v]) {
            count += 1;
        }
        for slot in label.iter_mut() {
            *slot += 1;
            if *slot < m {
                continue 'outer;
            }
            *slot = 0;
        }
        return count;
    }
}

fn a3_order_polynomials() -> Outcome {
    let trees: Vec<RootedTree> = enumerate_trees(7).into_iter().flatten().collect();
    ensure(trees.len() == 85, || {
        format!("{} trees, want 85", trees.len())
    })?;
    for t in &trees {
        let omega = order_polynomial(t);
        let sign = if t.size() % 2 == 0 { 1 } else { -1 };
        ensure(omega.eval(&rat(-1)) == rat(sign), || {
            format!("{t}: value at -1 is {}", omega.eval(&rat(-1)))
        })?;
        if t.size() >= 2 {
            ensure(omega.eval(&rat(1)).is_zero(), || {
                format!("{t}: value at 1 is nonzero")
            })?;
        }
        for m in 1..=5 {
            let brute = brute_strict_count(t, m);
            ensure(omega.eval(&rat(m as i64)) == rat(brute as i64), || {
                format!("{t}: m = {m}")
            })?;
        }
    }
    Ok("85 trees: values at -1, 1 and brute-force counts for m = 1..5".into())
}

fn a4_flow() -> Outcome {
    let maps: Vec<MapF> = corpus(SEED, 50, 8)
        .into_iter()
        .filter(|f| f.n() <= 2)
        .collect();
    for (idx, f) in maps.iter().enumerate() {
        let flow = formal_flow(f, 8).map_err(|e| e.to_string())?;
        let bcw = invert_bcw(f, 8).map_err(|e| e.to_string())?;
        ensure(flow.at(&rat(-1)) == bcw, || {
            format!("map {}: flow at -1 differs from the tree inverse", idx + 1)
        })?;
        for m in [2, 3] {
            let p = power_map(f, m, 8).map_err(|e| e.to_string())?;
            ensure(flow.at(&rat(m)) == p, || {
                format!("map {}: flow at {m} differs from F^[{m}]", idx + 1)
            })?;
        }
        for (a, b) in [(1, 1), (2, -1), (-1, -1), (1, 2)] {
            let lhs = flow
                .at(&rat(a))
                .compose_to(&flow.at(&rat(b)), 8)
                .map_err(|e| e.to_string())?;
            ensure(lhs.agrees_through(&flow.at(&rat(a + b)), 8), || {
                format!("map {}: group law fails for a = {a}, b = {b}", idx + 1)
            })?;
        }
    }
    Ok(format!(
        "{} maps with n <= 2: t = -1, 2, 3 and the group law",
        maps.len()
    ))
}

fn a5_pde_residual() -> Outcome {
    let maps = corpus(SEED, 50, 8);
    for (idx, f) in maps.iter().enumerate() {
        let di = deformation_inverse(f, 8).map_err(|e| e.to_string())?;
        ensure(pde_residual(&di).is_zero(), || {
            format!("map {}: nonzero residual", idx + 1)
        })?;
        let n = f.n();
        let mut comps = vec![MSeries::zero(n, 8); n];
        let mut e = vec![0i64; n];
        e[0] = 3;
        comps[0] = MSeries::from_terms(n, 8, [(e, rat(1))]).map_err(|e| e.to_string())?;
        let fault = PolyMap::new(comps).map_err(|e| e.to_string())?;
        let bad = di
            .with_perturbed_layer(2, &fault)
            .map_err(|e| e.to_string())?;
        ensure(!pde_residual(&bad).is_zero(), || {
            format!("map {}: injected fault not detected", idx + 1)
        })?;
    }
    Ok("residual vanishes on 50 maps (exact in t); 50/50 injected faults detected".into())
}

fn h_of(n: usize, trunc: u32, comps: &[&[(&[i64], i64)]]) -> Result<PolyMap, String> {
    let comps = comps
        .iter()
        .map(|c| MSeries::from_terms(n, trunc, c.iter().map(|(e, k)| (e.to_vec(), rat(*k)))))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    PolyMap::new(comps).map_err(|e| e.to_string())
}

fn a6_newp() -> Outcome {
    let square = h_of(2, 8, &[&[(&[0, 2], 1)], &[]])?;
    let r = check_newp(&square, 8).map_err(|e| e.to_string())?;
    ensure(r.passed() && r.checks.len() == 5, || {
        format!("(z2^2, 0): {r}")
    })?;
    let catalan = h_of(1, 8, &[&[(&[2], 1)]])?;
    let r = check_newp(&catalan, 8).map_err(|e| e.to_string())?;
    ensure(r.passed() && r.checks.len() == 2, || format!("z^2: {r}"))?;
    let layers = invert_recurrent(&MapF::from_h(catalan).map_err(|e| e.to_string())?, 8)
        .map_err(|e| e.to_string())?;
    ensure(!layers.layer(2).expect("layer 2").is_zero(), || {
        "z^2: N_[2] = 0".into()
    })?;
    let samples = [
        square,
        h_of(2, 8, &[&[(&[0, 3], 1)], &[]])?,
        h_of(3, 8, &[&[(&[0, 0, 2], 1)], &[(&[0, 0, 2], 1)], &[]])?,
        h_of(3, 8, &[&[(&[0, 1, 1], 2), (&[0, 0, 2], -1)], &[], &[]])?,
    ];
    for h in &samples {
        let r = check_bcw_quadratic_nilpotent(h, 8).map_err(|e| e.to_string())?;
        ensure(
            r.passed() && r.checks[1].status == CheckStatus::Pass,
            || format!("{h}: {r}"),
        )?;
    }
    Ok(format!(
        "both directions; {} JH^2 = 0 instances give G = z + H",
        samples.len()
    ))
}

fn a7_homogeneous() -> Outcome {
    for (idx, h) in homogeneous_corpus(SEED, 20, 9).into_iter().enumerate() {
        let d = h.homogeneous_degree().expect("homogeneous");
        let f = MapF::from_h(h).map_err(|e| e.to_string())?;
        let layers = 8 / (d - 1);
        let fast = invert_homogeneous(&f, layers).map_err(|e| e.to_string())?;
        let slow = invert_recurrent(&f, 9).map_err(|e| e.to_string())?;
        for m in 1..=layers as usize {
            let a = fast.layer(m).expect("computed layer");
            let b = slow.layer(m).expect("computed layer");
            ensure(a.agrees_through(b, 9), || {
                format!("map {}: layer {m} differs", idx + 1)
            })?;
            let want = (d - 1) * m as u32 + 1;
            ensure(a.homogeneous_degree().is_none_or(|k| k == want), || {
                format!(
                    "map {}: layer {m} is not homogeneous of degree {want}",
                    idx + 1
                )
            })?;
        }
    }
    Ok("20 homogeneous maps: layers agree through degree 9 with the right degrees".into())
}

fn a8_identity_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let general = corpus(SEED + 8, 12, 6);
    for (idx, f) in general.iter().enumerate() {
        let r = check_prop310(f, 6, 3, 3).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("map {}: {r}", idx + 1))?;
        let u0 = PolyMap::identity(f.n(), 6).add(&random_h(&mut rng, f.n(), 3, 6));
        let r = check_gpde(&u0, f.h(), 6).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("map {}: {r}", idx + 1))?;
    }
    let homogeneous = homogeneous_corpus(SEED + 8, 12, 6);
    for (idx, h) in homogeneous.iter().enumerate() {
        let r = check_euler_identities(h, 6).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("homogeneous map {}: {r}", idx + 1))?;
        let f = MapF::from_h(h.clone()).map_err(|e| e.to_string())?;
        let r = check_prop310(&f, 6, 3, 3).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("homogeneous map {}: {r}", idx + 1))?;
    }
    Ok(format!(
        "group law and GPDE on {} maps, Euler identities on {} homogeneous maps",
        general.len(),
        homogeneous.len()
    ))
}

fn divisible_corpus(count: usize) -> Result<Vec<MapF>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut out = Vec::new();
    for k in 0..count {
        let n = 1 + k % 2;
        let q = random_h(&mut rng, n, 3, 6);
        let comps = (0..n)
            .map(|i| &MSeries::var(n, i, 6) * q.component(i))
            .collect();
        out.push(
            MapF::from_h(PolyMap::new(comps).map_err(|e| e.to_string())?.truncate(6))
                .map_err(|e| e.to_string())?,
        );
    }
    Ok(out)
}

fn a9_residues() -> Outcome {
    let maps: Vec<MapF> = corpus(SEED, 50, 8)
        .into_iter()
        .filter(|f| f.n() <= 2)
        .collect();
    let mut coefficients = 0;
    for (idx, f) in maps.iter().enumerate() {
        let g = cross_check(f, 6, &Method::ALL, false)
            .map_err(|e| e.to_string())?
            .inverse;
        for d in 1..=6 {
            for k in exponents_of_degree(f.n(), d) {
                let jac = jacobi_coefficients(f, &k).map_err(|e| e.to_string())?;
                for (i, c) in jac.iter().enumerate() {
                    ensure(*c == g.component(i).coeff(&k), || {
                        format!(
                            "map {}: component {}, k = {:?}",
                            idx + 1,
                            i + 1,
                            k.as_slice()
                        )
                    })?;
                    coefficients += 1;
                }
            }
        }
    }
    let divisible = divisible_corpus(10)?;
    let mut lagrange = 0;
    for (idx, f) in maps.iter().chain(&divisible).enumerate() {
        if Method::Lagrange.applicable(f).is_err() {
            continue;
        }
        let g = Method::FixedPoint.invert(f, 6).map_err(|e| e.to_string())?;
        for d in 1..=6 {
            for k in exponents_of_degree(f.n(), d) {
                let lag = lagrange_coefficients(f, &k).map_err(|e| e.to_string())?;
                for (i, c) in lag.iter().enumerate() {
                    ensure(*c == g.component(i).coeff(&k), || {
                        format!(
                            "divisible map {}: component {}, k = {:?}",
                            idx + 1,
                            i + 1,
                            k.as_slice()
                        )
                    })?;
                }
            }
        }
        lagrange += 1;
    }
    Ok(format!(
        "{coefficients} Jacobi coefficients on {} maps; Lagrange matches on {lagrange} divisible maps",
        maps.len()
    ))
}

fn a10_bench() -> Outcome {
    let csv_path = std::env::temp_dir().join(format!("finv-acceptance-{}.csv", std::process::id()));
    let start = Instant::now();
    let out = run_command([
        "finv",
        "--preset",
        "dense-cubic",
        "bench",
        "--deg-range",
        "4..10",
        "--step",
        "2",
        "--runs",
        "3",
        "--csv",
        csv_path.to_str().expect("utf-8 path"),
    ]);
    let elapsed = start.elapsed();
    ensure(out.code == 0, || {
        format!("exit {}: {}", out.code, out.stderr)
    })?;
    ensure(elapsed < Duration::from_secs(600), || {
        format!("took {elapsed:?}")
    })?;
    let text = std::fs::read_to_string(&csv_path).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&csv_path);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(String::from)
        .collect();
    ensure(
        header
            == [
                "input_id",
                "method",
                "degree",
                "millis",
                "terms",
                "agree_hash",
            ],
        || format!("header {header:?}"),
    )?;
    let mut hashes: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let degree: u32 = rec[2].parse().map_err(|_| "bad degree".to_string())?;
        let _: f64 = rec[3].parse().map_err(|_| "bad millis".to_string())?;
        hashes.entry(degree).or_default().push(rec[5].to_string());
        rows += 1;
    }
    ensure(rows == 16, || format!("{rows} rows, want 16"))?;
    ensure(hashes.keys().copied().eq([4, 6, 8, 10]), || {
        "degrees differ from 4, 6, 8, 10".into()
    })?;
    ensure(
        hashes
            .values()
            .all(|h| h.len() == 4 && h.iter().all(|x| *x == h[0])),
        || "hash mismatch".into(),
    )?;
    let ranking: Vec<&str> = out
        .stdout
        .lines()
        .filter(|l| l.starts_with("ranking"))
        .collect();
    Ok(format!(
        "16 rows in {:.1}s, hashes agree; {}",
        elapsed.as_secs_f64(),
        ranking.join("; ")
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("A1", "method agreement", a1_method_agreement),
        ("A2", "Catalan oracle", a2_catalan),
        ("A3", "order polynomials", a3_order_polynomials),
        ("A4", "flow consistency", a4_flow),
        ("A5", "PDE residual", a5_pde_residual),
        ("A6", "nilpotent square cases", a6_newp),
        ("A7", "homogeneous recurrence", a7_homogeneous),
        ("A8", "identity suites", a8_identity_suites),
        ("A9", "residue formulas", a9_residues),
        ("A10", "benchmark", a10_bench),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("{id:<4} PASS  {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("{id:<4} FAIL  {name} ({secs:.1}s): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
