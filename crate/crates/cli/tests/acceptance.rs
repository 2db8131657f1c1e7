//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#[path = "../../core/tests/common/mod.rs"]
mod common;
#[path = "../../core/tests/corpus/mod.rs"]
mod corpus;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use corpus::module_corpus;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use shaomega_cli::scenario::load_scenario;
use shaomega_core::brauer::*;
use shaomega_core::cohomology::*;
use shaomega_core::gmodule::{t_hat, trivial_module, PData};
use shaomega_core::group::{FiniteGroup, GroupSpec, Subgroup};
use shaomega_core::hilbert::*;
use shaomega_core::sha::*;
use shaomega_core::{AbelianStructure, Error};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn scen(g: &FiniteGroup, hk: &Subgroup, hl: &Subgroup) -> Scenario {
    Scenario::new("acc", g.clone(), hk.clone(), PData::single(hl.clone(), 1).unwrap()).unwrap()
}

fn fixture(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"));
    load_scenario(&path).unwrap().scenario
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let el = t.elapsed();
    ensure!(el <= limit, "{what} took {el:?}, limit {limit:?}");
    Ok(())
}

fn p_finite() -> Outcome {
    let b = Budget::default();
    for (p, exp) in [(2u64, AbelianStructure::trivial()), (3, AbelianStructure::cyclic(3)), (5, AbelianStructure::cyclic(5))] {
        let t = Instant::now();
        let g = cp(&[p, p]);
        let s = sha_omega(&g, &trivial_module(&g, p).map_err(e)?, 2, &b).map_err(e)?;
        ensure!(s.structure == exp, "p={p}: got {}", s.structure.to_machine());
        within(t, Duration::from_secs(60), &format!("p={p}"))?;
    }
    Ok("p = 2, 3, 5 exact".into())
}

fn q1() -> Outcome {
    let mut notes = Vec::new();
    for n in [2u64, 3, 4] {
        let g = cp(&[n, n]);
        let t = t_hat(&g, &g.trivial_subgroup()).map_err(e)?;
        let got = match sha_omega(&g, &t, 2, &Budget::default()) {
            Err(Error::ComplexityLimitExceeded { .. }) if n == 4 => {
                notes.push("n=4 needed a raised budget".to_string());
                sha_omega(&g, &t, 2, &Budget::new(1 << 34)).map_err(e)?
            }
            r => r.map_err(e)?,
        };
        let k = kunneth_oracle(n, n, 3, Coefficients::Integers).map_err(e)?;
        ensure!(got.structure == AbelianStructure::cyclic(n), "n={n}: got {}", got.structure.to_machine());
        ensure!(got.structure == k, "n={n}: Kunneth gives {}", k.to_machine());
    }
    notes.insert(0, "n = 2, 3, 4 equal Z/n and the Kunneth value".into());
    Ok(notes.join("; "))
}

fn abel() -> Outcome {
    let b = Budget::default();
    let groups = [
        cp(&[4]),
        cp(&[8]),
        cp(&[2, 2]),
        cp(&[2, 4]),
        cp(&[2, 2, 2]),
        cp(&[4, 4]),
        dihedral(4),
        quaternion(),
        sym(3),
        product(GroupSpec::Symmetric(3), GroupSpec::CyclicProduct(vec![2])),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xab31);
    let mut n = 0;
    for _ in 0..24 {
        let g = &groups[rng.random_range(0..groups.len())];
        let subs = all_subgroups(g);
        let normals: Vec<&Subgroup> =
            subs.iter().filter(|h| g.is_normal(h) && g.quotient_group(h).unwrap().0.is_abelian()).collect();
        let hk = normals[rng.random_range(0..normals.len())];
        let hl = &subs[rng.random_range(0..subs.len())];
        let d = h1_defect(g, hk, &PData::single(hl.clone(), 1).map_err(e)?, &b).map_err(e)?;
        ensure!(d.is_trivial(), "{} |H_K|={} |H_L|={}: defect {}", g.label(), hk.order(), hl.order(), d.to_machine());
        n += 1;
    }
    let mut cyc = 0;
    for m in [2u64, 3, 4, 6, 8, 12] {
        let g = cp(&[m]);
        for hk in all_subgroups(&g) {
            for hl in all_subgroups(&g) {
                let r = bs_sequence(&scen(&g, &hk, &hl), &b).map_err(e)?;
                ensure!(r.left.is_trivial() && r.right.is_trivial(), "Z/{m}: nonzero end");
                cyc += 1;
            }
        }
    }
    Ok(format!("{n} abelian scenarios, {cyc} cyclic scenarios"))
}

fn br1() -> Outcome {
    let b = Budget::default();
    let names = ["br1-product", "br1-s3xz2-b", "br1-s3", "br1-z6", "br1-z2xz2"];
    let mut nonabelian = false;
    for name in names {
        let s = fixture(name);
        let (hl, _) = &s.factors.factors()[0];
        ensure!(br1_condition(&s.group, &s.hk, hl).map_err(e)?, "{name}: condition fails");
        ensure!(sha2_omega_p(&s.group, &s.hk, &s.factors, &b).map_err(e)?.kernel.is_trivial(), "{name}: Ш_P ≠ 0");
        ensure!(h1_defect(&s.group, &s.hk, &s.factors, &b).map_err(e)?.is_trivial(), "{name}: defect ≠ 0");
        let v = br1_verdict(&s, &b).map_err(e)?;
        ensure!(v.claim == Claim::UnramifiedQuotientZero, "{name}: claim {}", v.claim);
        ensure!(v.reasons.iter().all(|r| r.holds), "{name}: a cross-check failed");
        nonabelian |= !s.group.is_abelian();
    }
    ensure!(nonabelian, "no non-abelian instance");
    Ok(format!("{} fixtures including S3 x Z/2", names.len()))
}

fn remark() -> Outcome {
    let s = fixture("remark-z2cubed");
    ensure!(s.hk.order() == 1 && s.factors.factors()[0].0.order() == 2, "fixture shape");
    let r = sha2_omega_p(&s.group, &s.hk, &s.factors, &Budget::default()).map_err(e)?;
    ensure!(!r.kernel.is_trivial(), "Ш_P vanished");
    Ok(format!("Ш²_ω(T̂)_P = {}", r.kernel.structure.to_machine()))
}

fn sha_t() -> Outcome {
    let b = Budget::default();
    let mut cyclic = 0;
    for g in [cp(&[4]), cp(&[6]), cp(&[2, 4]), cp(&[2, 3]), sym(3)] {
        for hk in all_subgroups(&g).into_iter().filter(|h| g.is_normal(h) && g.quotient_group(h).unwrap().0.is_cyclic()) {
            for hl in all_subgroups(&g).into_iter().take(3) {
                let sha = sha2_t_prime(&scen(&g, &hk, &hl), &b).map_err(e)?;
                ensure!(sha.is_trivial(), "{} cyclic K: {}", g.label(), sha.structure.to_machine());
                cyclic += 1;
            }
        }
    }
    let mut joined = 0;
    for g in [cp(&[2, 2]), cp(&[2, 2, 2]), sym(3), cp(&[3, 3])] {
        let subs = all_subgroups(&g);
        for hk in &subs {
            for hl in subs.iter().filter(|h| h.order() < g.order()) {
                if hk.order() < g.order() && br1_condition(&g, hk, hl).map_err(e)? && joined < 12 {
                    let sha = sha2_t_prime(&scen(&g, hk, hl), &b).map_err(e)?;
                    ensure!(sha.is_trivial(), "{} joined: {}", g.label(), sha.structure.to_machine());
                    joined += 1;
                }
            }
        }
    }
    ensure!(cyclic >= 5 && joined >= 5, "too few instances: {cyclic} cyclic, {joined} joined");
    Ok(format!("{cyclic} cyclic, {joined} with <H_L, core H_K> = G"))
}

fn brauer() -> Outcome {
    let b = Budget::default();
    let cases = [(2u64, 2u64, vec![]), (3, 3, vec![3]), (2, 4, vec![2]), (3, 6, vec![3])];
    for (n, d, exp) in cases {
        let got = brauer_split(n, d, &b).map_err(e)?;
        ensure!(got == AbelianStructure::new(exp.clone(), 0), "({n},{d}): got {}", got.to_machine());
    }
    Ok("(2,2)=0, (3,3)=Z/3, anchors (2,4)=Z/2, (3,6)=Z/3".into())
}

fn homological() -> Outcome {
    let b = Budget::default();
    let mut checks = 0usize;
    for g in group_corpus().into_iter().filter(|g| g.order() <= 12) {
        for (name, m) in module_corpus(&g) {
            let c = CochainComplex::new(&g, &m).map_err(e)?;
            for i in 0..=2 {
                ensure!(c.d_squared_vanishes(i).map_err(e)?, "d∘d ≠ 0 on {} {name} i={i}", g.label());
                checks += 1;
            }
            let n = g.order() as i64;
            for i in 1..=2 {
                let h = cohomology(&g, &m, i, &b).map_err(e)?;
                for rep in &h.reps {
                    let scaled: Vec<i64> = rep.iter().map(|&x| x * n).collect();
                    ensure!(h.is_trivial_class(&scaled).map_err(e)?, "|G| does not kill H^{i} of {} {name}", g.label());
                }
                checks += 1;
            }
        }
    }
    for n in 1..=12u64 {
        let g = cp(&[n]);
        for (name, m) in module_corpus(&g) {
            for i in 0..=2 {
                let bar = cohomology(&g, &m, i, &b).map_err(e)?;
                let tate = cyclic_tate(&g, &m, i).map_err(e)?;
                ensure!(bar.structure == tate.structure, "Z/{n} {name} H^{i}: bar and Tate differ");
                checks += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let groups: Vec<_> = group_corpus().into_iter().filter(|g| g.order() > 1 && g.order() <= 12).collect();
    for _ in 0..30 {
        let g = &groups[rng.random_range(0..groups.len())];
        let subs = all_subgroups(g);
        let h = &subs[rng.random_range(0..subs.len())];
        let m = trivial_module(g, [0u64, 2, 3][rng.random_range(0..3)]).map_err(e)?;
        let i = rng.random_range(1..=2);
        ensure!(shapiro_check(g, h, &m, i, &b).map_err(e)?, "Shapiro fails on {} |H|={}", g.label(), h.order());
        checks += 1;
    }
    for g in group_corpus().into_iter().filter(|g| !g.is_abelian()) {
        let subs = all_subgroups(&g);
        let m = trivial_module(&g, 2).map_err(e)?;
        for i in 1..=2 {
            let classes = cohomology(&g, &m, i, &b).map_err(e)?;
            for h in subs.iter().filter(|h| h.order() > 1 && h.order() < g.order()) {
                let kb = restriction(&g, h, &m, &classes, &b).map_err(e)?.1.kernel().map_err(e)?;
                for x in 0..g.order() {
                    let hx = g.conjugate_subgroup(h, x);
                    if hx == *h {
                        continue;
                    }
                    let ko = restriction(&g, &hx, &m, &classes, &b).map_err(e)?.1.kernel().map_err(e)?;
                    let same = kb.gens.iter().all(|v| ko.coordinates(v).is_ok())
                        && ko.gens.iter().all(|v| kb.coordinates(v).is_ok());
                    ensure!(same, "conjugate kernels differ in {}", g.label());
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} checks, zero failures"))
}

fn q(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn hilbert() -> Outcome {
    let t = Instant::now();
    let places: Vec<PlaceOfQ> =
        std::iter::once(PlaceOfQ::Real).chain(small_primes(50).into_iter().map(PlaceOfQ::Prime)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let mut draw = || loop {
            let x: i64 = rng.random_range(-50..=50);
            if x != 0 {
                return x;
            }
        };
        let (a, b) = (draw(), draw());
        let prof = invariant_profile(&QuaternionClass::new(q(a), q(b)).map_err(e)?).map_err(e)?;
        ensure!(prof.values().filter(|i| i.half).count() % 2 == 0, "product formula fails for ({a},{b})");
    }
    let nonzero: Vec<i64> = (-30..=30).filter(|&x| x != 0).collect();
    let bad: Vec<String> = nonzero
        .par_iter()
        .flat_map_iter(|&a| {
            let places = &places;
            nonzero.iter().flat_map(move |&b| {
                places.iter().filter_map(move |&v| {
                    let want = match v {
                        PlaceOfQ::Real => brute_symbol_real(a, b),
                        PlaceOfQ::Prime(p) => brute_symbol(a, b, p),
                    };
                    (hilbert_symbol(q(a), q(b), v).ok() != Some(want)).then(|| format!("({a},{b})_{v}"))
                })
            })
        })
        .collect();
    ensure!(bad.is_empty(), "symbol mismatches: {:?}", &bad[..bad.len().min(5)]);
    let mut witnessed = 0;
    for &a in &nonzero {
        for &b in &nonzero {
            for &v in &places {
                let sq = |x: i64| is_local_square(q(x), v);
                if sq(a).map_err(e)? || sq(b).map_err(e)? || sq(a * b).map_err(e)? {
                    for c in [-7i64, -1, 2, 3, 13] {
                        ensure!(multinorm_local_solvable(q(a), q(b), q(c), v).map_err(e)?, "a={a} b={b} c={c} at {v}");
                        witnessed += 1;
                    }
                }
            }
        }
    }
    within(t, Duration::from_secs(300), "Hilbert checks")?;
    Ok(format!("50 product formulas, {} symbols, {witnessed} multinorm cases", nonzero.len().pow(2) * places.len()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let mut bodies = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("run{run}.txt"));
        let out = Command::new(env!("CARGO_BIN_EXE_shaomega"))
            .args(["--no-cache", "--machine-out"])
            .arg(&path)
            .arg("selftest")
            .output()
            .map_err(e)?;
        ensure!(out.status.success(), "selftest exited with {:?}", out.status.code());
        bodies.push(std::fs::read(&path).map_err(e)?);
    }
    ensure!(bodies[0] == bodies[1], "machine reports differ");
    Ok(format!("{} identical bytes", bodies[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("p-finite regression", p_finite),
        ("Q_1 computed ingredient", q1),
        ("abelian and cyclic vanishing", abel),
        ("Br-1 scenarios", br1),
        ("remark example", remark),
        ("Sha-T vanishing", sha_t),
        ("brauer-split values", brauer),
        ("homological property suite", homological),
        ("Hilbert symbols", hilbert),
        ("selftest determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(d) => println!("criterion {}: PASS  {name} ({d}) [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
