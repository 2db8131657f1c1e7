//! Built-in regression corpus: the published values the engine must reproduce.

use num_rational::Rational64;
use shaomega_core::brauer::{br1_verdict, brauer_split, bs_sequence, citation, sha2_t_prime, Claim};
use shaomega_core::cohomology::{cohomology, kunneth_oracle, Coefficients};
use shaomega_core::gmodule::trivial_module;
use shaomega_core::hilbert::{invariant_profile, multinorm_local_solvable, PlaceOfQ, QuaternionClass};
use shaomega_core::sha::{h1_defect, sha2_omega_p, sha_omega};
use shaomega_core::{build_group, AbelianStructure, Budget, GroupSpec};

use crate::report::Report;
use crate::scenario::{parse_scenario, LoadedScenario};

/// Shipped fixtures used by the corpus, embedded so the binary is self-contained.
pub const FIXTURES: &[(&str, &str)] = &[
    ("prop-q1-n2", include_str!("../scenarios/prop-q1-n2.toml")),
    ("prop-q1-n3", include_str!("../scenarios/prop-q1-n3.toml")),
    ("remark-z2cubed", include_str!("../scenarios/remark-z2cubed.toml")),
    ("cyclic-z4", include_str!("../scenarios/cyclic-z4.toml")),
    ("abel-z2xz4", include_str!("../scenarios/abel-z2xz4.toml")),
    ("br1-product", include_str!("../scenarios/br1-product.toml")),
    ("sha-t-z6", include_str!("../scenarios/sha-t-z6.toml")),
];

fn fixture(id: &str) -> Result<LoadedScenario, String> {
    let text = FIXTURES.iter().find(|(k, _)| *k == id).map(|(_, t)| *t).ok_or("missing fixture")?;
    parse_scenario(text).map_err(|e| e.to_string())
}

struct Check {
    name: &'static str,
    cite: &'static str,
    expected: String,
    run: Box<dyn Fn(&Budget) -> Result<(String, bool), String>>,
}

fn structure_check(
    name: &'static str,
    cite: &'static str,
    expected: AbelianStructure,
    f: impl Fn(&Budget) -> Result<AbelianStructure, String> + 'static,
) -> Check {
    let exp = expected.clone();
    Check {
        name,
        cite,
        expected: expected.to_machine(),
        run: Box::new(move |b| f(b).map(|s| (s.to_machine(), s == exp))),
    }
}

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

fn q(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn corpus() -> Vec<Check> {
    let mut out = Vec::new();
    for (p, exp) in [(2u64, vec![]), (3, vec![3]), (5, vec![5])] {
        let name = match p {
            2 => "p-finite.p2",
            3 => "p-finite.p3",
            _ => "p-finite.p5",
        };
        out.push(structure_check(name, "p-finite", AbelianStructure::new(exp, 0), move |b| {
            let g = build_group(&GroupSpec::CyclicProduct(vec![p, p])).map_err(err)?;
            Ok(sha_omega(&g, &trivial_module(&g, p).map_err(err)?, 2, b).map_err(err)?.structure)
        }));
    }
    for (n, id, name) in [(2u64, "prop-q1-n2", "q1.n2"), (3, "prop-q1-n3", "q1.n3")] {
        out.push(structure_check(name, "q1", AbelianStructure::cyclic(n), move |b| {
            let s = fixture(id)?.scenario;
            let r = sha2_omega_p(&s.group, &s.hk, &s.factors, b).map_err(err)?;
            let k = kunneth_oracle(n, n, 3, Coefficients::Integers).map_err(err)?;
            if r.kernel.structure != k {
                return Err(format!("Kunneth value {} differs", k.to_machine()));
            }
            Ok(r.kernel.structure)
        }));
    }
    out.push(structure_check("kunneth.h3-z2xz2", "kunneth", AbelianStructure::cyclic(2), |b| {
        let g = build_group(&GroupSpec::CyclicProduct(vec![2, 2])).map_err(err)?;
        Ok(cohomology(&g, &trivial_module(&g, 0).map_err(err)?, 3, b).map_err(err)?.structure)
    }));
    out.push(Check {
        name: "remark.z2cubed",
        cite: "remark-omega",
        expected: "nonzero".into(),
        run: Box::new(|b| {
            let s = fixture("remark-z2cubed")?.scenario;
            let r = sha2_omega_p(&s.group, &s.hk, &s.factors, b).map_err(err)?;
            Ok((r.kernel.structure.to_machine(), !r.kernel.is_trivial()))
        }),
    });
    out.push(Check {
        name: "abel-d.cyclic-z4",
        cite: "abel-d",
        expected: "left=[] right=[]".into(),
        run: Box::new(|b| {
            let r = bs_sequence(&fixture("cyclic-z4")?.scenario, b).map_err(err)?;
            Ok((
                format!("left={} right={}", r.left.to_machine(), r.right.to_machine()),
                r.left.is_trivial() && r.right.is_trivial(),
            ))
        }),
    });
    out.push(structure_check("abel-a.z2xz4", "abel-a", AbelianStructure::trivial(), |b| {
        let s = fixture("abel-z2xz4")?.scenario;
        h1_defect(&s.group, &s.hk, &s.factors, b).map_err(err)
    }));
    out.push(Check {
        name: "br-1.s3xz2",
        cite: "br-1",
        expected: Claim::UnramifiedQuotientZero.to_string(),
        run: Box::new(|b| {
            let v = br1_verdict(&fixture("br1-product")?.scenario, b).map_err(err)?;
            Ok((v.claim.to_string(), v.claim == Claim::UnramifiedQuotientZero))
        }),
    });
    out.push(structure_check("sha-t.z6", "sha-t", AbelianStructure::trivial(), |b| {
        Ok(sha2_t_prime(&fixture("sha-t-z6")?.scenario, b).map_err(err)?.structure)
    }));
    for (n, d, exp, name, cite) in [
        (2u64, 2u64, vec![], "q2.p2", "q2"),
        (3, 3, vec![3], "q2.p3", "q2"),
        (2, 4, vec![2], "anchor.brauer-split.2-4", "brauer-split"),
        (3, 6, vec![3], "anchor.brauer-split.3-6", "brauer-split"),
    ] {
        out.push(structure_check(name, cite, AbelianStructure::new(exp, 0), move |b| {
            brauer_split(n, d, b).map_err(err)
        }));
    }
    out.push(Check {
        name: "rational-2.minus-one",
        cite: "rational-2",
        expected: "[inf,2]".into(),
        run: Box::new(|_| {
            let prof = invariant_profile(&QuaternionClass::new(q(-1), q(-1)).map_err(err)?).map_err(err)?;
            let ram: Vec<String> = prof.iter().filter(|(_, i)| i.half).map(|(v, _)| v.to_string()).collect();
            let got = format!("[{}]", ram.join(","));
            Ok((got.clone(), got == "[inf,2]"))
        }),
    });
    out.push(Check {
        name: "rational-2.square-factor",
        cite: "rational-2",
        expected: "all solvable".into(),
        run: Box::new(|_| {
            // a = 4 is a square everywhere, so every c is a local value
            let places = [PlaceOfQ::Real, PlaceOfQ::Prime(2), PlaceOfQ::Prime(3), PlaceOfQ::Prime(5), PlaceOfQ::Prime(7)];
            let mut bad = 0;
            for v in places {
                for c in [-7i64, -1, 2, 3, 5, 6, 10] {
                    if !multinorm_local_solvable(q(4), q(3), q(c), v).map_err(err)? {
                        bad += 1;
                    }
                }
            }
            Ok((if bad == 0 { "all solvable".into() } else { format!("{bad} failures") }, bad == 0))
        }),
    });
    out
}

/// Runs every check; returns the report and the number of failures.
pub fn selftest(budget: &Budget) -> (Report, usize) {
    let mut report = Report::new("selftest", String::new(), budget.max_entries);
    let checks = corpus();
    let mut failed = 0;
    for c in &checks {
        let key = |s: &str| format!("check.{}.{s}", c.name);
        let (got, ok) = match (c.run)(budget) {
            Ok(x) => x,
            Err(e) => (format!("error: {e}"), false),
        };
        failed += !ok as usize;
        report.push(key("expected"), &c.expected);
        report.push(key("got"), got);
        report.push(key("status"), if ok { "pass" } else { "FAIL" });
        report.push(key("citation"), citation(c.cite));
    }
    report.push("summary.total", checks.len());
    report.push("summary.passed", checks.len() - failed);
    (report, failed)
}
