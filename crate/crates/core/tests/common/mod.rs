//! Independent oracles and corpora shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::OnceLock;

use shaomega_core::group::{build_group, FiniteGroup, GroupSpec, Subgroup};

pub fn cp(ns: &[u64]) -> FiniteGroup {
    build_group(&GroupSpec::CyclicProduct(ns.to_vec())).unwrap()
}

pub fn sym(n: usize) -> FiniteGroup {
    build_group(&GroupSpec::Symmetric(n)).unwrap()
}

pub fn product(a: GroupSpec, b: GroupSpec) -> FiniteGroup {
    build_group(&GroupSpec::Product(Box::new(a), Box::new(b))).unwrap()
}

/// Dihedral group of order `2n` as `r^i s^j`, index `2i + j`.
pub fn dihedral(n: usize) -> FiniteGroup {
    let idx = |i: usize, j: usize| 2 * (i % n) + j;
    let table = (0..2 * n)
        .map(|a| {
            let (i1, j1) = (a / 2, a % 2);
            (0..2 * n)
                .map(|b| {
                    let (i2, j2) = (b / 2, b % 2);
                    // r^i1 s^j1 r^i2 s^j2 = r^(i1 ± i2) s^(j1+j2)
                    let i = if j1 == 0 { i1 + i2 } else { i1 + n - i2 };
                    idx(i, (j1 + j2) % 2)
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(table, format!("D{n}")).unwrap()
}

/// Quaternion group from unit quaternions ±1, ±i, ±j, ±k.
pub fn quaternion() -> FiniteGroup {
    // basis index 0..4 = 1, i, j, k; element = 2*basis + sign
    let basis_mul = |a: usize, b: usize| -> (usize, bool) {
        match (a, b) {
            (0, x) | (x, 0) => (x, false),
            (x, y) if x == y => (0, true),
            (1, 2) => (3, false),
            (2, 3) => (1, false),
            (3, 1) => (2, false),
            (2, 1) => (3, true),
            (3, 2) => (1, true),
            (1, 3) => (2, true),
            _ => unreachable!(),
        }
    };
    let table = (0..8)
        .map(|a| {
            (0..8)
                .map(|b| {
                    let (c, neg) = basis_mul(a / 2, b / 2);
                    2 * c + ((a % 2 + b % 2 + neg as usize) % 2)
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(table, "Q8".into()).unwrap()
}

/// Small groups used across the property suites (orders ≤ 24).
pub fn group_corpus() -> Vec<FiniteGroup> {
    vec![
        cp(&[1]),
        cp(&[2]),
        cp(&[3]),
        cp(&[4]),
        cp(&[6]),
        cp(&[2, 2]),
        cp(&[2, 4]),
        cp(&[3, 3]),
        cp(&[2, 2, 2]),
        sym(3),
        dihedral(4),
        quaternion(),
        product(GroupSpec::Symmetric(3), GroupSpec::CyclicProduct(vec![2])),
        sym(4),
    ]
}

/// Every subgroup, found by closing all subsets reachable from pairs of
/// cyclic subgroups under joins.
pub fn all_subgroups(g: &FiniteGroup) -> Vec<Subgroup> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut queue: VecDeque<Subgroup> = (0..g.order()).map(|x| g.subgroup_closure(&[x]).unwrap()).collect();
    let cyclic: Vec<Subgroup> = queue.iter().cloned().collect();
    while let Some(h) = queue.pop_front() {
        if !seen.insert(h.elements().to_vec()) {
            continue;
        }
        for c in &cyclic {
            let j = g.join(&h, c).unwrap();
            if !seen.contains(j.elements()) {
                queue.push_back(j);
            }
        }
        out.push(h);
    }
    out.sort_by(|a, b| (a.order(), a.elements()).cmp(&(b.order(), b.elements())));
    out
}

/// Number of homomorphisms `G → Z/d`, by assigning images to a greedy
/// generating set and checking consistency along the Cayley graph.
pub fn hom_count(g: &FiniteGroup, d: u64) -> u64 {
    let mut gens = Vec::new();
    let mut span = g.trivial_subgroup();
    for x in 0..g.order() {
        if !span.contains(x) {
            gens.push(x);
            span = g.subgroup_closure(&gens).unwrap();
        }
    }
    let total = (d as usize).pow(gens.len() as u32);
    let mut count = 0;
    for code in 0..total {
        let imgs: Vec<u64> = (0..gens.len()).map(|t| ((code / (d as usize).pow(t as u32)) % d as usize) as u64).collect();
        let mut val = vec![None; g.order()];
        val[g.identity()] = Some(0u64);
        let mut q = VecDeque::from([g.identity()]);
        let mut ok = true;
        while let Some(x) = q.pop_front() {
            for (s, &gen) in gens.iter().enumerate() {
                let y = g.mul(x, gen);
                let v = (val[x].unwrap() + imgs[s]) % d;
                match val[y] {
                    None => {
                        val[y] = Some(v);
                        q.push_back(y);
                    }
                    Some(w) if w != v => ok = false,
                    _ => {}
                }
            }
        }
        if ok {
            count += 1;
        }
    }
    count
}

/// Whether `z² = a x² + b y²` has a nonzero `p`-adic solution, by a search for
/// primitive solutions modulo `p^k` after reducing valuations to at most 1.
pub fn brute_symbol(a: i64, b: i64, p: u64) -> i8 {
    let p = p as i64;
    let strip = |mut x: i64| {
        while x % (p * p) == 0 {
            x /= p * p;
        }
        x
    };
    let (a, b) = (strip(a), strip(b));
    let (m, squares) = square_table(p as u64);
    let is_sq = |v: i64| squares[v.rem_euclid(m) as usize];
    // x a unit: scale x to 1
    if (0..m).any(|y| is_sq(a + b * y * y)) {
        return 1;
    }
    // x ≡ 0 mod p, y a unit: scale y to 1
    if (0..m).step_by(p as usize).any(|x| is_sq(a * x * x + b)) {
        return 1;
    }
    // x ≡ y ≡ 0 forces z ≡ 0 once valuations are at most 1
    -1
}

/// Squares modulo `p^k`, `k = 6` at 2 and 3 otherwise, cached per prime.
fn square_table(p: u64) -> (i64, &'static [bool]) {
    static TABLES: OnceLock<HashMap<u64, (i64, Vec<bool>)>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        small_primes(60)
            .into_iter()
            .map(|p| {
                let m = (p as i64).pow(if p == 2 { 6 } else { 3 });
                let mut t = vec![false; m as usize];
                for z in 0..m {
                    t[(z * z % m) as usize] = true;
                }
                (p, (m, t))
            })
            .collect()
    });
    let (m, t) = &tables[&p];
    (*m, t)
}

/// Real-place symbol from the definition.
pub fn brute_symbol_real(a: i64, b: i64) -> i8 {
    if a > 0 || b > 0 {
        1
    } else {
        -1
    }
}

pub fn small_primes(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| (2..n).all(|d| n % d != 0)).collect()
}
