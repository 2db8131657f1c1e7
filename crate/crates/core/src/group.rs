//! Finite groups stored as multiplication tables, with the subgroup machinery
//! needed to quantify over cyclic subgroups and to translate field diagrams.

use std::collections::BTreeSet;
use std::fmt;

use crate::abelian::{factor_small, AbelianStructure};
use crate::error::{Error, Result};

/// Largest order accepted by [`build_group`].
pub const MAX_ORDER: usize = 120;

/// Ways of describing a group to [`build_group`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    /// Explicit table, `table[a][b] = a·b`.
    Table(Vec<Vec<usize>>),
    /// `Z/n_1 × … × Z/n_r`, elements ordered lexicographically by coordinates.
    CyclicProduct(Vec<u64>),
    /// Symmetric group on `n ≤ 5` points, elements in lexicographic rank order.
    Symmetric(usize),
    /// Direct product, elements ordered lexicographically (left factor major).
    Product(Box<GroupSpec>, Box<GroupSpec>),
}

impl GroupSpec {
    /// Number of integer coordinates used to name one element.
    pub fn coord_len(&self) -> usize {
        match self {
            GroupSpec::Table(_) => 1,
            GroupSpec::CyclicProduct(ns) => ns.len(),
            GroupSpec::Symmetric(n) => *n,
            GroupSpec::Product(a, b) => a.coord_len() + b.coord_len(),
        }
    }

    fn order(&self) -> Result<usize> {
        let o = match self {
            GroupSpec::Table(t) => t.len(),
            GroupSpec::CyclicProduct(ns) => {
                let mut o: usize = 1;
                for &n in ns {
                    if n == 0 {
                        return Err(Error::Invalid("cyclic factor of order 0".into()));
                    }
                    o = o.checked_mul(n as usize).ok_or(Error::Overflow("group order"))?;
                    if o > MAX_ORDER {
                        return Err(Error::UnsupportedShape(format!("group order exceeds {MAX_ORDER}")));
                    }
                }
                o
            }
            GroupSpec::Symmetric(n) => (1..=*n).product(),
            GroupSpec::Product(a, b) => a
                .order()?
                .checked_mul(b.order()?)
                .ok_or(Error::Overflow("group order"))?,
        };
        Ok(o)
    }

    /// Element index named by `coords` (cyclic coordinates; one-line images
    /// `1..=n` for permutations; the raw index for tables).
    pub fn element_index(&self, coords: &[i64]) -> Result<usize> {
        if coords.len() != self.coord_len() {
            return Err(Error::Invalid(format!(
                "element needs {} coordinates, got {}",
                self.coord_len(),
                coords.len()
            )));
        }
        match self {
            GroupSpec::Table(t) => {
                let i = coords[0];
                if i < 0 || i as usize >= t.len() {
                    return Err(Error::ElementOutOfRange(i.max(0) as usize, t.len()));
                }
                Ok(i as usize)
            }
            GroupSpec::CyclicProduct(ns) => {
                let mut idx = 0usize;
                for (&c, &n) in coords.iter().zip(ns) {
                    idx = idx * n as usize + c.rem_euclid(n as i64) as usize;
                }
                Ok(idx)
            }
            GroupSpec::Symmetric(n) => {
                let perm: Vec<usize> = coords
                    .iter()
                    .map(|&c| {
                        if c < 1 || c as usize > *n {
                            Err(Error::Invalid(format!("permutation image {c} outside 1..={n}")))
                        } else {
                            Ok(c as usize - 1)
                        }
                    })
                    .collect::<Result<_>>()?;
                let set: BTreeSet<usize> = perm.iter().copied().collect();
                if set.len() != *n {
                    return Err(Error::Invalid("not a permutation".into()));
                }
                Ok(perm_rank(&perm))
            }
            GroupSpec::Product(a, b) => {
                let (ca, cb) = coords.split_at(a.coord_len());
                Ok(a.element_index(ca)? * b.order()? + b.element_index(cb)?)
            }
        }
    }

    fn table(&self) -> Result<(Vec<Vec<usize>>, String)> {
        match self {
            GroupSpec::Table(t) => Ok((t.clone(), format!("table({})", t.len()))),
            GroupSpec::CyclicProduct(ns) => {
                let order = self.order()?;
                let coords = |mut i: usize| {
                    let mut c = vec![0usize; ns.len()];
                    for k in (0..ns.len()).rev() {
                        c[k] = i % ns[k] as usize;
                        i /= ns[k] as usize;
                    }
                    c
                };
                let index = |c: &[usize]| c.iter().zip(ns).fold(0usize, |acc, (&x, &n)| acc * n as usize + x);
                let elems: Vec<Vec<usize>> = (0..order).map(coords).collect();
                let table = (0..order)
                    .map(|a| {
                        (0..order)
                            .map(|b| {
                                let s: Vec<usize> = elems[a]
                                    .iter()
                                    .zip(&elems[b])
                                    .zip(ns)
                                    .map(|((&x, &y), &n)| (x + y) % n as usize)
                                    .collect();
                                index(&s)
                            })
                            .collect()
                    })
                    .collect();
                let label = if ns.is_empty() {
                    "1".to_string()
                } else {
                    ns.iter().map(|n| format!("Z/{n}")).collect::<Vec<_>>().join(" x ")
                };
                Ok((table, label))
            }
            GroupSpec::Symmetric(n) => {
                if *n > 5 {
                    return Err(Error::UnsupportedShape(format!("S_{n} is beyond the supported S_5")));
                }
                let perms = all_perms(*n);
                let table = perms
                    .iter()
                    .map(|s| {
                        perms
                            .iter()
                            .map(|t| {
                                // (s·t)(x) = s(t(x))
                                let c: Vec<usize> = t.iter().map(|&x| s[x]).collect();
                                perm_rank(&c)
                            })
                            .collect()
                    })
                    .collect();
                Ok((table, format!("S_{n}")))
            }
            GroupSpec::Product(a, b) => {
                let (ta, la) = a.table()?;
                let (tb, lb) = b.table()?;
                let (na, nb) = (ta.len(), tb.len());
                if na * nb > MAX_ORDER {
                    return Err(Error::UnsupportedShape(format!("group order exceeds {MAX_ORDER}")));
                }
                let table = (0..na * nb)
                    .map(|x| {
                        (0..na * nb)
                            .map(|y| ta[x / nb][y / nb] * nb + tb[x % nb][y % nb])
                            .collect()
                    })
                    .collect();
                Ok((table, format!("({la}) x ({lb})")))
            }
        }
    }
}

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Lexicographic rank of a permutation of `0..n`.
fn perm_rank(p: &[usize]) -> usize {
    let n = p.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// Validated finite group.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    label: String,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.label, self.order)
    }
}

/// Builds and validates a group.
pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup> {
    let (table, label) = spec.table()?;
    FiniteGroup::from_table(table, label)
}

impl FiniteGroup {
    /// Validates an explicit multiplication table.
    pub fn from_table(table: Vec<Vec<usize>>, label: String) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::BadIdentity("empty table".into()));
        }
        if n > MAX_ORDER {
            return Err(Error::UnsupportedShape(format!("group order exceeds {MAX_ORDER}")));
        }
        let mut mul = Vec::with_capacity(n * n);
        for row in &table {
            if row.len() != n {
                return Err(Error::Invalid("multiplication table is not square".into()));
            }
            for &x in row {
                if x >= n {
                    return Err(Error::ElementOutOfRange(x, n));
                }
                mul.push(x);
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul[e * n + a] == a && mul[a * n + e] == a))
            .ok_or_else(|| Error::BadIdentity("no two-sided identity".into()))?;
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| mul[a * n + b] == identity && mul[b * n + a] == identity)
                .ok_or_else(|| Error::BadIdentity(format!("element {a} has no inverse")))?;
            inverses[a] = b;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul[a * n + b];
                for c in 0..n {
                    if mul[ab * n + c] != mul[a * n + mul[b * n + c]] {
                        return Err(Error::NonAssociativeTable(a, b, c));
                    }
                }
            }
        }
        Ok(FiniteGroup { order: n, mul, identity, inverses, label })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// `g h g⁻¹`.
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.order).any(|a| self.element_order(a) == self.order)
    }

    /// The group as a subgroup of itself.
    pub fn whole(&self) -> Subgroup {
        Subgroup::from_sorted(self.order, (0..self.order).collect())
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(self.order, vec![self.identity])
    }

    fn check(&self, h: &Subgroup) -> Result<()> {
        if h.parent_order != self.order {
            return Err(Error::ContextMismatch("subgroup belongs to a different group".into()));
        }
        Ok(())
    }

    /// Smallest subgroup containing `gens`.
    pub fn subgroup_closure(&self, gens: &[usize]) -> Result<Subgroup> {
        for &g in gens {
            if g >= self.order {
                return Err(Error::ElementOutOfRange(g, self.order));
            }
        }
        let mut mask = vec![false; self.order];
        mask[self.identity] = true;
        let mut elems = vec![self.identity];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        Ok(Subgroup::from_sorted(self.order, elems))
    }

    /// Subgroup generated by two subgroups.
    pub fn join(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        self.check(a)?;
        self.check(b)?;
        let gens: Vec<usize> = a.elements.iter().chain(&b.elements).copied().collect();
        self.subgroup_closure(&gens)
    }

    pub fn intersection(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        self.check(a)?;
        self.check(b)?;
        let elems = a.elements.iter().copied().filter(|&x| b.contains(x)).collect();
        Ok(Subgroup::from_sorted(self.order, elems))
    }

    pub fn conjugate_subgroup(&self, h: &Subgroup, g: usize) -> Subgroup {
        let mut elems: Vec<usize> = h.elements.iter().map(|&x| self.conj(g, x)).collect();
        elems.sort_unstable();
        Subgroup::from_sorted(self.order, elems)
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        (0..self.order).all(|g| h.elements.iter().all(|&x| h.contains(self.conj(g, x))))
    }

    /// Smallest normal subgroup containing `h`.
    pub fn normal_closure(&self, h: &Subgroup) -> Result<Subgroup> {
        self.check(h)?;
        let gens: Vec<usize> = (0..self.order)
            .flat_map(|g| h.elements.iter().map(move |&x| (g, x)))
            .map(|(g, x)| self.conj(g, x))
            .collect();
        self.subgroup_closure(&gens)
    }

    /// Largest normal subgroup contained in `h`.
    pub fn core(&self, h: &Subgroup) -> Result<Subgroup> {
        self.check(h)?;
        let elems = h
            .elements
            .iter()
            .copied()
            .filter(|&x| (0..self.order).all(|g| h.contains(self.conj(g, x))))
            .collect();
        Ok(Subgroup::from_sorted(self.order, elems))
    }

    pub fn index(&self, h: &Subgroup) -> usize {
        self.order / h.order()
    }

    /// Every cyclic subgroup, each once, sorted by (order, elements).
    pub fn all_cyclic_subgroups(&self) -> Vec<Subgroup> {
        let mut set: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        for a in 0..self.order {
            let s = self.subgroup_closure(&[a]).expect("element in range");
            set.insert((s.order(), s.elements));
        }
        set.into_iter()
            .map(|(_, e)| Subgroup::from_sorted(self.order, e))
            .collect()
    }

    /// One representative per conjugacy class of cyclic subgroups (trivial
    /// subgroup included), ordered by (order, elements).
    pub fn cyclic_subgroup_reps(&self) -> Vec<Subgroup> {
        let all = self.all_cyclic_subgroups();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut reps = Vec::new();
        for s in all {
            if seen.contains(&s.elements) {
                continue;
            }
            for g in 0..self.order {
                seen.insert(self.conjugate_subgroup(&s, g).elements);
            }
            reps.push(s);
        }
        reps
    }

    /// Least-index generator of a cyclic subgroup.
    pub fn cyclic_generator(&self, h: &Subgroup) -> Result<usize> {
        h.elements
            .iter()
            .copied()
            .find(|&x| self.element_order(x) == h.order())
            .ok_or(Error::NotCyclic)
    }

    /// Left cosets `gH` with the left-translation action.
    pub fn coset_action(&self, h: &Subgroup) -> Result<CosetAction> {
        self.check(h)?;
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for g in 0..self.order {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(g);
            for &x in &h.elements {
                coset_of[self.mul(g, x)] = c;
            }
        }
        let action = (0..self.order)
            .map(|g| reps.iter().map(|&r| coset_of[self.mul(g, r)]).collect())
            .collect();
        Ok(CosetAction { subgroup: h.clone(), reps, coset_of, action })
    }

    /// Quotient by a normal subgroup, with the projection from `G`.
    pub fn quotient_group(&self, n: &Subgroup) -> Result<(FiniteGroup, Vec<usize>)> {
        self.check(n)?;
        if !self.is_normal(n) {
            return Err(Error::NotNormal);
        }
        let ca = self.coset_action(n)?;
        let k = ca.reps.len();
        let table: Vec<Vec<usize>> = (0..k)
            .map(|a| (0..k).map(|b| ca.coset_of[self.mul(ca.reps[a], ca.reps[b])]).collect())
            .collect();
        let q = FiniteGroup::from_table(table, format!("({})/N{}", self.label, n.order()))?;
        Ok((q, ca.coset_of))
    }

    /// A subgroup as a standalone group, with the embedding into `G`.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> Result<(FiniteGroup, Vec<usize>)> {
        self.check(h)?;
        let pos = |x: usize| h.elements.binary_search(&x).expect("closed subgroup");
        let table = h
            .elements
            .iter()
            .map(|&a| h.elements.iter().map(|&b| pos(self.mul(a, b))).collect())
            .collect();
        let g = FiniteGroup::from_table(table, format!("sub{}({})", h.order(), self.label))?;
        Ok((g, h.elements.clone()))
    }

    /// Derived subgroup `[G, G]`.
    pub fn commutator_subgroup(&self) -> Subgroup {
        let gens: Vec<usize> = (0..self.order)
            .flat_map(|a| (0..self.order).map(move |b| (a, b)))
            .map(|(a, b)| self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b))))
            .collect();
        self.subgroup_closure(&gens).expect("elements in range")
    }

    /// Subgroup generated by all squares.
    pub fn squares_subgroup(&self) -> Subgroup {
        let gens: Vec<usize> = (0..self.order).map(|a| self.mul(a, a)).collect();
        self.subgroup_closure(&gens).expect("elements in range")
    }

    /// Invariant factors of an abelian group, read off from element-order counts.
    pub fn abelian_invariants(&self) -> Result<AbelianStructure> {
        if !self.is_abelian() {
            return Err(Error::HypothesisViolated(format!("{} is not abelian", self.label)));
        }
        let orders: Vec<usize> = (0..self.order).map(|a| self.element_order(a)).collect();
        let mut cyclic = Vec::new();
        for (p, e) in factor_small(self.order as u64) {
            let p = p as usize;
            // a[k] = log_p #{x : x^{p^k} = 1} restricted to the p-part
            let mut logs = vec![0u32];
            for k in 1..=e {
                let pk = p.pow(k);
                let cnt = orders.iter().filter(|&&o| pk % o == 0).count();
                let mut l = 0;
                let mut c = cnt;
                while c > 1 {
                    c /= p;
                    l += 1;
                }
                logs.push(l);
            }
            // number of cyclic factors of order ≥ p^k is logs[k] − logs[k−1]
            for k in 1..=e as usize {
                let at_least_k = logs[k] - logs[k - 1];
                let at_least_next = if k < e as usize { logs[k + 1] - logs[k] } else { 0 };
                for _ in 0..(at_least_k - at_least_next) {
                    cyclic.push(p.pow(k as u32) as u64);
                }
            }
        }
        Ok(AbelianStructure::new(cyclic, 0))
    }

    /// Exhaustive associativity check (already enforced at construction).
    pub fn is_associative(&self) -> bool {
        let n = self.order;
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c)))))
    }
}

/// A subgroup, as a sorted set of element indices of its parent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    parent_order: usize,
    elements: Vec<usize>,
}

impl Subgroup {
    fn from_sorted(parent_order: usize, elements: Vec<usize>) -> Self {
        Subgroup { parent_order, elements }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn parent_order(&self) -> usize {
        self.parent_order
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }
}

/// Left-translation action of `G` on `G/H`.
#[derive(Debug, Clone)]
pub struct CosetAction {
    pub subgroup: Subgroup,
    /// Least element of each coset, in increasing order.
    pub reps: Vec<usize>,
    /// Coset index of every group element.
    pub coset_of: Vec<usize>,
    /// `action[g][c]` = index of the coset `g · c`.
    pub action: Vec<Vec<usize>>,
}

impl CosetAction {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}
