//! Group cohomology through the inhomogeneous bar resolution, the cyclic Tate
//! fast path, and maps between cohomology groups.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::abelian::{kernel_of_map, reduce, to_i64, AbelianStructure, Cokernel, PresentedSubgroup};
use crate::error::{Error, Result};
use crate::gmodule::{restrict_action, tensor_with_zp, GModule, ModuleMap, PData};
use crate::group::{FiniteGroup, Subgroup};
use crate::sparse::{Ring, SparseQuotient};

/// Size limits for cochain computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum of `|G|^{i+1} · rank(M)` for a degree-`i` computation.
    pub max_entries: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_entries: 1_000_000 }
    }
}

impl Budget {
    pub fn new(max_entries: u128) -> Self {
        Budget { max_entries }
    }

    fn check(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.max_entries {
            return Err(Error::ComplexityLimitExceeded {
                what: what.to_string(),
                needed,
                limit: self.max_entries,
            });
        }
        Ok(())
    }
}

/// Highest supported degree.
pub const MAX_DEGREE: usize = 3;

/// Inhomogeneous cochains `C^i(G, M) = Map(G^i, M)`.
///
/// Coordinate `(x, j)` of `C^i` has index `x·k + j`, where `x` encodes the tuple
/// `(x_1, …, x_i)` in base `|G|` with `x_1` most significant.
pub struct CochainComplex<'a> {
    g: &'a FiniteGroup,
    m: &'a GModule,
}

impl<'a> CochainComplex<'a> {
    pub fn new(g: &'a FiniteGroup, m: &'a GModule) -> Result<Self> {
        if g.order() != m.group_order() {
            return Err(Error::ContextMismatch("module over a different group".into()));
        }
        Ok(CochainComplex { g, m })
    }

    pub fn tuples(&self, i: usize) -> usize {
        self.g.order().pow(i as u32)
    }

    /// Number of coordinates of `C^i`.
    pub fn dim(&self, i: usize) -> usize {
        self.tuples(i) * self.m.rank()
    }

    /// Moduli of the coordinates of `C^i`.
    pub fn moduli(&self, i: usize) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.dim(i));
        for _ in 0..self.tuples(i) {
            out.extend_from_slice(self.m.moduli());
        }
        out
    }

    fn decode(&self, mut x: usize, i: usize) -> Vec<usize> {
        let n = self.g.order();
        let mut t = vec![0; i];
        for p in (0..i).rev() {
            t[p] = x % n;
            x /= n;
        }
        t
    }

    fn encode(&self, t: &[usize]) -> usize {
        let n = self.g.order();
        t.iter().fold(0, |acc, &y| acc * n + y)
    }

    /// `δ` of the cochain with value `e_l` at tuple `x` (degree `i`), as a sparse
    /// vector in `C^{i+1}`.
    pub fn coboundary_column(&self, i: usize, x: usize, l: usize) -> Vec<(usize, i64)> {
        let n = self.g.order();
        let k = self.m.rank();
        let xt = self.decode(x, i);
        let ni = self.tuples(i);
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        let mut add = |idx: usize, v: i64| {
            *acc.entry(idx).or_insert(0) += v;
        };
        // g_1 · f(g_2, …): tuples (g, x)
        for g1 in 0..n {
            let a = self.m.action(g1);
            let base = (g1 * ni + x) * k;
            for j in 0..k {
                let v = a[(j, l)];
                if v != 0 {
                    add(base + j, v);
                }
            }
        }
        // (−1)^j f(…, g_j g_{j+1}, …)
        let mut t = vec![0usize; i + 1];
        for j in 1..=i {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            for a in 0..n {
                t[..j - 1].copy_from_slice(&xt[..j - 1]);
                t[j - 1] = a;
                t[j] = self.g.mul(self.g.inv(a), xt[j - 1]);
                t[j + 1..].copy_from_slice(&xt[j..]);
                add(self.encode(&t) * k + l, sign);
            }
        }
        // (−1)^{i+1} f(g_1, …, g_i): tuples (x, g)
        let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
        for g in 0..n {
            add((x * n + g) * k + l, sign);
        }
        let moduli = self.m.moduli();
        acc.into_iter()
            .filter_map(|(idx, v)| {
                let d = moduli[idx % k];
                let v = if d > 0 { v.rem_euclid(d) } else { v };
                (v != 0).then_some((idx, v))
            })
            .collect()
    }

    /// Value of a cochain at a tuple.
    pub fn value<'f>(&self, f: &'f [i64], t: &[usize]) -> &'f [i64] {
        let k = self.m.rank();
        let x = self.encode(t);
        &f[x * k..(x + 1) * k]
    }

    /// `δf` for a dense cochain of degree `i`.
    pub fn coboundary(&self, i: usize, f: &[i64]) -> Result<Vec<i64>> {
        if f.len() != self.dim(i) {
            return Err(Error::ContextMismatch("cochain has the wrong degree".into()));
        }
        let k = self.m.rank();
        let moduli = self.m.moduli();
        let mut out = vec![0i64; self.dim(i + 1)];
        let mut t = vec![0usize; i];
        for y in 0..self.tuples(i + 1) {
            let yt = self.decode(y, i + 1);
            let mut v: Vec<i128> = vec![0; k];
            let a = self.m.action(yt[0]);
            let tail = self.value(f, &yt[1..]);
            for r in 0..k {
                for (c, &tv) in tail.iter().enumerate() {
                    v[r] += a[(r, c)] as i128 * tv as i128;
                }
            }
            for j in 1..=i {
                let sign: i128 = if j % 2 == 0 { 1 } else { -1 };
                t[..j - 1].copy_from_slice(&yt[..j - 1]);
                t[j - 1] = self.g.mul(yt[j - 1], yt[j]);
                t[j..].copy_from_slice(&yt[j + 1..]);
                for (r, &fv) in self.value(f, &t).iter().enumerate() {
                    v[r] += sign * fv as i128;
                }
            }
            let sign: i128 = if (i + 1) % 2 == 0 { 1 } else { -1 };
            for (r, &fv) in self.value(f, &yt[..i]).iter().enumerate() {
                v[r] += sign * fv as i128;
            }
            for r in 0..k {
                out[y * k + r] = to_i64(reduce(v[r], moduli[r]))?;
            }
        }
        Ok(out)
    }

    /// Exact check of `δ ∘ δ = 0` on every basis cochain of degree `i`.
    pub fn d_squared_vanishes(&self, i: usize) -> Result<bool> {
        let k = self.m.rank();
        let moduli = self.m.moduli();
        Ok((0..self.dim(i)).into_par_iter().all(|c| {
            let mut acc: HashMap<usize, i128> = HashMap::new();
            for (r, v) in self.coboundary_column(i, c / k, c % k) {
                for (t, w) in self.coboundary_column(i + 1, r / k, r % k) {
                    *acc.entry(t).or_insert(0) += v as i128 * w as i128;
                }
            }
            acc.iter().all(|(&t, &x)| reduce(x, moduli[t % k]) == 0)
        }))
    }

    fn reduce_dense(&self, f: &mut [i64]) {
        let k = self.m.rank();
        let moduli = self.m.moduli();
        for (idx, x) in f.iter_mut().enumerate() {
            let d = moduli[idx % k];
            if d > 0 {
                *x = x.rem_euclid(d);
            }
        }
    }
}

/// `H^i(G, M)` with representative cocycles and a class-coordinate solver.
#[derive(Debug, Clone)]
pub struct CohomologyGroup {
    pub degree: usize,
    pub structure: AbelianStructure,
    /// One cocycle per invariant-factor generator.
    pub reps: Vec<Vec<i64>>,
    /// Order of each generator (0 for infinite order, only possible in degree 0).
    pub orders: Vec<i64>,
    group_order: usize,
    module_moduli: Vec<i64>,
    quotient: Option<SparseQuotient>,
    classes: PresentedSubgroup,
}

impl CohomologyGroup {
    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn module_moduli(&self) -> &[i64] {
        &self.module_moduli
    }

    /// Number of invariant-factor generators.
    pub fn ngens(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the class of a cocycle; fails if the cochain is not a cocycle.
    pub fn coordinates(&self, f: &[i64]) -> Result<Vec<i64>> {
        let s = match &self.quotient {
            Some(q) => q.project(f)?,
            None => f.to_vec(),
        };
        self.classes
            .coordinates(&s)
            .map_err(|_| Error::InternalInconsistency("cochain is not a cocycle".into()))
    }

    /// Whether a cocycle is a coboundary (modulo the module relations).
    pub fn is_trivial_class(&self, f: &[i64]) -> Result<bool> {
        Ok(self.coordinates(f)?.iter().all(|&x| x == 0))
    }

    fn check_context(&self, g: &FiniteGroup, m: &GModule) -> Result<()> {
        if self.group_order != g.order() || self.module_moduli != m.moduli() {
            return Err(Error::ContextMismatch("classes computed for another group or module".into()));
        }
        Ok(())
    }
}

/// `H^i(G, M)` for `i ≤ 3`.
pub fn cohomology(g: &FiniteGroup, m: &GModule, i: usize, budget: &Budget) -> Result<CohomologyGroup> {
    if i > MAX_DEGREE {
        return Err(Error::UnsupportedShape(format!("degree {i} exceeds {MAX_DEGREE}")));
    }
    let cx = CochainComplex::new(g, m)?;
    let k = m.rank();
    let needed = (g.order() as u128).pow(i as u32 + 1) * k as u128;
    budget.check(&format!("H^{i}({}, rank-{k} module)", g.label()), needed)?;

    if i == 0 {
        let classes = crate::gmodule::fixed_submodule(m)?;
        return Ok(CohomologyGroup {
            degree: 0,
            structure: classes.structure.clone(),
            reps: classes.gens.clone(),
            orders: classes.orders.clone(),
            group_order: g.order(),
            module_moduli: m.moduli().to_vec(),
            quotient: None,
            classes,
        });
    }

    // S = C^i / (B^i + relations)
    let ring = if m.is_lattice() {
        Ring::Integer
    } else if let Some(e) = m.uniform_modulus() {
        Ring::Modular(e)
    } else {
        Ring::Integer
    };
    let dim = cx.dim(i);
    let mut cols: Vec<Vec<(usize, i64)>> = (0..cx.tuples(i - 1))
        .into_par_iter()
        .flat_map_iter(|x| (0..k).map(move |l| (x, l)).collect::<Vec<_>>())
        .map(|(x, l)| cx.coboundary_column(i - 1, x, l))
        .collect();
    if ring == Ring::Integer && !m.is_lattice() {
        for (idx, d) in cx.moduli(i).into_iter().enumerate() {
            if d > 0 {
                cols.push(vec![(idx, d)]);
            }
        }
    }
    let q = SparseQuotient::new(dim, cols, ring)?;
    let s_moduli = q.moduli.clone();

    let classes = if m.is_lattice() {
        // torsion of C^i/B^i is exactly Z^i/B^i for a lattice
        let gens = s_moduli
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(l, _)| {
                let mut e = vec![0i64; s_moduli.len()];
                e[l] = 1;
                e
            })
            .collect();
        PresentedSubgroup::new(&s_moduli, gens)?
    } else {
        // Z^i/B^i = kernel of δ on S, found by dense elimination on S
        let s_dim = s_moduli.len() as u128;
        budget.check(&format!("kernel of δ on H^{i} quotient ({})", g.label()), s_dim * s_dim)?;
        let target_moduli = cx.moduli(i + 1);
        let images: Vec<BTreeMap<usize, i128>> = (0..q.ncomps())
            .into_par_iter()
            .map(|l| {
                let mut acc: BTreeMap<usize, i128> = BTreeMap::new();
                for (idx, coef) in q.lift(l) {
                    for (r, v) in cx.coboundary_column(i, idx / k, idx % k) {
                        *acc.entry(r).or_insert(0) += coef as i128 * v as i128;
                    }
                }
                acc
            })
            .collect();
        let mut rows: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
        for (l, img) in images.into_iter().enumerate() {
            for (r, v) in img {
                let v = reduce(v, target_moduli[r]);
                if v != 0 {
                    rows.entry(r).or_default().push((l, to_i64(v)?));
                }
            }
        }
        let (ridx, rws): (Vec<usize>, Vec<Vec<(usize, i64)>>) = rows.into_iter().unzip();
        let tgt: Vec<i64> = ridx.iter().map(|&r| target_moduli[r]).collect();
        kernel_of_map(&s_moduli, &rws, &tgt)?
    };

    let reps = classes
        .gens
        .iter()
        .map(|s| {
            let mut f = vec![0i128; dim];
            for (l, &c) in s.iter().enumerate() {
                if c != 0 {
                    for (idx, v) in q.lift(l) {
                        f[idx] += c as i128 * v as i128;
                    }
                }
            }
            let mut f: Vec<i64> = f.into_iter().map(to_i64).collect::<Result<_>>()?;
            cx.reduce_dense(&mut f);
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    if classes.structure.free_rank() > 0 {
        return Err(Error::InternalInconsistency(format!("H^{i} has a free part")));
    }
    Ok(CohomologyGroup {
        degree: i,
        structure: classes.structure.clone(),
        reps,
        orders: classes.orders.clone(),
        group_order: g.order(),
        module_moduli: m.moduli().to_vec(),
        quotient: Some(q),
        classes,
    })
}

/// A homomorphism between presented abelian groups, given on generators.
#[derive(Debug, Clone)]
pub struct ClassMap {
    pub source_orders: Vec<i64>,
    pub target_orders: Vec<i64>,
    /// Image of each source generator in target coordinates.
    pub images: Vec<Vec<i64>>,
}

impl ClassMap {
    /// Kernel, as a subgroup of the source coordinates.
    pub fn kernel(&self) -> Result<PresentedSubgroup> {
        let rows: Vec<Vec<(usize, i64)>> = (0..self.target_orders.len())
            .map(|t| {
                self.images
                    .iter()
                    .enumerate()
                    .filter(|(_, img)| img[t] != 0)
                    .map(|(s, img)| (s, img[t]))
                    .collect()
            })
            .collect();
        kernel_of_map(&self.source_orders, &rows, &self.target_orders)
    }

    pub fn cokernel(&self) -> Result<AbelianStructure> {
        Ok(Cokernel::new(&self.target_orders, &self.images)?.structure)
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().flatten().all(|&x| x == 0)
    }
}

/// Restriction `H^i(G, M) → H^i(H, M)` computed in the bar complex of `H`.
pub fn restriction(
    g: &FiniteGroup,
    h: &Subgroup,
    m: &GModule,
    classes: &CohomologyGroup,
    budget: &Budget,
) -> Result<(CohomologyGroup, ClassMap)> {
    classes.check_context(g, m)?;
    let i = classes.degree;
    let (hg, mh) = restrict_action(g, m, h)?;
    let target = cohomology(&hg, &mh, i, budget)?;
    let cg = CochainComplex::new(g, m)?;
    let ch = CochainComplex::new(&hg, &mh)?;
    let emb = h.elements();
    let k = m.rank();
    let images = classes
        .reps
        .iter()
        .map(|f| {
            let mut r = vec![0i64; ch.dim(i)];
            for y in 0..ch.tuples(i) {
                let t: Vec<usize> = ch.decode(y, i).into_iter().map(|a| emb[a]).collect();
                r[y * k..(y + 1) * k].copy_from_slice(cg.value(f, &t));
            }
            target.coordinates(&r)
        })
        .collect::<Result<Vec<_>>>()?;
    let map = ClassMap { source_orders: classes.orders.clone(), target_orders: target.orders.clone(), images };
    Ok((target, map))
}

/// Map on `H^i` induced by a module homomorphism.
pub fn induced_map(
    g: &FiniteGroup,
    f: &ModuleMap,
    source: &GModule,
    target: &GModule,
    classes: &CohomologyGroup,
    target_classes: &CohomologyGroup,
) -> Result<ClassMap> {
    classes.check_context(g, source)?;
    target_classes.check_context(g, target)?;
    if classes.degree != target_classes.degree {
        return Err(Error::ContextMismatch("degrees differ".into()));
    }
    let ks = source.rank();
    let kt = target.rank();
    let tuples = g.order().pow(classes.degree as u32);
    let images = classes
        .reps
        .par_iter()
        .map(|rep| {
            let mut out = vec![0i64; tuples * kt];
            for x in 0..tuples {
                let v = f.apply(target, &rep[x * ks..(x + 1) * ks])?;
                out[x * kt..(x + 1) * kt].copy_from_slice(&v);
            }
            target_classes.coordinates(&out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassMap {
        source_orders: classes.orders.clone(),
        target_orders: target_classes.orders.clone(),
        images,
    })
}

/// Cohomology of a cyclic group `⟨σ⟩` through the periodic resolution:
/// `H⁰ = M^σ`, `H¹ = ker N / (σ−1)M`, `H² = M^σ / N·M`.
#[derive(Debug, Clone)]
pub struct CyclicTate {
    pub degree: usize,
    pub structure: AbelianStructure,
    /// Chosen generator (an element of the ambient group).
    pub sigma: usize,
    /// `σ^j`, `j = 0..n`.
    powers: Vec<usize>,
    sub: PresentedSubgroup,
    quot: Cokernel,
    k: usize,
}

impl CyclicTate {
    /// Tate data for the cyclic subgroup generated by `sigma` inside `g`.
    pub fn for_element(g: &FiniteGroup, sigma: usize, m: &GModule, i: usize) -> Result<Self> {
        if g.order() != m.group_order() {
            return Err(Error::ContextMismatch("module over a different group".into()));
        }
        if i > 2 {
            return Err(Error::UnsupportedShape("cyclic fast path covers degrees 0..2".into()));
        }
        let n = g.element_order(sigma);
        let powers: Vec<usize> = (0..n).map(|j| g.pow(sigma, j)).collect();
        let k = m.rank();
        let moduli = m.moduli();
        let norm_col = |j: usize| -> Result<Vec<i64>> {
            let mut v = vec![0i128; k];
            for &p in &powers {
                let a = m.action(p);
                for (r, x) in v.iter_mut().enumerate() {
                    *x += a[(r, j)] as i128;
                }
            }
            v.into_iter().zip(moduli).map(|(x, &d)| to_i64(reduce(x, d))).collect()
        };
        let sigma_minus_one_col = |j: usize| -> Result<Vec<i64>> {
            let a = m.action(sigma);
            (0..k)
                .map(|r| to_i64(reduce(a[(r, j)] as i128 - if r == j { 1 } else { 0 }, moduli[r])))
                .collect()
        };
        let rows_of = |cols: &[Vec<i64>]| -> Vec<Vec<(usize, i64)>> {
            (0..k)
                .map(|r| (0..k).filter(|&j| cols[j][r] != 0).map(|j| (j, cols[j][r])).collect())
                .collect()
        };
        let ncols: Vec<Vec<i64>> = (0..k).map(norm_col).collect::<Result<_>>()?;
        let scols: Vec<Vec<i64>> = (0..k).map(sigma_minus_one_col).collect::<Result<_>>()?;
        let (sub, rel_cols) = match i {
            0 => (kernel_of_map(moduli, &rows_of(&scols), moduli)?, vec![]),
            1 => (kernel_of_map(moduli, &rows_of(&ncols), moduli)?, scols),
            _ => (kernel_of_map(moduli, &rows_of(&scols), moduli)?, ncols),
        };
        let rels: Vec<Vec<i64>> = rel_cols.iter().map(|c| sub.coordinates(c)).collect::<Result<_>>()?;
        let quot = Cokernel::new(&sub.orders, &rels)?;
        Ok(CyclicTate { degree: i, structure: quot.structure.clone(), sigma, powers, sub, quot, k })
    }

    pub fn order(&self) -> usize {
        self.powers.len()
    }

    pub fn orders(&self) -> &[i64] {
        &self.quot.orders
    }

    /// Class of a module element lying in `M^σ` (degrees 0, 2) or `ker N` (degree 1).
    pub fn classify_element(&self, v: &[i64]) -> Result<Vec<i64>> {
        let c = self
            .sub
            .coordinates(v)
            .map_err(|_| Error::InternalInconsistency("element outside the Tate numerator".into()))?;
        self.quot.project(&c)
    }

    /// Comparison from a bar cocycle of the ambient group: `f()` in degree 0,
    /// `f(σ)` in degree 1, and `Σ_j f(σ^j, σ)` in degree 2.
    pub fn classify_cocycle(&self, g: &FiniteGroup, f: &[i64]) -> Result<Vec<i64>> {
        let n = g.order();
        let k = self.k;
        let at = |x: usize| &f[x * k..(x + 1) * k];
        let v: Vec<i64> = match self.degree {
            0 => at(0).to_vec(),
            1 => at(self.sigma).to_vec(),
            _ => {
                let mut acc = vec![0i64; k];
                for &p in &self.powers {
                    for (a, &b) in acc.iter_mut().zip(at(p * n + self.sigma)) {
                        *a = a.checked_add(b).ok_or(Error::Overflow("comparison map"))?;
                    }
                }
                acc
            }
        };
        if f.len() != n.pow(self.degree as u32) * k {
            return Err(Error::ContextMismatch("cochain has the wrong size".into()));
        }
        self.classify_element(&v)
    }
}

/// `H^i(H, M)` for a cyclic group through its least-index generator.
pub fn cyclic_tate(h: &FiniteGroup, m: &GModule, i: usize) -> Result<CyclicTate> {
    let sigma = h.cyclic_generator(&h.whole())?;
    CyclicTate::for_element(h, sigma, m, i)
}

/// Shapiro's lemma check: `H^i(G, M ⊗ Z[G/H]) ≅ H^i(H, M)` as abstract groups.
pub fn shapiro_check(g: &FiniteGroup, h: &Subgroup, m: &GModule, i: usize, budget: &Budget) -> Result<bool> {
    let p = PData::single(h.clone(), 1)?;
    let induced = tensor_with_zp(g, m, &p)?;
    let lhs = cohomology(g, &induced, i, budget)?;
    let (hg, mh) = restrict_action(g, m, h)?;
    let rhs = cohomology(&hg, &mh, i, budget)?;
    Ok(lhs.structure == rhs.structure)
}

/// Coefficients for [`kunneth_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Integers,
    /// `Z/p` for a prime `p`.
    ModPrime(u64),
}

/// Closed-form `H^i(Z/n1 × Z/n2, coeff)` with trivial action, `i ≤ 3`.
pub fn kunneth_oracle(n1: u64, n2: u64, i: usize, coeff: Coefficients) -> Result<AbelianStructure> {
    use num_integer::Integer;
    if n1 == 0 || n2 == 0 {
        return Err(Error::UnsupportedShape("cyclic factors must be finite".into()));
    }
    if i > MAX_DEGREE {
        return Err(Error::UnsupportedShape(format!("degree {i} exceeds {MAX_DEGREE}")));
    }
    match coeff {
        Coefficients::Integers => Ok(match i {
            0 => AbelianStructure::new(vec![], 1),
            1 => AbelianStructure::trivial(),
            2 => AbelianStructure::new(vec![n1, n2], 0),
            _ => AbelianStructure::cyclic(n1.gcd(&n2)),
        }),
        Coefficients::ModPrime(p) => {
            if p < 2 || crate::abelian::factor_small(p).len() != 1 || crate::abelian::factor_small(p)[0].1 != 1 {
                return Err(Error::UnsupportedShape(format!("coefficient modulus {p} is not prime")));
            }
            // H^j(Z/n, F_p) is F_p for j = 0 and for all j when p | n
            let ok = |j: usize, n: u64| j == 0 || n % p == 0;
            let dim = (0..=i).filter(|&a| ok(a, n1) && ok(i - a, n2)).count();
            Ok(AbelianStructure::new(vec![p; dim], 0))
        }
    }
}
