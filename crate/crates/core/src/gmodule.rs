//! Finitely generated abelian groups with a group action, kept in a normalized
//! presentation `⊕ Z/d_j` (with `d_j = 0` meaning `Z`).

use nalgebra::DMatrix;

use crate::abelian::{reduce, to_i64};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};
use crate::snf::{big_to_i64, smith_i64, SnfFlags};

/// A `G`-module in normalized form.
///
/// Generators carry moduli (0 for a free generator, at least 2 otherwise);
/// the action of every group element is stored as an integer matrix acting on
/// coordinate columns. Modules built from a presentation remember how to move
/// between the original generators and the normalized ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GModule {
    group_order: usize,
    moduli: Vec<i64>,
    action: Vec<DMatrix<i64>>,
    original_gens: usize,
    to_normal: DMatrix<i64>,
    from_normal: DMatrix<i64>,
}

impl GModule {
    /// Module on `⊕ Z/moduli[j]` with the given per-element action (already normalized).
    pub fn new(g: &FiniteGroup, moduli: Vec<i64>, action: Vec<DMatrix<i64>>) -> Result<Self> {
        let k = moduli.len();
        if moduli.iter().any(|&d| d < 0 || d == 1) {
            return Err(Error::Invalid("normalized moduli must be 0 or at least 2".into()));
        }
        if action.len() != g.order() || action.iter().any(|a| a.nrows() != k || a.ncols() != k) {
            return Err(Error::Invalid("action must give one k×k matrix per group element".into()));
        }
        let mut m = GModule {
            group_order: g.order(),
            moduli,
            action,
            original_gens: k,
            to_normal: DMatrix::identity(k, k),
            from_normal: DMatrix::identity(k, k),
        };
        m.reduce_action();
        m.validate(g)?;
        Ok(m)
    }

    /// Module presented by `n` generators, relation rows, and an action on the
    /// original generators; the presentation is normalized.
    pub fn from_presentation(
        g: &FiniteGroup,
        n: usize,
        relations: &[Vec<i64>],
        action: &[DMatrix<i64>],
    ) -> Result<Self> {
        if action.len() != g.order() || action.iter().any(|a| a.nrows() != n || a.ncols() != n) {
            return Err(Error::Invalid("action must give one n×n matrix per group element".into()));
        }
        if relations.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("relation row has wrong length".into()));
        }
        let norm = normalize(n, relations)?;
        let k = norm.moduli.len();
        let mut act = Vec::with_capacity(action.len());
        for a in action {
            let m = mat_mul(&mat_mul(&norm.to_normal, a)?, &norm.from_normal)?;
            act.push(m);
        }
        let mut m = GModule {
            group_order: g.order(),
            moduli: norm.moduli,
            action: act,
            original_gens: n,
            to_normal: norm.to_normal,
            from_normal: norm.from_normal,
        };
        debug_assert_eq!(m.action[0].nrows(), k);
        m.reduce_action();
        // the original action must preserve the relation lattice
        m.validate(g)?;
        for r in relations {
            let rr = DMatrix::from_row_slice(1, n, r);
            for a in action {
                // relation r (row vector in original coords) acted on: the column a·rᵀ
                let img = a * rr.transpose();
                let v: Vec<i64> = img.iter().copied().collect();
                if !m.to_normal_coords(&v)?.iter().all(|&x| x == 0) {
                    return Err(Error::Invalid("action does not preserve the relations".into()));
                }
            }
        }
        Ok(m)
    }

    fn reduce_action(&mut self) {
        for a in self.action.iter_mut() {
            for (i, &d) in self.moduli.iter().enumerate() {
                if d > 0 {
                    for j in 0..a.ncols() {
                        a[(i, j)] = a[(i, j)].rem_euclid(d);
                    }
                }
            }
        }
    }

    fn validate(&self, g: &FiniteGroup) -> Result<()> {
        let k = self.moduli.len();
        let id = &self.action[g.identity()];
        if *id != DMatrix::identity(k, k) {
            return Err(Error::Invalid("identity does not act trivially".into()));
        }
        // every column of a generator image must be compatible with its modulus:
        // d_j · ρ(g) e_j ≡ 0
        for a in &self.action {
            for j in 0..k {
                if self.moduli[j] == 0 {
                    continue;
                }
                for i in 0..k {
                    let x = (a[(i, j)] as i128) * self.moduli[j] as i128;
                    if reduce(x, self.moduli[i]) != 0 {
                        return Err(Error::Invalid("action incompatible with generator orders".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks `ρ(gh) = ρ(g)ρ(h)` for all pairs (modulo the generator orders).
    pub fn is_homomorphism(&self, g: &FiniteGroup) -> bool {
        let n = g.order();
        (0..n).all(|a| {
            (0..n).all(|b| {
                let prod = &self.action[a] * &self.action[b];
                let lhs = &self.action[g.mul(a, b)];
                (0..self.rank()).all(|i| {
                    (0..self.rank()).all(|j| reduce((prod[(i, j)] - lhs[(i, j)]) as i128, self.moduli[i]) == 0)
                })
            })
        })
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    /// Number of normalized generators.
    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    /// True when every generator is free.
    pub fn is_lattice(&self) -> bool {
        self.moduli.iter().all(|&d| d == 0)
    }

    /// `Some(e)` when every generator has the same finite order `e`.
    pub fn uniform_modulus(&self) -> Option<i64> {
        let e = *self.moduli.first()?;
        if e > 0 && self.moduli.iter().all(|&d| d == e) {
            Some(e)
        } else {
            None
        }
    }

    pub fn action(&self, g: usize) -> &DMatrix<i64> {
        &self.action[g]
    }

    pub fn actions(&self) -> &[DMatrix<i64>] {
        &self.action
    }

    /// Relation matrix of the normalized presentation (one row per finite generator).
    pub fn relations(&self) -> Vec<Vec<i64>> {
        let k = self.rank();
        self.moduli
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(j, &d)| {
                let mut r = vec![0; k];
                r[j] = d;
                r
            })
            .collect()
    }

    pub fn original_gens(&self) -> usize {
        self.original_gens
    }

    /// Normalized coordinates of an element given in the original generators.
    pub fn to_normal_coords(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.original_gens {
            return Err(Error::Invalid("vector length does not match the presentation".into()));
        }
        let mut out = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let mut acc: i128 = 0;
            for (j, &x) in v.iter().enumerate() {
                acc += self.to_normal[(i, j)] as i128 * x as i128;
            }
            out.push(to_i64(reduce(acc, self.moduli[i]))?);
        }
        Ok(out)
    }

    /// A lift of normalized coordinates to the original generators.
    pub fn from_normal_coords(&self, y: &[i64]) -> Result<Vec<i64>> {
        let mut out = Vec::with_capacity(self.original_gens);
        for i in 0..self.original_gens {
            let mut acc: i128 = 0;
            for (j, &x) in y.iter().enumerate() {
                acc += self.from_normal[(i, j)] as i128 * x as i128;
            }
            out.push(to_i64(acc)?);
        }
        Ok(out)
    }

    /// Reduce a coordinate vector modulo the generator orders.
    pub fn reduce_vec(&self, v: &mut [i64]) {
        for (x, &d) in v.iter_mut().zip(&self.moduli) {
            if d > 0 {
                *x = x.rem_euclid(d);
            }
        }
    }

    /// `ρ(g) v` reduced.
    pub fn apply(&self, g: usize, v: &[i64]) -> Result<Vec<i64>> {
        let a = &self.action[g];
        let mut out = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let mut acc: i128 = 0;
            for (j, &x) in v.iter().enumerate() {
                acc += a[(i, j)] as i128 * x as i128;
            }
            out.push(to_i64(reduce(acc, self.moduli[i]))?);
        }
        Ok(out)
    }
}

struct Normalized {
    moduli: Vec<i64>,
    to_normal: DMatrix<i64>,
    from_normal: DMatrix<i64>,
}

/// Eliminate generators through relations with a unit entry, then diagonalize
/// what remains by Smith normal form.
fn normalize(n: usize, relations: &[Vec<i64>]) -> Result<Normalized> {
    let mut rows: Vec<Vec<i128>> = relations
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut alive = vec![true; n];
    // (eliminated generator, expression over the other generators)
    let mut subst: Vec<(usize, Vec<i128>)> = Vec::new();
    loop {
        let found = rows.iter().enumerate().find_map(|(ri, r)| {
            (0..n).find(|&c| alive[c] && (r[c] == 1 || r[c] == -1)).map(|c| (ri, c))
        });
        let Some((ri, c)) = found else { break };
        let row = rows.swap_remove(ri);
        let u = row[c];
        // x_c = −u · Σ_{c'≠c} row[c'] x_{c'}
        let expr: Vec<i128> = (0..n).map(|j| if j == c { 0 } else { -u * row[j] }).collect();
        for r in rows.iter_mut() {
            let f = r[c];
            if f != 0 {
                for j in 0..n {
                    r[j] = r[j]
                        .checked_add(f.checked_mul(expr[j]).ok_or(Error::Overflow("presentation"))?)
                        .ok_or(Error::Overflow("presentation"))?;
                }
                r[c] = 0;
            }
        }
        alive[c] = false;
        subst.push((c, expr));
    }
    let alive_idx: Vec<usize> = (0..n).filter(|&c| alive[c]).collect();
    // expressions of every original generator over the alive ones
    let mut expr: Vec<Vec<i128>> = (0..n)
        .map(|c| {
            let mut v = vec![0i128; n];
            if alive[c] {
                v[c] = 1;
            }
            v
        })
        .collect();
    for (c, e) in subst.iter().rev() {
        let mut v = vec![0i128; n];
        for (j, &coef) in e.iter().enumerate() {
            if coef != 0 {
                for t in 0..n {
                    v[t] += coef * expr[j][t];
                }
            }
        }
        expr[*c] = v;
    }
    // remaining relations restricted to alive generators, as columns of an a × r matrix
    let rows: Vec<Vec<i128>> = rows.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
    let a = alive_idx.len();
    let mat: Vec<Vec<i64>> = alive_idx
        .iter()
        .map(|&c| rows.iter().map(|r| to_i64(r[c])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let s = smith_i64(&mat, a, rows.len(), SnfFlags { left: true, right: false });
    let p = s.p.expect("requested");
    let pinv = s.p_inv.expect("requested");
    let kept: Vec<(usize, i64)> = (0..a)
        .filter_map(|t| {
            let d = if t < s.diag.len() { big_to_i64(&s.diag[t]).ok()? } else { 0 };
            (d != 1).then_some((t, d))
        })
        .collect();
    let k = kept.len();
    let mut to_normal = DMatrix::<i64>::zeros(k, n);
    let mut from_normal = DMatrix::<i64>::zeros(n, k);
    for (row, &(t, d)) in kept.iter().enumerate() {
        // P row t over alive generators
        let prow: Vec<i128> = (0..a).map(|q| big_to_i64(&p[t][q]).map(|x| x as i128)).collect::<Result<_>>()?;
        for c in 0..n {
            let mut acc: i128 = 0;
            for (q, &ac) in alive_idx.iter().enumerate() {
                if expr[c][ac] != 0 {
                    acc += prow[q] * expr[c][ac];
                }
            }
            to_normal[(row, c)] = to_i64(reduce(acc, d))?;
        }
        for (q, &ac) in alive_idx.iter().enumerate() {
            from_normal[(ac, row)] = big_to_i64(&pinv[q][t])?;
        }
    }
    let moduli = kept.iter().map(|&(_, d)| d).collect();
    Ok(Normalized { moduli, to_normal, from_normal })
}

fn mat_mul(a: &DMatrix<i64>, b: &DMatrix<i64>) -> Result<DMatrix<i64>> {
    let mut out = DMatrix::<i64>::zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut acc: i128 = 0;
            for t in 0..a.ncols() {
                acc += a[(i, t)] as i128 * b[(t, j)] as i128;
            }
            out[(i, j)] = to_i64(acc)?;
        }
    }
    Ok(out)
}

/// A `G`-equivariant homomorphism between normalized modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleMap {
    /// `target.rank() × source.rank()`.
    pub matrix: DMatrix<i64>,
}

impl ModuleMap {
    /// Builds a map from its matrix on normalized generators and checks that it is
    /// well defined and equivariant.
    pub fn new(source: &GModule, target: &GModule, mut matrix: DMatrix<i64>) -> Result<Self> {
        if matrix.nrows() != target.rank() || matrix.ncols() != source.rank() {
            return Err(Error::ContextMismatch("map matrix has the wrong shape".into()));
        }
        if source.group_order != target.group_order {
            return Err(Error::ContextMismatch("modules over different groups".into()));
        }
        for i in 0..matrix.nrows() {
            let d = target.moduli[i];
            if d > 0 {
                for j in 0..matrix.ncols() {
                    matrix[(i, j)] = matrix[(i, j)].rem_euclid(d);
                }
            }
        }
        let f = ModuleMap { matrix };
        for j in 0..source.rank() {
            let d = source.moduli[j];
            if d > 0 {
                let mut e = vec![0; source.rank()];
                e[j] = d;
                if f.apply(target, &e)?.iter().any(|&x| x != 0) {
                    return Err(Error::Invalid("map does not respect generator orders".into()));
                }
            }
        }
        if !f.is_equivariant(source, target)? {
            return Err(Error::Invalid("map is not equivariant".into()));
        }
        Ok(f)
    }

    /// Image of a source vector, reduced in the target.
    pub fn apply(&self, target: &GModule, v: &[i64]) -> Result<Vec<i64>> {
        let mut out = Vec::with_capacity(self.matrix.nrows());
        for i in 0..self.matrix.nrows() {
            let mut acc: i128 = 0;
            for (j, &x) in v.iter().enumerate() {
                acc += self.matrix[(i, j)] as i128 * x as i128;
            }
            out.push(to_i64(reduce(acc, target.moduli[i]))?);
        }
        Ok(out)
    }

    pub fn is_equivariant(&self, source: &GModule, target: &GModule) -> Result<bool> {
        for g in 0..source.group_order {
            for j in 0..source.rank() {
                let mut e = vec![0; source.rank()];
                e[j] = 1;
                let lhs = target.apply(g, &self.apply(target, &e)?)?;
                let rhs = self.apply(target, &source.apply(g, &e)?)?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Factor data `[(H_{L_i}, e_i)]` of the polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PData {
    factors: Vec<(Subgroup, u32)>,
}

impl PData {
    pub fn new(factors: Vec<(Subgroup, u32)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("at least one factor is required".into()));
        }
        if factors.iter().any(|(_, e)| *e == 0) {
            return Err(Error::Invalid("multiplicities must be at least 1".into()));
        }
        let po = factors[0].0.parent_order();
        if factors.iter().any(|(h, _)| h.parent_order() != po) {
            return Err(Error::ContextMismatch("factors from different groups".into()));
        }
        Ok(PData { factors })
    }

    pub fn single(h: Subgroup, e: u32) -> Result<Self> {
        Self::new(vec![(h, e)])
    }

    pub fn factors(&self) -> &[(Subgroup, u32)] {
        &self.factors
    }
}

fn permutation_matrix(ca: &crate::group::CosetAction, g: usize) -> DMatrix<i64> {
    let m = ca.len();
    let mut a = DMatrix::<i64>::zeros(m, m);
    for c in 0..m {
        a[(ca.action[g][c], c)] = 1;
    }
    a
}

/// `Z[G/H]` with left translation.
pub fn permutation_module(g: &FiniteGroup, h: &Subgroup) -> Result<GModule> {
    let ca = g.coset_action(h)?;
    let action = (0..g.order()).map(|x| permutation_matrix(&ca, x)).collect();
    GModule::new(g, vec![0; ca.len()], action)
}

/// Sum of all cosets in `Z[G/H]`.
pub fn norm_element(g: &FiniteGroup, h: &Subgroup) -> Vec<i64> {
    vec![1; g.index(h)]
}

/// The trivial module `Z/d` (`d = 0` gives `Z`, `d = 1` the zero module).
pub fn trivial_module(g: &FiniteGroup, d: u64) -> Result<GModule> {
    let d = i64::try_from(d).map_err(|_| Error::Overflow("modulus"))?;
    if d == 1 {
        return GModule::new(g, vec![], vec![DMatrix::zeros(0, 0); g.order()]);
    }
    GModule::new(g, vec![d], vec![DMatrix::identity(1, 1); g.order()])
}

/// `Z[G/H_K] / Z·N′`, the character lattice of the norm-one torus.
pub fn t_hat(g: &FiniteGroup, hk: &Subgroup) -> Result<GModule> {
    let ca = g.coset_action(hk)?;
    let action: Vec<DMatrix<i64>> = (0..g.order()).map(|x| permutation_matrix(&ca, x)).collect();
    GModule::from_presentation(g, ca.len(), &[vec![1; ca.len()]], &action)
}

/// `(Z_P ⊕ Z[G/H_K]) / Z(Σ e_i N_i + N′)`.
pub fn t_prime_hat(g: &FiniteGroup, hk: &Subgroup, p: &PData) -> Result<GModule> {
    let mut blocks = Vec::new();
    let mut rel = Vec::new();
    for (h, e) in p.factors() {
        let ca = g.coset_action(h)?;
        rel.extend(std::iter::repeat_n(*e as i64, ca.len()));
        blocks.push(ca);
    }
    let ck = g.coset_action(hk)?;
    rel.extend(std::iter::repeat_n(1, ck.len()));
    blocks.push(ck);
    let n = rel.len();
    let action: Vec<DMatrix<i64>> = (0..g.order())
        .map(|x| {
            let mut a = DMatrix::<i64>::zeros(n, n);
            let mut off = 0;
            for ca in &blocks {
                for c in 0..ca.len() {
                    a[(off + ca.action[x][c], off + c)] = 1;
                }
                off += ca.len();
            }
            a
        })
        .collect();
    GModule::from_presentation(g, n, &[rel], &action)
}

/// Offsets of the factor blocks inside `M ⊗ Z_P`, plus coset counts.
fn zp_blocks(g: &FiniteGroup, p: &PData) -> Result<Vec<crate::group::CosetAction>> {
    p.factors().iter().map(|(h, _)| g.coset_action(h)).collect()
}

/// `M ⊗ Z_P = ⊕_i M ⊗ Z[G/H_{L_i}]`; generator `(i, j, c)` is `m_j ⊗ c` in block `i`.
pub fn tensor_with_zp(g: &FiniteGroup, m: &GModule, p: &PData) -> Result<GModule> {
    if m.group_order() != g.order() {
        return Err(Error::ContextMismatch("module over a different group".into()));
    }
    let blocks = zp_blocks(g, p)?;
    let k = m.rank();
    let mut moduli = Vec::new();
    for ca in &blocks {
        for j in 0..k {
            moduli.extend(std::iter::repeat_n(m.moduli[j], ca.len()));
        }
    }
    let n = moduli.len();
    let action = (0..g.order())
        .map(|x| {
            let mut a = DMatrix::<i64>::zeros(n, n);
            let ma = m.action(x);
            let mut off = 0;
            for ca in &blocks {
                let nc = ca.len();
                for j in 0..k {
                    for c in 0..nc {
                        let c2 = ca.action[x][c];
                        for i in 0..k {
                            let v = ma[(i, j)];
                            if v != 0 {
                                a[(off + i * nc + c2, off + j * nc + c)] = v;
                            }
                        }
                    }
                }
                off += k * nc;
            }
            a
        })
        .collect();
    GModule::new(g, moduli, action)
}

/// `j_P : M → M ⊗ Z_P`, `m ↦ m ⊗ (−Σ e_i N_i)`.
pub fn jp_map(g: &FiniteGroup, m: &GModule, target: &GModule, p: &PData) -> Result<ModuleMap> {
    let blocks = zp_blocks(g, p)?;
    let k = m.rank();
    let mut mat = DMatrix::<i64>::zeros(target.rank(), k);
    let mut off = 0;
    for (ca, (_, e)) in blocks.iter().zip(p.factors()) {
        let nc = ca.len();
        for j in 0..k {
            for c in 0..nc {
                mat[(off + j * nc + c, j)] = -(*e as i64);
            }
        }
        off += k * nc;
    }
    if off != target.rank() {
        return Err(Error::ContextMismatch("target is not M ⊗ Z_P".into()));
    }
    ModuleMap::new(m, target, mat)
}

/// Restriction of the action to a subgroup, reindexed over the subgroup as a
/// standalone group.
pub fn restrict_action(g: &FiniteGroup, m: &GModule, h: &Subgroup) -> Result<(FiniteGroup, GModule)> {
    if m.group_order() != g.order() {
        return Err(Error::ContextMismatch("module over a different group".into()));
    }
    let (hg, emb) = g.subgroup_as_group(h)?;
    let action = emb.iter().map(|&x| m.action[x].clone()).collect();
    let mut r = GModule::new(&hg, m.moduli.clone(), action)?;
    r.original_gens = m.original_gens;
    r.to_normal = m.to_normal.clone();
    r.from_normal = m.from_normal.clone();
    Ok((hg, r))
}

/// Fixed submodule `M^G` as a presented subgroup of `M`.
pub fn fixed_submodule(m: &GModule) -> Result<crate::abelian::PresentedSubgroup> {
    let k = m.rank();
    let mut rows = Vec::new();
    let mut tgt = Vec::new();
    for a in m.actions() {
        for i in 0..k {
            let w: Vec<(usize, i64)> = (0..k)
                .filter_map(|j| {
                    let v = a[(i, j)] - if i == j { 1 } else { 0 };
                    (v != 0).then_some((j, v))
                })
                .collect();
            rows.push(w);
            tgt.push(m.moduli[i]);
        }
    }
    crate::abelian::kernel_of_map(m.moduli(), &rows, &tgt)
}
