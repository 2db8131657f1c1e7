//! Finitely generated abelian groups in diagonal form and the exact
//! subgroup/kernel/cokernel routines the cohomology code is built on.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::snf::{big_to_i64, smith_i64, SnfFlags};

/// Invariant-factor description `Z/d_1 ⊕ … ⊕ Z/d_k ⊕ Z^r` with `d_1 | d_2 | …`, each `d_i > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianStructure {
    torsion: Vec<u64>,
    free_rank: usize,
}

impl AbelianStructure {
    /// Builds the canonical form from any list of cyclic orders (1s are dropped,
    /// non-chain lists are regrouped through their primary parts).
    pub fn new(cyclic: Vec<u64>, free_rank: usize) -> Self {
        let mut prime_powers: Vec<(u64, Vec<u64>)> = Vec::new();
        for c in cyclic.into_iter().filter(|&c| c > 1) {
            for (p, e) in factor_small(c) {
                let q = p.pow(e);
                match prime_powers.iter_mut().find(|(pp, _)| *pp == p) {
                    Some((_, v)) => v.push(q),
                    None => prime_powers.push((p, vec![q])),
                }
            }
        }
        let len = prime_powers.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        let mut torsion = vec![1u64; len];
        for (_, v) in prime_powers.iter_mut() {
            v.sort_unstable();
            let off = len - v.len();
            for (i, q) in v.iter().enumerate() {
                torsion[off + i] *= q;
            }
        }
        AbelianStructure { torsion, free_rank }
    }

    pub fn trivial() -> Self {
        AbelianStructure { torsion: vec![], free_rank: 0 }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::new(vec![n], 0)
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order, `None` for infinite groups.
    pub fn order(&self) -> Option<u128> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().map(|&d| d as u128).product())
    }

    /// Exponent of the torsion subgroup.
    pub fn exponent(&self) -> u64 {
        self.torsion.last().copied().unwrap_or(1)
    }

    /// Compact machine form, e.g. `[2,4]` or `[3]+Z^1`.
    pub fn to_machine(&self) -> String {
        let t: Vec<String> = self.torsion.iter().map(|d| d.to_string()).collect();
        if self.free_rank == 0 {
            format!("[{}]", t.join(","))
        } else {
            format!("[{}]+Z^{}", t.join(","), self.free_rank)
        }
    }
}

impl fmt::Display for AbelianStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Trial-division factorization for small positive integers.
pub(crate) fn factor_small(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Reduce `x` into `[0, m)` when `m > 0`; leave it alone for `m = 0`.
#[inline]
pub(crate) fn reduce(x: i128, m: i64) -> i128 {
    if m > 0 {
        x.rem_euclid(m as i128)
    } else {
        x
    }
}

#[inline]
pub(crate) fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow("subgroup arithmetic"))
}

/// Extended gcd on i128: returns (g, x, y) with a·x + b·y = g ≥ 0.
pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// A subgroup of the diagonal group `⊕ Z/moduli[j]` (modulus 0 meaning `Z`),
/// described by generator columns reduced coordinatewise.
#[derive(Debug, Clone)]
pub(crate) struct SubgroupGens {
    pub moduli: Vec<i64>,
    pub cols: Vec<Vec<i64>>,
}

impl SubgroupGens {
    /// The whole group.
    pub fn full(moduli: &[i64]) -> Self {
        let n = moduli.len();
        let cols = (0..n)
            .filter(|&j| moduli[j] != 1)
            .map(|j| {
                let mut c = vec![0i64; n];
                c[j] = 1;
                c
            })
            .collect();
        SubgroupGens { moduli: moduli.to_vec(), cols }
    }

    pub fn from_cols(moduli: &[i64], cols: Vec<Vec<i64>>) -> Self {
        let mut s = SubgroupGens { moduli: moduli.to_vec(), cols };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let moduli = &self.moduli;
        for c in self.cols.iter_mut() {
            for (x, &m) in c.iter_mut().zip(moduli) {
                if m > 0 {
                    *x = x.rem_euclid(m);
                }
            }
        }
        self.cols.retain(|c| c.iter().any(|&x| x != 0));
    }

    /// Keep only the elements `x` with `w · x ≡ 0 (mod b)`; `b = 0` asks for equality.
    /// The functional must be well defined on the ambient group.
    pub fn impose(&mut self, w: &[(usize, i64)], b: i64) -> Result<()> {
        if self.cols.is_empty() || w.is_empty() || b == 1 {
            return Ok(());
        }
        let mut v: Vec<i128> = Vec::with_capacity(self.cols.len());
        for c in &self.cols {
            let mut acc: i128 = 0;
            for &(j, wj) in w {
                let x = c[j];
                if x != 0 {
                    acc = acc
                        .checked_add((wj as i128) * (x as i128))
                        .ok_or(Error::Overflow("functional evaluation"))?;
                }
            }
            v.push(reduce(acc, b));
        }
        let nz: Vec<usize> = (0..v.len()).filter(|&c| v[c] != 0).collect();
        if nz.is_empty() {
            return Ok(());
        }
        let mut piv = nz[0];
        for &c in &nz {
            if v[c].unsigned_abs() < v[piv].unsigned_abs() {
                piv = c;
            }
        }
        let n = self.moduli.len();
        for &c in &nz {
            if c == piv || v[c] == 0 {
                continue;
            }
            let (vp, vc) = (v[piv], v[c]);
            if vc % vp == 0 {
                let q = vc / vp;
                for j in 0..n {
                    let x = (self.cols[c][j] as i128) - q * (self.cols[piv][j] as i128);
                    self.cols[c][j] = to_i64(reduce(x, self.moduli[j]))?;
                }
                v[c] = 0;
            } else {
                let (g, x, y) = ext_gcd(vp, vc);
                let (a, bb) = (vp / g, vc / g);
                for j in 0..n {
                    let cp = self.cols[piv][j] as i128;
                    let cc = self.cols[c][j] as i128;
                    let np = x
                        .checked_mul(cp)
                        .and_then(|s| y.checked_mul(cc).and_then(|t| s.checked_add(t)))
                        .ok_or(Error::Overflow("gcd column combination"))?;
                    let nc = a
                        .checked_mul(cc)
                        .and_then(|s| bb.checked_mul(cp).and_then(|t| s.checked_sub(t)))
                        .ok_or(Error::Overflow("gcd column combination"))?;
                    self.cols[piv][j] = to_i64(reduce(np, self.moduli[j]))?;
                    self.cols[c][j] = to_i64(reduce(nc, self.moduli[j]))?;
                }
                v[piv] = g;
                v[c] = 0;
            }
        }
        let g = v[piv];
        if b == 0 {
            self.cols.swap_remove(piv);
        } else {
            let factor = (b as i128) / g.gcd(&(b as i128));
            for j in 0..n {
                let x = (self.cols[piv][j] as i128) * factor;
                self.cols[piv][j] = to_i64(reduce(x, self.moduli[j]))?;
            }
        }
        self.normalize();
        Ok(())
    }
}

/// Finitely generated subgroup of a diagonal group, put in invariant-factor form
/// with a coordinate solver.
#[derive(Debug, Clone)]
pub struct PresentedSubgroup {
    pub structure: AbelianStructure,
    /// Ambient moduli.
    pub moduli: Vec<i64>,
    /// Original generators (ambient coordinates).
    base: Vec<Vec<i64>>,
    /// Rows of the change of basis `c ↦ U c`, one per kept component.
    u_rows: Vec<Vec<i64>>,
    /// Order of each kept component (0 for free).
    pub orders: Vec<i64>,
    /// Invariant-factor generators in ambient coordinates.
    pub gens: Vec<Vec<i64>>,
}

impl PresentedSubgroup {
    pub fn new(moduli: &[i64], base: Vec<Vec<i64>>) -> Result<Self> {
        let base = SubgroupGens::from_cols(moduli, base).cols;
        let m = base.len();
        // relation lattice: combinations of generators that vanish in the ambient group
        let mut rel = SubgroupGens {
            moduli: vec![0; m],
            cols: (0..m)
                .map(|i| {
                    let mut c = vec![0i64; m];
                    c[i] = 1;
                    c
                })
                .collect(),
        };
        for (j, &mj) in moduli.iter().enumerate() {
            if mj == 1 {
                continue;
            }
            let w: Vec<(usize, i64)> = (0..m)
                .filter(|&c| base[c][j] != 0)
                .map(|c| (c, base[c][j]))
                .collect();
            rel.impose(&w, mj)?;
        }
        // relation matrix: m rows (generators) × r columns (relations)
        let r = rel.cols.len();
        let mat: Vec<Vec<i64>> = (0..m).map(|i| (0..r).map(|c| rel.cols[c][i]).collect()).collect();
        let s = smith_i64(&mat, m, r, SnfFlags { left: true, right: false });
        let p = s.p.expect("left transform requested");
        let pinv = s.p_inv.expect("left transform requested");
        let mut u_rows = Vec::new();
        let mut orders = Vec::new();
        let mut gens = Vec::new();
        let mut torsion = Vec::new();
        let mut free = 0;
        for t in 0..m {
            let d: BigInt = if t < s.diag.len() { s.diag[t].clone() } else { BigInt::zero() };
            if d.is_one() {
                continue;
            }
            let d64 = big_to_i64(&d)?;
            // generator t = base · P^{-1} e_t
            let mut g = vec![0i128; moduli.len()];
            for c in 0..m {
                let coef = big_to_i64(&pinv[c][t])? as i128;
                if coef == 0 {
                    continue;
                }
                for j in 0..moduli.len() {
                    g[j] = reduce(g[j] + coef * base[c][j] as i128, moduli[j]);
                }
            }
            let g: Vec<i64> = g.into_iter().map(to_i64).collect::<Result<_>>()?;
            let row: Vec<i64> = p[t]
                .iter()
                .map(|x| {
                    if d64 > 0 {
                        big_to_i64(&x.mod_floor(&d))
                    } else {
                        big_to_i64(x)
                    }
                })
                .collect::<Result<_>>()?;
            u_rows.push(row);
            orders.push(d64);
            gens.push(g);
            if d64 == 0 {
                free += 1;
            } else {
                torsion.push(d64 as u64);
            }
        }
        // torsion first (already in divisibility order), free components last
        let structure = AbelianStructure::new(torsion.clone(), free);
        debug_assert_eq!(structure.torsion(), &torsion[..]);
        Ok(PresentedSubgroup { structure, moduli: moduli.to_vec(), base, u_rows, orders, gens })
    }

    /// Number of invariant-factor generators.
    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    /// Coordinates of `Σ c_i base_i` in the invariant-factor basis.
    fn coords_of_combination(&self, c: &[i128]) -> Result<Vec<i64>> {
        self.u_rows
            .iter()
            .zip(&self.orders)
            .map(|(row, &d)| {
                let mut acc: i128 = 0;
                for (x, &y) in row.iter().zip(c) {
                    acc = acc
                        .checked_add((*x as i128).checked_mul(y).ok_or(Error::Overflow("coordinates"))?)
                        .ok_or(Error::Overflow("coordinates"))?;
                }
                to_i64(reduce(acc, d))
            })
            .collect()
    }

    /// Coordinates of an ambient element known to lie in the subgroup.
    pub fn coordinates(&self, q: &[i64]) -> Result<Vec<i64>> {
        let m = self.base.len();
        if m == 0 {
            return if q.iter().zip(&self.moduli).all(|(&x, &mm)| reduce(x as i128, mm) == 0) {
                Ok(vec![])
            } else {
                Err(Error::InternalInconsistency("element outside subgroup".into()))
            };
        }
        let mut sol = SubgroupGens {
            moduli: vec![0; m + 1],
            cols: (0..=m)
                .map(|i| {
                    let mut c = vec![0i64; m + 1];
                    c[i] = 1;
                    c
                })
                .collect(),
        };
        for (j, &mj) in self.moduli.iter().enumerate() {
            if mj == 1 {
                continue;
            }
            let mut w: Vec<(usize, i64)> = (0..m)
                .filter(|&c| self.base[c][j] != 0)
                .map(|c| (c, self.base[c][j]))
                .collect();
            let qj = reduce(q[j] as i128, mj);
            if qj != 0 {
                w.push((m, to_i64(-qj)?));
            }
            sol.impose(&w, mj)?;
        }
        // combine columns so the last coordinate becomes 1
        let mut acc: Option<Vec<i128>> = None;
        for col in &sol.cols {
            let col: Vec<i128> = col.iter().map(|&x| x as i128).collect();
            acc = Some(match acc {
                None => col,
                Some(a) => {
                    let (g, x, y) = ext_gcd(a[m], col[m]);
                    if g == 0 {
                        a
                    } else {
                        a.iter()
                            .zip(&col)
                            .map(|(&p, &q)| x * p + y * q)
                            .collect()
                    }
                }
            });
        }
        let acc = acc.ok_or_else(|| Error::InternalInconsistency("element outside subgroup".into()))?;
        let lam = acc[m];
        if lam.abs() != 1 {
            return Err(Error::InternalInconsistency("element outside subgroup".into()));
        }
        let c: Vec<i128> = acc[..m].iter().map(|&x| x * lam).collect();
        self.coords_of_combination(&c)
    }

    /// Ambient element with the given invariant-factor coordinates.
    pub fn element(&self, coords: &[i64]) -> Result<Vec<i64>> {
        let mut out = vec![0i128; self.moduli.len()];
        for (g, &c) in self.gens.iter().zip(coords) {
            if c == 0 {
                continue;
            }
            for j in 0..out.len() {
                out[j] = reduce(out[j] + (c as i128) * (g[j] as i128), self.moduli[j]);
            }
        }
        out.into_iter().map(to_i64).collect()
    }
}

/// Kernel of the homomorphism `⊕ Z/dom → ⊕ Z/tgt` given by `rows` (one sparse row
/// per target coordinate), returned as a presented subgroup of the domain.
pub fn kernel_of_map(
    dom: &[i64],
    rows: &[Vec<(usize, i64)>],
    tgt: &[i64],
) -> Result<PresentedSubgroup> {
    let mut k = SubgroupGens::full(dom);
    for (w, &b) in rows.iter().zip(tgt) {
        k.impose(w, b)?;
    }
    PresentedSubgroup::new(dom, k.cols)
}

/// Structure of `(⊕ Z/tgt) / ⟨images⟩`.
pub fn cokernel_structure(tgt: &[i64], images: &[Vec<i64>]) -> Result<AbelianStructure> {
    let n = tgt.len();
    // rows = relations, columns = generators of the target
    let mut rel: Vec<Vec<i64>> = images.iter().cloned().collect();
    for (j, &d) in tgt.iter().enumerate() {
        if d != 0 {
            let mut r = vec![0; n];
            r[j] = d;
            rel.push(r);
        }
    }
    crate::snf::abelian_invariants(&rel, n)
}

/// Quotient of a diagonal group by a finite set of elements, with a projection
/// onto invariant-factor coordinates.
#[derive(Debug, Clone)]
pub struct Cokernel {
    pub structure: AbelianStructure,
    /// Order of each coordinate (0 for free).
    pub orders: Vec<i64>,
    rows: Vec<Vec<i64>>,
}

impl Cokernel {
    pub fn new(moduli: &[i64], images: &[Vec<i64>]) -> Result<Self> {
        let n = moduli.len();
        let mut cols: Vec<Vec<i64>> = images.to_vec();
        for (j, &d) in moduli.iter().enumerate() {
            if d > 0 {
                let mut c = vec![0; n];
                c[j] = d;
                cols.push(c);
            }
        }
        let mat: Vec<Vec<i64>> = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        let s = smith_i64(&mat, n, cols.len(), SnfFlags { left: true, right: false });
        let p = s.p.expect("requested");
        let mut orders = Vec::new();
        let mut rows = Vec::new();
        let mut torsion = Vec::new();
        let mut free = 0;
        for t in 0..n {
            let d = if t < s.diag.len() { big_to_i64(&s.diag[t])? } else { 0 };
            if d == 1 {
                continue;
            }
            orders.push(d);
            rows.push(
                p[t].iter()
                    .map(|x| big_to_i64(x).map(|v| if d > 0 { v.rem_euclid(d) } else { v }))
                    .collect::<Result<Vec<_>>>()?,
            );
            if d == 0 {
                free += 1;
            } else {
                torsion.push(d as u64);
            }
        }
        Ok(Cokernel { structure: AbelianStructure::new(torsion, free), orders, rows })
    }

    /// Coordinates of the image of `v`.
    pub fn project(&self, v: &[i64]) -> Result<Vec<i64>> {
        self.rows
            .iter()
            .zip(&self.orders)
            .map(|(row, &d)| {
                let mut acc: i128 = 0;
                for (&a, &x) in row.iter().zip(v) {
                    acc = acc
                        .checked_add(a as i128 * x as i128)
                        .ok_or(Error::Overflow("cokernel projection"))?;
                }
                to_i64(reduce(acc, d))
            })
            .collect()
    }
}
