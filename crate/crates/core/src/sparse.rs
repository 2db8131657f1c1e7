//! Quotients `Z^n / ⟨columns⟩` (or `(Z/e)^n / ⟨columns⟩`) of large sparse
//! integer matrices: unit pivots are eliminated sparsely, the small residue is
//! finished by dense Smith normal form, and every step is recorded so that
//! vectors can be projected to quotient coordinates and lifted back.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::snf::{big_to_i64, smith_i64, SnfFlags};

/// Coefficient ring of the ambient lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Ring {
    Integer,
    /// All coordinates live in `Z/e`; the relations `e·x = 0` are implicit.
    Modular(i64),
}

impl Ring {
    #[inline]
    fn norm(self, x: i128) -> i128 {
        match self {
            Ring::Integer => x,
            Ring::Modular(e) => x.rem_euclid(e as i128),
        }
    }

    /// Inverse of `x` when it is a unit.
    fn unit_inverse(self, x: i128) -> Option<i128> {
        match self {
            Ring::Integer => (x == 1 || x == -1).then_some(x),
            Ring::Modular(e) => {
                let e = e as i128;
                let g = x.extended_gcd(&e);
                (g.gcd == 1).then(|| g.x.rem_euclid(e))
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Record {
    row: usize,
    /// `e_row = scale · Σ entries`
    scale: i128,
    entries: Vec<(usize, i128)>,
}

#[derive(Debug, Clone)]
enum Comp {
    /// A coordinate untouched by the residual relations.
    Direct(usize),
    /// Row `t` of the residual Smith transform.
    Smith(usize),
}

/// Recorded quotient of the ambient lattice by a set of sparse columns.
#[derive(Debug, Clone)]
pub(crate) struct SparseQuotient {
    ring: Ring,
    n: usize,
    records: Vec<Record>,
    comps: Vec<Comp>,
    /// Order of each quotient component (0 = free).
    pub moduli: Vec<i64>,
    rem_rows: Vec<usize>,
    p_rows: Vec<Vec<i64>>,
    pinv_cols: Vec<Vec<i64>>,
}

fn add_checked(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow("sparse elimination"))
}

fn mul_checked(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow("sparse elimination"))
}

impl SparseQuotient {
    /// `columns` are sparse vectors over `0..n` (duplicates not allowed).
    pub fn new(n: usize, columns: Vec<Vec<(usize, i64)>>, ring: Ring) -> Result<Self> {
        let mut cols: Vec<BTreeMap<usize, i128>> = Vec::with_capacity(columns.len());
        let mut row_cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for col in columns {
            let mut m = BTreeMap::new();
            for (r, v) in col {
                let v = ring.norm(v as i128);
                if v != 0 {
                    m.insert(r, v);
                }
            }
            let c = cols.len();
            for &r in m.keys() {
                row_cols[r].insert(c);
            }
            cols.push(m);
        }
        let mut alive: Vec<bool> = cols.iter().map(|c| !c.is_empty()).collect();
        let mut records = Vec::new();
        loop {
            let mut progress = false;
            for c in 0..cols.len() {
                if !alive[c] {
                    continue;
                }
                if cols[c].is_empty() {
                    alive[c] = false;
                    continue;
                }
                let mut best: Option<(usize, usize, i128)> = None;
                for (&r, &v) in &cols[c] {
                    if let Some(inv) = ring.unit_inverse(v) {
                        let deg = row_cols[r].len();
                        if best.is_none_or(|(_, bd, _)| deg < bd) {
                            best = Some((r, deg, inv));
                        }
                    }
                }
                let Some((r, _, uinv)) = best else { continue };
                progress = true;
                let pivot = std::mem::take(&mut cols[c]);
                for &rr in pivot.keys() {
                    row_cols[rr].remove(&c);
                }
                alive[c] = false;
                let others: Vec<usize> = row_cols[r].iter().copied().collect();
                for c2 in others {
                    let a = cols[c2][&r];
                    let f = ring.norm(mul_checked(a, uinv)?);
                    for (&rr, &pv) in &pivot {
                        let cur = cols[c2].get(&rr).copied().unwrap_or(0);
                        let nv = ring.norm(add_checked(cur, -mul_checked(f, pv)?)?);
                        if nv == 0 {
                            if cols[c2].remove(&rr).is_some() {
                                row_cols[rr].remove(&c2);
                            }
                        } else {
                            if cols[c2].insert(rr, nv).is_none() {
                                row_cols[rr].insert(c2);
                            }
                        }
                    }
                    debug_assert!(!cols[c2].contains_key(&r));
                }
                let scale = ring.norm(-uinv);
                let entries: Vec<(usize, i128)> = pivot.into_iter().filter(|&(rr, _)| rr != r).collect();
                records.push(Record { row: r, scale, entries });
            }
            if !progress {
                break;
            }
        }
        let eliminated: BTreeSet<usize> = records.iter().map(|r| r.row).collect();
        let rem_cols: Vec<usize> = (0..cols.len()).filter(|&c| alive[c] && !cols[c].is_empty()).collect();
        let rem_set: BTreeSet<usize> = rem_cols.iter().flat_map(|&c| cols[c].keys().copied()).collect();
        let rem_rows: Vec<usize> = rem_set.iter().copied().collect();
        let free_mod = match ring {
            Ring::Integer => 0,
            Ring::Modular(e) => e,
        };
        let mut comps = Vec::new();
        let mut moduli = Vec::new();
        for r in 0..n {
            if !eliminated.contains(&r) && !rem_set.contains(&r) {
                comps.push(Comp::Direct(r));
                moduli.push(free_mod);
            }
        }
        let mut p_rows = Vec::new();
        let mut pinv_cols = Vec::new();
        if !rem_rows.is_empty() {
            let pos: BTreeMap<usize, usize> = rem_rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
            let nr = rem_rows.len();
            let mut mat = vec![vec![0i64; rem_cols.len()]; nr];
            for (j, &c) in rem_cols.iter().enumerate() {
                for (&r, &v) in &cols[c] {
                    mat[pos[&r]][j] = i64::try_from(v).map_err(|_| Error::Overflow("residual matrix"))?;
                }
            }
            let s = smith_i64(&mat, nr, rem_cols.len(), SnfFlags { left: true, right: false });
            let p = s.p.expect("requested");
            let pinv = s.p_inv.expect("requested");
            for t in 0..nr {
                let d = if t < s.diag.len() { big_to_i64(&s.diag[t])? } else { 0 };
                let m = match ring {
                    Ring::Integer => d,
                    Ring::Modular(e) => d.gcd(&e),
                };
                if m == 1 {
                    continue;
                }
                comps.push(Comp::Smith(p_rows.len()));
                moduli.push(m);
                let row: Vec<i64> = p[t]
                    .iter()
                    .map(|x| big_to_i64(x).map(|v| if m > 0 { v.rem_euclid(m) } else { v }))
                    .collect::<Result<_>>()?;
                p_rows.push(row);
                let col: Vec<i64> = (0..nr).map(|q| big_to_i64(&pinv[q][t])).collect::<Result<_>>()?;
                pinv_cols.push(col);
            }
        }
        Ok(SparseQuotient { ring, n, records, comps, moduli, rem_rows, p_rows, pinv_cols })
    }

    pub fn ncomps(&self) -> usize {
        self.comps.len()
    }

    /// Quotient coordinates of an ambient vector.
    pub fn project(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.n {
            return Err(Error::ContextMismatch("vector length does not match the quotient".into()));
        }
        let mut w: Vec<i128> = v.iter().map(|&x| self.ring.norm(x as i128)).collect();
        for rec in &self.records {
            let x = w[rec.row];
            if x == 0 {
                continue;
            }
            w[rec.row] = 0;
            let f = self.ring.norm(mul_checked(x, rec.scale)?);
            for &(r, a) in &rec.entries {
                w[r] = self.ring.norm(add_checked(w[r], mul_checked(f, a)?)?);
            }
        }
        let mut out = Vec::with_capacity(self.comps.len());
        for (comp, &m) in self.comps.iter().zip(&self.moduli) {
            let val = match comp {
                Comp::Direct(r) => w[*r],
                Comp::Smith(t) => {
                    let mut acc: i128 = 0;
                    for (q, &r) in self.rem_rows.iter().enumerate() {
                        if w[r] != 0 {
                            acc = add_checked(acc, mul_checked(self.p_rows[*t][q] as i128, w[r])?)?;
                        }
                    }
                    acc
                }
            };
            let val = if m > 0 { val.rem_euclid(m as i128) } else { val };
            out.push(i64::try_from(val).map_err(|_| Error::Overflow("projection"))?);
        }
        Ok(out)
    }

    /// A representative in the ambient lattice of quotient component `l`.
    pub fn lift(&self, l: usize) -> Vec<(usize, i64)> {
        match self.comps[l] {
            Comp::Direct(r) => vec![(r, 1)],
            Comp::Smith(t) => self
                .rem_rows
                .iter()
                .zip(&self.pinv_cols[t])
                .filter(|(_, &c)| c != 0)
                .map(|(&r, &c)| (r, c))
                .collect(),
        }
    }
}
