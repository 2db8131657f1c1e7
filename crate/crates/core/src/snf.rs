//! Dense Smith normal form over the integers.
//!
//! The reduction first runs in checked `i128` arithmetic and restarts in
//! `BigInt` if any intermediate value overflows, so results are always exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::abelian::AbelianStructure;
use crate::error::{Error, Result};

/// Arithmetic needed by the reduction. Checked operations return `None` on overflow.
trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn magnitude_lt(&self, other: &Self) -> bool;
    fn neg(&self) -> Option<Self>;
    fn is_negative(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    /// Floor division quotient.
    fn div_floor(&self, o: &Self) -> Self;
    fn is_multiple_of(&self, o: &Self) -> bool;
    fn to_big(&self) -> BigInt;
    fn one() -> Self;
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn magnitude_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn is_multiple_of(&self, o: &Self) -> bool {
        if *o == 0 {
            *self == 0
        } else {
            self % o == 0
        }
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn is_multiple_of(&self, o: &Self) -> bool {
        if Zero::is_zero(o) {
            Zero::is_zero(self)
        } else {
            Zero::is_zero(&(self % o))
        }
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Result of `P · A · Q = D` with `D` diagonal and `d_1 | d_2 | ...`.
#[derive(Debug, Clone)]
pub struct Smith {
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub diag: Vec<BigInt>,
    pub rows: usize,
    pub cols: usize,
    /// Left transform (rows × rows), present when requested.
    pub p: Option<Vec<Vec<BigInt>>>,
    /// Inverse of the left transform.
    pub p_inv: Option<Vec<Vec<BigInt>>>,
    /// Right transform (cols × cols), present when requested.
    pub q: Option<Vec<Vec<BigInt>>>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SnfFlags {
    pub left: bool,
    pub right: bool,
}

struct Calc<T: Scalar> {
    a: Vec<Vec<T>>,
    p: Option<Vec<Vec<T>>>,
    pinv: Option<Vec<Vec<T>>>,
    q: Option<Vec<Vec<T>>>,
    n: usize,
    m: usize,
}

fn identity<T: Scalar>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

impl<T: Scalar> Calc<T> {
    fn new(a: Vec<Vec<T>>, n: usize, m: usize, flags: SnfFlags) -> Self {
        Calc {
            a,
            p: flags.left.then(|| identity(n)),
            pinv: flags.left.then(|| identity(n)),
            q: flags.right.then(|| identity(m)),
            n,
            m,
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some(p) = &mut self.p {
            p.swap(i, j);
        }
        if let Some(pi) = &mut self.pinv {
            for row in pi.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if let Some(q) = &mut self.q {
            for row in q.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    /// row_i -= c · row_t
    fn row_axpy(&mut self, i: usize, t: usize, c: &T) -> Option<()> {
        if c.is_zero() {
            return Some(());
        }
        for k in 0..self.m {
            if !self.a[t][k].is_zero() {
                let v = self.a[i][k].sub(&c.mul(&self.a[t][k])?)?;
                self.a[i][k] = v;
            }
        }
        if let Some(p) = &mut self.p {
            for k in 0..self.n {
                if !p[t][k].is_zero() {
                    let v = p[i][k].sub(&c.mul(&p[t][k])?)?;
                    p[i][k] = v;
                }
            }
        }
        if let Some(pi) = &mut self.pinv {
            // inverse op: col_t += c · col_i
            for row in pi.iter_mut() {
                if !row[i].is_zero() {
                    let v = row[t].add(&c.mul(&row[i])?)?;
                    row[t] = v;
                }
            }
        }
        Some(())
    }

    /// col_j -= c · col_t
    fn col_axpy(&mut self, j: usize, t: usize, c: &T) -> Option<()> {
        if c.is_zero() {
            return Some(());
        }
        for row in self.a.iter_mut() {
            if !row[t].is_zero() {
                let v = row[j].sub(&c.mul(&row[t])?)?;
                row[j] = v;
            }
        }
        if let Some(q) = &mut self.q {
            for row in q.iter_mut() {
                if !row[t].is_zero() {
                    let v = row[j].sub(&c.mul(&row[t])?)?;
                    row[j] = v;
                }
            }
        }
        Some(())
    }

    fn negate_row(&mut self, t: usize) -> Option<()> {
        for k in 0..self.m {
            self.a[t][k] = self.a[t][k].neg()?;
        }
        if let Some(p) = &mut self.p {
            for k in 0..self.n {
                p[t][k] = p[t][k].neg()?;
            }
        }
        if let Some(pi) = &mut self.pinv {
            for row in pi.iter_mut() {
                row[t] = row[t].neg()?;
            }
        }
        Some(())
    }

    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.n {
            for j in t..self.m {
                let v = &self.a[i][j];
                if v.is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some((bi, bj)) => {
                        if v.magnitude_lt(&self.a[bi][bj]) {
                            best = Some((i, j));
                        }
                    }
                }
            }
        }
        best
    }

    fn run(&mut self) -> Option<usize> {
        let r = self.n.min(self.m);
        let mut rank = 0;
        for t in 0..r {
            let Some((pi, pj)) = self.min_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                // clear column t
                for i in (t + 1)..self.n {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = self.a[i][t].div_floor(&self.a[t][t]);
                    self.row_axpy(i, t, &q)?;
                    if !self.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
                // clear row t
                for j in (t + 1)..self.m {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = self.a[t][j].div_floor(&self.a[t][t]);
                    self.col_axpy(j, t, &q)?;
                    if !self.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    // a smaller remainder exists in row or column t
                    let mut best = (t, t);
                    for i in (t + 1)..self.n {
                        if !self.a[i][t].is_zero()
                            && self.a[i][t].magnitude_lt(&self.a[best.0][best.1])
                        {
                            best = (i, t);
                        }
                    }
                    for j in (t + 1)..self.m {
                        if !self.a[t][j].is_zero()
                            && self.a[t][j].magnitude_lt(&self.a[best.0][best.1])
                        {
                            best = (t, j);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                // divisibility of the remaining block
                let mut offender = None;
                'outer: for i in (t + 1)..self.n {
                    for j in (t + 1)..self.m {
                        if !self.a[i][j].is_multiple_of(&self.a[t][t]) {
                            offender = Some(i);
                            break 'outer;
                        }
                    }
                }
                match offender {
                    Some(i) => {
                        // row_t += row_i
                        let minus_one = T::one().neg()?;
                        self.row_axpy(t, i, &minus_one)?;
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t)?;
            }
            rank += 1;
        }
        Some(rank)
    }
}

fn to_big_mat<T: Scalar>(m: Vec<Vec<T>>) -> Vec<Vec<BigInt>> {
    m.into_iter()
        .map(|r| r.into_iter().map(|x| x.to_big()).collect())
        .collect()
}

fn finish<T: Scalar>(c: Calc<T>, rank: usize) -> Smith {
    let diag = (0..rank).map(|t| c.a[t][t].to_big()).collect();
    Smith {
        diag,
        rows: c.n,
        cols: c.m,
        p: c.p.map(to_big_mat),
        p_inv: c.pinv.map(to_big_mat),
        q: c.q.map(to_big_mat),
    }
}

/// Smith normal form of an `rows × cols` matrix given row-major in `i64`.
pub fn smith_i64(a: &[Vec<i64>], rows: usize, cols: usize, flags: SnfFlags) -> Smith {
    let small: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut calc = Calc::new(small, rows, cols, flags);
    if let Some(rank) = calc.run() {
        return finish(calc, rank);
    }
    let big: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    smith_big(big, rows, cols, flags)
}

/// Smith normal form in arbitrary precision.
pub fn smith_big(a: Vec<Vec<BigInt>>, rows: usize, cols: usize, flags: SnfFlags) -> Smith {
    let mut calc = Calc::new(a, rows, cols, flags);
    let rank = calc.run().expect("bigint arithmetic cannot overflow");
    finish(calc, rank)
}

/// Structure of `Z^cols / rowspan(m)`: the abelian group whose generators are
/// the columns of `m` and whose relations are its rows.
pub fn abelian_invariants(m: &[Vec<i64>], cols: usize) -> Result<AbelianStructure> {
    let rows = m.len();
    for r in m {
        if r.len() != cols {
            return Err(Error::Invalid("ragged relation matrix".into()));
        }
    }
    let s = smith_i64(m, rows, cols, SnfFlags::default());
    let mut torsion = Vec::new();
    for d in &s.diag {
        if !d.is_one() {
            torsion.push(
                d.to_u64()
                    .ok_or(Error::Overflow("invariant factor exceeds u64"))?,
            );
        }
    }
    Ok(AbelianStructure::new(torsion, cols - s.rank()))
}

/// Convert a BigInt to i64 or report overflow.
pub(crate) fn big_to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow("transform entry exceeds i64"))
}
