//! `Ш^i_ω(G, M)`: classes of `H^i(G, M)` that restrict to zero on every cyclic
//! subgroup, the `P`-decorated kernel, and the `H¹` defect term.

use rayon::prelude::*;

use crate::abelian::{AbelianStructure, PresentedSubgroup};
use crate::cohomology::{cohomology, induced_map, Budget, ClassMap, CohomologyGroup, CyclicTate};
use crate::error::{Error, Result};
use crate::gmodule::{jp_map, t_hat, tensor_with_zp, GModule, PData};
use crate::group::{FiniteGroup, Subgroup};

/// A subgroup of `H^i(G, M)` given by generators in class coordinates.
#[derive(Debug, Clone)]
pub struct ShaGroup {
    pub structure: AbelianStructure,
    /// Representative cocycles, one per invariant-factor generator.
    pub reps: Vec<Vec<i64>>,
    /// The same generators in the coordinates of the ambient `H^i`.
    pub coords: Vec<Vec<i64>>,
    pub orders: Vec<i64>,
    pub degree: usize,
}

impl ShaGroup {
    fn from_subgroup(h: &CohomologyGroup, sub: &PresentedSubgroup) -> Result<Self> {
        let reps = sub
            .gens
            .iter()
            .map(|c| combine(h, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(ShaGroup {
            structure: sub.structure.clone(),
            reps,
            coords: sub.gens.clone(),
            orders: sub.orders.clone(),
            degree: h.degree,
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.structure.is_trivial()
    }
}

/// Cocycle `Σ c_t rep_t`.
fn combine(h: &CohomologyGroup, c: &[i64]) -> Result<Vec<i64>> {
    let len = h.reps.first().map_or(0, |r| r.len());
    let mut out = vec![0i128; len];
    for (rep, &ct) in h.reps.iter().zip(c) {
        if ct != 0 {
            for (o, &x) in out.iter_mut().zip(rep) {
                *o += ct as i128 * x as i128;
            }
        }
    }
    let k = h.module_moduli().len();
    out.into_iter()
        .enumerate()
        .map(|(idx, x)| {
            let d = h.module_moduli()[idx % k.max(1)];
            let x = if d > 0 { x.rem_euclid(d as i128) } else { x };
            i64::try_from(x).map_err(|_| Error::Overflow("cocycle combination"))
        })
        .collect()
}

/// Restriction of every class of `h` to the cyclic subgroup `c`, through the
/// cyclic comparison map.
pub fn restrict_to_cyclic(
    g: &FiniteGroup,
    m: &GModule,
    h: &CohomologyGroup,
    c: &Subgroup,
) -> Result<ClassMap> {
    let sigma = g.cyclic_generator(c)?;
    let tate = CyclicTate::for_element(g, sigma, m, h.degree)?;
    let images = h
        .reps
        .iter()
        .map(|f| tate.classify_cocycle(g, f))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassMap { source_orders: h.orders.clone(), target_orders: tate.orders().to_vec(), images })
}

/// Common kernel of the restrictions to the given cyclic subgroups.
fn common_kernel(
    g: &FiniteGroup,
    m: &GModule,
    h: &CohomologyGroup,
    subgroups: &[Subgroup],
) -> Result<PresentedSubgroup> {
    let maps: Vec<ClassMap> = subgroups
        .par_iter()
        .filter(|c| c.order() > 1)
        .map(|c| restrict_to_cyclic(g, m, h, c))
        .collect::<Result<_>>()?;
    let mut target_orders = Vec::new();
    let mut images = vec![Vec::new(); h.ngens()];
    for cm in maps {
        target_orders.extend_from_slice(&cm.target_orders);
        for (img, part) in images.iter_mut().zip(cm.images) {
            img.extend(part);
        }
    }
    ClassMap { source_orders: h.orders.clone(), target_orders, images }.kernel()
}

/// `Ш^i_ω(G, M)` from already computed `H^i(G, M)`.
pub fn sha_omega_of(g: &FiniteGroup, m: &GModule, h: &CohomologyGroup) -> Result<ShaGroup> {
    if !(1..=2).contains(&h.degree) {
        return Err(Error::UnsupportedShape("Ш_ω is defined here for degrees 1 and 2".into()));
    }
    let reps = g.cyclic_subgroup_reps();
    let k = common_kernel(g, m, h, &reps)?;
    ShaGroup::from_subgroup(h, &k)
}

/// `Ш^i_ω(G, M)` for `i ∈ {1, 2}`.
pub fn sha_omega(g: &FiniteGroup, m: &GModule, i: usize, budget: &Budget) -> Result<ShaGroup> {
    let h = cohomology(g, m, i, budget)?;
    sha_omega_of(g, m, &h)
}

/// Whether every generator of `sha` restricts to zero on every listed cyclic subgroup.
pub fn vanishes_on(
    g: &FiniteGroup,
    m: &GModule,
    h: &CohomologyGroup,
    sha: &ShaGroup,
    subgroups: &[Subgroup],
) -> Result<bool> {
    for c in subgroups.iter().filter(|c| c.order() > 1) {
        let sigma = g.cyclic_generator(c)?;
        let tate = CyclicTate::for_element(g, sigma, m, h.degree)?;
        for f in &sha.reps {
            if tate.classify_cocycle(g, f)?.iter().any(|&x| x != 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Everything computed on the way to `Ш²_ω(T̂)_P`.
#[derive(Debug, Clone)]
pub struct ShaP {
    /// `Ш²_ω(T̂)`.
    pub sha: ShaGroup,
    /// `Ш²_ω(T̂)_P = ker j_{P*}` restricted to `Ш²_ω(T̂)`.
    pub kernel: ShaGroup,
}

/// `Ш²_ω(G, T̂)_P`: the kernel of `j_{P*}: Ш²_ω(T̂) → H²(G, T̂ ⊗ Z_P)`.
pub fn sha2_omega_p(g: &FiniteGroup, hk: &Subgroup, p: &PData, budget: &Budget) -> Result<ShaP> {
    let t = t_hat(g, hk)?;
    let h2 = cohomology(g, &t, 2, budget)?;
    let sha = sha_omega_of(g, &t, &h2)?;
    if sha.is_trivial() {
        return Ok(ShaP { kernel: sha.clone(), sha });
    }
    let tp = tensor_with_zp(g, &t, p)?;
    let j = jp_map(g, &t, &tp, p)?;
    let h2p = cohomology(g, &tp, 2, budget)?;
    let full = induced_map(g, &j, &t, &tp, &h2, &h2p)?;
    // restrict j_* to the generators of Ш
    let images = sha
        .coords
        .iter()
        .map(|c| {
            (0..full.target_orders.len())
                .map(|tcoord| {
                    let mut acc: i128 = 0;
                    for (s, &cs) in c.iter().enumerate() {
                        acc += cs as i128 * full.images[s][tcoord] as i128;
                    }
                    let d = full.target_orders[tcoord];
                    let v = if d > 0 { acc.rem_euclid(d as i128) } else { acc };
                    i64::try_from(v).map_err(|_| Error::Overflow("induced map"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let on_sha = ClassMap { source_orders: sha.orders.clone(), target_orders: full.target_orders.clone(), images };
    let ker = on_sha.kernel()?;
    // express kernel generators back in H² coordinates
    let coords: Vec<Vec<i64>> = ker
        .gens
        .iter()
        .map(|kc| {
            (0..h2.ngens())
                .map(|t| {
                    let mut acc: i128 = 0;
                    for (s, &x) in kc.iter().enumerate() {
                        acc += x as i128 * sha.coords[s][t] as i128;
                    }
                    let d = h2.orders[t];
                    i64::try_from(if d > 0 { acc.rem_euclid(d as i128) } else { acc })
                        .map_err(|_| Error::Overflow("kernel coordinates"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let reps = coords.iter().map(|c| combine(&h2, c)).collect::<Result<Vec<_>>>()?;
    let kernel = ShaGroup { structure: ker.structure.clone(), reps, coords, orders: ker.orders.clone(), degree: 2 };
    Ok(ShaP { sha, kernel })
}

/// `H¹(G, T̂ ⊗ Z_P) / j_{P*} H¹(G, T̂)`.
pub fn h1_defect(g: &FiniteGroup, hk: &Subgroup, p: &PData, budget: &Budget) -> Result<AbelianStructure> {
    let t = t_hat(g, hk)?;
    let tp = tensor_with_zp(g, &t, p)?;
    let j = jp_map(g, &t, &tp, p)?;
    let h1 = cohomology(g, &t, 1, budget)?;
    let h1p = cohomology(g, &tp, 1, budget)?;
    if h1p.structure.is_trivial() {
        return Ok(AbelianStructure::trivial());
    }
    induced_map(g, &j, &t, &tp, &h1, &h1p)?.cokernel()
}
