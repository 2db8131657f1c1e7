//! Field diagrams encoded as subgroup data, the two ends of the Brauer exact
//! sequence, and the group-theoretic vanishing criteria.

use std::collections::BTreeMap;
use std::fmt;

use crate::abelian::AbelianStructure;
use crate::cohomology::{kunneth_oracle, Budget, Coefficients};
use crate::error::{Error, Result};
use crate::gmodule::{t_hat, t_prime_hat, trivial_module, PData};
use crate::group::{build_group, FiniteGroup, GroupSpec, Subgroup};
use crate::sha::{h1_defect, sha2_omega_p, sha_omega, ShaGroup};

/// Fixed table of citations attached to verdicts and reports.
pub const CITATIONS: &[(&str, &str)] = &[
    ("bs", "Theorem CHS (a): exact sequence 0 -> H1(T^ (x) Z_P)/j_P*H1(T^) -> H1(Pic X) -> Sha2_w(T^)_P -> 0"),
    ("abel-a", "Prop. abel (a): K/k abelian and P irreducible give a vanishing H1 defect"),
    ("abel-d", "Prop. abel (d): K/k cyclic gives Br_0(X) = Br(X)"),
    ("br-1", "Theorem Br-1: L meets the Galois closure of K only in k"),
    ("lemma-sha", "Lemma Sha: Sha2_w(T^)_P = Ker[Res: Sha2_w(E/k, T^) -> H2(E/L, T^)]"),
    ("sha-t", "Cor. Sha-T: principal homogeneous spaces of T' satisfy the Hasse principle"),
    ("remark-omega", "Remark after Prop. compact-omega: K = k(sqrt a, sqrt b, sqrt c), [K:k] = 8"),
    ("equal-x-a", "Theorem equal-X (a): Br(X)/Br(X^c) is 2-torsion"),
    ("equal-x-1", "Theorem equal-X (b)(1): Gal(K/k) = Z/2^i x A with A of odd order"),
    ("equal-x-2", "Theorem equal-X (b)(2): [L n K : k] is odd"),
    ("equal-x-3", "Theorem equal-X (b)(3): [L : L n K] is even"),
    ("equal-x-4", "Theorem equal-X (b)(4): 2^s | [L:k] and multiplication by 2^(s-1) on Gal(K/k) has odd image"),
    ("equal-x-5", "Theorem equal-X (b)(5): L contains L' with Gal(L'/k) = (Z/2)^3"),
    ("q1", "Prop. Q_1: Z/(n/2) if n is even, Z/n if n is odd"),
    ("kunneth", "Kunneth formula: H3(Z/n x Z/n, Z) = Z/n"),
    ("p-finite", "Lemma p-finite: Sha2_w((Z/p)^2, Z/p) is 0 if p = 2 and Z/p if p is odd"),
    ("brauer-split", "Prop. brauer-split: Br(V^c)/Br_0(V^c) = Sha2_w(K/k, Z/d) when n | d"),
    ("q2", "Cor. Q_2: 0 if p = 2, Z/p if p is odd"),
    ("rational-2", "Theorem rational-2: one of a, b, ab is a local square at every place"),
];

/// Citation text for an id of [`CITATIONS`].
pub fn citation(id: &str) -> &'static str {
    CITATIONS
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, v)| *v)
        .unwrap_or_else(|| panic!("unknown citation id {id}"))
}

/// The data `(G, H_K, [(H_{L_i}, e_i)])` of a norm equation `N_{K/k}(Ξ) = P(t)`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub group: FiniteGroup,
    pub hk: Subgroup,
    pub factors: PData,
    pub annotations: BTreeMap<String, String>,
}

impl Scenario {
    pub fn new(id: impl Into<String>, group: FiniteGroup, hk: Subgroup, factors: PData) -> Result<Self> {
        if hk.parent_order() != group.order()
            || factors.factors().iter().any(|(h, _)| h.parent_order() != group.order())
        {
            return Err(Error::ContextMismatch("subgroups must belong to the scenario group".into()));
        }
        Ok(Scenario { id: id.into(), group, hk, factors, annotations: BTreeMap::new() })
    }
}

/// The two computed ends of the exact sequence and what they force in the middle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSReport {
    /// `H¹(G, T̂ ⊗ Z_P) / j_{P*} H¹(G, T̂)`.
    pub left: AbelianStructure,
    /// `Ш²_ω(T̂)_P`.
    pub right: AbelianStructure,
    pub middle_order: u128,
    /// Known only when one end vanishes.
    pub middle_structure: Option<AbelianStructure>,
    pub notes: Vec<String>,
}

/// One factor with multiplicity 1.
fn irreducible(s: &Scenario) -> bool {
    matches!(s.factors.factors(), [(_, 1)])
}

/// Evaluates both ends of the sequence for a scenario.
pub fn bs_sequence(s: &Scenario, budget: &Budget) -> Result<BSReport> {
    let g = &s.group;
    let left = h1_defect(g, &s.hk, &s.factors, budget)?;
    let right = sha2_omega_p(g, &s.hk, &s.factors, budget)?.kernel.structure;
    let lo = left.order().ok_or_else(|| Error::InternalInconsistency("infinite H1 defect".into()))?;
    let ro = right.order().ok_or_else(|| Error::InternalInconsistency("infinite Sha".into()))?;
    let middle_structure = if left.is_trivial() {
        Some(right.clone())
    } else if right.is_trivial() {
        Some(left.clone())
    } else {
        None
    };
    let mut notes = vec![citation("bs").to_string()];
    let abelian_single = g.is_normal(&s.hk)
        && irreducible(s)
        && g.quotient_group(&s.hk)?.0.is_abelian();
    if abelian_single {
        if !left.is_trivial() {
            return Err(Error::InternalInconsistency(format!(
                "H1 defect {left} is nonzero for an abelian K/k with one factor"
            )));
        }
        notes.push(format!("cross-check passed: {}", citation("abel-a")));
    }
    if g.quotient_group(&g.core(&s.hk)?)?.0.is_cyclic() && irreducible(s) {
        notes.push(format!("Galois closure of K is cyclic: {}", citation("abel-d")));
    }
    if middle_structure.is_none() {
        notes.push("middle term: only the order is determined by the two ends".into());
    }
    Ok(BSReport { left, right, middle_order: lo * ro, middle_structure, notes })
}

/// Possible conclusions of a criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    UnramifiedQuotientZero,
    EqualXGuaranteed,
    TwoTorsionBoundOnly,
    StructureKnown(AbelianStructure),
    Inconclusive,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::UnramifiedQuotientZero => write!(f, "UnramifiedQuotientZero"),
            Claim::EqualXGuaranteed => write!(f, "EqualXGuaranteed"),
            Claim::TwoTorsionBoundOnly => write!(f, "TwoTorsionBoundOnly"),
            Claim::StructureKnown(s) => write!(f, "StructureKnown({})", s.to_machine()),
            Claim::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

/// One evaluated condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reason {
    pub id: String,
    pub holds: bool,
    pub citation: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub claim: Claim,
    pub reasons: Vec<Reason>,
}

fn reason(id: impl Into<String>, holds: bool, cite: &str) -> Reason {
    Reason { id: id.into(), holds, citation: citation(cite) }
}

/// `⟨H_L, core(H_K)⟩ = G`, the subgroup form of `L ∩ K^cl = k`.
pub fn br1_condition(g: &FiniteGroup, hk: &Subgroup, hl: &Subgroup) -> Result<bool> {
    let core = g.core(hk)?;
    Ok(g.join(hl, &core)?.order() == g.order())
}

/// Verdict of the `L ∩ K^cl = k` criterion, with mandatory cross-validation.
pub fn br1_verdict(s: &Scenario, budget: &Budget) -> Result<Verdict> {
    let g = &s.group;
    let mut reasons = Vec::new();
    let mut any = false;
    for (i, (hl, _)) in s.factors.factors().iter().enumerate() {
        let holds = br1_condition(g, &s.hk, hl)?;
        any |= holds;
        reasons.push(reason(format!("br1-factor-{i}"), holds, "br-1"));
    }
    if !any {
        return Ok(Verdict { claim: Claim::Inconclusive, reasons });
    }
    let right = sha2_omega_p(g, &s.hk, &s.factors, budget)?.kernel.structure;
    if !right.is_trivial() {
        return Err(Error::InternalInconsistency(format!(
            "criterion holds but Sha2_w(T^)_P = {right}"
        )));
    }
    reasons.push(reason("sha2-p-vanishes", true, "lemma-sha"));
    let left = h1_defect(g, &s.hk, &s.factors, budget)?;
    if s.factors.factors().len() == 1 {
        if !left.is_trivial() {
            return Err(Error::InternalInconsistency(format!(
                "criterion holds but the H1 defect is {left}"
            )));
        }
        reasons.push(reason("h1-defect-vanishes", true, "br-1"));
        return Ok(Verdict { claim: Claim::UnramifiedQuotientZero, reasons });
    }
    // several factors: only the Sha end is forced to vanish
    reasons.push(reason("h1-defect-vanishes", left.is_trivial(), "br-1"));
    let claim = if left.is_trivial() { Claim::UnramifiedQuotientZero } else { Claim::Inconclusive };
    Ok(Verdict { claim, reasons })
}

/// 2-adic valuation.
fn v2(mut n: usize) -> u32 {
    let mut v = 0;
    while n > 0 && n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    v
}

/// The five sufficient conditions for `Br(X^c) = Br(X)`, evaluated on subgroups.
pub fn equal_x_conditions(s: &Scenario) -> Result<Verdict> {
    let g = &s.group;
    if s.factors.factors().len() != 1 {
        return Err(Error::HypothesisViolated("P must be irreducible (one factor)".into()));
    }
    if s.factors.factors()[0].1 != 1 {
        return Err(Error::HypothesisViolated("P must be irreducible (multiplicity 1)".into()));
    }
    if !g.is_normal(&s.hk) {
        return Err(Error::HypothesisViolated("K/k must be Galois (H_K normal)".into()));
    }
    let (q, _) = g.quotient_group(&s.hk)?;
    if !q.is_abelian() {
        return Err(Error::HypothesisViolated("K/k must be abelian".into()));
    }
    let hl = &s.factors.factors()[0].0;
    let inv = q.abelian_invariants()?;
    let two_parts: Vec<u64> = inv
        .torsion()
        .iter()
        .map(|&d| 1u64 << d.trailing_zeros())
        .filter(|&t| t > 1)
        .collect();
    let j = g.join(hl, &s.hk)?;
    let c1 = two_parts.len() <= 1;
    let c2 = (g.order() / j.order()) % 2 == 1;
    let c3 = (j.order() / hl.order()) % 2 == 0;
    // exponent of the 2-part of Gal(K/k) is 2^e; the image of 2^{s-1} is odd iff e ≤ s−1
    let e = two_parts.iter().map(|t| t.trailing_zeros()).max().unwrap_or(0);
    let vl = v2(g.index(hl));
    let c4 = (1..=vl).any(|s| e < s);
    let n = g.normal_closure(hl)?;
    let d = g.commutator_subgroup();
    let sq = g.squares_subgroup();
    let big = g.join(&g.join(&n, &d)?, &sq)?;
    let c5 = g.index(&big) >= 8;
    let conds = [c1, c2, c3, c4, c5];
    let mut reasons: Vec<Reason> = conds
        .iter()
        .enumerate()
        .map(|(i, &h)| reason(format!("equal-x-{}", i + 1), h, &format!("equal-x-{}", i + 1)))
        .collect();
    let claim = if conds.iter().any(|&c| c) {
        Claim::EqualXGuaranteed
    } else {
        reasons.push(reason("equal-x-a", true, "equal-x-a"));
        Claim::TwoTorsionBoundOnly
    };
    Ok(Verdict { claim, reasons })
}

/// Default cap on `n` for the computed part of [`prop_q1`].
pub const Q1_DEFAULT_CAP: u64 = 4;

/// Computed and annotated answers for `K/k` with group `(Z/n)²` and `L` cyclic of degree `n` inside `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q1Result {
    /// `Ш²_ω((Z/n)², T̂)`.
    pub computed: AbelianStructure,
    /// `Ш²_ω(T̂)_P` for the cyclic subfield, equal to `computed` when the sequence's left end vanishes.
    pub computed_p: AbelianStructure,
    /// Closed-form `H³(Z/n × Z/n, Z)`.
    pub kunneth: AbelianStructure,
    /// Valuation-theoretic refinement, carried as an annotation and not recomputed.
    pub paper_refined: AbelianStructure,
}

pub fn prop_q1(n: u64, cap: u64, budget: &Budget) -> Result<Q1Result> {
    if n < 2 {
        return Err(Error::Invalid("n must be at least 2".into()));
    }
    if n > cap {
        return Err(Error::ComplexityLimitExceeded {
            what: format!("prop-q1 with n = {n}"),
            needed: n as u128,
            limit: cap as u128,
        });
    }
    let spec = GroupSpec::CyclicProduct(vec![n, n]);
    let g = build_group(&spec)?;
    // L: fixed field of the subgroup {0} × Z/n, so Gal(L/k) = Z/n
    let hl = g.subgroup_closure(&[spec.element_index(&[0, 1])?])?;
    let p = PData::single(hl, 1)?;
    let shap = sha2_omega_p(&g, &g.trivial_subgroup(), &p, budget)?;
    let refined = if n % 2 == 0 { AbelianStructure::cyclic(n / 2) } else { AbelianStructure::cyclic(n) };
    Ok(Q1Result {
        computed: shap.sha.structure,
        computed_p: shap.kernel.structure,
        kunneth: kunneth_oracle(n, n, 3, Coefficients::Integers)?,
        paper_refined: refined,
    })
}

/// `Ш²_ω((Z/n)², Z/d)` for `n | d`.
pub fn brauer_split(n: u64, d: u64, budget: &Budget) -> Result<AbelianStructure> {
    if n == 0 || d == 0 || d % n != 0 {
        return Err(Error::HypothesisViolated(format!("{n} does not divide {d}")));
    }
    let g = build_group(&GroupSpec::CyclicProduct(vec![n, n]))?;
    let m = trivial_module(&g, d)?;
    Ok(sha_omega(&g, &m, 2, budget)?.structure)
}

/// `Ш²_ω(G, T̂′)` for a scenario.
pub fn sha2_t_prime(s: &Scenario, budget: &Budget) -> Result<ShaGroup> {
    let t = t_prime_hat(&s.group, &s.hk, &s.factors)?;
    sha_omega(&s.group, &t, 2, budget)
}

/// `Ш²_ω(G, T̂)` for a scenario.
pub fn sha2_t_hat(s: &Scenario, budget: &Budget) -> Result<ShaGroup> {
    let t = t_hat(&s.group, &s.hk)?;
    sha_omega(&s.group, &t, 2, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(spec: GroupSpec, hk: &[Vec<i64>], hl: &[Vec<i64>]) -> Scenario {
        let g = build_group(&spec).unwrap();
        let idx = |v: &[Vec<i64>]| v.iter().map(|c| spec.element_index(c).unwrap()).collect::<Vec<_>>();
        let hk = g.subgroup_closure(&idx(hk)).unwrap();
        let hl = g.subgroup_closure(&idx(hl)).unwrap();
        Scenario::new("t", g, hk, PData::single(hl, 1).unwrap()).unwrap()
    }

    #[test]
    fn cyclic_k_both_ends_vanish() {
        let s = scenario(GroupSpec::CyclicProduct(vec![4]), &[], &[vec![2]]);
        let r = bs_sequence(&s, &Budget::default()).unwrap();
        assert!(r.left.is_trivial() && r.right.is_trivial());
        assert_eq!(r.middle_order, 1);
    }

    #[test]
    fn z3_squared_cyclic_subfield() {
        let s = scenario(GroupSpec::CyclicProduct(vec![3, 3]), &[], &[vec![0, 1]]);
        let r = bs_sequence(&s, &Budget::default()).unwrap();
        assert!(r.left.is_trivial());
        assert_eq!(r.right, AbelianStructure::cyclic(3));
        assert_eq!(r.middle_structure, Some(AbelianStructure::cyclic(3)));
    }

    #[test]
    fn br1_product_group() {
        let s = scenario(GroupSpec::CyclicProduct(vec![2, 3]), &[vec![1, 0]], &[vec![0, 1]]);
        let v = br1_verdict(&s, &Budget::default()).unwrap();
        assert_eq!(v.claim, Claim::UnramifiedQuotientZero);
        let s = scenario(GroupSpec::CyclicProduct(vec![2, 2, 2]), &[], &[vec![0, 0, 1]]);
        assert_eq!(br1_verdict(&s, &Budget::default()).unwrap().claim, Claim::Inconclusive);
    }

    #[test]
    fn equal_x_cyclic_four() {
        let s = scenario(GroupSpec::CyclicProduct(vec![4]), &[], &[vec![2]]);
        let v = equal_x_conditions(&s).unwrap();
        assert_eq!(v.claim, Claim::EqualXGuaranteed);
        assert!(v.reasons[0].holds);
    }

    #[test]
    fn equal_x_rejects_nonabelian() {
        let spec = GroupSpec::Symmetric(3);
        let s = scenario(spec, &[vec![2, 1, 3]], &[]);
        assert!(matches!(equal_x_conditions(&s), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn q1_small() {
        let r = prop_q1(2, Q1_DEFAULT_CAP, &Budget::default()).unwrap();
        assert_eq!(r.computed, AbelianStructure::cyclic(2));
        assert_eq!(r.computed, r.kunneth);
        assert!(r.paper_refined.is_trivial());
        assert!(prop_q1(5, Q1_DEFAULT_CAP, &Budget::default()).is_err());
    }

    #[test]
    fn brauer_split_hypothesis() {
        assert!(matches!(brauer_split(2, 3, &Budget::default()), Err(Error::HypothesisViolated(_))));
        assert!(brauer_split(2, 2, &Budget::default()).unwrap().is_trivial());
    }
}
