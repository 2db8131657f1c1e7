//! Module corpora for the cohomology property suites.
#![allow(dead_code)]

use nalgebra::DMatrix;
use shaomega_core::gmodule::{permutation_module, t_hat, trivial_module};
use shaomega_core::group::{FiniteGroup, Subgroup};
use shaomega_core::GModule;

use crate::common::all_subgroups;

/// `Z` or `Z/d` on which `G` acts through the sign of an index-2 subgroup.
pub fn sign_module(g: &FiniteGroup, h: &Subgroup, d: i64) -> GModule {
    assert_eq!(g.index(h), 2);
    let action = (0..g.order())
        .map(|x| DMatrix::from_element(1, 1, if h.contains(x) { 1 } else { -1 }))
        .collect();
    GModule::new(g, vec![d], action).unwrap()
}

/// `Z ⊕ Z/2` with the sign action on the lattice part and trivial action on `Z/2`.
pub fn mixed_module(g: &FiniteGroup, h: &Subgroup) -> GModule {
    let action = (0..g.order())
        .map(|x| {
            let s = if h.contains(x) { 1 } else { -1 };
            DMatrix::from_row_slice(2, 2, &[s, 0, 0, 1])
        })
        .collect();
    GModule::new(g, vec![0, 2], action).unwrap()
}

/// A spread of modules over `g`: trivial, permutation, norm tori, sign twists.
pub fn module_corpus(g: &FiniteGroup) -> Vec<(String, GModule)> {
    let mut out = vec![
        ("Z".to_string(), trivial_module(g, 0).unwrap()),
        ("Z/2".to_string(), trivial_module(g, 2).unwrap()),
        ("Z/3".to_string(), trivial_module(g, 3).unwrap()),
    ];
    let subs = all_subgroups(g);
    if let Some(h) = subs.iter().find(|h| h.order() > 1 && h.order() < g.order()) {
        out.push(("Z[G/H]".into(), permutation_module(g, h).unwrap()));
        out.push(("T(H)".into(), t_hat(g, h).unwrap()));
    }
    if g.order() > 1 && g.order() <= 12 {
        out.push(("T(1)".into(), t_hat(g, &g.trivial_subgroup()).unwrap()));
    }
    if let Some(h) = subs.iter().find(|h| 2 * h.order() == g.order()) {
        out.push(("Z-".into(), sign_module(g, h, 0)));
        out.push(("Z/4-".into(), sign_module(g, h, 4)));
        out.push(("Z- + Z/2".into(), mixed_module(g, h)));
    }
    out
}
