//! Shared fixtures for unit tests: the two-chart projective line and its
//! quantum deformation.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraHom, GradedAlgebra};
use crate::coeff::{ArtinRing, Field};
use crate::rewrite::{Alphabet, FreeElem, RewriteRule, RewriteSystem};
use crate::qcoh::{ElemMat, LocallyFreeModule};
use crate::scheme::{MeetPoset, NcScheme};

pub fn ring(order: u32, tw: i64) -> ArtinRing {
    ArtinRing::new(Field::Rationals, order, tw).unwrap()
}

pub fn p1_poset() -> MeetPoset {
    MeetPoset::from_order(vec!["0".into(), "1".into(), "2".into()], &[(0, 1), (0, 2)]).unwrap()
}

/// The projective line: charts `k[x]`, `k[y]` glued over the Laurent
/// overlap `k<x,z>/(xz-1, zx-1)` via `x -> x`, `y -> z`.
pub fn p1_scheme(r: ArtinRing) -> NcScheme {
    let a1 = {
        let alph = Alphabet::new(vec!["x".into()], vec![1]).unwrap();
        GradedAlgebra::new("A1".into(), RewriteSystem::new(alph, r, vec![]).unwrap())
    };
    let a2 = {
        let alph = Alphabet::new(vec!["y".into()], vec![-1]).unwrap();
        GradedAlgebra::new("A2".into(), RewriteSystem::new(alph, r, vec![]).unwrap())
    };
    let a0 = {
        let alph = Alphabet::new(vec!["x".into(), "z".into()], vec![1, -1]).unwrap();
        let rules = vec![
            RewriteRule {
                lhs: vec![0, 1],
                rhs: FreeElem::one(&r),
            },
            RewriteRule {
                lhs: vec![1, 0],
                rhs: FreeElem::one(&r),
            },
        ];
        GradedAlgebra::new("A0".into(), RewriteSystem::new(alph, r, rules).unwrap())
    };
    let mut gluings = BTreeMap::new();
    gluings.insert(
        (0, 1),
        AlgebraHom {
            images: vec![FreeElem::word(vec![0], r.one())],
        },
    );
    gluings.insert(
        (0, 2),
        AlgebraHom {
            images: vec![FreeElem::word(vec![1], r.one())],
        },
    );
    NcScheme::new(p1_poset(), vec![a0, a1, a2], gluings).unwrap()
}

/// The twisting module O(n) on either fixture scheme: rank 1, basis
/// weight `n` on the second polynomial chart, transition matrix `(x^n)`
/// on the overlap.
pub fn o_line(scheme: &NcScheme, n: i64) -> LocallyFreeModule {
    let r = *scheme.ring();
    let transition = if n >= 0 {
        FreeElem::word(vec![0; n as usize], r.one())
    } else {
        FreeElem::word(vec![1; (-n) as usize], r.one())
    };
    let mut gluings = BTreeMap::new();
    gluings.insert((0, 1), ElemMat::from_rows(vec![vec![FreeElem::one(&r)]]));
    gluings.insert((0, 2), ElemMat::from_rows(vec![vec![transition]]));
    LocallyFreeModule::new(
        format!("O({n})"),
        scheme,
        1,
        vec![vec![0], vec![0], vec![n]],
        gluings,
    )
    .unwrap()
}

/// The quantum deformation of `P^1 x A^1`: charts acquire a second
/// generator `s` with `s*x = x*s + t*x` (and `s*y = y*s - t*y` on the
/// other side).
pub fn quantum_scheme(r: ArtinRing) -> NcScheme {
    let a1 = {
        let alph = Alphabet::new(vec!["x".into(), "s".into()], vec![1, 1]).unwrap();
        let mut rhs = FreeElem::word(vec![0, 1], r.one());
        rhs.add_term(vec![0], r.t_term(r.base.one(), 1));
        let rules = vec![RewriteRule {
            lhs: vec![1, 0],
            rhs,
        }];
        GradedAlgebra::new("Q1".into(), RewriteSystem::new(alph, r, rules).unwrap())
    };
    let a2 = {
        let alph = Alphabet::new(vec!["y".into(), "s".into()], vec![-1, 1]).unwrap();
        let mut rhs = FreeElem::word(vec![0, 1], r.one());
        rhs.add_term(vec![0], r.t_term(r.base.from_i64(-1), 1));
        let rules = vec![RewriteRule {
            lhs: vec![1, 0],
            rhs,
        }];
        GradedAlgebra::new("Q2".into(), RewriteSystem::new(alph, r, rules).unwrap())
    };
    let a0 = {
        let alph =
            Alphabet::new(vec!["x".into(), "z".into(), "s".into()], vec![1, -1, 1]).unwrap();
        let mut sx = FreeElem::word(vec![0, 2], r.one());
        sx.add_term(vec![0], r.t_term(r.base.one(), 1));
        let mut sz = FreeElem::word(vec![1, 2], r.one());
        sz.add_term(vec![1], r.t_term(r.base.from_i64(-1), 1));
        let rules = vec![
            RewriteRule {
                lhs: vec![0, 1],
                rhs: FreeElem::one(&r),
            },
            RewriteRule {
                lhs: vec![1, 0],
                rhs: FreeElem::one(&r),
            },
            RewriteRule {
                lhs: vec![2, 0],
                rhs: sx,
            },
            RewriteRule {
                lhs: vec![2, 1],
                rhs: sz,
            },
        ];
        GradedAlgebra::new("Q0".into(), RewriteSystem::new(alph, r, rules).unwrap())
    };
    let mut gluings = BTreeMap::new();
    gluings.insert(
        (0, 1),
        AlgebraHom {
            images: vec![
                FreeElem::word(vec![0], r.one()),
                FreeElem::word(vec![2], r.one()),
            ],
        },
    );
    gluings.insert(
        (0, 2),
        AlgebraHom {
            images: vec![
                FreeElem::word(vec![1], r.one()),
                FreeElem::word(vec![2], r.one()),
            ],
        },
    );
    NcScheme::new(p1_poset(), vec![a0, a1, a2], gluings).unwrap()
}
