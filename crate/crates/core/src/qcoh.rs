//! Locally free quasi-coherent modules: gluing matrices over the chart
//! algebras, windowed validation, pushforward components and restriction
//! maps.
//!
//! A component `M_i` is the free right `A_i`-module on basis vectors
//! `e_0..e_{r-1}` carrying the degree shifts `shifts[i]`. The gluing
//! `psi_{ij}: M_j (x) A_i -> M_i` acts on basis vectors by the matrix
//! `psi_{ij}` over `A_i`: `e_b (x) c  |->  sum_a e_a * psi_ab * phi_{ij}(c)`.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraHom, GradedAlgebra};
use crate::coeff::Scalar;
use crate::error::{NcError, Result};
use crate::linalg::Mat;
use crate::rewrite::{FreeElem, Word};
use crate::scheme::{NcScheme, ValidationReport, Window};

/// A rectangular matrix of chart-algebra elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElemMat {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<FreeElem>,
}

impl ElemMat {
    pub fn zero(rows: usize, cols: usize) -> ElemMat {
        ElemMat {
            rows,
            cols,
            entries: vec![FreeElem::zero(); rows * cols],
        }
    }

    pub fn identity(alg: &GradedAlgebra, n: usize) -> ElemMat {
        let mut m = ElemMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, FreeElem::one(alg.ring()));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FreeElem>>) -> ElemMat {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        ElemMat {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &FreeElem {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FreeElem) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Matrix product with entry multiplication in `alg`, left factor first.
    pub fn mul(&self, other: &ElemMat, alg: &GradedAlgebra) -> Result<ElemMat> {
        if self.cols != other.rows {
            return Err(NcError::Input("matrix dimension mismatch".into()));
        }
        let mut out = ElemMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..other.cols {
                let mut acc = FreeElem::zero();
                for j in 0..self.cols {
                    acc = acc.add(&alg.multiply(self.get(i, j), other.get(j, k))?);
                }
                out.set(i, k, acc);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> ElemMat {
        ElemMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn add(&self, other: &ElemMat) -> ElemMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ElemMat {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &ElemMat) -> ElemMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ElemMat {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// Applies an algebra homomorphism to every entry.
    pub fn map_hom(&self, hom: &AlgebraHom, target: &GradedAlgebra) -> Result<ElemMat> {
        let mut out = ElemMat::zero(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, hom.apply(self.get(r, c), target)?);
            }
        }
        Ok(out)
    }

    /// Applies the matrix to a column of algebra elements: `(Av)_a =
    /// sum_b A_ab * v_b`, reduced in `alg`.
    pub fn apply_col(&self, v: &[FreeElem], alg: &GradedAlgebra) -> Result<Vec<FreeElem>> {
        if v.len() != self.cols {
            return Err(NcError::Input("column length mismatch".into()));
        }
        let mut out = Vec::with_capacity(self.rows);
        for a in 0..self.rows {
            let mut acc = FreeElem::zero();
            for (b, vb) in v.iter().enumerate() {
                acc = acc.add(&alg.multiply(self.get(a, b), vb)?);
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// One basis label of a graded component piece: basis vector index, normal
/// word, and `t`-power.
pub type ComponentBasis = Vec<(usize, Word, u32)>;

/// `k`-basis of the free module with the given shifts over `alg` at total
/// weight `w`: triples `(a, word, j)` standing for `e_a * word * t^j`.
pub fn component_basis(
    alg: &GradedAlgebra,
    shifts: &[i64],
    w: i64,
    length_cap: usize,
) -> (ComponentBasis, bool) {
    let mut basis = Vec::new();
    let mut warned = false;
    for (a, &sh) in shifts.iter().enumerate() {
        let (part, warn) = alg.graded_k_basis(w - sh, length_cap);
        warned |= warn;
        basis.extend(part.into_iter().map(|(word, j)| (a, word, j)));
    }
    (basis, warned)
}

/// Coordinates of a module element (column of algebra elements) in a
/// component basis, dropping terms outside the (length-capped) basis.
/// The flag reports whether anything was dropped.
pub fn component_vector_capped(
    alg: &GradedAlgebra,
    elem: &[FreeElem],
    basis: &ComponentBasis,
) -> (Vec<Scalar>, bool) {
    let field = alg.ring().base;
    let mut v = vec![field.zero(); basis.len()];
    let mut dropped = false;
    let index: std::collections::HashMap<(usize, &Word, u32), usize> = basis
        .iter()
        .enumerate()
        .map(|(n, (a, w, j))| ((*a, w, *j), n))
        .collect();
    for (a, e) in elem.iter().enumerate() {
        for (w, c) in &e.terms {
            for (j, s) in c.coeffs.iter().enumerate() {
                if s.is_zero() {
                    continue;
                }
                match index.get(&(a, w, j as u32)) {
                    Some(&n) => v[n] = s.clone(),
                    None => dropped = true,
                }
            }
        }
    }
    (v, dropped)
}

/// Coordinates of a module element (column of algebra elements) in a
/// component basis.
pub fn component_vector(
    alg: &GradedAlgebra,
    elem: &[FreeElem],
    basis: &ComponentBasis,
) -> Result<Vec<Scalar>> {
    let field = alg.ring().base;
    let mut v = vec![field.zero(); basis.len()];
    let index: std::collections::HashMap<(usize, &Word, u32), usize> = basis
        .iter()
        .enumerate()
        .map(|(n, (a, w, j))| ((*a, w, *j), n))
        .collect();
    for (a, e) in elem.iter().enumerate() {
        for (w, c) in &e.terms {
            for (j, s) in c.coeffs.iter().enumerate() {
                if s.is_zero() {
                    continue;
                }
                let Some(&n) = index.get(&(a, w, j as u32)) else {
                    return Err(NcError::Window(format!(
                        "component term e_{a}*{}*t^{j} falls outside the enumerated basis",
                        alg.alphabet().word_string(w)
                    )));
                };
                v[n] = s.clone();
            }
        }
    }
    Ok(v)
}

/// A locally free right module over an `NcScheme`, given by per-chart
/// degree shifts and gluing matrices for every strict pair `i < j`.
/// Inverse gluings are solved for and stored by `validate`.
#[derive(Debug, Clone)]
pub struct LocallyFreeModule {
    pub name: String,
    pub rank: usize,
    pub shifts: Vec<Vec<i64>>,
    pub gluings: BTreeMap<(usize, usize), ElemMat>,
    pub inverses: BTreeMap<(usize, usize), ElemMat>,
}

impl LocallyFreeModule {
    pub fn new(
        name: String,
        scheme: &NcScheme,
        rank: usize,
        shifts: Vec<Vec<i64>>,
        gluings: BTreeMap<(usize, usize), ElemMat>,
    ) -> Result<LocallyFreeModule> {
        let d = scheme.poset.len();
        if shifts.len() != d {
            return Err(NcError::Input(format!(
                "module {name}: expected {d} shift rows, found {}",
                shifts.len()
            )));
        }
        for row in &shifts {
            if row.len() != rank {
                return Err(NcError::Input(format!(
                    "module {name}: shift row length differs from rank {rank}"
                )));
            }
        }
        for i in 0..d {
            for j in 0..d {
                if scheme.poset.lt(i, j) && !gluings.contains_key(&(i, j)) {
                    return Err(NcError::Input(format!(
                        "module {name}: missing gluing matrix for {} < {}",
                        scheme.poset.name(i),
                        scheme.poset.name(j)
                    )));
                }
            }
        }
        for (&(i, j), m) in &gluings {
            if !scheme.poset.lt(i, j) {
                return Err(NcError::Input(format!(
                    "module {name}: gluing for non-comparable pair ({i},{j})"
                )));
            }
            if m.rows != rank || m.cols != rank {
                return Err(NcError::Input(format!(
                    "module {name}: gluing ({i},{j}) is not {rank}x{rank}"
                )));
            }
        }
        Ok(LocallyFreeModule {
            name,
            rank,
            shifts,
            gluings,
            inverses: BTreeMap::new(),
        })
    }

    /// `psi_{ij}` for `i <= j`, the identity at `i = j`.
    pub fn gluing(&self, scheme: &NcScheme, i: usize, j: usize) -> Result<ElemMat> {
        if i == j {
            return Ok(ElemMat::identity(&scheme.algebras[i], self.rank));
        }
        self.gluings
            .get(&(i, j))
            .cloned()
            .ok_or_else(|| NcError::Input(format!("no module gluing for pair ({i},{j})")))
    }

    /// `psi_{ij}^{-1}`, available after a successful `validate`.
    pub fn inverse_gluing(&self, scheme: &NcScheme, i: usize, j: usize) -> Result<ElemMat> {
        if i == j {
            return Ok(ElemMat::identity(&scheme.algebras[i], self.rank));
        }
        self.inverses
            .get(&(i, j))
            .cloned()
            .ok_or_else(|| NcError::Input(format!("inverse gluing ({i},{j}) not computed; run validate first")))
    }

    /// Entry homogeneity, two-sided invertibility in the window, and the
    /// cocycle identity `psi_{ij} phi_{ij}(psi_{jk}) = psi_{ik}`. On
    /// success the solved inverses are stored on the module.
    pub fn validate(&mut self, scheme: &NcScheme, window: &Window) -> Result<ValidationReport> {
        let mut report = ValidationReport::default();
        for (&(i, j), psi) in &self.gluings {
            let alg = &scheme.algebras[i];
            for a in 0..self.rank {
                for b in 0..self.rank {
                    let want = self.shifts[j][b] - self.shifts[i][a];
                    let e = psi.get(a, b);
                    if !e.is_zero() && e.homogeneous_weight(alg.alphabet()) != Some(want) {
                        report.failures.push(format!(
                            "module {}: gluing ({i},{j}) entry ({a},{b}) `{}` is not homogeneous of weight {want}",
                            self.name,
                            e.display(alg.alphabet())
                        ));
                    }
                }
            }
        }
        if !report.ok() {
            return Ok(report);
        }
        let pairs: Vec<(usize, usize)> = self.gluings.keys().copied().collect();
        for (i, j) in pairs {
            match self.solve_inverse(scheme, window, i, j, &mut report)? {
                Some(inv) => {
                    self.inverses.insert((i, j), inv);
                }
                None => {
                    report.failures.push(format!(
                        "module {}: gluing ({i},{j}) has no two-sided inverse in the window",
                        self.name
                    ));
                }
            }
        }
        for chain in scheme.poset.chains(2) {
            let (i, j, k) = (chain[0], chain[1], chain[2]);
            let alg = &scheme.algebras[i];
            let pij = self.gluing(scheme, i, j)?;
            let pjk = self.gluing(scheme, j, k)?;
            let pik = self.gluing(scheme, i, k)?;
            let lhs = pij.mul(&pjk.map_hom(&scheme.gluing(i, j)?, alg)?, alg)?;
            if !lhs.sub(&pik).is_zero() {
                report.failures.push(format!(
                    "module {}: cocycle fails on chain {}<{}<{}",
                    self.name,
                    scheme.poset.name(i),
                    scheme.poset.name(j),
                    scheme.poset.name(k)
                ));
            }
        }
        Ok(report)
    }

    /// Solves `psi_{ij} * v = id` over `A_i` degree-by-degree, then checks
    /// `v * psi_{ij} = id` exactly. Entry `(b,a)` of the inverse is
    /// homogeneous of weight `shift_i[a] - shift_j[b]`.
    fn solve_inverse(
        &self,
        scheme: &NcScheme,
        window: &Window,
        i: usize,
        j: usize,
        report: &mut ValidationReport,
    ) -> Result<Option<ElemMat>> {
        let alg = &scheme.algebras[i];
        let ring = alg.ring();
        let field = ring.base;
        let cap = window.length_cap;
        let psi = self.gluing(scheme, i, j)?;
        let r = self.rank;

        // unknowns: coordinates of each inverse entry in its graded basis
        let mut unknowns: Vec<(usize, usize, Word, u32)> = Vec::new();
        for b in 0..r {
            for a in 0..r {
                let d = self.shifts[i][a] - self.shifts[j][b];
                let (basis, warn) = alg.graded_k_basis(d, cap);
                if warn {
                    report.warn(format!(
                        "module {}: inverse entry basis for ({i},{j}) hit the length cap",
                        self.name
                    ));
                }
                unknowns.extend(basis.into_iter().map(|(w, t)| (b, a, w, t)));
            }
        }
        // equations: one block per (a, c) of psi * v = id
        let mut blocks: Vec<((usize, usize), Vec<(Word, u32)>)> = Vec::new();
        for a in 0..r {
            for c in 0..r {
                let d = self.shifts[i][c] - self.shifts[i][a];
                let (basis, _) = alg.graded_k_basis(d, cap);
                blocks.push(((a, c), basis));
            }
        }
        let total_rows: usize = blocks.iter().map(|(_, b)| b.len()).sum();
        let mut sys = Mat::zero(field, total_rows, unknowns.len());
        let mut usable = vec![true; unknowns.len()];
        for (col, (b, c, word, tpow)) in unknowns.iter().enumerate() {
            let unit = FreeElem::word(word.clone(), ring.t_term(field.one(), *tpow));
            let mut row0 = 0;
            for ((a, cc), basis) in &blocks {
                if cc == c {
                    let prod = alg.multiply(psi.get(*a, *b), &unit)?;
                    match alg.vector_of(&prod, basis) {
                        Ok(v) => {
                            for (n, s) in v.into_iter().enumerate() {
                                sys.set(row0 + n, col, s);
                            }
                        }
                        Err(_) => {
                            // the candidate pushes past the cap; exclude it
                            usable[col] = false;
                            report.warn(format!(
                                "module {}: inverse candidate for ({i},{j}) escapes the capped basis",
                                self.name
                            ));
                        }
                    }
                }
                row0 += basis.len();
            }
        }
        // zero out unusable columns entirely
        for (col, ok) in usable.iter().enumerate() {
            if !ok {
                for row in 0..total_rows {
                    sys.set(row, col, field.zero());
                }
            }
        }
        let mut rhs = vec![field.zero(); total_rows];
        let mut row0 = 0;
        for ((a, c), basis) in &blocks {
            if a == c {
                if let Some(n) = basis.iter().position(|(w, t)| w.is_empty() && *t == 0) {
                    rhs[row0 + n] = field.one();
                } else {
                    return Err(NcError::Window(
                        "identity element missing from a weight-0 basis".into(),
                    ));
                }
            }
            row0 += basis.len();
        }
        let Some(sol) = sys.solve(&rhs) else {
            return Ok(None);
        };
        let mut inv = ElemMat::zero(r, r);
        for (col, (b, a, word, tpow)) in unknowns.iter().enumerate() {
            if sol[col].is_zero() || !usable[col] {
                continue;
            }
            let mut e = inv.get(*b, *a).clone();
            e.add_term(word.clone(), ring.t_term(sol[col].clone(), *tpow));
            inv.set(*b, *a, e);
        }
        // exact two-sided verification
        let id = ElemMat::identity(alg, r);
        if !psi.mul(&inv, alg)?.sub(&id).is_zero() || !inv.mul(&psi, alg)?.sub(&id).is_zero() {
            return Ok(None);
        }
        Ok(Some(inv))
    }

    /// Direct sum, concatenating shifts and taking block-diagonal gluings.
    pub fn direct_sum(&self, other: &LocallyFreeModule, name: String) -> Result<LocallyFreeModule> {
        if self.shifts.len() != other.shifts.len() {
            return Err(NcError::Input("direct sum over different schemes".into()));
        }
        let rank = self.rank + other.rank;
        let shifts = self
            .shifts
            .iter()
            .zip(&other.shifts)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        let mut gluings = BTreeMap::new();
        for (&key, ma) in &self.gluings {
            let mb = other.gluings.get(&key).ok_or_else(|| {
                NcError::Input("direct sum with mismatched gluing pairs".into())
            })?;
            let mut m = ElemMat::zero(rank, rank);
            for a in 0..self.rank {
                for b in 0..self.rank {
                    m.set(a, b, ma.get(a, b).clone());
                }
            }
            for a in 0..other.rank {
                for b in 0..other.rank {
                    m.set(self.rank + a, self.rank + b, mb.get(a, b).clone());
                }
            }
            gluings.insert(key, m);
        }
        Ok(LocallyFreeModule {
            name,
            rank,
            shifts,
            gluings,
            inverses: BTreeMap::new(),
        })
    }

    /// The same module over a lower-order truncation of the scheme:
    /// coefficients at or above the target order are dropped from every
    /// gluing entry and the result is re-validated.
    pub fn reduce(&self, scheme: &NcScheme, window: &Window) -> Result<LocallyFreeModule> {
        let ring = *scheme.ring();
        let mut gluings = BTreeMap::new();
        for (&key, m) in &self.gluings {
            let mut red = ElemMat::zero(m.rows, m.cols);
            for r in 0..m.rows {
                for c in 0..m.cols {
                    red.set(r, c, m.get(r, c).reduce(&ring)?);
                }
            }
            gluings.insert(key, red);
        }
        let mut out = LocallyFreeModule::new(
            self.name.clone(),
            scheme,
            self.rank,
            self.shifts.clone(),
            gluings,
        )?;
        let report = out.validate(scheme, window)?;
        if !report.ok() {
            return Err(NcError::Input(format!(
                "reduced module `{}` fails validation: {}",
                out.name,
                report.failures.join("; ")
            )));
        }
        Ok(out)
    }
}

/// The chart index of the pushforward component `[M_s]_i = M_s (x) A_{i/\s}`.
pub fn pushforward_chart(scheme: &NcScheme, s: usize, i: usize) -> usize {
    scheme.poset.meet(i, s)
}

/// The restriction `r_s^M` at component `i`: the map `M_i -> [M_s]_i`
/// lands in the free module over `A_p`, `p = i /\ s`, and is given by the
/// gluing matrix `psi_{pi}` with coefficients transported along
/// `phi_{pi}`. Returns `(p, psi_{pi}, phi_{pi})`.
pub fn restriction(
    module: &LocallyFreeModule,
    scheme: &NcScheme,
    s: usize,
    i: usize,
) -> Result<(usize, ElemMat, AlgebraHom)> {
    let p = scheme.poset.meet(i, s);
    let psi = module.gluing(scheme, p, i)?;
    let phi = scheme.gluing(p, i)?;
    Ok((p, psi, phi))
}
