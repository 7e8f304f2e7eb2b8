//! Deformations of module gluings along a tower: canonical lifts, the
//! obstruction 2-cocycle, coboundary solving for extensions, the H¹
//! torsor on solutions, and full tower iteration.
//!
//! All cochains are matrices over the level-1 charts, twisted so that a
//! degree-`p` cochain on the chain `i0 < ... < ip` has entry `(a,b)` of
//! weight `shifts[ip][b] - shifts[i0][a] - tau`, where `tau = n * wt(t)`
//! is the weight of `t^n`.

use std::collections::BTreeMap;

use crate::coeff::Scalar;
use crate::error::{NcError, Result};
use crate::linalg::Mat;
use crate::qcoh::{ElemMat, LocallyFreeModule};
use crate::rewrite::{FreeElem, Word};
use crate::scheme::{NcScheme, Window};

/// A module cochain: one matrix per strict chain, over the chain's
/// smallest chart.
pub type Cochain = BTreeMap<Vec<usize>, ElemMat>;

#[derive(Debug, Clone, PartialEq, Eq)]
struct CochainBasisElt {
    chain: usize,
    a: usize,
    b: usize,
    word: Word,
}

/// The twisted Čech-type complex controlling gluing deformations of a
/// locally free module, built over the level-1 truncation of a scheme.
pub struct DeformComplex<'a> {
    pub base: &'a NcScheme,
    pub rank: usize,
    pub shifts: Vec<Vec<i64>>,
    /// level-1 gluing matrices `psi0` per strict comparable pair
    pub gluings: BTreeMap<(usize, usize), ElemMat>,
    pub tau: i64,
    pub cap: usize,
    chains: Vec<Vec<Vec<usize>>>,
    bases: Vec<Vec<CochainBasisElt>>,
    pub capped: bool,
}

impl<'a> DeformComplex<'a> {
    /// `base` must be a level-1 scheme (order-1 coefficient ring); the
    /// module data is reduced entrywise to level 1.
    pub fn new(
        base: &'a NcScheme,
        module: &LocallyFreeModule,
        tau: i64,
        cap: usize,
    ) -> Result<DeformComplex<'a>> {
        if base.ring().order != 1 {
            return Err(NcError::Input(
                "deformation complex requires a level-1 base scheme".into(),
            ));
        }
        let ring = *base.ring();
        let mut gluings = BTreeMap::new();
        for (&(i, j), mat) in &module.gluings {
            let mut red = ElemMat::zero(mat.rows, mat.cols);
            for r in 0..mat.rows {
                for c in 0..mat.cols {
                    red.set(r, c, mat.get(r, c).reduce(&ring)?);
                }
            }
            gluings.insert((i, j), red);
        }
        let chains: Vec<Vec<Vec<usize>>> = (0..4).map(|p| base.poset.chains(p)).collect();
        let mut capped = false;
        let mut bases = Vec::new();
        for level in &chains {
            let mut basis = Vec::new();
            for (ci, chain) in level.iter().enumerate() {
                let first = chain[0];
                let last = *chain.last().unwrap();
                let alg = &base.algebras[first];
                for a in 0..module.rank {
                    for b in 0..module.rank {
                        let w = module.shifts[last][b] - module.shifts[first][a] - tau;
                        let (words, warn) = alg.graded_words(w, cap);
                        capped |= warn;
                        basis.extend(words.into_iter().map(|word| CochainBasisElt {
                            chain: ci,
                            a,
                            b,
                            word,
                        }));
                    }
                }
            }
            bases.push(basis);
        }
        Ok(DeformComplex {
            base,
            rank: module.rank,
            shifts: module.shifts.clone(),
            gluings,
            tau,
            cap,
            chains,
            bases,
            capped,
        })
    }

    pub fn chain_list(&self, p: usize) -> &[Vec<usize>] {
        &self.chains[p]
    }

    pub fn dim(&self, p: usize) -> usize {
        self.bases[p].len()
    }

    fn psi(&self, i: usize, j: usize) -> Result<ElemMat> {
        if i == j {
            return Ok(ElemMat::identity(&self.base.algebras[i], self.rank));
        }
        self.gluings
            .get(&(i, j))
            .cloned()
            .ok_or_else(|| NcError::Input(format!("no module gluing for pair ({i},{j})")))
    }

    pub fn zero_cochain(&self, p: usize) -> Cochain {
        self.chains[p]
            .iter()
            .map(|c| (c.clone(), ElemMat::zero(self.rank, self.rank)))
            .collect()
    }

    /// The simplicial differential on module cochains:
    /// `(dc)_{i0..ip+1} = psi_{i0 i1} phi(c_{i1..}) + sum_k (-1)^k c_{drop k}
    ///  + (-1)^{p+1} c_{i0..ip} phi_{i0 ip}(psi_{ip ip+1})`.
    pub fn apply_d(&self, p: usize, cochain: &Cochain) -> Result<Cochain> {
        let mut out = Cochain::new();
        for chain in &self.chains[p + 1] {
            let i0 = chain[0];
            let alg = &self.base.algebras[i0];
            let mut acc = ElemMat::zero(self.rank, self.rank);
            // face 0: transport from the sub-chain starting at i1
            {
                let i1 = chain[1];
                let sub = chain[1..].to_vec();
                let phi = self.base.gluing(i0, i1)?;
                let moved = cochain[&sub].map_hom(&phi, alg)?;
                acc = acc.add(&self.psi(i0, i1)?.mul(&moved, alg)?);
            }
            // interior faces keep the endpoints
            for k in 1..=p {
                let mut sub = chain.clone();
                sub.remove(k);
                let term = &cochain[&sub];
                if k % 2 == 0 {
                    acc = acc.add(term);
                } else {
                    acc = acc.sub(term);
                }
            }
            // last face: right-multiply by the transported gluing
            {
                let ip = chain[p];
                let ip1 = chain[p + 1];
                let sub = chain[..=p].to_vec();
                let phi = self.base.gluing(i0, ip)?;
                let moved = self.psi(ip, ip1)?.map_hom(&phi, alg)?;
                let term = cochain[&sub].mul(&moved, alg)?;
                if (p + 1) % 2 == 0 {
                    acc = acc.add(&term);
                } else {
                    acc = acc.sub(&term);
                }
            }
            out.insert(chain.clone(), acc);
        }
        Ok(out)
    }

    /// Coordinates of a degree-`p` cochain in the enumerated basis,
    /// dropping (and flagging) terms beyond the length cap.
    pub fn vec_of(&self, p: usize, cochain: &Cochain) -> (Vec<Scalar>, bool) {
        let field = self.base.ring().base;
        let basis = &self.bases[p];
        let mut v = vec![field.zero(); basis.len()];
        let mut overflow = false;
        let index: std::collections::HashMap<(usize, usize, usize, &Word), usize> = basis
            .iter()
            .enumerate()
            .map(|(n, e)| ((e.chain, e.a, e.b, &e.word), n))
            .collect();
        for (ci, chain) in self.chains[p].iter().enumerate() {
            let mat = &cochain[chain];
            for a in 0..self.rank {
                for b in 0..self.rank {
                    for (word, c) in &mat.get(a, b).terms {
                        let s = &c.coeffs[0];
                        if s.is_zero() {
                            continue;
                        }
                        match index.get(&(ci, a, b, word)) {
                            Some(&n) => v[n] = s.clone(),
                            None => overflow = true,
                        }
                    }
                }
            }
        }
        (v, overflow)
    }

    pub fn cochain_of(&self, p: usize, v: &[Scalar]) -> Cochain {
        let ring = *self.base.ring();
        let mut out = self.zero_cochain(p);
        for (e, s) in self.bases[p].iter().zip(v) {
            if s.is_zero() {
                continue;
            }
            let chain = &self.chains[p][e.chain];
            let mat = out.get_mut(chain).unwrap();
            let mut entry = mat.get(e.a, e.b).clone();
            entry.add_term(e.word.clone(), ring.from_scalar(s.clone()));
            mat.set(e.a, e.b, entry);
        }
        out
    }

    /// The scalar matrix of `d^p` in the enumerated bases.
    pub fn differential(&self, p: usize) -> Result<(Mat, bool)> {
        let field = self.base.ring().base;
        let mut mat = Mat::zero(field, self.bases[p + 1].len(), self.bases[p].len());
        let mut overflow = false;
        for (col, e) in self.bases[p].iter().enumerate() {
            let mut c = self.zero_cochain(p);
            {
                let chain = &self.chains[p][e.chain];
                let m = c.get_mut(chain).unwrap();
                let mut entry = m.get(e.a, e.b).clone();
                entry.add_term(e.word.clone(), self.base.ring().one());
                m.set(e.a, e.b, entry);
            }
            let image = self.apply_d(p, &c)?;
            let (v, over) = self.vec_of(p + 1, &image);
            overflow |= over;
            for (row, s) in v.into_iter().enumerate() {
                if !s.is_zero() {
                    mat.set(row, col, s);
                }
            }
        }
        Ok((mat, overflow))
    }
}

/// Entrywise canonical lift of a module's gluing matrices to the next
/// tower level. Shifts and rank are unchanged.
pub fn lift_gluings(next: &NcScheme, module: &LocallyFreeModule) -> Result<LocallyFreeModule> {
    let ring = *next.ring();
    let mut gluings = BTreeMap::new();
    for (&(i, j), mat) in &module.gluings {
        let mut lifted = ElemMat::zero(mat.rows, mat.cols);
        for r in 0..mat.rows {
            for c in 0..mat.cols {
                lifted.set(r, c, mat.get(r, c).lift(&ring)?);
            }
        }
        gluings.insert((i, j), lifted);
    }
    LocallyFreeModule::new(
        module.name.clone(),
        next,
        module.rank,
        module.shifts.clone(),
        gluings,
    )
}

/// Divides a homogeneous element by `t^n`, landing in the level-1 ring.
/// Errors when any term has a nonzero coefficient below `t^n`.
fn divide_tpow(e: &FreeElem, n: u32, ring1: &crate::coeff::ArtinRing) -> Result<FreeElem> {
    let mut out = FreeElem::zero();
    for (word, c) in &e.terms {
        for (j, s) in c.coeffs.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            if (j as u32) < n {
                return Err(NcError::Input(format!(
                    "cochain term with t^{j} is not divisible by t^{n}"
                )));
            }
            if j as u32 == n {
                out.add_term(word.clone(), ring1.from_scalar(s.clone()));
            } else {
                return Err(NcError::Input(format!(
                    "cochain term with t^{j} exceeds t^{n} after lifting"
                )));
            }
        }
    }
    Ok(out)
}

/// The obstruction 2-cochain of a lifted module on the level-`n+1`
/// scheme: `delta_{ijk} = psi'_{ij} phi_{ij}(psi'_{jk}) - psi'_{ik}`,
/// divided by `t^n` into level-1 matrices.
pub fn obstruction(next: &NcScheme, lifted: &LocallyFreeModule, n: u32) -> Result<Cochain> {
    let ring1 = next.ring().truncated(1);
    let mut out = Cochain::new();
    for chain in next.poset.chains(2) {
        let (i, j, k) = (chain[0], chain[1], chain[2]);
        let alg = &next.algebras[i];
        let phi = next.gluing(i, j)?;
        let pij = lifted.gluing(next, i, j)?;
        let pjk = lifted.gluing(next, j, k)?;
        let pik = lifted.gluing(next, i, k)?;
        let delta = pij.mul(&pjk.map_hom(&phi, alg)?, alg)?.sub(&pik);
        let mut div = ElemMat::zero(delta.rows, delta.cols);
        for r in 0..delta.rows {
            for c in 0..delta.cols {
                div.set(r, c, divide_tpow(delta.get(r, c), n, &ring1)?);
            }
        }
        out.insert(chain, div);
    }
    Ok(out)
}

/// Outcome of one extension step `level n -> n+1`.
#[derive(Debug)]
pub struct ExtensionReport {
    /// the level being constructed (`n + 1`)
    pub level: u32,
    pub obstruction_zero: bool,
    /// closedness of the obstruction under `d^2` (vacuous without
    /// 4-chains)
    pub closed: bool,
    pub solvable: bool,
    pub h1_dim: usize,
    /// rank of the augmented system minus rank of `d^1`; positive
    /// exactly when the obstruction class is nonzero in H²
    pub h2_rank_excess: usize,
    pub capped: bool,
    pub module: Option<LocallyFreeModule>,
}

/// Lifts `module` (over the level-`n` truncation of `next`) to `next`,
/// computing and solving the obstruction equation. On success the
/// returned module satisfies the gluing cocycle exactly over `next` and
/// reduces back to `module`.
pub fn solve_extension(next: &NcScheme, module: &LocallyFreeModule, cap: usize) -> Result<ExtensionReport> {
    let n = {
        let next_order = next.ring().order;
        if next_order < 2 {
            return Err(NcError::Input(
                "extension target must have level at least 2".into(),
            ));
        }
        next_order - 1
    };
    let tau = n as i64 * next.ring().t_weight;
    let lifted = lift_gluings(next, module)?;
    let delta = obstruction(next, &lifted, n)?;
    let base = next.truncate(1)?;
    let complex = DeformComplex::new(&base, module, tau, cap)?;
    let obstruction_zero = delta.values().all(|m| m.is_zero());
    let closed = complex.apply_d(2, &delta)?.values().all(|m| m.is_zero());
    let (d0, over0) = complex.differential(0)?;
    let (d1, over1) = complex.differential(1)?;
    let (delta_vec, over_delta) = complex.vec_of(2, &delta);
    let capped = complex.capped || over0 || over1 || over_delta;
    let rhs: Vec<Scalar> = delta_vec.iter().map(|s| s.neg()).collect();
    let solution = d1.solve(&rhs);
    let h1_dim = (d1.cols() - d1.rank()) - d0.rank();
    let mut report = ExtensionReport {
        level: n + 1,
        obstruction_zero,
        closed,
        solvable: solution.is_some(),
        h1_dim,
        h2_rank_excess: 0,
        capped,
        module: None,
    };
    match solution {
        Some(eps_vec) => {
            let eps = complex.cochain_of(1, &eps_vec);
            let module_next = apply_correction(next, &lifted, &eps, n)?;
            verify_cocycle(next, &module_next)?;
            verify_reduction(&module_next, module, &next.ring().truncated(n))?;
            report.module = Some(module_next);
        }
        None => {
            // certificate: the obstruction class is nonzero in H²
            let mut aug = Mat::zero(next.ring().base, d1.rows(), d1.cols() + 1);
            for r in 0..d1.rows() {
                for c in 0..d1.cols() {
                    aug.set(r, c, d1.get(r, c).clone());
                }
                aug.set(r, d1.cols(), rhs[r].clone());
            }
            report.h2_rank_excess = aug.rank() - d1.rank();
        }
    }
    Ok(report)
}

/// `psi' + t^n * eps` as a module over `next`.
pub fn apply_correction(
    next: &NcScheme,
    lifted: &LocallyFreeModule,
    eps: &Cochain,
    n: u32,
) -> Result<LocallyFreeModule> {
    let ring = *next.ring();
    let tn = ring.t_term(ring.base.one(), n);
    let mut gluings = BTreeMap::new();
    for (&(i, j), mat) in &lifted.gluings {
        let mut out = mat.clone();
        if let Some(e) = eps.get(&vec![i, j]) {
            for r in 0..mat.rows {
                for c in 0..mat.cols {
                    let corr = e.get(r, c).lift(&ring)?.scale(&tn);
                    out.set(r, c, out.get(r, c).add(&corr));
                }
            }
        }
        gluings.insert((i, j), out);
    }
    LocallyFreeModule::new(
        lifted.name.clone(),
        next,
        lifted.rank,
        lifted.shifts.clone(),
        gluings,
    )
}

/// Exact symbolic verification of the gluing cocycle over the scheme.
fn verify_cocycle(scheme: &NcScheme, module: &LocallyFreeModule) -> Result<()> {
    for chain in scheme.poset.chains(2) {
        let (i, j, k) = (chain[0], chain[1], chain[2]);
        let alg = &scheme.algebras[i];
        let phi = scheme.gluing(i, j)?;
        let lhs = module
            .gluing(scheme, i, j)?
            .mul(&module.gluing(scheme, j, k)?.map_hom(&phi, alg)?, alg)?;
        if !lhs.sub(&module.gluing(scheme, i, k)?).is_zero() {
            return Err(NcError::Input(format!(
                "corrected gluings fail the cocycle on chain ({i},{j},{k})"
            )));
        }
    }
    Ok(())
}

/// Exact check that the new module truncates back to the old one.
fn verify_reduction(
    module_next: &LocallyFreeModule,
    module: &LocallyFreeModule,
    ring_prev: &crate::coeff::ArtinRing,
) -> Result<()> {
    for (&(i, j), mat) in &module_next.gluings {
        let old = &module.gluings[&(i, j)];
        for r in 0..mat.rows {
            for c in 0..mat.cols {
                if mat.get(r, c).reduce(ring_prev)? != *old.get(r, c) {
                    return Err(NcError::Input(format!(
                        "corrected gluing ({i},{j}) does not reduce to the previous level"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The affine structure on extension solutions: the solution set is a
/// torsor over `ker d^1`, and modulo coboundaries over H¹.
#[derive(Debug, Clone)]
pub struct TorsorReport {
    pub c1_dim: usize,
    pub ker_d1_dim: usize,
    pub im_d0_rank: usize,
    pub h1_dim: usize,
    pub capped: bool,
}

pub fn torsor_structure(complex: &DeformComplex) -> Result<TorsorReport> {
    let (d0, over0) = complex.differential(0)?;
    let (d1, over1) = complex.differential(1)?;
    let ker = d1.cols() - d1.rank();
    Ok(TorsorReport {
        c1_dim: d1.cols(),
        ker_d1_dim: ker,
        im_d0_rank: d0.rank(),
        h1_dim: ker - d0.rank(),
        capped: complex.capped || over0 || over1,
    })
}

/// Iterates `solve_extension` up a tower starting from a level-1 module.
/// Stops at the first unsolvable level; the final module (when all levels
/// succeed) lives on the tower's top scheme.
pub fn run_tower(
    tower: &crate::scheme::DeformationTower,
    module0: &LocallyFreeModule,
    window: &Window,
) -> Result<(Vec<ExtensionReport>, Option<LocallyFreeModule>)> {
    let mut reports = Vec::new();
    let mut current = module0.clone();
    for next in &tower.levels[1..] {
        let report = solve_extension(next, &current, window.length_cap)?;
        let done = report.module.is_none();
        if let Some(m) = &report.module {
            current = m.clone();
        }
        reports.push(report);
        if done {
            return Ok((reports, None));
        }
    }
    Ok((reports, Some(current)))
}
