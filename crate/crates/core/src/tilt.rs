//! Tilting verification: Ext-vanishing (pretilting), the graded global
//! endomorphism algebra with structure constants, flatness over the
//! coefficient ring, generation witnesses on test objects, and
//! object-level images of the Hom functor with their right module
//! structure.
//!
//! All verdicts are windowed: pieces whose basis enumeration hit the
//! length cap are excluded from vanishing claims and reported as
//! in-window-only insufficiency.

use std::collections::{BTreeMap, BTreeSet};

use crate::cech::{
    euler_characteristic, ext, global_homs, hom_coordinates, hom_differential, hom_matrix_coords,
    t_action, CohomologyPiece, HomBasisElt, TupleSkeleton,
};
use crate::coeff::{flat_rank_pattern, Field, Scalar};
use crate::error::{NcError, Result};
use crate::linalg::Mat;
use crate::qcoh::{ElemMat, LocallyFreeModule};
use crate::scheme::{NcScheme, Window};

// ---------------------------------------------------------------------------
// Pretilting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ExtEntry {
    pub p: usize,
    pub weight: i64,
    pub dim: usize,
    pub capped: bool,
}

#[derive(Debug, Clone)]
pub struct PretiltingReport {
    pub ext_table: Vec<ExtEntry>,
    /// every fully-enumerated positive-degree piece vanishes
    pub pretilting: bool,
    /// some positive-degree piece hit the window or length cap; the
    /// verdict then covers only the fully-enumerated pieces
    pub in_window_only: bool,
}

/// `Ext^p(F,F)` for `0 < p <= min(pmax, d-1)` must vanish.
pub fn pretilting_check(
    scheme: &NcScheme,
    f: &LocallyFreeModule,
    window: &Window,
    pmax: usize,
) -> Result<PretiltingReport> {
    let pieces = ext(scheme, f, f, window, pmax)?;
    let mut ext_table = Vec::new();
    let mut pretilting = true;
    let mut in_window_only = false;
    for c in &pieces {
        ext_table.push(ExtEntry {
            p: c.p,
            weight: c.weight,
            dim: c.dim,
            capped: c.capped,
        });
        if c.p > 0 {
            if c.capped {
                in_window_only = true;
            } else if c.dim > 0 {
                pretilting = false;
            }
        }
    }
    Ok(PretiltingReport {
        ext_table,
        pretilting,
        in_window_only,
    })
}

// ---------------------------------------------------------------------------
// Endomorphism algebra
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EndoBasisElt {
    pub weight: i64,
    /// one matrix per chart, compatible with the gluings
    pub mats: Vec<ElemMat>,
}

#[derive(Debug, Clone)]
pub struct EndomorphismAlgebra {
    pub field: Field,
    pub dim: usize,
    pub basis: Vec<EndoBasisElt>,
    /// sparse structure constants: `basis[a] . basis[b] = sum coeff * basis[c]`
    /// stored as `(a, b, c, coeff)`, where the product is composition,
    /// `(a . b)(v) = a(b(v))`
    pub constants: Vec<(usize, usize, usize, Scalar)>,
    /// coordinates of the identity endomorphism
    pub unit: Vec<Scalar>,
    /// multiplication by `t` in the basis (rows/columns in basis order)
    pub t_mat: Mat,
    /// a `t`-image left the window
    pub t_boundary: bool,
    /// every pairwise composite was resolved inside the window
    pub complete: bool,
    /// basis pairs `(a, b)` whose product was resolved inside the window,
    /// either in the basis or as an exact chartwise zero
    pub resolved: BTreeSet<(usize, usize)>,
    /// some graded piece hit the length cap
    pub capped: bool,
    pieces: Vec<CohomologyPiece>,
    index: BTreeMap<(i64, usize), usize>,
}

/// The graded global endomorphism algebra of `F` within the window, with
/// structure constants found by composing basis homs chartwise and
/// re-expanding in the basis.
pub fn end_algebra(
    scheme: &NcScheme,
    f: &LocallyFreeModule,
    window: &Window,
) -> Result<EndomorphismAlgebra> {
    let field = scheme.ring().base;
    let pieces = ext(scheme, f, f, window, 0)?;
    let mut capped = false;
    let mut basis = Vec::new();
    // global index of representative `r` of the piece at weight `w`;
    // basis order coincides with the row order of `t_action`
    let mut index: BTreeMap<(i64, usize), usize> = BTreeMap::new();
    let mut by_weight: BTreeMap<i64, usize> = BTreeMap::new();
    for (pi, c) in pieces.iter().enumerate() {
        capped |= c.capped;
        by_weight.insert(c.weight, pi);
        for (r, h) in global_homs(scheme, f, f, c)?.into_iter().enumerate() {
            index.insert((c.weight, r), basis.len());
            basis.push(EndoBasisElt {
                weight: h.weight,
                mats: h.mats,
            });
        }
    }
    let dim = basis.len();
    let unit = {
        let pi = *by_weight
            .get(&0)
            .ok_or_else(|| NcError::Window("window does not contain weight 0 (no unit)".into()))?;
        let mats: Vec<ElemMat> = scheme
            .algebras
            .iter()
            .map(|alg| ElemMat::identity(alg, f.rank))
            .collect();
        let mut over = false;
        let coords = hom_coordinates(scheme, f, f, &pieces[pi], &mats, &mut over)?.ok_or_else(
            || NcError::Window("identity endomorphism is not in the computed basis".into()),
        )?;
        capped |= over;
        let mut u = vec![field.zero(); dim];
        for (r, s) in coords.iter().enumerate() {
            u[index[&(0, r)]] = s.clone();
        }
        u
    };
    let mut constants = Vec::new();
    let mut resolved = BTreeSet::new();
    let mut complete = true;
    for a in 0..dim {
        for b in 0..dim {
            let w = basis[a].weight + basis[b].weight;
            let mut comps = Vec::with_capacity(scheme.algebras.len());
            for (l, alg) in scheme.algebras.iter().enumerate() {
                comps.push(basis[a].mats[l].mul(&basis[b].mats[l], alg)?);
            }
            let Some(&pi) = by_weight.get(&w) else {
                if comps.iter().any(|m| !m.is_zero()) {
                    complete = false;
                } else {
                    resolved.insert((a, b));
                }
                continue;
            };
            let mut over = false;
            match hom_coordinates(scheme, f, f, &pieces[pi], &comps, &mut over)? {
                Some(coords) => {
                    resolved.insert((a, b));
                    for (r, s) in coords.iter().enumerate() {
                        if !s.is_zero() {
                            constants.push((a, b, index[&(w, r)], s.clone()));
                        }
                    }
                }
                None => complete = false,
            }
            capped |= over;
        }
    }
    let (t_mat, t_boundary) = t_action(scheme, f, f, window, &pieces, 0)?;
    Ok(EndomorphismAlgebra {
        field,
        dim,
        basis,
        constants,
        unit,
        t_mat,
        t_boundary,
        complete,
        resolved,
        capped,
        pieces,
        index,
    })
}

impl EndomorphismAlgebra {
    pub fn basis_vec(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim];
        v[i] = self.field.one();
        v
    }

    /// product of coordinate vectors via the structure constants
    pub fn mult(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![self.field.zero(); self.dim];
        for (a, b, c, s) in &self.constants {
            let term = x[*a].mul(&y[*b]).mul(s);
            out[*c] = out[*c].add(&term);
        }
        out
    }

    /// Associativity, unit laws, and centrality/nilpotence of `t`.
    pub fn verify(&self, order: u32) -> Result<()> {
        if !self.complete {
            return Err(NcError::Window(
                "structure constants incomplete in the window".into(),
            ));
        }
        for a in 0..self.dim {
            let ea = self.basis_vec(a);
            if self.mult(&self.unit, &ea) != ea || self.mult(&ea, &self.unit) != ea {
                return Err(NcError::Input(format!("unit law fails on basis element {a}")));
            }
        }
        for a in 0..self.dim {
            let ea = self.basis_vec(a);
            for b in 0..self.dim {
                let eb = self.basis_vec(b);
                let ab = self.mult(&ea, &eb);
                for c in 0..self.dim {
                    let ec = self.basis_vec(c);
                    let lhs = self.mult(&ab, &ec);
                    let rhs = self.mult(&ea, &self.mult(&eb, &ec));
                    if lhs != rhs {
                        return Err(NcError::Input(format!(
                            "associativity fails on basis triple ({a},{b},{c})"
                        )));
                    }
                }
                // t is central: t(ab) = (ta)b = a(tb)
                let tab = self.t_mat.apply(&ab);
                let ta_b = self.mult(&self.t_mat.apply(&ea), &eb);
                let a_tb = self.mult(&ea, &self.t_mat.apply(&eb));
                if tab != ta_b || tab != a_tb {
                    return Err(NcError::Input(format!(
                        "t-action is not central on basis pair ({a},{b})"
                    )));
                }
            }
        }
        let mut pw = Mat::identity(self.field, self.dim);
        for _ in 0..order {
            pw = self.t_mat.mul(&pw);
        }
        if !pw.is_zero() {
            return Err(NcError::Input("t-action is not nilpotent of the ring order".into()));
        }
        Ok(())
    }

    /// Coordinates of a chartwise endomorphism collection at one weight.
    pub fn coordinates(
        &self,
        scheme: &NcScheme,
        f: &LocallyFreeModule,
        weight: i64,
        mats: &[ElemMat],
    ) -> Result<Option<Vec<Scalar>>> {
        let Some(piece) = self.pieces.iter().find(|c| c.weight == weight) else {
            return Ok(None);
        };
        let mut over = false;
        let Some(coords) = hom_coordinates(scheme, f, f, piece, mats, &mut over)? else {
            return Ok(None);
        };
        let mut v = vec![self.field.zero(); self.dim];
        for (r, s) in coords.iter().enumerate() {
            v[self.index[&(weight, r)]] = s.clone();
        }
        Ok(Some(v))
    }
}

// ---------------------------------------------------------------------------
// Flatness and reduction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FlatnessReport {
    pub flat: bool,
    pub rank: Option<usize>,
    /// a `t`-image left the window; the verdict is in-window only
    pub boundary: bool,
}

/// Kernel/image pattern of the `t`-action: `E` is a free module over
/// `k[t]/(t^n)` exactly when the pattern matches `rank * n` dimensions.
pub fn flatness_check(e: &EndomorphismAlgebra, order: u32) -> Result<FlatnessReport> {
    let (flat, rank) = flat_rank_pattern(&e.t_mat, order)?;
    Ok(FlatnessReport {
        flat,
        rank,
        boundary: e.t_boundary,
    })
}

/// Outcome of comparing `E/tE` with `E0`. When either algebra has
/// unresolved products, only the pairs resolved in both are compared and
/// the verdict is in-window only.
#[derive(Debug, Clone)]
pub struct ReductionReport {
    /// `onto`, `unit_ok`, and every checked product agreed
    pub matches: bool,
    /// the reduction classes span `E0`
    pub onto: bool,
    /// the unit of `E` reduces to the unit of `E0`
    pub unit_ok: bool,
    pub pairs_checked: usize,
    pub pairs_skipped: usize,
    /// basis endomorphisms of `E` whose reduction could not be expressed
    /// in the basis of `E0` inside the window
    pub elements_skipped: usize,
    pub in_window_only: bool,
}

/// `E/tE ~ E0`: reduces every basis endomorphism of `e` entrywise to the
/// level-one ring, expresses it in the basis of `e0`, and checks that the
/// induced map is onto and multiplicative (a `k`-algebra surjection whose
/// kernel contains `tE`; equality of dimensions is the flatness check).
/// Products unresolved in either algebra are skipped and reported.
pub fn reduction_compare(
    scheme0: &NcScheme,
    f0: &LocallyFreeModule,
    e: &EndomorphismAlgebra,
    e0: &EndomorphismAlgebra,
) -> Result<ReductionReport> {
    let ring0 = *scheme0.ring();
    let field = e.field;
    let mut cols: Vec<Option<Vec<Scalar>>> = Vec::with_capacity(e.dim);
    let mut elements_skipped = 0;
    for elt in &e.basis {
        let mut red_mats = Vec::with_capacity(elt.mats.len());
        for m in &elt.mats {
            let mut red = ElemMat::zero(m.rows, m.cols);
            for r in 0..m.rows {
                for c in 0..m.cols {
                    red.set(r, c, m.get(r, c).reduce(&ring0)?);
                }
            }
            red_mats.push(red);
        }
        let coords = e0.coordinates(scheme0, f0, elt.weight, &red_mats)?;
        if coords.is_none() {
            elements_skipped += 1;
        }
        cols.push(coords);
    }
    // onto: the resolvable reduction classes span E0
    let mut p = Mat::zero(field, e0.dim, e.dim);
    for (c, col) in cols.iter().enumerate() {
        let Some(col) = col else { continue };
        for (r, s) in col.iter().enumerate() {
            p.set(r, c, s.clone());
        }
    }
    let onto = p.rank() == e0.dim;
    // a product in E0 is trustworthy only when every contributing pair
    // of basis elements has resolved constants there
    let e0_product = |x: &[Scalar], y: &[Scalar]| -> Option<Vec<Scalar>> {
        for (i, s) in x.iter().enumerate() {
            for (j, t) in y.iter().enumerate() {
                if !s.is_zero() && !t.is_zero() && !e0.resolved.contains(&(i, j)) {
                    return None;
                }
            }
        }
        Some(e0.mult(x, y))
    };
    let apply_p = |x: &[Scalar]| -> Option<Vec<Scalar>> {
        let mut out = vec![field.zero(); e0.dim];
        for (c, s) in x.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            for (r, v) in cols[c].as_ref()?.iter().enumerate() {
                out[r] = out[r].add(&v.mul(s));
            }
        }
        Some(out)
    };
    let unit_ok = apply_p(&e.unit).is_some_and(|u| u == e0.unit);
    let mut pairs_checked = 0;
    let mut pairs_skipped = 0;
    let mut products_ok = true;
    for a in 0..e.dim {
        for b in 0..e.dim {
            let (Some(ca), Some(cb)) = (&cols[a], &cols[b]) else {
                pairs_skipped += 1;
                continue;
            };
            if !e.resolved.contains(&(a, b)) {
                pairs_skipped += 1;
                continue;
            }
            let prod = e.mult(&e.basis_vec(a), &e.basis_vec(b));
            let (Some(lhs), Some(rhs)) = (apply_p(&prod), e0_product(ca, cb)) else {
                pairs_skipped += 1;
                continue;
            };
            pairs_checked += 1;
            if lhs != rhs {
                products_ok = false;
            }
        }
    }
    Ok(ReductionReport {
        matches: onto && unit_ok && products_ok,
        onto,
        unit_ok,
        pairs_checked,
        pairs_skipped,
        elements_skipped,
        in_window_only: pairs_skipped > 0 || elements_skipped > 0 || !e.complete || !e0.complete,
    })
}

// ---------------------------------------------------------------------------
// Generation witnesses
// ---------------------------------------------------------------------------

/// A bounded complex of locally free modules with zero differentials: a
/// finite direct sum of summands placed in single cohomological degrees.
#[derive(Debug, Clone)]
pub struct BoundedComplex {
    pub name: String,
    pub summands: Vec<(i64, LocallyFreeModule)>,
}

impl BoundedComplex {
    pub fn shifted(degree: i64, module: LocallyFreeModule) -> BoundedComplex {
        let name = if degree == 0 {
            format!("{}[0]", module.name)
        } else {
            format!("{}[{}]", module.name, -degree)
        };
        BoundedComplex {
            name,
            summands: vec![(degree, module)],
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenerationReport {
    /// fully-enumerated total dimension of `H^p` of the Hom complex
    pub dims: BTreeMap<i64, usize>,
    /// the largest degree with a nonvanishing fully-enumerated group
    pub witness: Option<i64>,
    pub in_window_only: bool,
}

/// Looks for a nonvanishing `H^p` of the Hom complex against the test
/// object; the largest such `p` is the witness. All-vanishing in the
/// window is inconclusive, never a disproof.
pub fn generation_check(
    scheme: &NcScheme,
    f: &LocallyFreeModule,
    x: &BoundedComplex,
    window: &Window,
    pmax: usize,
) -> Result<GenerationReport> {
    let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
    let mut in_window_only = false;
    for (d, m) in &x.summands {
        for c in &ext(scheme, f, m, window, pmax)? {
            if c.capped {
                in_window_only = true;
                continue;
            }
            *dims.entry(*d + c.p as i64).or_insert(0) += c.dim;
        }
    }
    let witness = dims.iter().rev().find(|(_, &v)| v > 0).map(|(p, _)| *p);
    Ok(GenerationReport {
        dims,
        witness,
        in_window_only,
    })
}

// ---------------------------------------------------------------------------
// Images of the Hom functor
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PhiDegree {
    pub p: i64,
    pub dim: usize,
    /// right action of each basis element of `E`, in basis order
    pub actions: Vec<Mat>,
    pub t_mat: Mat,
    pub boundary: bool,
}

#[derive(Debug, Clone)]
pub struct PhiImage {
    pub object: String,
    pub degrees: Vec<PhiDegree>,
    /// the action matrices satisfy the unit, the structure constants, and
    /// commute with `t`
    pub action_ok: bool,
    /// alternating dimensions match the Hom-term Euler characteristic
    pub euler_ok: bool,
    pub in_window_only: bool,
}

/// Cohomology of the Hom complex against the test object, carrying its
/// right module structure over the endomorphism algebra.
pub fn phi_image(
    scheme: &NcScheme,
    f: &LocallyFreeModule,
    e: &EndomorphismAlgebra,
    x: &BoundedComplex,
    window: &Window,
) -> Result<PhiImage> {
    let field = e.field;
    let top = scheme.poset.len() - 1;
    let mut per_summand = Vec::new();
    let mut all_degrees: BTreeSet<i64> = BTreeSet::new();
    for (d, m) in &x.summands {
        let pieces = ext(scheme, f, m, window, top)?;
        for c in &pieces {
            all_degrees.insert(*d + c.p as i64);
        }
        per_summand.push((*d, m, pieces));
    }
    let mut in_window_only = false;
    let mut degrees = Vec::new();
    for p in all_degrees {
        let mut dim = 0usize;
        let mut boundary = false;
        let mut act_blocks: Vec<Vec<Mat>> = vec![Vec::new(); e.dim];
        let mut t_blocks = Vec::new();
        for (d, m, pieces) in &per_summand {
            let q = p - d;
            if q < 0 || q as usize > top {
                continue;
            }
            let q = q as usize;
            for c in pieces.iter().filter(|c| c.p == q) {
                dim += c.dim;
                in_window_only |= c.capped;
            }
            for (ei, endo) in e.basis.iter().enumerate() {
                let (mat, bnd) = endo_action(scheme, f, m, window, pieces, q, endo)?;
                boundary |= bnd;
                act_blocks[ei].push(mat);
            }
            let (tm, bnd) = t_action(scheme, f, m, window, pieces, q)?;
            boundary |= bnd;
            t_blocks.push(tm);
        }
        in_window_only |= boundary;
        degrees.push(PhiDegree {
            p,
            dim,
            actions: act_blocks
                .into_iter()
                .map(|blocks| block_diag(field, &blocks))
                .collect(),
            t_mat: block_diag(field, &t_blocks),
            boundary,
        });
    }
    // right action contravariance: the matrix of `x . (a b)` is
    // `M_b M_a`, compared against the structure constants
    let mut cmap: BTreeMap<(usize, usize), Vec<(usize, Scalar)>> = BTreeMap::new();
    for (a, b, c, s) in &e.constants {
        cmap.entry((*a, *b)).or_default().push((*c, s.clone()));
    }
    let mut action_ok = true;
    for deg in &degrees {
        if deg.dim == 0 {
            continue;
        }
        let mut uact = Mat::zero(field, deg.dim, deg.dim);
        for (a, s) in e.unit.iter().enumerate() {
            if !s.is_zero() {
                acc_scaled(&mut uact, &deg.actions[a], s);
            }
        }
        if !mat_eq(&uact, &Mat::identity(field, deg.dim)) {
            action_ok = false;
        }
        for a in 0..e.dim {
            for b in 0..e.dim {
                let lhs = deg.actions[b].mul(&deg.actions[a]);
                let mut rhs = Mat::zero(field, deg.dim, deg.dim);
                if let Some(list) = cmap.get(&(a, b)) {
                    for (c, s) in list {
                        acc_scaled(&mut rhs, &deg.actions[*c], s);
                    }
                }
                if !mat_eq(&lhs, &rhs) {
                    action_ok = false;
                }
            }
            if !mat_eq(
                &deg.t_mat.mul(&deg.actions[a]),
                &deg.actions[a].mul(&deg.t_mat),
            ) {
                action_ok = false;
            }
        }
    }
    let sign = |p: i64| if p.rem_euclid(2) == 0 { 1i64 } else { -1 };
    let chi_h: i64 = degrees.iter().map(|d| sign(d.p) * d.dim as i64).sum();
    let mut chi_terms = 0i64;
    for (d, m, _) in &per_summand {
        for w in window.weights() {
            chi_terms += sign(*d) * euler_characteristic(scheme, f, m, window, w)?;
        }
    }
    Ok(PhiImage {
        object: x.name.clone(),
        degrees,
        action_ok,
        euler_ok: chi_h == chi_terms,
        in_window_only,
    })
}

/// The right action of one global endomorphism on `Ext^p(F, N)` across
/// the window weights: every representative is composed chartwise with
/// the endomorphism and re-expressed modulo coboundaries at the shifted
/// weight.
fn endo_action(
    scheme: &NcScheme,
    f: &LocallyFreeModule,
    n: &LocallyFreeModule,
    window: &Window,
    pieces: &[CohomologyPiece],
    p: usize,
    endo: &EndoBasisElt,
) -> Result<(Mat, bool)> {
    let skel = TupleSkeleton::new(scheme)?;
    let ring = scheme.ring();
    let field = ring.base;
    let at_p: Vec<&CohomologyPiece> = pieces.iter().filter(|c| c.p == p).collect();
    let total: usize = at_p.iter().map(|c| c.dim).sum();
    let mut offsets = BTreeMap::new();
    let mut off = 0usize;
    for c in &at_p {
        offsets.insert(c.weight, (off, *c));
        off += c.dim;
    }
    let mut mat = Mat::zero(field, total, total);
    let mut boundary = false;
    let tuples = &skel.degrees[p];
    for c in &at_p {
        if c.dim == 0 {
            continue;
        }
        let (src_off, _) = offsets[&c.weight];
        let w1 = c.weight + endo.weight;
        let Some(&(dst_off, target)) = offsets.get(&w1) else {
            boundary = true;
            continue;
        };
        let img_cols: Vec<Vec<Scalar>> = if p == 0 {
            Vec::new()
        } else {
            let (d_prev, over) = hom_differential(scheme, f, n, &skel, p - 1, w1, window.length_cap)?;
            boundary |= over;
            (0..d_prev.cols()).map(|cc| d_prev.col(cc)).collect()
        };
        let mut solve_mat = Mat::zero(field, target.basis.len(), target.dim + img_cols.len());
        for (j, rep) in target.representatives.iter().enumerate() {
            for (r, s) in rep.iter().enumerate() {
                solve_mat.set(r, j, s.clone());
            }
        }
        for (j, col) in img_cols.iter().enumerate() {
            for (r, s) in col.iter().enumerate() {
                solve_mat.set(r, target.dim + j, s.clone());
            }
        }
        for (ci, rep) in c.representatives.iter().enumerate() {
            let mut shifted = vec![field.zero(); target.basis.len()];
            let mut over = false;
            for (ti, (_, m)) in tuples.iter().enumerate() {
                let mut h = ElemMat::zero(n.rank, f.rank);
                let mut any = false;
                for (bi, s) in rep.iter().enumerate() {
                    if s.is_zero() || c.basis[bi].tuple != ti {
                        continue;
                    }
                    let el = &c.basis[bi];
                    let mut entry = h.get(el.a, el.b).clone();
                    entry.add_term(el.word.clone(), ring.t_term(s.clone(), el.tpow));
                    h.set(el.a, el.b, entry);
                    any = true;
                }
                if !any {
                    continue;
                }
                let alg = &scheme.algebras[*m];
                let comp = h.mul(&endo.mats[*m], alg)?;
                let block: Vec<HomBasisElt> = target
                    .basis
                    .iter()
                    .filter(|e| e.tuple == ti)
                    .cloned()
                    .collect();
                let positions: Vec<usize> = target
                    .basis
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.tuple == ti)
                    .map(|(i, _)| i)
                    .collect();
                let v = hom_matrix_coords(scheme, f, n, &comp, &block, &mut over);
                for (pos, s) in positions.iter().zip(v) {
                    if !s.is_zero() {
                        shifted[*pos] = shifted[*pos].add(&s);
                    }
                }
            }
            boundary |= over;
            let sol = solve_mat.solve(&shifted).ok_or_else(|| {
                NcError::Input("endomorphism image of a cocycle is not a cocycle class".into())
            })?;
            for (j, s) in sol.iter().take(target.dim).enumerate() {
                if !s.is_zero() {
                    mat.set(dst_off + j, src_off + ci, s.clone());
                }
            }
        }
    }
    Ok((mat, boundary))
}

fn block_diag(field: Field, blocks: &[Mat]) -> Mat {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = Mat::zero(field, n, n);
    let mut off = 0;
    for b in blocks {
        for r in 0..b.rows() {
            for c in 0..b.cols() {
                let s = b.get(r, c);
                if !s.is_zero() {
                    out.set(off + r, off + c, s.clone());
                }
            }
        }
        off += b.rows();
    }
    out
}

fn mat_eq(a: &Mat, b: &Mat) -> bool {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return false;
    }
    (0..a.rows()).all(|r| (0..a.cols()).all(|c| a.get(r, c) == b.get(r, c)))
}

fn acc_scaled(acc: &mut Mat, m: &Mat, s: &Scalar) {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = m.get(r, c);
            if v.is_zero() {
                continue;
            }
            let cur = acc.get(r, c).add(&v.mul(s));
            acc.set(r, c, cur);
        }
    }
}
