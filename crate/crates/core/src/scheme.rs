//! Finite meet-posets, schemes of glued graded algebras, and deformation
//! towers over the Artin chain `k[t]/(t^n)`.
//!
//! Convention: `i < j` means the `i`-th open set is contained in the
//! `j`-th, and the gluing `phi_{ij}: A_j -> A_i` restricts sections.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraHom, GradedAlgebra};
use crate::coeff::ArtinRing;
use crate::error::{NcError, Result};

/// The finite weight window plus word-length cap inside which all
/// computations are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
    pub length_cap: usize,
}

impl Window {
    pub fn new(lo: i64, hi: i64, length_cap: usize) -> Result<Window> {
        if lo > hi {
            return Err(NcError::Input(format!("empty window {lo}:{hi}")));
        }
        Ok(Window { lo, hi, length_cap })
    }

    pub fn weights(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn contains(&self, w: i64) -> bool {
        self.lo <= w && w <= self.hi
    }
}

/// A finite poset in which every pair has a greatest lower bound,
/// supplied as an explicit meet table and verified at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetPoset {
    elements: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
}

impl MeetPoset {
    /// Builds from declared order pairs `(a, b)` meaning `a <= b` and an
    /// explicit meet table. The order is closed off reflexively and
    /// transitively before the axioms are checked.
    pub fn new(
        elements: Vec<String>,
        order_pairs: &[(usize, usize)],
        meet_table: Vec<Vec<usize>>,
    ) -> Result<MeetPoset> {
        let d = elements.len();
        if d == 0 {
            return Err(NcError::Input("empty poset".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &elements {
            if !seen.insert(e.clone()) {
                return Err(NcError::Input(format!("duplicate poset element `{e}`")));
            }
        }
        let mut leq = vec![vec![false; d]; d];
        for i in 0..d {
            leq[i][i] = true;
        }
        for &(a, b) in order_pairs {
            if a >= d || b >= d {
                return Err(NcError::Input(format!("order pair ({a},{b}) out of range")));
            }
            leq[a][b] = true;
        }
        // transitive closure
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(NcError::Input(format!(
                        "not antisymmetric: `{}` and `{}` are mutually comparable",
                        elements[i], elements[j]
                    )));
                }
            }
        }
        if meet_table.len() != d || meet_table.iter().any(|r| r.len() != d) {
            return Err(NcError::Input("meet table has wrong shape".into()));
        }
        let poset = MeetPoset {
            elements,
            leq,
            meet: meet_table,
        };
        poset.check_meet_axioms()?;
        Ok(poset)
    }

    /// Convenience constructor that computes the meet table from the order.
    pub fn from_order(elements: Vec<String>, order_pairs: &[(usize, usize)]) -> Result<MeetPoset> {
        let d = elements.len();
        let probe = MeetPoset::new(
            elements.clone(),
            order_pairs,
            vec![(0..d).map(|_| 0).collect(); d],
        );
        // reuse the closure logic but skip the meet check on the dummy table
        let leq = match probe {
            Ok(p) => p.leq,
            Err(e) => {
                // the dummy table may fail the meet axioms; rebuild the
                // closure by hand in that case
                if let NcError::Input(ref msg) = e {
                    if !msg.contains("greatest lower bound") && !msg.contains("meet table") {
                        return Err(e);
                    }
                }
                let mut leq = vec![vec![false; d]; d];
                for i in 0..d {
                    leq[i][i] = true;
                }
                for &(a, b) in order_pairs {
                    if a >= d || b >= d {
                        return Err(NcError::Input(format!("order pair ({a},{b}) out of range")));
                    }
                    leq[a][b] = true;
                }
                for k in 0..d {
                    for i in 0..d {
                        for j in 0..d {
                            if leq[i][k] && leq[k][j] {
                                leq[i][j] = true;
                            }
                        }
                    }
                }
                leq
            }
        };
        let mut meet = vec![vec![0usize; d]; d];
        for i in 0..d {
            for j in 0..d {
                let lower: Vec<usize> = (0..d).filter(|&l| leq[l][i] && leq[l][j]).collect();
                let glb = lower
                    .iter()
                    .copied()
                    .find(|&m| lower.iter().all(|&l| leq[l][m]))
                    .ok_or_else(|| {
                        NcError::Input(format!(
                            "`{}` and `{}` have no greatest lower bound",
                            elements[i], elements[j]
                        ))
                    })?;
                meet[i][j] = glb;
            }
        }
        MeetPoset::new(elements, order_pairs, meet)
    }

    fn check_meet_axioms(&self) -> Result<()> {
        let d = self.len();
        for i in 0..d {
            for j in 0..d {
                let m = self.meet[i][j];
                if m >= d {
                    return Err(NcError::Input(format!("meet table entry {m} out of range")));
                }
                if !self.leq[m][i] || !self.leq[m][j] {
                    return Err(NcError::Input(format!(
                        "meet table: `{}` is not a lower bound of `{}`, `{}`",
                        self.elements[m], self.elements[i], self.elements[j]
                    )));
                }
                for l in 0..d {
                    if self.leq[l][i] && self.leq[l][j] && !self.leq[l][m] {
                        return Err(NcError::Input(format!(
                            "meet table: `{}` is not the greatest lower bound of `{}`, `{}`",
                            self.elements[m], self.elements[i], self.elements[j]
                        )));
                    }
                }
                if self.meet[j][i] != m {
                    return Err(NcError::Input("meet table not commutative".into()));
                }
            }
            if self.meet[i][i] != i {
                return Err(NcError::Input("meet table not idempotent".into()));
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if self.meet[self.meet[i][j]][k] != self.meet[i][self.meet[j][k]] {
                        return Err(NcError::Input("meet table not associative".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i][j]
    }

    pub fn meet_all(&self, tuple: &[usize]) -> usize {
        let mut m = tuple[0];
        for &t in &tuple[1..] {
            m = self.meet(m, t);
        }
        m
    }

    /// All strictly increasing `(p+1)`-tuples of enumeration indices, in
    /// lexicographic order, each with the meet of its members.
    pub fn tuples(&self, p: usize) -> Result<Vec<(Vec<usize>, usize)>> {
        let d = self.len();
        if p >= d {
            return Err(NcError::Input(format!(
                "tuple degree {p} out of range for a poset of size {d}"
            )));
        }
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..=p).collect();
        loop {
            out.push((cur.clone(), self.meet_all(&cur)));
            // next strictly increasing tuple
            let mut pos = p + 1;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                if cur[pos] + (p - pos) + 1 < d {
                    cur[pos] += 1;
                    for q in pos + 1..=p {
                        cur[q] = cur[q - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// All strict order chains `i_0 < i_1 < ... < i_p` in the poset, in
    /// lexicographic index order.
    pub fn chains(&self, p: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.chains_rec(p, &mut cur, &mut out);
        out
    }

    fn chains_rec(&self, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p + 1 {
            out.push(cur.clone());
            return;
        }
        for next in 0..self.len() {
            if cur.last().is_none_or(|&l| self.lt(l, next)) {
                cur.push(next);
                self.chains_rec(p, cur, out);
                cur.pop();
            }
        }
    }
}

/// Validation outcome: failed checks plus soft warnings (cap or window
/// insufficiency). A run with failures is still a successful computation.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn warn(&mut self, msg: String) {
        if !self.warnings.contains(&msg) {
            self.warnings.push(msg);
        }
    }
}

/// Glued algebras over a meet-poset. A gluing `phi_{ij}: A_j -> A_i` is
/// required for every strict pair `i < j`; flatness and birationality of
/// the gluings are declared assumptions validated only by surrogates.
#[derive(Debug, Clone)]
pub struct NcScheme {
    pub poset: MeetPoset,
    pub algebras: Vec<GradedAlgebra>,
    pub gluings: BTreeMap<(usize, usize), AlgebraHom>,
}

impl NcScheme {
    pub fn new(
        poset: MeetPoset,
        algebras: Vec<GradedAlgebra>,
        gluings: BTreeMap<(usize, usize), AlgebraHom>,
    ) -> Result<NcScheme> {
        if algebras.len() != poset.len() {
            return Err(NcError::Input(format!(
                "poset has {} elements but {} algebras were given",
                poset.len(),
                algebras.len()
            )));
        }
        let ring = *algebras[0].ring();
        for a in &algebras {
            if *a.ring() != ring {
                return Err(NcError::Input(format!(
                    "algebra `{}` uses a different coefficient ring",
                    a.name
                )));
            }
        }
        for i in 0..poset.len() {
            for j in 0..poset.len() {
                if poset.lt(i, j) && !gluings.contains_key(&(i, j)) {
                    return Err(NcError::Input(format!(
                        "missing gluing for {} < {}",
                        poset.name(i),
                        poset.name(j)
                    )));
                }
            }
        }
        for &(i, j) in gluings.keys() {
            if !poset.lt(i, j) {
                return Err(NcError::Input(format!(
                    "gluing declared for non-comparable pair ({i},{j})"
                )));
            }
        }
        Ok(NcScheme {
            poset,
            algebras,
            gluings,
        })
    }

    pub fn ring(&self) -> &ArtinRing {
        self.algebras[0].ring()
    }

    /// `phi_{ij}` for `i <= j`, with the identity at `i = j`.
    pub fn gluing(&self, i: usize, j: usize) -> Result<AlgebraHom> {
        if i == j {
            return Ok(AlgebraHom::identity(&self.algebras[i]));
        }
        self.gluings
            .get(&(i, j))
            .cloned()
            .ok_or_else(|| NcError::Input(format!("no gluing for pair ({i},{j})")))
    }

    /// Windowed validation: homomorphism property and confluence of every
    /// chart, the cocycle identity on all chains, and the surjectivity
    /// surrogate for the overlap-product assumption.
    pub fn validate(&self, window: &Window) -> Result<ValidationReport> {
        let mut report = ValidationReport::default();
        for a in &self.algebras {
            let bad = a.system.check_local_confluence(window.hi)?;
            for amb in bad {
                report.failures.push(format!(
                    "chart {}: unresolved overlap `{}`",
                    a.name,
                    a.alphabet().word_string(&amb.word)
                ));
            }
        }
        for (&(i, j), hom) in &self.gluings {
            if let Err(e) = hom.check(&self.algebras[j], &self.algebras[i]) {
                report.failures.push(format!("gluing ({i},{j}): {e}"));
            }
        }
        // cocycle phi_{ij} phi_{jk} = phi_{ik} letterwise on chains i<j<k
        for chain in self.poset.chains(2) {
            let (i, j, k) = (chain[0], chain[1], chain[2]);
            let fij = self.gluing(i, j)?;
            let fjk = self.gluing(j, k)?;
            let fik = self.gluing(i, k)?;
            let composite = fij.compose(&fjk, &self.algebras[i])?;
            for (l, (a, b)) in composite.images.iter().zip(&fik.images).enumerate() {
                if a != b {
                    report.failures.push(format!(
                        "cocycle fails on chain {}<{}<{} at letter `{}`: {} vs {}",
                        self.poset.name(i),
                        self.poset.name(j),
                        self.poset.name(k),
                        self.algebras[k].alphabet().letters[l],
                        a.display(self.algebras[i].alphabet()),
                        b.display(self.algebras[i].alphabet())
                    ));
                }
            }
        }
        self.check_overlap_surjectivity(window, &mut report)?;
        Ok(report)
    }

    /// Surrogate for bijectivity of `A_j (x) A_k -> A_i` at `i = j /\ k`:
    /// in every window weight, products of chart sections must span the
    /// graded piece of the overlap chart.
    fn check_overlap_surjectivity(
        &self,
        window: &Window,
        report: &mut ValidationReport,
    ) -> Result<()> {
        let ring = *self.ring();
        let cap = window.length_cap;
        for j in 0..self.poset.len() {
            for k in j + 1..self.poset.len() {
                let i = self.poset.meet(j, k);
                if i == j || i == k {
                    continue; // comparable pair: the map is trivially onto
                }
                let fij = self.gluing(i, j)?;
                let fik = self.gluing(i, k)?;
                let target = &self.algebras[i];
                for w in window.weights() {
                    let (basis, capped) = target.graded_k_basis(w, cap);
                    if capped {
                        report.warn(format!(
                            "chart {} weight {w}: length cap {cap} may omit basis words",
                            target.name
                        ));
                    }
                    if basis.is_empty() {
                        continue;
                    }
                    let mut span = crate::linalg::SpanBuilder::new();
                    // t-multiples push target word weights below the
                    // window floor; extend the source range to match
                    let ext_lo = window.lo - (ring.order as i64 - 1) * ring.t_weight;
                    for m in 0..ring.order {
                        for w1 in ext_lo..=window.hi {
                            let w2 = w - (m as i64) * ring.t_weight - w1;
                            if w2 < ext_lo || w2 > window.hi {
                                continue;
                            }
                            let (bj, _) = self.algebras[j].graded_words(w1, cap);
                            let (bk, _) = self.algebras[k].graded_words(w2, cap);
                            for wj in &bj {
                                let aj = fij.apply(
                                    &crate::rewrite::FreeElem::word(wj.clone(), ring.one()),
                                    target,
                                )?;
                                for wk in &bk {
                                    let ak = fik.apply(
                                        &crate::rewrite::FreeElem::word(wk.clone(), ring.one()),
                                        target,
                                    )?;
                                    let prod = target
                                        .multiply(&aj, &ak)?
                                        .scale(&ring.t_term(ring.base.one(), m));
                                    match target.vector_of(&prod, &basis) {
                                        Ok(v) => {
                                            span.insert(&v);
                                        }
                                        Err(_) => report.warn(format!(
                                            "chart {} weight {w}: product escapes the capped basis",
                                            target.name
                                        )),
                                    }
                                }
                            }
                        }
                    }
                    if span.dim() < basis.len() {
                        // name one missed basis vector as a witness
                        let field = ring.base;
                        let witness = (0..basis.len())
                            .find(|&n| {
                                let mut v = vec![field.zero(); basis.len()];
                                v[n] = field.one();
                                !span.contains(&v)
                            })
                            .map(|n| {
                                let (word, tp) = &basis[n];
                                format!("{}*t^{tp}", target.alphabet().word_string(word))
                            })
                            .unwrap_or_else(|| "?".into());
                        report.failures.push(format!(
                            "overlap products {}x{} span only {}/{} of chart {} at weight {w} (missing e.g. {witness})",
                            self.poset.name(j),
                            self.poset.name(k),
                            span.dim(),
                            basis.len(),
                            target.name
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Coefficientwise truncation of every chart and gluing into
    /// `k[t]/(t^order)`.
    pub fn truncate(&self, order: u32) -> Result<NcScheme> {
        let ring = self.ring().truncated(order);
        let algebras = self
            .algebras
            .iter()
            .map(|a| a.truncate(order))
            .collect::<Result<Vec<_>>>()?;
        let mut gluings = BTreeMap::new();
        for (&key, hom) in &self.gluings {
            let images = hom
                .images
                .iter()
                .map(|e| e.reduce(&ring))
                .collect::<Result<Vec<_>>>()?;
            gluings.insert(key, AlgebraHom { images });
        }
        NcScheme::new(self.poset.clone(), algebras, gluings)
    }
}

/// A chain of schemes over `k[t]/(t^n)` for `n = 1..N`, each level the
/// exact truncation of the next.
#[derive(Debug, Clone)]
pub struct DeformationTower {
    pub levels: Vec<NcScheme>,
}

impl DeformationTower {
    pub fn new(levels: Vec<NcScheme>) -> Result<DeformationTower> {
        if levels.is_empty() {
            return Err(NcError::Input("tower has no levels".into()));
        }
        for (m, level) in levels.iter().enumerate() {
            if level.ring().order != (m + 1) as u32 {
                return Err(NcError::Input(format!(
                    "tower level {} must live over order {}, found {}",
                    m + 1,
                    m + 1,
                    level.ring().order
                )));
            }
        }
        Ok(DeformationTower { levels })
    }

    /// Builds the tower of all truncations of a single top-level scheme.
    pub fn from_top(top: NcScheme) -> Result<DeformationTower> {
        let n = top.ring().order;
        let mut levels = Vec::with_capacity(n as usize);
        for m in 1..n {
            levels.push(top.truncate(m)?);
        }
        levels.push(top);
        DeformationTower::new(levels)
    }

    pub fn top(&self) -> &NcScheme {
        self.levels.last().unwrap()
    }

    /// Per-level scheme validation, truncation-exactness between levels,
    /// and the windowed flatness surrogate: the `k`-dimension of each
    /// graded piece at level `n` must equal the free-module count
    /// `sum_{m<n} dim_0(w - m*wt(t))` computed from level 1.
    pub fn validate(&self, window: &Window) -> Result<ValidationReport> {
        let mut report = ValidationReport::default();
        for (m, level) in self.levels.iter().enumerate() {
            let sub = level.validate(window)?;
            for f in sub.failures {
                report.failures.push(format!("level {}: {f}", m + 1));
            }
            for w in sub.warnings {
                report.warn(format!("level {}: {w}", m + 1));
            }
        }
        for m in 0..self.levels.len() - 1 {
            self.check_truncation(m, &mut report)?;
        }
        self.check_flatness(window, &mut report);
        Ok(report)
    }

    /// Compares level `m` (0-based) against the truncation of level `m+1`.
    fn check_truncation(&self, m: usize, report: &mut ValidationReport) -> Result<()> {
        let lower = &self.levels[m];
        let upper = self.levels[m + 1].truncate((m + 1) as u32)?;
        if lower.poset != upper.poset {
            report.failures.push(format!(
                "levels {} and {} disagree on the poset",
                m + 1,
                m + 2
            ));
            return Ok(());
        }
        for (a, b) in lower.algebras.iter().zip(&upper.algebras) {
            if a.alphabet() != b.alphabet() {
                report.failures.push(format!(
                    "level {} chart {}: alphabet differs from the truncation of level {}",
                    m + 1,
                    a.name,
                    m + 2
                ));
                continue;
            }
            let mut lhs_a: Vec<_> = a.system.rules.iter().map(|r| &r.lhs).collect();
            let mut lhs_b: Vec<_> = b.system.rules.iter().map(|r| &r.lhs).collect();
            lhs_a.sort();
            lhs_b.sort();
            if lhs_a != lhs_b {
                report.failures.push(format!(
                    "level {} chart {}: rule set differs from the truncation of level {}",
                    m + 1,
                    a.name,
                    m + 2
                ));
                continue;
            }
            for ra in &a.system.rules {
                let rb = b
                    .system
                    .rules
                    .iter()
                    .find(|r| r.lhs == ra.lhs)
                    .expect("lhs sets match");
                if ra.rhs != rb.rhs {
                    report.failures.push(format!(
                        "level {} chart {}: rule `{} -> ...` is not the truncation of level {}",
                        m + 1,
                        a.name,
                        a.alphabet().word_string(&ra.lhs),
                        m + 2
                    ));
                }
            }
        }
        for (key, ha) in &lower.gluings {
            let Some(hb) = upper.gluings.get(key) else {
                report.failures.push(format!(
                    "level {} gluing {key:?} missing at level {}",
                    m + 1,
                    m + 2
                ));
                continue;
            };
            if ha.images != hb.images {
                report.failures.push(format!(
                    "level {} gluing {key:?}: images are not the truncation of level {}",
                    m + 1,
                    m + 2
                ));
            }
        }
        Ok(())
    }

    fn check_flatness(&self, window: &Window, report: &mut ValidationReport) {
        let base = &self.levels[0];
        for (m, level) in self.levels.iter().enumerate().skip(1) {
            let n = (m + 1) as u32;
            let tw = level.ring().t_weight;
            for (ai, a0) in level.algebras.iter().zip(&base.algebras) {
                for w in window.weights() {
                    let (dim_n, warn_n) = ai.graded_dim_k(w, window.length_cap);
                    let mut expect = 0usize;
                    let mut warned = warn_n;
                    for j in 0..n {
                        let (d0, warn0) = a0.graded_dim_k(w - (j as i64) * tw, window.length_cap);
                        expect += d0;
                        warned |= warn0;
                    }
                    if warned {
                        report.warn(format!(
                            "flatness surrogate at chart {} weight {w}: length cap reached",
                            ai.name
                        ));
                    }
                    if dim_n != expect {
                        report.failures.push(format!(
                            "flatness surrogate fails at level {n} chart {} weight {w}: dim {dim_n}, expected {expect}",
                            ai.name
                        ));
                    }
                }
            }
        }
    }
}
