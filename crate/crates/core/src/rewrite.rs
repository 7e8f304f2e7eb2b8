//! Noncommutative words and weight-homogeneous rewriting systems.
//!
//! A rewrite system presents an associative algebra over the Artin
//! coefficient ring: elements are `R`-combinations of words, rules replace
//! a word by a strictly smaller combination (degree-lexicographic order,
//! with letter weights as the degree), and local confluence is certified
//! by joining all overlap ambiguities up to a weight bound.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::coeff::{ArtinElem, ArtinRing};
use crate::error::{NcError, Result};

/// Generator names with a fixed total order and integer weights.
/// Negative weights are allowed (Laurent-type charts).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    pub letters: Vec<String>,
    pub weights: Vec<i64>,
}

impl Alphabet {
    pub fn new(letters: Vec<String>, weights: Vec<i64>) -> Result<Alphabet> {
        if letters.len() != weights.len() {
            return Err(NcError::Input("letters/weights length mismatch".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &letters {
            if !seen.insert(l.clone()) {
                return Err(NcError::Input(format!("duplicate letter `{l}`")));
            }
        }
        Ok(Alphabet { letters, weights })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<u8> {
        self.letters.iter().position(|l| l == name).map(|i| i as u8)
    }

    pub fn word_weight(&self, w: &[u8]) -> i64 {
        w.iter().map(|&l| self.weights[l as usize]).sum()
    }

    pub fn word_string(&self, w: &[u8]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut s = String::new();
        for (k, &l) in w.iter().enumerate() {
            if k > 0 {
                s.push('*');
            }
            let _ = write!(s, "{}", self.letters[l as usize]);
        }
        s
    }

    /// Degree-lexicographic comparison: weight first, then length, then
    /// letter order. Compatible with concatenation on both sides, which
    /// is what guarantees termination of reduction.
    pub fn word_cmp(&self, a: &[u8], b: &[u8]) -> std::cmp::Ordering {
        self.word_weight(a)
            .cmp(&self.word_weight(b))
            .then(a.len().cmp(&b.len()))
            .then(a.cmp(b))
    }
}

pub type Word = Vec<u8>;

/// A formal `R`-combination of words. Always kept with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeElem {
    pub terms: BTreeMap<Word, ArtinElem>,
}

impl FreeElem {
    pub fn zero() -> FreeElem {
        FreeElem {
            terms: BTreeMap::new(),
        }
    }

    pub fn word(w: Word, c: ArtinElem) -> FreeElem {
        let mut e = FreeElem::zero();
        e.add_term(w, c);
        e
    }

    pub fn one(ring: &ArtinRing) -> FreeElem {
        FreeElem::word(Vec::new(), ring.one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: ArtinElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &FreeElem) -> FreeElem {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> FreeElem {
        FreeElem {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &FreeElem) -> FreeElem {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ArtinElem) -> FreeElem {
        let mut out = FreeElem::zero();
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a.mul(c));
        }
        out
    }

    /// Concatenation-bilinear product, not normalized.
    pub fn mul_raw(&self, other: &FreeElem) -> FreeElem {
        let mut out = FreeElem::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_term(w, ca.mul(cb));
            }
        }
        out
    }

    /// All total weights occurring among the terms, `t`-weight included.
    pub fn weights(&self, alphabet: &Alphabet) -> Vec<i64> {
        let mut ws = std::collections::BTreeSet::new();
        for (w, c) in &self.terms {
            let base = alphabet.word_weight(w);
            for (j, s) in c.coeffs.iter().enumerate() {
                if !s.is_zero() {
                    ws.insert(base + (j as i64) * c.ring.t_weight);
                }
            }
        }
        ws.into_iter().collect()
    }

    /// The single total weight when homogeneous; `None` for 0 or mixed.
    pub fn homogeneous_weight(&self, alphabet: &Alphabet) -> Option<i64> {
        let ws = self.weights(alphabet);
        if ws.len() == 1 {
            Some(ws[0])
        } else {
            None
        }
    }

    /// Coefficientwise truncation into a smaller Artin ring of the same tower.
    pub fn reduce(&self, target: &ArtinRing) -> crate::error::Result<FreeElem> {
        let mut out = FreeElem::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), crate::coeff::reduce_scalar(c, target)?);
        }
        Ok(out)
    }

    /// Coefficientwise canonical lift into a larger Artin ring.
    pub fn lift(&self, target: &ArtinRing) -> crate::error::Result<FreeElem> {
        let mut out = FreeElem::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), crate::coeff::canonical_lift(c, target)?);
        }
        Ok(out)
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        if self.is_zero() {
            return "0".into();
        }
        // deterministic: deg-lex order on words
        let mut words: Vec<&Word> = self.terms.keys().collect();
        words.sort_by(|a, b| alphabet.word_cmp(a, b));
        let mut parts = Vec::new();
        for w in words {
            let c = &self.terms[w];
            let cs = format!("{c}");
            let ws = alphabet.word_string(w);
            let part = if w.is_empty() {
                if c.coeffs.iter().skip(1).any(|x| !x.is_zero()) && !is_monomial_coeff(c) {
                    format!("({cs})")
                } else {
                    cs
                }
            } else if cs == "1" {
                ws
            } else if is_monomial_coeff(c) {
                format!("{cs}*{ws}")
            } else {
                format!("({cs})*{ws}")
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}

fn is_monomial_coeff(c: &ArtinElem) -> bool {
    c.coeffs.iter().filter(|x| !x.is_zero()).count() <= 1
}

/// `lhs -> rhs` with every `rhs` word strictly smaller than `lhs` in
/// deg-lex order and of the same total weight (`t` counted).
#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: FreeElem,
}

#[derive(Debug, Clone)]
pub struct RewriteSystem {
    pub alphabet: Alphabet,
    pub ring: ArtinRing,
    pub rules: Vec<RewriteRule>,
    pub step_budget: usize,
}

/// One unresolved overlap ambiguity from a confluence check.
#[derive(Debug, Clone)]
pub struct Ambiguity {
    pub rule_a: usize,
    pub rule_b: usize,
    pub word: Word,
    pub nf_a: FreeElem,
    pub nf_b: FreeElem,
}

impl RewriteSystem {
    pub fn new(
        alphabet: Alphabet,
        ring: ArtinRing,
        rules: Vec<RewriteRule>,
    ) -> Result<RewriteSystem> {
        let sys = RewriteSystem {
            alphabet,
            ring,
            rules,
            step_budget: 1_000_000,
        };
        sys.validate_rules()?;
        Ok(sys)
    }

    fn validate_rules(&self) -> Result<()> {
        for (i, rule) in self.rules.iter().enumerate() {
            if rule.lhs.is_empty() {
                return Err(NcError::Input(format!("rule {i}: empty lhs")));
            }
            let lw = self.alphabet.word_weight(&rule.lhs);
            for (w, c) in &rule.rhs.terms {
                for (j, s) in c.coeffs.iter().enumerate() {
                    if s.is_zero() {
                        continue;
                    }
                    let tw = self.alphabet.word_weight(w) + (j as i64) * self.ring.t_weight;
                    if tw != lw {
                        return Err(NcError::Input(format!(
                            "rule {i}: rhs term `{}`*t^{j} has weight {tw}, lhs has weight {lw}",
                            self.alphabet.word_string(w)
                        )));
                    }
                }
                if self.alphabet.word_cmp(w, &rule.lhs) != std::cmp::Ordering::Less {
                    return Err(NcError::Input(format!(
                        "rule {i}: rhs word `{}` is not smaller than lhs `{}` in deg-lex order",
                        self.alphabet.word_string(w),
                        self.alphabet.word_string(&rule.lhs)
                    )));
                }
            }
        }
        // inter-reduction: no lhs contains another rule's lhs as a subword
        for (i, a) in self.rules.iter().enumerate() {
            for (j, b) in self.rules.iter().enumerate() {
                if i != j && find_subword(&a.lhs, &b.lhs).is_some() && a.lhs.len() > b.lhs.len() {
                    return Err(NcError::Input(format!(
                        "rules not inter-reduced: lhs of rule {j} is a subword of lhs of rule {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Leftmost position where some rule's lhs occurs in `w`, with the rule
    /// of lowest index preferred at equal positions.
    fn find_redex(&self, w: &[u8]) -> Option<(usize, usize)> {
        for pos in 0..w.len() {
            for (ri, rule) in self.rules.iter().enumerate() {
                let l = rule.lhs.len();
                if pos + l <= w.len() && &w[pos..pos + l] == rule.lhs.as_slice() {
                    return Some((pos, ri));
                }
            }
        }
        None
    }

    /// Fully reduces `expr`. With confluence certified the result is
    /// independent of reduction order.
    pub fn normal_form(&self, expr: &FreeElem) -> Result<FreeElem> {
        let mut out = FreeElem::zero();
        let mut work: Vec<(Word, ArtinElem)> = expr
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        let mut steps = 0usize;
        while let Some((w, c)) = work.pop() {
            if c.is_zero() {
                continue;
            }
            match self.find_redex(&w) {
                None => out.add_term(w, c),
                Some((pos, ri)) => {
                    steps += 1;
                    if steps > self.step_budget {
                        return Err(NcError::StepBudget(self.step_budget));
                    }
                    let rule = &self.rules[ri];
                    let prefix = &w[..pos];
                    let suffix = &w[pos + rule.lhs.len()..];
                    for (rw, rc) in &rule.rhs.terms {
                        let mut nw = Vec::with_capacity(prefix.len() + rw.len() + suffix.len());
                        nw.extend_from_slice(prefix);
                        nw.extend_from_slice(rw);
                        nw.extend_from_slice(suffix);
                        work.push((nw, c.mul(rc)));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_normal_word(&self, w: &[u8]) -> bool {
        self.find_redex(w).is_none()
    }

    /// Diamond-lemma check: every overlap ambiguity of total weight at most
    /// `max_weight` is reduced both ways; distinct normal forms are reported.
    pub fn check_local_confluence(&self, max_weight: i64) -> Result<Vec<Ambiguity>> {
        let mut bad = Vec::new();
        for (ia, ra) in self.rules.iter().enumerate() {
            for (ib, rb) in self.rules.iter().enumerate() {
                // overlap: proper suffix of lhs_a = proper prefix of lhs_b
                for k in 1..ra.lhs.len().min(rb.lhs.len()) {
                    if ra.lhs[ra.lhs.len() - k..] != rb.lhs[..k] {
                        continue;
                    }
                    let mut w = ra.lhs.clone();
                    w.extend_from_slice(&rb.lhs[k..]);
                    if self.alphabet.word_weight(&w) > max_weight {
                        continue;
                    }
                    // reduce via rule a at position 0
                    let mut ea = ra.rhs.clone();
                    let suffix = FreeElem::word(rb.lhs[k..].to_vec(), self.ring.one());
                    ea = ea.mul_raw(&suffix);
                    // reduce via rule b at the overlap position
                    let prefix =
                        FreeElem::word(ra.lhs[..ra.lhs.len() - k].to_vec(), self.ring.one());
                    let eb = prefix.mul_raw(&rb.rhs);
                    let na = self.normal_form(&ea)?;
                    let nb = self.normal_form(&eb)?;
                    if na != nb {
                        bad.push(Ambiguity {
                            rule_a: ia,
                            rule_b: ib,
                            word: w,
                            nf_a: na,
                            nf_b: nb,
                        });
                    }
                }
            }
        }
        Ok(bad)
    }

    /// All weight-homogeneous normal words of the given weight with length
    /// at most `length_cap`, in deg-lex order. The second component flags
    /// cap insufficiency: some word at the cap either has this weight or
    /// could still reach it with further letters, so longer normal words
    /// may be missing.
    pub fn enumerate_normal_words(&self, weight: i64, length_cap: usize) -> (Vec<Word>, bool) {
        let mut found = Vec::new();
        let mut at_cap = false;
        let min_w: i64 = self.alphabet.weights.iter().copied().min().unwrap_or(0);
        let max_w: i64 = self.alphabet.weights.iter().copied().max().unwrap_or(0);
        let mut reach_cache: std::collections::HashMap<Word, u8> = Default::default();
        let mut stack: Vec<Word> = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            let ww = self.alphabet.word_weight(&w);
            if ww == weight {
                if w.len() == length_cap {
                    at_cap = true;
                }
                found.push(w.clone());
            }
            if w.len() >= length_cap {
                if self.extendable(&w, weight - ww, &mut reach_cache) {
                    at_cap = true;
                }
                continue;
            }
            let rem = (length_cap - w.len()) as i64;
            // reachability pruning: with at most `rem` further letters the
            // weight stays inside [ww + min(0, rem*min_w), ww + max(0, rem*max_w)]
            let lo = ww + (rem * min_w).min(0);
            let hi = ww + (rem * max_w).max(0);
            if weight < lo || weight > hi {
                // out of reach within the cap, but maybe not beyond it
                if self.extendable(&w, weight - ww, &mut reach_cache) {
                    at_cap = true;
                }
                continue;
            }
            for l in (0..self.alphabet.len() as u8).rev() {
                let mut nw = w.clone();
                nw.push(l);
                // only suffixes ending at the new letter can create a redex
                let redex = self
                    .rules
                    .iter()
                    .any(|r| r.lhs.len() <= nw.len() && nw[nw.len() - r.lhs.len()..] == r.lhs[..]);
                if !redex {
                    stack.push(nw);
                }
            }
        }
        found.sort_by(|a, b| self.alphabet.word_cmp(a, b));
        (found, at_cap)
    }

    /// Conservative reachability: starting from the normal word `w`, can
    /// appending letters (without ever creating a redex) change the
    /// weight by `diff`? Decided by sign analysis on the suffix automaton
    /// whose states are the last `max_lhs_len - 1` letters.
    fn extendable(
        &self,
        w: &Word,
        diff: i64,
        cache: &mut std::collections::HashMap<Word, u8>,
    ) -> bool {
        const POS: u8 = 1;
        const NEG: u8 = 2;
        const ZER: u8 = 4;
        let k = self
            .rules
            .iter()
            .map(|r| r.lhs.len())
            .max()
            .unwrap_or(1)
            .saturating_sub(1);
        let state = |word: &[u8]| -> Word { word[word.len().saturating_sub(k)..].to_vec() };
        let s0 = state(w);
        let flags = match cache.get(&s0) {
            Some(&f) => f,
            None => {
                let mut seen = std::collections::BTreeSet::new();
                let mut queue = vec![s0.clone()];
                let mut f = 0u8;
                while let Some(s) = queue.pop() {
                    if !seen.insert(s.clone()) {
                        continue;
                    }
                    for l in 0..self.alphabet.len() as u8 {
                        let mut nw = s.clone();
                        nw.push(l);
                        let redex = self.rules.iter().any(|r| {
                            r.lhs.len() <= nw.len() && nw[nw.len() - r.lhs.len()..] == r.lhs[..]
                        });
                        if redex {
                            continue;
                        }
                        let wt = self.alphabet.weights[l as usize];
                        f |= if wt > 0 {
                            POS
                        } else if wt < 0 {
                            NEG
                        } else {
                            ZER
                        };
                        queue.push(state(&nw));
                    }
                }
                cache.insert(s0, f);
                f
            }
        };
        let (pos, neg, zer) = (flags & POS != 0, flags & NEG != 0, flags & ZER != 0);
        if diff > 0 {
            pos
        } else if diff < 0 {
            neg
        } else {
            zer || (pos && neg)
        }
    }
}

pub fn find_subword(hay: &[u8], needle: &[u8]) -> Option<usize> {
    if needle.is_empty() || needle.len() > hay.len() {
        return None;
    }
    (0..=hay.len() - needle.len()).find(|&i| &hay[i..i + needle.len()] == needle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Field;

    fn ring(order: u32, tw: i64) -> ArtinRing {
        ArtinRing::new(Field::Rationals, order, tw).unwrap()
    }

    /// Laurent pair x (weight 1), z (weight -1) with xz = zx = 1.
    fn laurent(r: ArtinRing) -> RewriteSystem {
        let a = Alphabet::new(vec!["x".into(), "z".into()], vec![1, -1]).unwrap();
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
        RewriteSystem::new(a, r, rules).unwrap()
    }

    /// Quantum plane chart R<x,s>/(sx - xs - tx), weights x:1, s:1, t:1.
    fn quantum(r: ArtinRing) -> RewriteSystem {
        let a = Alphabet::new(vec!["x".into(), "s".into()], vec![1, 1]).unwrap();
        let mut rhs = FreeElem::word(vec![0, 1], r.one());
        rhs.add_term(vec![0], r.t_term(r.base.one(), 1));
        let rules = vec![RewriteRule {
            lhs: vec![1, 0],
            rhs,
        }];
        RewriteSystem::new(a, r, rules).unwrap()
    }

    /// Oracle: reduce by exploring every redex at every step; returns the
    /// set of fully reduced results. Independent of the leftmost strategy.
    fn exhaustive_normal_forms(sys: &RewriteSystem, e: &FreeElem) -> Vec<FreeElem> {
        fn reduce_word_all(sys: &RewriteSystem, w: &[u8]) -> Vec<(usize, usize)> {
            let mut redexes = Vec::new();
            for pos in 0..w.len() {
                for (ri, rule) in sys.rules.iter().enumerate() {
                    let l = rule.lhs.len();
                    if pos + l <= w.len() && &w[pos..pos + l] == rule.lhs.as_slice() {
                        redexes.push((pos, ri));
                    }
                }
            }
            redexes
        }
        let mut results = Vec::new();
        let mut frontier = vec![e.clone()];
        let mut guard = 0;
        while let Some(cur) = frontier.pop() {
            guard += 1;
            assert!(guard < 100_000, "oracle blew up");
            // find any term with a redex
            let mut chosen = None;
            'outer: for (w, _) in &cur.terms {
                let reds = reduce_word_all(sys, w);
                if !reds.is_empty() {
                    chosen = Some((w.clone(), reds));
                    break 'outer;
                }
            }
            match chosen {
                None => {
                    if !results.contains(&cur) {
                        results.push(cur);
                    }
                }
                Some((w, reds)) => {
                    let c = cur.terms[&w].clone();
                    for (pos, ri) in reds {
                        let rule = &sys.rules[ri];
                        let mut next = cur.clone();
                        next.add_term(w.clone(), c.neg());
                        for (rw, rc) in &rule.rhs.terms {
                            let mut nw = w[..pos].to_vec();
                            nw.extend_from_slice(rw);
                            nw.extend_from_slice(&w[pos + rule.lhs.len()..]);
                            next.add_term(nw, c.mul(rc));
                        }
                        frontier.push(next);
                    }
                }
            }
        }
        results
    }

    #[test]
    fn laurent_single_reduction() {
        let r = ring(1, 0);
        let sys = laurent(r);
        // x z x -> x
        let e = FreeElem::word(vec![0, 1, 0], r.one());
        let nf = sys.normal_form(&e).unwrap();
        assert_eq!(nf, FreeElem::word(vec![0], r.one()));
    }

    #[test]
    fn quantum_two_step_reduction_matches_oracle() {
        let r = ring(2, 1);
        let sys = quantum(r);
        // s x x -> x^2 s + 2t x^2
        let e = FreeElem::word(vec![1, 0, 0], r.one());
        let nf = sys.normal_form(&e).unwrap();
        let mut expect = FreeElem::word(vec![0, 0, 1], r.one());
        expect.add_term(vec![0, 0], r.t_term(r.base.from_i64(2), 1));
        assert_eq!(nf, expect);
        let oracle = exhaustive_normal_forms(&sys, &e);
        assert_eq!(oracle.len(), 1);
        assert_eq!(oracle[0], nf);
    }

    #[test]
    fn laurent_overlaps_join() {
        let r = ring(1, 0);
        let sys = laurent(r);
        assert!(sys.check_local_confluence(10).unwrap().is_empty());
    }

    #[test]
    fn quantum_no_self_overlap() {
        let r = ring(2, 1);
        let sys = quantum(r);
        assert!(sys.check_local_confluence(10).unwrap().is_empty());
    }

    #[test]
    fn nonconfluent_pair_reported() {
        // {xy -> 1, yx -> x}: xyx reduces to x and to x^2
        let r = ring(1, 0);
        let a = Alphabet::new(vec!["x".into(), "y".into()], vec![1, -1]).unwrap();
        let rules = vec![
            RewriteRule {
                lhs: vec![0, 1],
                rhs: FreeElem::one(&r),
            },
            RewriteRule {
                lhs: vec![1, 0],
                rhs: FreeElem::word(vec![0], r.one()),
            },
        ];
        let sys = RewriteSystem::new(a, r, rules);
        // yx -> x is not weight homogeneous (0 vs 1), so use weight-0 variant
        assert!(sys.is_err());
        let a = Alphabet::new(vec!["x".into(), "y".into()], vec![0, 0]).unwrap();
        let rules = vec![
            RewriteRule {
                lhs: vec![0, 1],
                rhs: FreeElem::one(&r),
            },
            RewriteRule {
                lhs: vec![1, 0],
                rhs: FreeElem::word(vec![0], r.one()),
            },
        ];
        let sys = RewriteSystem::new(a, r, rules).unwrap();
        // both overlap words fail to join: xyx gives x vs x^2, yxy gives 1 vs y
        let bad = sys.check_local_confluence(10).unwrap();
        assert_eq!(bad.len(), 2);
        let words: Vec<&Word> = bad.iter().map(|a| &a.word).collect();
        assert!(words.contains(&&vec![0, 1, 0]));
        assert!(words.contains(&&vec![1, 0, 1]));
    }

    #[test]
    fn enumerate_single_letter() {
        let r = ring(1, 0);
        let a = Alphabet::new(vec!["x".into()], vec![1]).unwrap();
        let sys = RewriteSystem::new(a, r, vec![]).unwrap();
        let (words, warn) = sys.enumerate_normal_words(3, 10);
        assert_eq!(words, vec![vec![0, 0, 0]]);
        assert!(!warn);
    }

    #[test]
    fn enumerate_laurent() {
        let r = ring(1, 0);
        let sys = laurent(r);
        let (words, _) = sys.enumerate_normal_words(-2, 8);
        assert_eq!(words, vec![vec![1, 1]]);
        // exactly one normal word at every weight in a window
        for d in -5..=5 {
            let (words, _) = sys.enumerate_normal_words(d, 8);
            assert_eq!(words.len(), 1, "weight {d}");
        }
        let (words, _) = sys.enumerate_normal_words(0, 8);
        assert_eq!(words, vec![Vec::<u8>::new()]);
    }

    #[test]
    fn enumerate_quantum_weight_two() {
        let r = ring(2, 1);
        let sys = quantum(r);
        let (words, _) = sys.enumerate_normal_words(2, 8);
        // xx, xs, ss; sx is a redex
        assert_eq!(words, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn cap_insufficiency_flagged() {
        let r = ring(1, 0);
        let a = Alphabet::new(vec!["x".into()], vec![1]).unwrap();
        let sys = RewriteSystem::new(a, r, vec![]).unwrap();
        let (words, warn) = sys.enumerate_normal_words(3, 3);
        assert_eq!(words.len(), 1);
        assert!(warn);
    }

    #[test]
    fn normal_form_idempotent_and_homogeneous() {
        let r = ring(2, 1);
        let sys = quantum(r);
        let mut e = FreeElem::word(vec![1, 0, 0], r.one());
        e.add_term(vec![1, 1, 0], r.from_scalar(r.base.from_i64(3)));
        let nf = sys.normal_form(&e).unwrap();
        assert_eq!(sys.normal_form(&nf).unwrap(), nf);
        // weight preserved: input pieces at weights 3 only
        assert_eq!(nf.homogeneous_weight(&sys.alphabet), Some(3));
    }
}
