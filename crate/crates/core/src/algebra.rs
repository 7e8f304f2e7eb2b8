//! Finitely presented graded algebras over the Artin coefficient ring,
//! and homomorphisms between them given by letter images.

use crate::coeff::{ArtinRing, Scalar};
use crate::error::{NcError, Result};
use crate::rewrite::{Alphabet, FreeElem, RewriteSystem, Word};

/// A graded algebra presented by a confluent rewrite system. The normal
/// words form an `R`-basis; all arithmetic happens on normal forms.
#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    pub name: String,
    pub system: RewriteSystem,
}

impl GradedAlgebra {
    pub fn new(name: String, system: RewriteSystem) -> GradedAlgebra {
        GradedAlgebra { name, system }
    }

    pub fn ring(&self) -> &ArtinRing {
        &self.system.ring
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.system.alphabet
    }

    pub fn normal_form(&self, e: &FreeElem) -> Result<FreeElem> {
        self.system.normal_form(e)
    }

    /// Product of two elements, fully reduced.
    pub fn multiply(&self, a: &FreeElem, b: &FreeElem) -> Result<FreeElem> {
        self.system.normal_form(&a.mul_raw(b))
    }

    /// Normal words of the given weight (an `R`-basis of the graded piece),
    /// with the cap-insufficiency flag.
    pub fn graded_words(&self, weight: i64, length_cap: usize) -> (Vec<Word>, bool) {
        self.system.enumerate_normal_words(weight, length_cap)
    }

    /// `k`-dimension of the graded piece of the algebra at total weight
    /// `weight`: pairs `(word, t^j)` with `wt(word) + j*wt(t) = weight`.
    pub fn graded_dim_k(&self, weight: i64, length_cap: usize) -> (usize, bool) {
        let mut dim = 0;
        let mut warned = false;
        for j in 0..self.ring().order {
            let w = weight - (j as i64) * self.ring().t_weight;
            let (words, warn) = self.graded_words(w, length_cap);
            dim += words.len();
            warned |= warn;
        }
        (dim, warned)
    }

    /// `k`-basis of the graded piece at total weight `weight`: pairs
    /// `(word, j)` standing for `word * t^j`, in deg-lex order per `j`.
    pub fn graded_k_basis(&self, weight: i64, length_cap: usize) -> (Vec<(Word, u32)>, bool) {
        let mut basis = Vec::new();
        let mut warned = false;
        for j in 0..self.ring().order {
            let w = weight - (j as i64) * self.ring().t_weight;
            let (words, warn) = self.graded_words(w, length_cap);
            basis.extend(words.into_iter().map(|w| (w, j)));
            warned |= warn;
        }
        (basis, warned)
    }

    /// Coordinates of a normal-form element in the given `k`-basis. Errors
    /// when a term of `e` falls outside the basis (weight or cap overflow).
    pub fn vector_of(&self, e: &FreeElem, basis: &[(Word, u32)]) -> Result<Vec<Scalar>> {
        let field = self.ring().base;
        let mut v = vec![field.zero(); basis.len()];
        let index: std::collections::HashMap<(&Word, u32), usize> = basis
            .iter()
            .enumerate()
            .map(|(n, (w, j))| ((w, *j), n))
            .collect();
        for (w, c) in &e.terms {
            for (j, s) in c.coeffs.iter().enumerate() {
                if s.is_zero() {
                    continue;
                }
                let Some(&n) = index.get(&(w, j as u32)) else {
                    return Err(NcError::Window(format!(
                        "term `{}`*t^{j} falls outside the enumerated basis",
                        self.alphabet().word_string(w)
                    )));
                };
                v[n] = s.clone();
            }
        }
        Ok(v)
    }

    pub fn parse_letter(&self, name: &str) -> Result<u8> {
        self.alphabet()
            .index_of(name)
            .ok_or_else(|| NcError::Input(format!("unknown letter `{name}` in `{}`", self.name)))
    }

    /// The same presentation with all rule coefficients truncated into
    /// `k[t]/(t^order)`.
    pub fn truncate(&self, order: u32) -> Result<GradedAlgebra> {
        let ring = self.ring().truncated(order);
        let rules = self
            .system
            .rules
            .iter()
            .map(|r| {
                Ok(crate::rewrite::RewriteRule {
                    lhs: r.lhs.clone(),
                    rhs: r.rhs.reduce(&ring)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let system = RewriteSystem::new(self.alphabet().clone(), ring, rules)?;
        Ok(GradedAlgebra::new(self.name.clone(), system))
    }
}

/// A graded `R`-algebra homomorphism, determined by the images of the
/// source generators. `images[l]` lives in the target algebra and must be
/// homogeneous of the same weight as letter `l`.
#[derive(Debug, Clone)]
pub struct AlgebraHom {
    pub images: Vec<FreeElem>,
}

impl AlgebraHom {
    pub fn identity(alg: &GradedAlgebra) -> AlgebraHom {
        let ring = *alg.ring();
        AlgebraHom {
            images: (0..alg.alphabet().len() as u8)
                .map(|l| FreeElem::word(vec![l], ring.one()))
                .collect(),
        }
    }

    /// Substitutes letter images and reduces in the target algebra.
    pub fn apply(&self, e: &FreeElem, target: &GradedAlgebra) -> Result<FreeElem> {
        let mut out = FreeElem::zero();
        for (w, c) in &e.terms {
            let mut img = FreeElem::word(Vec::new(), c.clone());
            for &l in w {
                let li = self.images.get(l as usize).ok_or_else(|| {
                    NcError::Input(format!("hom has no image for letter index {l}"))
                })?;
                img = img.mul_raw(li);
            }
            out = out.add(&img);
        }
        target.normal_form(&out)
    }

    /// Checks that the letter images define a graded homomorphism:
    /// images are homogeneous of the letter's weight and every defining
    /// relation of the source maps to zero in the target.
    pub fn check(&self, source: &GradedAlgebra, target: &GradedAlgebra) -> Result<()> {
        if source.ring() != target.ring() {
            return Err(NcError::Input(format!(
                "hom {} -> {}: coefficient rings differ",
                source.name, target.name
            )));
        }
        if self.images.len() != source.alphabet().len() {
            return Err(NcError::Input(format!(
                "hom {} -> {}: expected {} letter images, found {}",
                source.name,
                target.name,
                source.alphabet().len(),
                self.images.len()
            )));
        }
        for (l, img) in self.images.iter().enumerate() {
            let lw = source.alphabet().weights[l];
            if !img.is_zero() && img.homogeneous_weight(target.alphabet()) != Some(lw) {
                return Err(NcError::Input(format!(
                    "hom {} -> {}: image of `{}` is not homogeneous of weight {lw}",
                    source.name,
                    target.name,
                    source.alphabet().letters[l]
                )));
            }
        }
        for (ri, rule) in source.system.rules.iter().enumerate() {
            let lhs = FreeElem::word(rule.lhs.clone(), source.ring().one());
            let a = self.apply(&lhs, target)?;
            let b = self.apply(&rule.rhs, target)?;
            if a != b {
                return Err(NcError::Input(format!(
                    "hom {} -> {}: relation {ri} is not respected ({} vs {})",
                    source.name,
                    target.name,
                    a.display(target.alphabet()),
                    b.display(target.alphabet())
                )));
            }
        }
        Ok(())
    }

    /// `self` after `first`: the composite sends a source letter through
    /// `first` into the middle algebra, then through `self` into the target.
    pub fn compose(&self, first: &AlgebraHom, target: &GradedAlgebra) -> Result<AlgebraHom> {
        let mut images = Vec::with_capacity(first.images.len());
        for img in &first.images {
            images.push(self.apply(img, target)?);
        }
        Ok(AlgebraHom { images })
    }
}
