//! Line-oriented workspace format: field and coefficient ring, a meet
//! poset, chartwise algebras with rewrite rules, gluing homomorphisms,
//! locally free modules, direct sums, test objects, and a window.
//!
//! Element syntax is shared with the rewrite module's display form:
//! terms like `x*s + t*x` or `3/2*x^2*z - 1`, with `t` the coefficient
//! ring variable.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraHom, GradedAlgebra};
use crate::coeff::{ArtinRing, Field};
use crate::error::{NcError, Result};
use crate::qcoh::{ElemMat, LocallyFreeModule};
use crate::rewrite::{Alphabet, FreeElem, RewriteRule, RewriteSystem};
use crate::scheme::{MeetPoset, NcScheme, Window};

#[derive(Debug, Clone)]
pub struct Workspace {
    pub scheme: NcScheme,
    pub window: Window,
    pub pmax: usize,
    /// declared over the scheme as parsed; not yet validated
    pub modules: BTreeMap<String, LocallyFreeModule>,
    /// test objects: summands `(cohomological degree, module name)`
    pub objects: BTreeMap<String, Vec<(i64, String)>>,
    /// name of the declared deformation tower, when present
    pub tower: Option<String>,
    pub assumptions: Vec<String>,
}

fn perr(line: usize, msg: impl Into<String>) -> NcError {
    NcError::Parse {
        line,
        msg: msg.into(),
    }
}

// ---------------------------------------------------------------------------
// Element expressions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64, i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
}

fn tokenize(src: &str, line: usize) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut n = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                n.push(chars[i]);
                i += 1;
            }
            let num: i64 = n.parse().map_err(|_| perr(line, format!("bad number `{n}`")))?;
            let mut den = 1i64;
            if i < chars.len() && chars[i] == '/' {
                i += 1;
                let mut d = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    d.push(chars[i]);
                    i += 1;
                }
                den = d.parse().map_err(|_| perr(line, format!("bad denominator `{d}`")))?;
                if den == 0 {
                    return Err(perr(line, "zero denominator"));
                }
            }
            out.push(Tok::Num(num, den));
        } else if c.is_alphabetic() || c == '_' {
            let mut id = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                id.push(chars[i]);
                i += 1;
            }
            out.push(Tok::Ident(id));
        } else {
            match c {
                '+' => out.push(Tok::Plus),
                '-' => out.push(Tok::Minus),
                '*' => out.push(Tok::Star),
                '^' => out.push(Tok::Caret),
                _ => return Err(perr(line, format!("unexpected character `{c}`"))),
            }
            i += 1;
        }
    }
    Ok(out)
}

/// Parses an element expression over the alphabet into a free element.
pub fn parse_elem(src: &str, alphabet: &Alphabet, ring: &ArtinRing, line: usize) -> Result<FreeElem> {
    let toks = tokenize(src, line)?;
    if toks.is_empty() {
        return Err(perr(line, "empty expression"));
    }
    let mut elem = FreeElem::zero();
    let mut i = 0;
    loop {
        // sign
        let mut sign = 1i64;
        while i < toks.len() {
            match toks[i] {
                Tok::Plus => i += 1,
                Tok::Minus => {
                    sign = -sign;
                    i += 1;
                }
                _ => break,
            }
        }
        if i >= toks.len() {
            return Err(perr(line, "dangling sign"));
        }
        // term: factors joined by `*`
        let mut coeff = ring.base.from_i64(sign);
        let mut tpow = 0u32;
        let mut word = Vec::new();
        loop {
            match &toks[i] {
                Tok::Num(n, d) => {
                    let s = ring.base.from_i64(*n).mul(&ring.base.from_i64(*d).inv()?);
                    coeff = coeff.mul(&s);
                    i += 1;
                }
                Tok::Ident(id) => {
                    let mut exp = 1u32;
                    let mut j = i + 1;
                    if j < toks.len() && toks[j] == Tok::Caret {
                        j += 1;
                        match toks.get(j) {
                            Some(Tok::Num(n, 1)) if *n >= 0 => {
                                exp = *n as u32;
                                j += 1;
                            }
                            _ => return Err(perr(line, "exponent must be a nonnegative integer")),
                        }
                    }
                    if id == "t" {
                        tpow += exp;
                    } else {
                        let l = alphabet
                            .index_of(id)
                            .ok_or_else(|| perr(line, format!("unknown generator `{id}`")))?;
                        word.extend(std::iter::repeat(l).take(exp as usize));
                    }
                    i = j;
                }
                t => return Err(perr(line, format!("unexpected token {t:?} in term"))),
            }
            if i < toks.len() && toks[i] == Tok::Star {
                i += 1;
                continue;
            }
            break;
        }
        if tpow >= ring.order {
            return Err(perr(
                line,
                format!("t^{tpow} vanishes in a ring of order {}", ring.order),
            ));
        }
        elem.add_term(word, ring.t_term(coeff, tpow));
        if i >= toks.len() {
            break;
        }
        match toks[i] {
            Tok::Plus | Tok::Minus => continue,
            _ => return Err(perr(line, "expected `+` or `-` between terms")),
        }
    }
    Ok(elem)
}

// ---------------------------------------------------------------------------
// Workspace parser
// ---------------------------------------------------------------------------

struct RawAlgebra {
    chart: String,
    letters: Vec<(String, i64)>,
    rules: Vec<(String, String, usize)>,
    line: usize,
}

struct RawModule {
    name: String,
    rank: usize,
    shifts: BTreeMap<String, Vec<i64>>,
    mats: Vec<(String, String, String, usize)>,
    line: usize,
}

pub fn parse(text: &str) -> Result<Workspace> {
    let mut field: Option<Field> = None;
    let mut ring_decl: Option<(u32, i64)> = None;
    let mut window: Option<Window> = None;
    let mut pmax = 2usize;
    let mut elements: Vec<String> = Vec::new();
    let mut order_pairs: Vec<(String, String, usize)> = Vec::new();
    let mut meet_decls: Vec<(String, String, String, usize)> = Vec::new();
    let mut algebras: Vec<RawAlgebra> = Vec::new();
    let mut gluing_decls: Vec<(String, String, Vec<(String, String, usize)>, usize)> = Vec::new();
    let mut raw_modules: Vec<RawModule> = Vec::new();
    let mut sums: Vec<(String, Vec<String>, usize)> = Vec::new();
    let mut objects: BTreeMap<String, Vec<(i64, String)>> = BTreeMap::new();
    let mut tower: Option<String> = None;
    let mut assumptions = vec![
        "flatness of the chart algebras over the coefficient ring is a declared assumption".into(),
        "birationality of the gluing homomorphisms is a declared assumption".into(),
    ];

    enum Section {
        Top,
        Algebra(RawAlgebra),
        Gluing(String, String, Vec<(String, String, usize)>, usize),
        Module(RawModule),
    }
    let mut section = Section::Top;

    for (ln0, raw_line) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match &mut section {
            Section::Algebra(alg) => match words[0] {
                "letter" => {
                    if words.len() != 3 {
                        return Err(perr(ln, "expected `letter <name> <weight>`"));
                    }
                    let w: i64 = words[2]
                        .parse()
                        .map_err(|_| perr(ln, format!("bad weight `{}`", words[2])))?;
                    alg.letters.push((words[1].to_string(), w));
                }
                "rule" => {
                    let rest = line.strip_prefix("rule").unwrap().trim();
                    let (lhs, rhs) = rest
                        .split_once("->")
                        .ok_or_else(|| perr(ln, "expected `rule <lhs> -> <rhs>`"))?;
                    alg.rules.push((lhs.trim().to_string(), rhs.trim().to_string(), ln));
                }
                "end" => {
                    let done = std::mem::replace(
                        &mut section,
                        Section::Top,
                    );
                    if let Section::Algebra(a) = done {
                        algebras.push(a);
                    }
                }
                other => return Err(perr(ln, format!("unexpected `{other}` in algebra block"))),
            },
            Section::Gluing(i, j, maps, at) => match words[0] {
                "end" => {
                    let done = std::mem::replace(&mut section, Section::Top);
                    if let Section::Gluing(i, j, maps, at) = done {
                        gluing_decls.push((i, j, maps, at));
                    }
                }
                _ => {
                    let _ = (i, j, at);
                    let (src, img) = line
                        .split_once("->")
                        .ok_or_else(|| perr(ln, "expected `<generator> -> <image>`"))?;
                    maps.push((src.trim().to_string(), img.trim().to_string(), ln));
                }
            },
            Section::Module(m) => match words[0] {
                "shift" => {
                    if words.len() < 3 {
                        return Err(perr(ln, "expected `shift <chart> <weights...>`"));
                    }
                    let vals: Vec<i64> = words[2..]
                        .iter()
                        .map(|w| w.parse().map_err(|_| perr(ln, format!("bad shift `{w}`"))))
                        .collect::<Result<_>>()?;
                    m.shifts.insert(words[1].to_string(), vals);
                }
                "glue" => {
                    // glue <i> <j> [ e, e ; e, e ]
                    let rest = line.strip_prefix("glue").unwrap().trim();
                    let open = rest
                        .find('[')
                        .ok_or_else(|| perr(ln, "expected `[ ... ]` matrix"))?;
                    let close = rest
                        .rfind(']')
                        .ok_or_else(|| perr(ln, "unclosed `[` in matrix"))?;
                    let heads: Vec<&str> = rest[..open].split_whitespace().collect();
                    if heads.len() != 2 {
                        return Err(perr(ln, "expected `glue <chart-i> <chart-j> [ ... ]`"));
                    }
                    m.mats.push((
                        heads[0].to_string(),
                        heads[1].to_string(),
                        rest[open + 1..close].to_string(),
                        ln,
                    ));
                }
                "end" => {
                    let done = std::mem::replace(&mut section, Section::Top);
                    if let Section::Module(m) = done {
                        raw_modules.push(m);
                    }
                }
                other => return Err(perr(ln, format!("unexpected `{other}` in module block"))),
            },
            Section::Top => match words[0] {
                "field" => {
                    field = Some(match words.get(1) {
                        Some(&"rationals") => Field::Rationals,
                        Some(&"fp") => {
                            let p: u64 = words
                                .get(2)
                                .and_then(|w| w.parse().ok())
                                .ok_or_else(|| perr(ln, "expected `field fp <prime>`"))?;
                            Field::Prime(p)
                        }
                        _ => return Err(perr(ln, "expected `field rationals` or `field fp <p>`")),
                    });
                }
                "ring" => {
                    // ring order <n> tweight <w>
                    if words.len() != 5 || words[1] != "order" || words[3] != "tweight" {
                        return Err(perr(ln, "expected `ring order <n> tweight <w>`"));
                    }
                    let order: u32 = words[2]
                        .parse()
                        .map_err(|_| perr(ln, format!("bad order `{}`", words[2])))?;
                    let tw: i64 = words[4]
                        .parse()
                        .map_err(|_| perr(ln, format!("bad t-weight `{}`", words[4])))?;
                    ring_decl = Some((order, tw));
                }
                "window" => {
                    // window <lo> <hi> cap <n> [pmax <p>]
                    if words.len() < 5 || words[3] != "cap" {
                        return Err(perr(ln, "expected `window <lo> <hi> cap <n> [pmax <p>]`"));
                    }
                    let lo: i64 = words[1].parse().map_err(|_| perr(ln, "bad window bound"))?;
                    let hi: i64 = words[2].parse().map_err(|_| perr(ln, "bad window bound"))?;
                    let cap: usize = words[4].parse().map_err(|_| perr(ln, "bad length cap"))?;
                    window = Some(Window::new(lo, hi, cap).map_err(|e| perr(ln, e.to_string()))?);
                    if words.len() >= 7 && words[5] == "pmax" {
                        pmax = words[6].parse().map_err(|_| perr(ln, "bad pmax"))?;
                    }
                }
                "poset" => {
                    elements = words[1..].iter().map(|w| w.to_string()).collect();
                    if elements.is_empty() {
                        return Err(perr(ln, "empty poset declaration"));
                    }
                }
                "less" => {
                    if words.len() != 3 {
                        return Err(perr(ln, "expected `less <smaller> <larger>`"));
                    }
                    order_pairs.push((words[1].to_string(), words[2].to_string(), ln));
                }
                "meet" => {
                    // meet a b = c
                    if words.len() != 5 || words[3] != "=" {
                        return Err(perr(ln, "expected `meet <a> <b> = <c>`"));
                    }
                    meet_decls.push((
                        words[1].to_string(),
                        words[2].to_string(),
                        words[4].to_string(),
                        ln,
                    ));
                }
                "algebra" => {
                    // algebra <name> on <chart>
                    if words.len() != 4 || words[2] != "on" {
                        return Err(perr(ln, "expected `algebra <name> on <chart>`"));
                    }
                    section = Section::Algebra(RawAlgebra {
                        chart: words[3].to_string(),
                        letters: Vec::new(),
                        rules: Vec::new(),
                        line: ln,
                    });
                }
                "gluing" => {
                    if words.len() != 3 {
                        return Err(perr(ln, "expected `gluing <chart-i> <chart-j>`"));
                    }
                    section =
                        Section::Gluing(words[1].to_string(), words[2].to_string(), Vec::new(), ln);
                }
                "module" => {
                    // module <name> rank <r>
                    if words.len() != 4 || words[2] != "rank" {
                        return Err(perr(ln, "expected `module <name> rank <r>`"));
                    }
                    let rank: usize = words[3]
                        .parse()
                        .map_err(|_| perr(ln, format!("bad rank `{}`", words[3])))?;
                    section = Section::Module(RawModule {
                        name: words[1].to_string(),
                        rank,
                        shifts: BTreeMap::new(),
                        mats: Vec::new(),
                        line: ln,
                    });
                }
                "sum" => {
                    // sum <name> = <a> + <b> [+ ...]
                    if words.len() < 6 || words[2] != "=" {
                        return Err(perr(ln, "expected `sum <name> = <a> + <b>`"));
                    }
                    let mut parts = Vec::new();
                    let mut expect_name = true;
                    for w in &words[3..] {
                        if expect_name {
                            parts.push(w.to_string());
                        } else if *w != "+" {
                            return Err(perr(ln, "expected `+` between summands"));
                        }
                        expect_name = !expect_name;
                    }
                    if parts.len() < 2 || expect_name {
                        return Err(perr(ln, "a sum needs at least two summands"));
                    }
                    sums.push((words[1].to_string(), parts, ln));
                }
                "object" => {
                    // object <name> = <deg>:<module> [+ ...]
                    if words.len() < 4 || words[2] != "=" {
                        return Err(perr(ln, "expected `object <name> = <deg>:<module>`"));
                    }
                    let mut summands = Vec::new();
                    let mut expect_part = true;
                    for w in &words[3..] {
                        if expect_part {
                            let (d, m) = w
                                .split_once(':')
                                .ok_or_else(|| perr(ln, "summand must be `<deg>:<module>`"))?;
                            let deg: i64 = d
                                .parse()
                                .map_err(|_| perr(ln, format!("bad degree `{d}`")))?;
                            summands.push((deg, m.to_string()));
                        } else if *w != "+" {
                            return Err(perr(ln, "expected `+` between summands"));
                        }
                        expect_part = !expect_part;
                    }
                    if summands.is_empty() || expect_part {
                        return Err(perr(ln, "object needs at least one summand"));
                    }
                    objects.insert(words[1].to_string(), summands);
                }
                "tower" => {
                    if words.len() != 2 {
                        return Err(perr(ln, "expected `tower <name>`"));
                    }
                    tower = Some(words[1].to_string());
                }
                "assume" => {
                    assumptions.push(words[1..].join(" "));
                }
                other => return Err(perr(ln, format!("unknown directive `{other}`"))),
            },
        }
    }
    match section {
        Section::Top => {}
        _ => return Err(perr(text.lines().count(), "unterminated block (missing `end`)")),
    }

    let field = field.ok_or_else(|| perr(1, "missing `field` declaration"))?;
    let (order, tw) = ring_decl.ok_or_else(|| perr(1, "missing `ring` declaration"))?;
    let ring = ArtinRing::new(field, order, tw).map_err(|e| perr(1, e.to_string()))?;
    let window = window.ok_or_else(|| perr(1, "missing `window` declaration"))?;

    // poset
    let chart = |name: &str, ln: usize| -> Result<usize> {
        elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| perr(ln, format!("unknown poset element `{name}`")))
    };
    let mut pairs = Vec::new();
    for (a, b, ln) in &order_pairs {
        pairs.push((chart(a, *ln)?, chart(b, *ln)?));
    }
    let poset = MeetPoset::from_order(elements.clone(), &pairs)
        .map_err(|e| perr(1, format!("poset: {e}")))?;
    for (a, b, c, ln) in &meet_decls {
        let (a, b, c) = (chart(a, *ln)?, chart(b, *ln)?, chart(c, *ln)?);
        if poset.meet(a, b) != c {
            return Err(perr(
                *ln,
                format!(
                    "declared meet `{}` differs from the computed meet `{}`",
                    elements[c],
                    poset.name(poset.meet(a, b))
                ),
            ));
        }
    }

    // algebras, one per chart, in poset order
    let mut by_chart: BTreeMap<usize, GradedAlgebra> = BTreeMap::new();
    for raw in algebras {
        let ci = chart(&raw.chart, raw.line)?;
        if by_chart.contains_key(&ci) {
            return Err(perr(1, format!("chart `{}` has two algebras", raw.chart)));
        }
        let (names, weights): (Vec<String>, Vec<i64>) = raw.letters.into_iter().unzip();
        let alphabet = Alphabet::new(names, weights).map_err(|e| perr(1, e.to_string()))?;
        let mut rules = Vec::new();
        for (lhs, rhs, ln) in raw.rules {
            let l = parse_elem(&lhs, &alphabet, &ring, ln)?;
            if l.terms.len() != 1 {
                return Err(perr(ln, "rule left side must be a single word"));
            }
            let (word, c) = l.terms.iter().next().unwrap();
            if *c != ring.one() {
                return Err(perr(ln, "rule left side must have coefficient 1"));
            }
            rules.push(RewriteRule {
                lhs: word.clone(),
                rhs: parse_elem(&rhs, &alphabet, &ring, ln)?,
            });
        }
        let rs = RewriteSystem::new(alphabet, ring, rules)
            .map_err(|e| perr(raw.line, e.to_string()))?;
        by_chart.insert(ci, GradedAlgebra::new(format!("A_{}", raw.chart), rs));
    }
    let mut algs = Vec::new();
    for i in 0..poset.len() {
        algs.push(by_chart.remove(&i).ok_or_else(|| {
            perr(1, format!("poset element `{}` has no algebra", poset.name(i)))
        })?);
    }

    // gluing homomorphisms
    let mut gluings = BTreeMap::new();
    for (a, b, maps, at) in gluing_decls {
        let i = chart(&a, at)?;
        let j = chart(&b, at)?;
        if !poset.lt(i, j) {
            return Err(perr(at, format!("`{a}` is not below `{b}` in the poset")));
        }
        let target = &algs[j];
        let source_alph = algs[i].alphabet().clone();
        let mut images = vec![None; target.alphabet().len()];
        for (gen, img, ln) in maps {
            let l = target
                .alphabet()
                .index_of(&gen)
                .ok_or_else(|| perr(ln, format!("`{gen}` is not a generator of `{b}`")))?;
            images[l as usize] = Some(parse_elem(&img, &source_alph, &ring, ln)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(l, e)| {
                e.ok_or_else(|| {
                    perr(at, format!("gluing {a} {b}: no image for generator {l}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        gluings.insert((i, j), AlgebraHom { images });
    }
    let scheme =
        NcScheme::new(poset, algs, gluings).map_err(|e| perr(1, e.to_string()))?;

    // modules
    let mut modules: BTreeMap<String, LocallyFreeModule> = BTreeMap::new();
    for raw in raw_modules {
        let mut shifts = Vec::new();
        for i in 0..scheme.poset.len() {
            let name = scheme.poset.name(i);
            let row = raw.shifts.get(name).ok_or_else(|| {
                perr(raw.line, format!("module {}: missing `shift {name} ...`", raw.name))
            })?;
            if row.len() != raw.rank {
                return Err(perr(
                    raw.line,
                    format!("module {}: shift row for `{name}` has wrong length", raw.name),
                ));
            }
            shifts.push(row.clone());
        }
        let mut mats = BTreeMap::new();
        for (a, b, body, ln) in &raw.mats {
            let i = chart(a, *ln)?;
            let j = chart(b, *ln)?;
            let alph = scheme.algebras[i].alphabet();
            let mut rows = Vec::new();
            for row_src in body.split(';') {
                let mut row = Vec::new();
                for entry in row_src.split(',') {
                    let entry = entry.trim();
                    if entry == "0" {
                        row.push(FreeElem::zero());
                    } else {
                        row.push(parse_elem(entry, alph, &ring, *ln)?);
                    }
                }
                rows.push(row);
            }
            if rows.len() != raw.rank || rows.iter().any(|r| r.len() != raw.rank) {
                return Err(perr(*ln, format!("matrix is not {0}x{0}", raw.rank)));
            }
            mats.insert((i, j), ElemMat::from_rows(rows));
        }
        let module = LocallyFreeModule::new(raw.name.clone(), &scheme, raw.rank, shifts, mats)
            .map_err(|e| perr(raw.line, e.to_string()))?;
        modules.insert(raw.name, module);
    }
    for (name, parts, ln) in sums {
        let mut iter = parts.iter();
        let first = iter.next().unwrap();
        let mut acc = modules
            .get(first)
            .ok_or_else(|| perr(ln, format!("unknown module `{first}`")))?
            .clone();
        for part in iter {
            let m = modules
                .get(part)
                .ok_or_else(|| perr(ln, format!("unknown module `{part}`")))?;
            acc = acc
                .direct_sum(m, name.clone())
                .map_err(|e| perr(ln, e.to_string()))?;
        }
        modules.insert(name, acc);
    }
    for (name, summands) in &objects {
        for (_, m) in summands {
            if !modules.contains_key(m) {
                return Err(perr(
                    1,
                    format!("object `{name}` references unknown module `{m}`"),
                ));
            }
        }
    }

    Ok(Workspace {
        scheme,
        window,
        pmax,
        modules,
        objects,
        tower,
        assumptions,
    })
}
