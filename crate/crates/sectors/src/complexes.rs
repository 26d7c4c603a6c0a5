//! Reduced CW complexes of dimension at most 3, the catalog of standard
//! spaces, and the JSON file format.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{Alphabet, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("unknown 2-cell `{0}`")]
    UnknownCell(String),
    #[error("duplicate cell name `{0}`")]
    DuplicateCell(String),
    #[error("sign must be 1 or -1, got {0}")]
    BadSign(i64),
    #[error("3-cell `{cell}`: {violation}")]
    Triad { cell: String, violation: TriadViolation },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown space `{0}`")]
    UnknownSpace(String),
    #[error("invalid parameters for `{name}`: {reason}")]
    InvalidParams { name: String, reason: String },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
}

/// Letter `ᶠt^sign` of the free pre-crossed module on the 2-cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HLetter {
    pub conj: Word,
    pub cell: String,
    pub sign: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HWord {
    pub letters: Vec<HLetter>,
}

impl HWord {
    pub fn new(letters: Vec<HLetter>) -> Self {
        HWord { letters }
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inv(&self) -> HWord {
        let letters = self.letters.iter().rev().map(|l| HLetter { sign: -l.sign, ..l.clone() }).collect();
        HWord { letters }
    }

    pub fn concat(&self, other: &HWord) -> HWord {
        HWord { letters: self.letters.iter().chain(&other.letters).cloned().collect() }
    }
}

/// Letter `^{(f,h)}t^sign`, conjugated first by `f ∈ F` and then by `h ∈ H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriadLetter {
    pub conj_f: Word,
    pub conj_h: HWord,
    pub cell: String,
    pub sign: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TriadWord {
    pub letters: Vec<TriadLetter>,
}

impl TriadWord {
    /// Builds a word from `(conjugator text, cell, sign)` triples with trivial H-conjugators.
    pub fn from_simple(alphabet: &Arc<Alphabet>, letters: &[(&str, &str, i32)]) -> Result<TriadWord, ComplexError> {
        let mut out = Vec::with_capacity(letters.len());
        for &(f, cell, sign) in letters {
            out.push(TriadLetter {
                conj_f: Word::parse(alphabet, f)?,
                conj_h: HWord::default(),
                cell: cell.to_string(),
                sign,
            });
        }
        Ok(TriadWord { letters: out })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCell {
    pub name: String,
    pub attach: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeCell {
    pub name: String,
    pub attach: TriadWord,
}

/// Failure of a triad word to lie in `H ∩ H̄`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriadViolation {
    /// First letter of the tail whose boundary never closes up.
    pub index: usize,
    /// Boundary `∂h` of the whole word; it must be trivial.
    pub residual: Word,
}

impl fmt::Display for TriadViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not in the second copy of H: boundary `{}` is not trivial (from letter {})", self.residual, self.index)
    }
}

/// Reduced CW complex: one 0-cell, generators Σ₁, 2-cells Σ₂ with words
/// in F = ⟨Σ₁⟩, and 3-cells Σ₃ attached by triad words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CWComplex {
    alphabet: Arc<Alphabet>,
    two_cells: Vec<TwoCell>,
    three_cells: Vec<ThreeCell>,
    two_index: HashMap<String, usize>,
}

impl CWComplex {
    pub fn new(alphabet: Arc<Alphabet>, two_cells: Vec<TwoCell>, three_cells: Vec<ThreeCell>) -> Result<Self, ComplexError> {
        let mut two_index = HashMap::new();
        for (i, c) in two_cells.iter().enumerate() {
            if c.attach.alphabet().as_ref() != alphabet.as_ref() {
                return Err(WordError::AlphabetMismatch.into());
            }
            if two_index.insert(c.name.clone(), i).is_some() {
                return Err(ComplexError::DuplicateCell(c.name.clone()));
            }
        }
        let mut seen = HashSet::new();
        for c in &three_cells {
            if !seen.insert(c.name.clone()) || two_index.contains_key(&c.name) {
                return Err(ComplexError::DuplicateCell(c.name.clone()));
            }
        }
        let m = CWComplex { alphabet, two_cells, three_cells: Vec::new(), two_index };
        for c in &three_cells {
            m.check_triad_letters(&c.attach)?;
            m.validate_triad(&c.attach)
                .map_err(|violation| ComplexError::Triad { cell: c.name.clone(), violation })?;
        }
        Ok(CWComplex { three_cells, ..m })
    }

    /// Convenience constructor from text words; `three` lists simple triad letters.
    pub fn from_text(
        generators: &[&str],
        two: &[(&str, &str)],
        three: &[(&str, &[(&str, &str, i32)])],
    ) -> Result<Self, ComplexError> {
        let alphabet = Alphabet::new(generators)?;
        let mut two_cells = Vec::new();
        for &(name, w) in two {
            two_cells.push(TwoCell { name: name.to_string(), attach: Word::parse(&alphabet, w)? });
        }
        let mut three_cells = Vec::new();
        for &(name, letters) in three {
            three_cells.push(ThreeCell { name: name.to_string(), attach: TriadWord::from_simple(&alphabet, letters)? });
        }
        CWComplex::new(alphabet, two_cells, three_cells)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn generators(&self) -> &[String] {
        self.alphabet.names()
    }

    pub fn two_cells(&self) -> &[TwoCell] {
        &self.two_cells
    }

    pub fn three_cells(&self) -> &[ThreeCell] {
        &self.three_cells
    }

    pub fn dimension(&self) -> usize {
        if !self.three_cells.is_empty() {
            3
        } else if !self.two_cells.is_empty() {
            2
        } else if !self.alphabet.is_empty() {
            1
        } else {
            0
        }
    }

    pub fn two_cell_index(&self, name: &str) -> Result<usize, ComplexError> {
        self.two_index.get(name).copied().ok_or_else(|| ComplexError::UnknownCell(name.to_string()))
    }

    pub fn attaching_word(&self, cell: &str) -> Result<&Word, ComplexError> {
        Ok(&self.two_cells[self.two_cell_index(cell)?].attach)
    }

    fn check_sign(sign: i32) -> Result<(), ComplexError> {
        if sign == 1 || sign == -1 {
            Ok(())
        } else {
            Err(ComplexError::BadSign(sign as i64))
        }
    }

    fn check_hword(&self, w: &HWord) -> Result<(), ComplexError> {
        for l in &w.letters {
            Self::check_sign(l.sign)?;
            self.two_cell_index(&l.cell)?;
            if l.conj.alphabet().as_ref() != self.alphabet.as_ref() {
                return Err(WordError::AlphabetMismatch.into());
            }
        }
        Ok(())
    }

    fn check_triad_letters(&self, w: &TriadWord) -> Result<(), ComplexError> {
        for l in &w.letters {
            Self::check_sign(l.sign)?;
            self.two_cell_index(&l.cell)?;
            if l.conj_f.alphabet().as_ref() != self.alphabet.as_ref() {
                return Err(WordError::AlphabetMismatch.into());
            }
            self.check_hword(&l.conj_h)?;
        }
        Ok(())
    }

    /// Boundary in F of a word of the free pre-crossed module: `∂(f,t) = f σ₂(t) f⁻¹`.
    pub fn hword_boundary(&self, w: &HWord) -> Result<Word, ComplexError> {
        self.check_hword(w)?;
        let mut out = Word::identity(&self.alphabet);
        for l in &w.letters {
            let s = self.attaching_word(&l.cell)?.pow(l.sign as i64);
            out = &out * &Word::conj(&l.conj, &s)?;
        }
        Ok(out)
    }

    /// Boundary of one triad letter: `∂h · f σ₂(t)^± f⁻¹ · ∂h⁻¹`.
    pub fn triad_letter_boundary(&self, l: &TriadLetter) -> Result<Word, ComplexError> {
        let inner = Word::conj(&l.conj_f, &self.attaching_word(&l.cell)?.pow(l.sign as i64))?;
        Ok(Word::conj(&self.hword_boundary(&l.conj_h)?, &inner)?)
    }

    /// Membership of a triad word in `H̄ ⊂ F ⋉ H`.
    ///
    /// Every letter lies in `H`, so the word has F-component `ε` and
    /// H-component `h` equal to itself; it lies in `H̄ = {(∂k, k⁻¹)}` iff
    /// that F-component equals `∂h⁻¹`, i.e. iff `∂h` reduces to `ε`.
    pub fn validate_triad(&self, w: &TriadWord) -> Result<(), TriadViolation> {
        let mut running = Word::identity(&self.alphabet);
        let mut last_closed = 0;
        for (i, l) in w.letters.iter().enumerate() {
            let b = self.triad_letter_boundary(l).map_err(|_| TriadViolation { index: i, residual: running.clone() })?;
            running = &running * &b;
            if running.is_identity() {
                last_closed = i + 1;
            }
        }
        if running.is_identity() {
            Ok(())
        } else {
            Err(TriadViolation { index: last_closed, residual: running })
        }
    }

    /// Restricts to the 2-skeleton.
    pub fn two_skeleton(&self) -> CWComplex {
        CWComplex { three_cells: Vec::new(), ..self.clone() }
    }

    pub fn to_file(&self) -> ComplexFile {
        ComplexFile {
            generators: self.alphabet.names().to_vec(),
            two_cells: self
                .two_cells
                .iter()
                .map(|c| TwoCellFile { name: c.name.clone(), attach: c.attach.to_string() })
                .collect(),
            three_cells: self
                .three_cells
                .iter()
                .map(|c| ThreeCellFile {
                    name: c.name.clone(),
                    attach: c
                        .attach
                        .letters
                        .iter()
                        .map(|l| TriadLetterFile {
                            f: l.conj_f.to_string(),
                            h: l
                                .conj_h
                                .letters
                                .iter()
                                .map(|h| HLetterFile { f: h.conj.to_string(), cell: h.cell.clone(), sign: h.sign })
                                .collect(),
                            cell: l.cell.clone(),
                            sign: l.sign,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn save(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("complex serializes")
    }

    pub fn load(text: &str) -> Result<CWComplex, ComplexError> {
        let file: ComplexFile = serde_json::from_str(text)
            .map_err(|e| ComplexError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        file.build(text)
    }

    pub fn load_path(path: &str) -> Result<CWComplex, ComplexError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ComplexError::Io { path: path.to_string(), message: e.to_string() })?;
        CWComplex::load(&text)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub generators: Vec<String>,
    #[serde(default)]
    pub two_cells: Vec<TwoCellFile>,
    #[serde(default)]
    pub three_cells: Vec<ThreeCellFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoCellFile {
    pub name: String,
    pub attach: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeCellFile {
    pub name: String,
    pub attach: Vec<TriadLetterFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriadLetterFile {
    pub f: String,
    #[serde(default)]
    pub h: Vec<HLetterFile>,
    pub cell: String,
    pub sign: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HLetterFile {
    pub f: String,
    pub cell: String,
    pub sign: i32,
}

/// Line and column (1-based) of the first occurrence of `needle` as a JSON string.
fn locate(text: &str, needle: &str) -> (usize, usize) {
    let quoted = format!("\"{needle}\"");
    match text.find(&quoted) {
        Some(pos) => {
            let before = &text[..pos];
            let line = before.matches('\n').count() + 1;
            let column = pos - before.rfind('\n').map_or(0, |p| p + 1) + 1;
            (line, column)
        }
        None => (0, 0),
    }
}

impl ComplexFile {
    fn word(alphabet: &Arc<Alphabet>, text: &str, source: &str) -> Result<Word, ComplexError> {
        Word::parse(alphabet, text).map_err(|e| match e {
            WordError::Malformed { .. } => {
                let (line, column) = locate(source, text);
                ComplexError::Parse { line, column, message: e.to_string() }
            }
            other => other.into(),
        })
    }

    fn build(self, source: &str) -> Result<CWComplex, ComplexError> {
        let alphabet = Alphabet::new(&self.generators)?;
        let mut two = Vec::new();
        for c in &self.two_cells {
            two.push(TwoCell { name: c.name.clone(), attach: Self::word(&alphabet, &c.attach, source)? });
        }
        let mut three = Vec::new();
        for c in &self.three_cells {
            let mut letters = Vec::new();
            for l in &c.attach {
                let mut h = Vec::new();
                for hl in &l.h {
                    h.push(HLetter { conj: Self::word(&alphabet, &hl.f, source)?, cell: hl.cell.clone(), sign: hl.sign });
                }
                letters.push(TriadLetter {
                    conj_f: Self::word(&alphabet, &l.f, source)?,
                    conj_h: HWord::new(h),
                    cell: l.cell.clone(),
                    sign: l.sign,
                });
            }
            three.push(ThreeCell { name: c.name.clone(), attach: TriadWord { letters } });
        }
        CWComplex::new(alphabet, two, three)
    }
}

/// Canonical labels for words of F modulo a quotient through which all
/// coefficient actions factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pi1Labeling {
    /// Free reduction; exact when π₁ is free.
    Free,
    /// Exponent-sum normal form `g₁^{e₁} g₂^{e₂} …`.
    Abelianization,
    /// Exponent sums reduced modulo the given moduli (0 means no reduction).
    ExponentMod(Vec<i64>),
    /// Everything to the identity.
    Trivial,
}

impl Pi1Labeling {
    pub fn label(&self, w: &Word) -> Word {
        let al = w.alphabet();
        match self {
            Pi1Labeling::Free => w.clone(),
            Pi1Labeling::Abelianization => Word::from_runs(al, w.exponent_sums().into_iter().enumerate()),
            Pi1Labeling::ExponentMod(mods) => Word::from_runs(
                al,
                w.exponent_sums()
                    .into_iter()
                    .enumerate()
                    .map(|(g, e)| (g, if mods[g] == 0 { e } else { e.rem_euclid(mods[g]) })),
            ),
            Pi1Labeling::Trivial => Word::identity(al),
        }
    }
}

/// The catalog of named spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatalogSpace {
    CircleWedge(usize),
    Sphere2,
    Torus2,
    Rp2,
    GenusSurface(usize),
    TorusKnot(i64, i64),
    KleinBottle,
    S1WedgeS2,
    Torus3,
    S1xS2,
}

impl CatalogSpace {
    /// Parses `name` or `name:p1,p2`.
    pub fn parse(spec: &str) -> Result<CatalogSpace, ComplexError> {
        let (name, params) = match spec.split_once(':') {
            Some((n, p)) => (n, p),
            None => (spec, ""),
        };
        let params: Vec<i64> = if params.is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|e| ComplexError::InvalidParams { name: name.to_string(), reason: e.to_string() })?
        };
        Self::from_params(name, &params)
    }

    pub fn from_params(name: &str, params: &[i64]) -> Result<CatalogSpace, ComplexError> {
        let bad = |reason: &str| ComplexError::InvalidParams { name: name.to_string(), reason: reason.to_string() };
        let arity = |n: usize| if params.len() == n { Ok(()) } else { Err(bad(&format!("expected {n} parameter(s)"))) };
        let space = match name {
            "circle_wedge" => {
                arity(1)?;
                if params[0] < 1 {
                    return Err(bad("n must be at least 1"));
                }
                CatalogSpace::CircleWedge(params[0] as usize)
            }
            "genus_surface" => {
                arity(1)?;
                if params[0] < 1 {
                    return Err(bad("g must be at least 1"));
                }
                CatalogSpace::GenusSurface(params[0] as usize)
            }
            "torus_knot" => {
                arity(2)?;
                if params[0] < 1 || params[1] < 1 {
                    return Err(bad("p and q must be at least 1"));
                }
                CatalogSpace::TorusKnot(params[0], params[1])
            }
            _ => {
                arity(0)?;
                match name {
                    "sphere2" => CatalogSpace::Sphere2,
                    "torus2" => CatalogSpace::Torus2,
                    "rp2" => CatalogSpace::Rp2,
                    "klein_bottle" => CatalogSpace::KleinBottle,
                    "s1_wedge_s2" => CatalogSpace::S1WedgeS2,
                    "torus3" => CatalogSpace::Torus3,
                    "s1_x_s2" => CatalogSpace::S1xS2,
                    _ => return Err(ComplexError::UnknownSpace(name.to_string())),
                }
            }
        };
        Ok(space)
    }

    pub fn name(&self) -> String {
        match self {
            CatalogSpace::CircleWedge(n) => format!("circle_wedge:{n}"),
            CatalogSpace::Sphere2 => "sphere2".into(),
            CatalogSpace::Torus2 => "torus2".into(),
            CatalogSpace::Rp2 => "rp2".into(),
            CatalogSpace::GenusSurface(g) => format!("genus_surface:{g}"),
            CatalogSpace::TorusKnot(p, q) => format!("torus_knot:{p},{q}"),
            CatalogSpace::KleinBottle => "klein_bottle".into(),
            CatalogSpace::S1WedgeS2 => "s1_wedge_s2".into(),
            CatalogSpace::Torus3 => "torus3".into(),
            CatalogSpace::S1xS2 => "s1_x_s2".into(),
        }
    }

    pub fn complex(&self) -> CWComplex {
        let built = match *self {
            CatalogSpace::CircleWedge(n) => {
                let names: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
                Alphabet::new(&names)
                    .map_err(ComplexError::from)
                    .and_then(|al| CWComplex::new(al, Vec::new(), Vec::new()))
            }
            CatalogSpace::Sphere2 => CWComplex::from_text(&[], &[("t", "")], &[]),
            CatalogSpace::Torus2 => CWComplex::from_text(&["a", "b"], &[("t", "a b a^-1 b^-1")], &[]),
            CatalogSpace::Rp2 => CWComplex::from_text(&["a"], &[("t", "a^2")], &[]),
            CatalogSpace::GenusSurface(g) => {
                let mut names = Vec::new();
                let mut rel = Vec::new();
                for i in 1..=g {
                    names.push(format!("a{i}"));
                    names.push(format!("b{i}"));
                    rel.push(format!("a{i} b{i} a{i}^-1 b{i}^-1"));
                }
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                CWComplex::from_text(&names, &[("t", &rel.join(" "))], &[])
            }
            CatalogSpace::TorusKnot(p, q) => CWComplex::from_text(&["a", "b"], &[("t", &format!("a^{p} b^{}", -q))], &[]),
            CatalogSpace::KleinBottle => return CatalogSpace::TorusKnot(2, 2).complex(),
            CatalogSpace::S1WedgeS2 => CWComplex::from_text(&["a"], &[("t", "")], &[]),
            CatalogSpace::Torus3 => CWComplex::from_text(
                &["a", "b", "c"],
                &[("t", "b c b^-1 c^-1"), ("u", "c a c^-1 a^-1"), ("v", "a b a^-1 b^-1")],
                &[("x", &[("", "t", 1), ("c", "v", -1), ("", "u", 1), ("a", "t", -1), ("", "v", 1), ("b", "u", -1)])],
            ),
            CatalogSpace::S1xS2 => CWComplex::from_text(&["a"], &[("t", "")], &[("x", &[("", "t", 1), ("a", "t", -1)])]),
        };
        built.expect("catalog complexes are valid")
    }

    /// Labeling of π₁ used for coefficient actions. It is exact for free and
    /// abelian fundamental groups; for the remaining surfaces and torus-knot
    /// complexes it is the abelianization, which suffices because every
    /// supported coefficient action factors through an abelian group.
    pub fn labeling(&self) -> Pi1Labeling {
        match self {
            CatalogSpace::CircleWedge(_) | CatalogSpace::S1WedgeS2 => Pi1Labeling::Free,
            CatalogSpace::Sphere2 => Pi1Labeling::Trivial,
            CatalogSpace::Rp2 => Pi1Labeling::ExponentMod(vec![2]),
            _ => Pi1Labeling::Abelianization,
        }
    }

    /// Every catalog space of dimension two, with small parameters.
    pub fn dimension_two_samples() -> Vec<CatalogSpace> {
        let mut v = vec![
            CatalogSpace::Sphere2,
            CatalogSpace::Torus2,
            CatalogSpace::Rp2,
            CatalogSpace::KleinBottle,
            CatalogSpace::S1WedgeS2,
        ];
        v.extend((1..=3).map(CatalogSpace::GenusSurface));
        for p in 1..=6 {
            for q in 1..=6 {
                v.push(CatalogSpace::TorusKnot(p, q));
            }
        }
        v
    }
}

/// Catalog lookup by name and parameters.
pub fn catalog(name: &str, params: &[i64]) -> Result<CWComplex, ComplexError> {
    Ok(CatalogSpace::from_params(name, params)?.complex())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus3_cells() {
        let m = catalog("torus3", &[]).unwrap();
        assert_eq!((m.generators().len(), m.two_cells().len(), m.three_cells().len()), (3, 3, 1));
        assert_eq!(m.attaching_word("t").unwrap().to_string(), "b c b^-1 c^-1");
        assert_eq!(m.attaching_word("u").unwrap().to_string(), "c a c^-1 a^-1");
        assert_eq!(m.attaching_word("v").unwrap().to_string(), "a b a^-1 b^-1");
        let x = &m.three_cells()[0].attach;
        let shape: Vec<(String, &str, i32)> =
            x.letters.iter().map(|l| (l.conj_f.to_string(), l.cell.as_str(), l.sign)).collect();
        assert_eq!(
            shape,
            vec![
                ("".into(), "t", 1),
                ("c".into(), "v", -1),
                ("".into(), "u", 1),
                ("a".into(), "t", -1),
                ("".into(), "v", 1),
                ("b".into(), "u", -1)
            ]
        );
    }

    #[test]
    fn triad_checks() {
        let t3 = catalog("torus3", &[]).unwrap();
        assert!(t3.validate_triad(&t3.three_cells()[0].attach).is_ok());
        let s = catalog("s1_x_s2", &[]).unwrap();
        assert!(s.validate_triad(&s.three_cells()[0].attach).is_ok());
        let single = TriadWord::from_simple(t3.alphabet(), &[("", "t", 1)]).unwrap();
        let v = t3.validate_triad(&single).unwrap_err();
        assert_eq!(v.index, 0);
        assert_eq!(v.residual.to_string(), "b c b^-1 c^-1");
    }

    #[test]
    fn catalog_shapes() {
        let s2 = catalog("sphere2", &[]).unwrap();
        assert!(s2.generators().is_empty());
        assert!(s2.two_cells()[0].attach.is_identity());
        assert_eq!(catalog("torus_knot", &[2, 3]).unwrap().attaching_word("t").unwrap().to_string(), "a^2 b^-3");
        assert_eq!(catalog("klein_bottle", &[]).unwrap(), catalog("torus_knot", &[2, 2]).unwrap());
        assert_eq!(
            catalog("genus_surface", &[2]).unwrap().attaching_word("t").unwrap().to_string(),
            "a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1"
        );
        assert!(matches!(catalog("genus_surface", &[0]), Err(ComplexError::InvalidParams { .. })));
        assert!(matches!(catalog("torus_knot", &[0, 1]), Err(ComplexError::InvalidParams { .. })));
        assert!(matches!(catalog("lens", &[]), Err(ComplexError::UnknownSpace(_))));
        assert_eq!(CatalogSpace::parse("torus_knot:2,3").unwrap(), CatalogSpace::TorusKnot(2, 3));
    }

    #[test]
    fn file_round_trip_and_errors() {
        let t2 = catalog("torus2", &[]).unwrap();
        assert_eq!(CWComplex::load(&t2.save()).unwrap(), t2);
        let bad = r#"{"generators":["a"],
  "two_cells":[{"name":"t","attach":"a^x"}]}"#;
        match CWComplex::load(bad) {
            Err(ComplexError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 37)),
            other => panic!("expected parse error, got {other:?}"),
        }
        let unknown = r#"{"generators":["a"],"two_cells":[{"name":"t","attach":""}],
            "three_cells":[{"name":"x","attach":[{"f":"","h":[],"cell":"s","sign":1}]}]}"#;
        assert_eq!(CWComplex::load(unknown).unwrap_err(), ComplexError::UnknownCell("s".into()));
        let extra = r#"{"generators":[],"colour":"red"}"#;
        assert!(matches!(CWComplex::load(extra), Err(ComplexError::Parse { .. })));
    }

    #[test]
    fn labelings() {
        let al = Alphabet::new(&["a", "b"]).unwrap();
        let w = Word::parse(&al, "a b a^-1 b^3").unwrap();
        assert_eq!(Pi1Labeling::Abelianization.label(&w).to_string(), "b^4");
        assert_eq!(Pi1Labeling::ExponentMod(vec![2, 3]).label(&w).to_string(), "b");
        assert!(Pi1Labeling::Trivial.label(&w).is_identity());
    }
}
