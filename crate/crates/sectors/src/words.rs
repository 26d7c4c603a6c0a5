//! Free-group words over named generators, and the Fox calculus on the
//! integral group ring of a free group.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("empty generator name")]
    EmptyName,
    #[error("words over different alphabets")]
    AlphabetMismatch,
    #[error("malformed token `{token}`: {reason}")]
    Malformed { token: String, reason: String },
}

/// An ordered set of generator names.
#[derive(Debug)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Alphabet>, WordError> {
        let mut index = HashMap::new();
        let mut out = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref();
            if n.is_empty() {
                return Err(WordError::EmptyName);
            }
            if n.contains(|c: char| c.is_whitespace() || c == '^') {
                return Err(WordError::Malformed {
                    token: n.to_string(),
                    reason: "generator names may not contain whitespace or '^'".into(),
                });
            }
            if index.insert(n.to_string(), i).is_some() {
                return Err(WordError::DuplicateGenerator(n.to_string()));
            }
            out.push(n.to_string());
        }
        Ok(Arc::new(Alphabet { names: out, index }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, WordError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Alphabet {}

fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

/// A freely reduced word, stored as runs `(generator index, nonzero exponent)`
/// with adjacent runs on distinct generators.
#[derive(Clone)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    runs: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity(alphabet: &Arc<Alphabet>) -> Word {
        Word { alphabet: alphabet.clone(), runs: Vec::new() }
    }

    pub fn generator(alphabet: &Arc<Alphabet>, name: &str) -> Result<Word, WordError> {
        let g = alphabet.index_of(name)?;
        Ok(Word { alphabet: alphabet.clone(), runs: vec![(g, 1)] })
    }

    /// `g^e` for a generator index.
    pub fn power_of(alphabet: &Arc<Alphabet>, g: usize, e: i64) -> Word {
        assert!(g < alphabet.len(), "generator index out of range");
        Word::from_runs(alphabet, [(g, e)])
    }

    /// Free reduction of an arbitrary run sequence (zero exponents allowed).
    pub fn from_runs<I: IntoIterator<Item = (usize, i64)>>(alphabet: &Arc<Alphabet>, runs: I) -> Word {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (g, e) in runs {
            push_run(&mut out, g, e);
        }
        Word { alphabet: alphabet.clone(), runs: out }
    }

    /// Reduces a raw letter sequence given by generator names.
    pub fn reduce<S: AsRef<str>>(alphabet: &Arc<Alphabet>, letters: &[(S, i64)]) -> Result<Word, WordError> {
        let mut runs = Vec::with_capacity(letters.len());
        for (n, e) in letters {
            runs.push((alphabet.index_of(n.as_ref())?, *e));
        }
        Ok(Word::from_runs(alphabet, runs))
    }

    /// Parses the text syntax `a b^2 a^-1`; the empty string is the identity.
    pub fn parse(alphabet: &Arc<Alphabet>, text: &str) -> Result<Word, WordError> {
        let mut runs = Vec::new();
        for tok in text.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                None => (tok, 1),
                Some((n, k)) => {
                    let e: i64 = k.parse().map_err(|_| WordError::Malformed {
                        token: tok.to_string(),
                        reason: format!("exponent `{k}` is not an integer"),
                    })?;
                    if e == 0 {
                        return Err(WordError::Malformed {
                            token: tok.to_string(),
                            reason: "exponent must be nonzero".into(),
                        });
                    }
                    (n, e)
                }
            };
            if name.is_empty() {
                return Err(WordError::Malformed { token: tok.to_string(), reason: "missing generator".into() });
            }
            runs.push((alphabet.index_of(name)?, exp));
        }
        Ok(Word::from_runs(alphabet, runs))
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn runs(&self) -> &[(usize, i64)] {
        &self.runs
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    /// Number of letters counted with multiplicity.
    pub fn length(&self) -> u64 {
        self.runs.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    pub fn mul(&self, other: &Word) -> Result<Word, WordError> {
        if !same_alphabet(&self.alphabet, &other.alphabet) {
            return Err(WordError::AlphabetMismatch);
        }
        let mut runs = self.runs.clone();
        for &(g, e) in &other.runs {
            push_run(&mut runs, g, e);
        }
        Ok(Word { alphabet: self.alphabet.clone(), runs })
    }

    pub fn inv(&self) -> Word {
        let runs = self.runs.iter().rev().map(|&(g, e)| (g, -e)).collect();
        Word { alphabet: self.alphabet.clone(), runs }
    }

    /// `g · w · g⁻¹`.
    pub fn conj(g: &Word, w: &Word) -> Result<Word, WordError> {
        g.mul(w)?.mul(&g.inv())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut out = Word::identity(&self.alphabet);
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut v = vec![0; self.alphabet.len()];
        for &(g, e) in &self.runs {
            v[g] += e;
        }
        v
    }

    /// Rewrites the word into another alphabet through a generator map.
    pub fn translate(&self, target: &Arc<Alphabet>, map: impl Fn(&str) -> String) -> Result<Word, WordError> {
        let mut runs = Vec::with_capacity(self.runs.len());
        for &(g, e) in &self.runs {
            runs.push((target.index_of(&map(self.alphabet.name(g)))?, e));
        }
        Ok(Word::from_runs(target, runs))
    }

    /// Applies a homomorphism into a group given by images of generators.
    pub fn evaluate<T: Clone>(&self, identity: T, image: impl Fn(usize, i64) -> T, op: impl Fn(&T, &T) -> T) -> T {
        self.runs.iter().fold(identity, |acc, &(g, e)| op(&acc, &image(g, e)))
    }
}

fn push_run(runs: &mut Vec<(usize, i64)>, g: usize, e: i64) {
    if e == 0 {
        return;
    }
    if let Some(last) = runs.last_mut() {
        if last.0 == g {
            last.1 += e;
            if last.1 == 0 {
                runs.pop();
            }
            return;
        }
    }
    runs.push((g, e));
}

impl std::ops::Mul for &Word {
    type Output = Word;

    /// Panics when the alphabets differ; use [`Word::mul`] for a checked product.
    fn mul(self, rhs: &Word) -> Word {
        Word::mul(self, rhs).expect("word product over mismatched alphabets")
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.runs == other.runs && same_alphabet(&self.alphabet, &other.alphabet)
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.runs.hash(state);
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    /// Shortlex on letters, then by run data; alphabets compared last.
    fn cmp(&self, other: &Self) -> Ordering {
        self.length()
            .cmp(&other.length())
            .then_with(|| self.runs.cmp(&other.runs))
            .then_with(|| self.alphabet.names.cmp(&other.alphabet.names))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(g, e)) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.alphabet.name(g))?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            f.write_str("ε")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Element of ℤ[F]: a finite formal sum of words with nonzero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    alphabet: Arc<Alphabet>,
    terms: BTreeMap<Word, i64>,
}

impl GroupRingElement {
    pub fn zero(alphabet: &Arc<Alphabet>) -> Self {
        GroupRingElement { alphabet: alphabet.clone(), terms: BTreeMap::new() }
    }

    pub fn one(alphabet: &Arc<Alphabet>) -> Self {
        Self::from_word(&Word::identity(alphabet))
    }

    pub fn from_word(w: &Word) -> Self {
        Self::from_term(w, 1)
    }

    pub fn from_term(w: &Word, c: i64) -> Self {
        let mut out = Self::zero(w.alphabet());
        out.add_term(w.clone(), c);
        out
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn coefficient(&self, w: &Word) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, w: Word, c: i64) {
        assert!(same_alphabet(&self.alphabet, w.alphabet()), "group ring term over a different alphabet");
        if c == 0 {
            return;
        }
        let sum = self.terms.get(&w).copied().unwrap_or(0) + c;
        if sum == 0 {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero(&self.alphabet);
        for (w, c) in self.terms() {
            out.add_term(w.clone(), c * k);
        }
        out
    }

    /// `u · self` for a group element `u`.
    pub fn left_mul_word(&self, u: &Word) -> Self {
        let mut out = Self::zero(&self.alphabet);
        for (w, c) in self.terms() {
            out.add_term(u * w, c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.alphabet);
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                out.add_term(u * v, a * b);
            }
        }
        out
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Pushes the element along a quotient map given by canonical coset labels.
    pub fn project(&self, label: impl Fn(&Word) -> Word) -> Self {
        let mut out = Self::zero(&self.alphabet);
        for (w, c) in self.terms() {
            out.add_term(label(w), c);
        }
        out
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(sign)?;
            if i > 0 && !sign.is_empty() {
                f.write_str(" ")?;
            }
            let abs = c.unsigned_abs();
            match (abs, w.is_identity()) {
                (_, true) => write!(f, "{abs}")?,
                (1, false) => write!(f, "{w}")?,
                _ => write!(f, "{abs}·{w}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The Fox derivative ∂w/∂a for the generator with index `a`.
pub fn fox_derivative(w: &Word, a: usize) -> GroupRingElement {
    let alphabet = w.alphabet();
    let mut out = GroupRingElement::zero(alphabet);
    let mut prefix = Word::identity(alphabet);
    for &(g, e) in w.runs() {
        if g == a {
            if e > 0 {
                for k in 0..e {
                    out.add_term(&prefix * &Word::power_of(alphabet, a, k), 1);
                }
            } else {
                for k in 1..=(-e) {
                    out.add_term(&prefix * &Word::power_of(alphabet, a, -k), -1);
                }
            }
        }
        prefix = &prefix * &Word::power_of(alphabet, g, e);
    }
    out
}

/// Fox derivative by generator name.
pub fn fox_derivative_by_name(w: &Word, a: &str) -> Result<GroupRingElement, WordError> {
    Ok(fox_derivative(w, w.alphabet().index_of(a)?))
}
