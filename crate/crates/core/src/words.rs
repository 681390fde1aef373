//! Letters, freely reduced words and group presentations.
//!
//! A generator is a lowercase ASCII letter and its inverse the matching
//! uppercase letter. Internally a letter is the pair (index, inverse flag)
//! where the index is the letter's position in `a..=z`; words over an
//! abstract generating set `U` reuse the same type with the index pointing
//! into `U`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: u8,
    pub inverse: bool,
}

impl Letter {
    pub const fn new(generator: u8, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Letter::new(c as u8 - b'a', false)),
            'A'..='Z' => Some(Letter::new(c as u8 - b'A', true)),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.inverse { b'A' } else { b'a' };
        (base + self.generator) as char
    }

    /// +1 or -1.
    pub fn sign(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word. Every constructor reduces, so no value of this type
/// ever contains an adjacent `x x^-1` pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Freely reduces an arbitrary letter sequence.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word { letters: out }
}

/// Splits `w` as `conjugator · core · conjugator⁻¹` with `core` cyclically
/// reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let n = w.letters.len();
    let mut k = 0;
    while 2 * k + 1 < n && w.letters[k] == w.letters[n - 1 - k].inv() {
        k += 1;
    }
    let core = Word {
        letters: w.letters[k..n - k].to_vec(),
    };
    let conjugator = Word {
        letters: w.letters[..k].to_vec(),
    };
    (core, conjugator)
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        free_reduce(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// Parses letters `a-z`/`A-Z`, optionally followed by `^n` (a power of
    /// that single letter, `n` may be negative). `1` or the empty string is
    /// the identity. The result is freely reduced.
    pub fn parse(text: &str) -> Result<Word> {
        let s = text.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::empty());
        }
        let chars: Vec<char> = s.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let l = Letter::from_char(c).ok_or(Error::UnknownLetter(c))?;
            i += 1;
            let mut power: i64 = 1;
            if i < chars.len() && chars[i] == '^' {
                let start = i + 1;
                let mut end = start;
                if end < chars.len() && chars[end] == '-' {
                    end += 1;
                }
                while end < chars.len() && chars[end].is_ascii_digit() {
                    end += 1;
                }
                let digits: String = chars[start..end].iter().collect();
                power = digits
                    .parse()
                    .map_err(|_| Error::Malformed(format!("bad exponent in {s:?}")))?;
                i = end;
            }
            let l = if power < 0 { l.inv() } else { l };
            letters.extend(std::iter::repeat_n(l, power.unsigned_abs() as usize));
        }
        Ok(free_reduce(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// Product `self · other`, freely reduced at the junction.
    pub fn mul(&self, other: &Word) -> Word {
        let mut k = 0;
        let n = self.letters.len();
        while k < n && k < other.letters.len() && self.letters[n - 1 - k] == other.letters[k].inv()
        {
            k += 1;
        }
        let mut letters = Vec::with_capacity(n - k + other.letters.len() - k);
        letters.extend_from_slice(&self.letters[..n - k]);
        letters.extend_from_slice(&other.letters[k..]);
        Word { letters }
    }

    pub fn mul_letter(&self, l: Letter) -> Word {
        let mut letters = self.letters.clone();
        if letters.last() == Some(&l.inv()) {
            letters.pop();
        } else {
            letters.push(l);
        }
        Word { letters }
    }

    /// `self⁻¹ · w · self`.
    pub fn conjugate(&self, w: &Word) -> Word {
        self.inverse().mul(w).mul(self)
    }

    pub fn pow(&self, e: i64) -> Word {
        if e == 0 || self.is_empty() {
            return Word::empty();
        }
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let (core, conj) = cyclic_reduce(&base);
        let mut letters = conj.letters.clone();
        for _ in 0..e.unsigned_abs() {
            letters.extend_from_slice(&core.letters);
        }
        letters.extend(conj.inverse().letters);
        Word { letters }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word {
            letters: self.letters[..n].to_vec(),
        }
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word {
            letters: self.letters[n..].to_vec(),
        }
    }

    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word {
            letters: self.letters[start..end].to_vec(),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(f), Some(l)) => self.letters.len() == 1 || *f != l.inv(),
            _ => true,
        }
    }

    /// Left rotation by `k` letters. Only meaningful on cyclically reduced
    /// words, where the result is again reduced.
    pub fn rotate(&self, k: usize) -> Word {
        let n = self.letters.len();
        if n == 0 {
            return Word::empty();
        }
        let k = k % n;
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Word { letters }
    }

    pub fn common_prefix_len(&self, other: &Word) -> usize {
        common_prefix_len(&self.letters, &other.letters)
    }

    pub fn starts_with(&self, other: &Word) -> bool {
        self.letters.starts_with(&other.letters)
    }

    /// For a nonempty word `w = r^e` with `e` maximal, returns `(r, e)`.
    pub fn primitive_root(&self) -> (Word, usize) {
        let n = self.letters.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| self.letters[i] == self.letters[i - p]) {
                return (self.prefix(p), n / p);
            }
        }
        (self.clone(), 1)
    }

    /// Exponent sum of each generator listed in `generators`.
    pub fn abelianization(&self, generators: &[u8]) -> Vec<i32> {
        let mut v = vec![0; generators.len()];
        for l in &self.letters {
            if let Some(i) = generators.iter().position(|&g| g == l.generator) {
                v[i] += l.sign();
            }
        }
        v
    }
}

pub fn common_prefix_len(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Shortlex: shorter words first, then lexicographic with `a < A < b < B < …`.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::parse(s)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl schemars::JsonSchema for Word {
    fn schema_name() -> String {
        "Word".to_string()
    }

    fn json_schema(gen: &mut schemars::gen::SchemaGenerator) -> schemars::schema::Schema {
        String::json_schema(gen)
    }
}

/// Words over an abstract set `U` are [`Word`]s whose letter indices point
/// into `U`. This evaluates such a word to a word over the ambient alphabet.
pub fn evaluate(uword: &Word, set: &[Word]) -> Word {
    let mut acc = Word::empty();
    for l in uword.letters() {
        let w = &set[l.generator as usize];
        acc = if l.inverse {
            acc.mul(&w.inverse())
        } else {
            acc.mul(w)
        };
    }
    acc
}

/// Human-readable form of a word over `U`: the factors joined by `.`.
pub fn format_uword(uword: &Word, set: &[Word]) -> String {
    uword
        .letters()
        .iter()
        .map(|l| {
            let w = &set[l.generator as usize];
            if l.inverse {
                w.inverse().to_string()
            } else {
                w.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(".")
}

/// All freely reduced words of length at most `max_len` over `size`
/// generators, in shortlex order.
pub fn reduced_words(size: usize, max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = (0..size as u8)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut out = vec![Word::empty()];
    let mut level = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            for &l in &letters {
                if w.letters().last() != Some(&l.inv()) {
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(Word { letters });
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// A finite presentation `⟨generators | relators⟩`. Relators are stored
/// cyclically reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<u8>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<u8>, relators: Vec<Word>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        for (i, g) in generators.iter().enumerate() {
            if *g >= 26 {
                return Err(Error::InvalidGenerator(format!("#{g}")));
            }
            if generators[..i].contains(g) {
                return Err(Error::DuplicateGenerator((b'a' + g) as char));
            }
        }
        let mut p = Presentation {
            generators,
            relators: Vec::new(),
        };
        for (i, r) in relators.iter().enumerate() {
            p.validate(r)?;
            let (core, _) = cyclic_reduce(r);
            if core.is_empty() {
                return Err(Error::EmptyRelator(i));
            }
            p.relators.push(core);
        }
        Ok(p)
    }

    /// The free group on the given letters, e.g. `Presentation::free("ab")`.
    pub fn free(names: &str) -> Result<Self> {
        let gens = names
            .chars()
            .map(|c| match c {
                'a'..='z' => Ok(c as u8 - b'a'),
                _ => Err(Error::InvalidGenerator(c.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(gens, Vec::new())
    }

    pub fn generators(&self) -> &[u8] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn with_relator(&self, r: Word) -> Result<Self> {
        let mut relators = self.relators.clone();
        relators.push(r);
        Presentation::new(self.generators.clone(), relators)
    }

    /// Errors with the first letter that is not a generator of this
    /// presentation.
    pub fn validate(&self, w: &Word) -> Result<()> {
        match w
            .letters()
            .iter()
            .find(|l| !self.generators.contains(&l.generator))
        {
            Some(l) => Err(Error::UnknownLetter(l.to_char())),
            None => Ok(()),
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let w = Word::parse(text)?;
        self.validate(&w)?;
        Ok(w)
    }

    /// `a, A, b, B, …` in generator order.
    pub fn standard_generators(&self) -> Vec<Word> {
        self.generators
            .iter()
            .flat_map(|&g| {
                [
                    Word::letter(Letter::new(g, false)),
                    Word::letter(Letter::new(g, true)),
                ]
            })
            .collect()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| ((b'a' + g) as char).to_string())
            .collect();
        let rels: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
        writeln!(f, "generators: {}", gens.join(" "))?;
        if rels.is_empty() {
            writeln!(f, "relators:")
        } else {
            writeln!(f, "relators: {}", rels.join(" "))
        }
    }
}

impl FromStr for Presentation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_presentation(s)
    }
}

/// Parses the two-line presentation format:
///
/// ```text
/// generators: a b
/// relators: abAB
/// ```
///
/// Lines starting with `#` and blank lines are skipped; CRLF is accepted.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut lines = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty());

    let gen_line = lines
        .next()
        .ok_or_else(|| Error::Malformed("missing generators line".into()))?;
    let gen_body = gen_line
        .trim()
        .strip_prefix("generators:")
        .ok_or_else(|| Error::Malformed("first line must start with 'generators:'".into()))?;
    let mut generators = Vec::new();
    for tok in gen_body.split_whitespace() {
        let mut chars = tok.chars();
        match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='z'), None) => {
                let g = c as u8 - b'a';
                if generators.contains(&g) {
                    return Err(Error::DuplicateGenerator(c));
                }
                generators.push(g);
            }
            _ => return Err(Error::InvalidGenerator(tok.to_string())),
        }
    }
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }

    let rel_line = lines
        .next()
        .ok_or_else(|| Error::Malformed("missing relators line".into()))?;
    let rel_body = rel_line
        .trim()
        .strip_prefix("relators:")
        .ok_or_else(|| Error::Malformed("second line must start with 'relators:'".into()))?;
    if let Some(extra) = lines.next() {
        return Err(Error::Malformed(format!("unexpected line {extra:?}")));
    }

    let mut relators = Vec::new();
    for tok in rel_body.split_whitespace() {
        let mut letters = Vec::with_capacity(tok.len());
        for c in tok.chars() {
            let l = Letter::from_char(c).ok_or(Error::UnknownLetter(c))?;
            if !generators.contains(&l.generator) {
                return Err(Error::UnknownLetter(c));
            }
            letters.push(l);
        }
        relators.push(free_reduce(letters));
    }
    Presentation::new(generators, relators)
}
