//! Pieces, the classical C'(λ) and C''(λ) conditions, and Dehn's algorithm.
//!
//! A piece is a common prefix of two distinct elements of the symmetrized
//! relator set (all cyclic shifts of every relator and of its inverse).

use std::collections::{BTreeMap, HashMap, HashSet};

use num::{BigInt, Zero};
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};
use crate::words::{Letter, Presentation, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrizedElement {
    pub word: Word,
    pub relator: usize,
    pub shift: usize,
    pub inverted: bool,
}

#[derive(Clone, Debug)]
pub struct SymmetrizedSet {
    elements: Vec<SymmetrizedElement>,
    relator_lens: Vec<usize>,
}

impl SymmetrizedSet {
    pub fn elements(&self) -> &[SymmetrizedElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn relator_lens(&self) -> &[usize] {
        &self.relator_lens
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.elements.iter().any(|e| &e.word == w)
    }
}

/// All cyclic shifts of every relator and of every inverse relator,
/// deduplicated; each element remembers where it first came from.
pub fn symmetrize(p: &Presentation) -> Result<SymmetrizedSet> {
    if p.relators().is_empty() {
        return Err(Error::NoRelators);
    }
    let mut elements: Vec<SymmetrizedElement> = Vec::new();
    let mut seen: HashSet<Word> = HashSet::new();
    for (i, r) in p.relators().iter().enumerate() {
        // rotations of kᵐ repeat with period |k|
        let period = r.primitive_root().0.len();
        for inverted in [false, true] {
            let base = if inverted { r.inverse() } else { r.clone() };
            for shift in 0..period {
                let word = base.rotate(shift);
                if seen.insert(word.clone()) {
                    elements.push(SymmetrizedElement {
                        word,
                        relator: i,
                        shift,
                        inverted,
                    });
                }
            }
        }
    }
    Ok(SymmetrizedSet {
        elements,
        relator_lens: p.relators().iter().map(Word::len).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// C'(λ): each piece is shorter than λ times every relator containing it.
    CPrime,
    /// C''(λ): each piece is shorter than λ times the shortest relator.
    CDoublePrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Result of the pairwise piece scan.
#[derive(Clone, Debug)]
pub struct PieceReport {
    pub max_piece_len: usize,
    pub witness: Word,
    /// (relator i, relator j) → longest common prefix between distinct
    /// symmetrized elements coming from relators i and j.
    pub per_pair: BTreeMap<(usize, usize), usize>,
    /// max over pieces of |piece| / min(|r_i|, |r_j|) for the two relators
    /// whose symmetrized elements share it.
    pub cprime_ratio: Rational,
    pub shortest_relator_len: usize,
}

pub fn compute_pieces(s: &SymmetrizedSet) -> PieceReport {
    let els = &s.elements;
    let lens = &s.relator_lens;

    // One row of the pair scan per element; rows are merged in index order
    // so ties resolve identically whatever the thread count.
    struct Row {
        best: (usize, usize, usize),
        ratio: Rational,
        pairs: Vec<((usize, usize), usize)>,
    }
    let rows: Vec<Row> = (0..els.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (0, i, i);
            let mut ratio_best = Rational::zero();
            let mut pairs = Vec::new();
            for j in (i + 1)..els.len() {
                let l = els[i].word.common_prefix_len(&els[j].word);
                let (ri, rj) = (els[i].relator, els[j].relator);
                pairs.push(((ri.min(rj), ri.max(rj)), l));
                if l > best.0 {
                    best = (l, i, j);
                }
                if l > 0 {
                    let q = ratio(l as i64, lens[ri].min(lens[rj]) as i64);
                    if q > ratio_best {
                        ratio_best = q;
                    }
                }
            }
            Row {
                best,
                ratio: ratio_best,
                pairs,
            }
        })
        .collect();

    let mut per_pair = BTreeMap::new();
    for i in 0..lens.len() {
        for j in 0..lens.len() {
            per_pair.insert((i, j), 0usize);
        }
    }
    let mut best = (0usize, 0usize, 0usize);
    let mut cprime_ratio = Rational::zero();
    for row in rows {
        if row.best.0 > best.0 {
            best = row.best;
        }
        if row.ratio > cprime_ratio {
            cprime_ratio = row.ratio;
        }
        for ((i, j), l) in row.pairs {
            let e = per_pair.get_mut(&(i, j)).expect("pair initialized");
            *e = (*e).max(l);
            let e = per_pair.get_mut(&(j, i)).expect("pair initialized");
            *e = (*e).max(l);
        }
    }
    let witness = if best.0 > 0 {
        els[best.1].word.prefix(best.0)
    } else {
        Word::empty()
    };
    PieceReport {
        max_piece_len: best.0,
        witness,
        per_pair,
        cprime_ratio,
        shortest_relator_len: lens.iter().copied().min().unwrap_or(0),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct SCReport {
    pub variant: Variant,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub lambda: Rational,
    pub max_piece_len: usize,
    pub shortest_relator_len: usize,
    pub verdict: Verdict,
    pub witness: Word,
    #[serde(skip)]
    pub per_pair: BTreeMap<(usize, usize), usize>,
    /// The quantity compared against λ: the C' ratio or
    /// max_piece_len / shortest_relator_len.
    #[serde(skip, default = "Rational::zero")]
    pub ratio: Rational,
}

pub fn check_small_cancellation(
    p: &Presentation,
    lambda: &Rational,
    variant: Variant,
) -> Result<SCReport> {
    if *lambda <= Rational::zero() || *lambda > Rational::from_integer(BigInt::from(1)) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in (0, 1], got {lambda}"
        )));
    }
    if p.relators().is_empty() {
        return Ok(SCReport {
            variant,
            lambda: lambda.clone(),
            max_piece_len: 0,
            shortest_relator_len: 0,
            verdict: Verdict::Pass,
            witness: Word::empty(),
            per_pair: BTreeMap::new(),
            ratio: Rational::zero(),
        });
    }
    let pieces = compute_pieces(&symmetrize(p)?);
    let ratio_value = match variant {
        Variant::CPrime => pieces.cprime_ratio.clone(),
        Variant::CDoublePrime => ratio(
            pieces.max_piece_len as i64,
            pieces.shortest_relator_len as i64,
        ),
    };
    let verdict = if ratio_value < *lambda {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(SCReport {
        variant,
        lambda: lambda.clone(),
        max_piece_len: pieces.max_piece_len,
        shortest_relator_len: pieces.shortest_relator_len,
        verdict,
        witness: pieces.witness,
        per_pair: pieces.per_pair,
        ratio: ratio_value,
    })
}

/// One replacement performed by Dehn's algorithm: the subword of length
/// `removed.len()` at `position` was a prefix of symmetrized element
/// `element` longer than half of it, and was replaced by `inserted`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct RewriteStep {
    pub position: usize,
    pub removed: Word,
    pub inserted: Word,
    pub element: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct DehnOutcome {
    pub result: Word,
    pub trace: Vec<RewriteStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct GreendlingerWitness {
    pub position: usize,
    pub length: usize,
    pub element: Word,
}

/// Dehn's algorithm for a presentation that passed the C'(1/6) check (or
/// has no relators, in which case free reduction decides everything).
#[derive(Clone, Debug)]
pub struct DehnSolver {
    elements: Vec<Word>,
    by_first: HashMap<Letter, Vec<usize>>,
}

impl DehnSolver {
    pub fn new(p: &Presentation) -> Result<Self> {
        if p.relators().is_empty() {
            return Ok(DehnSolver {
                elements: Vec::new(),
                by_first: HashMap::new(),
            });
        }
        let report = check_small_cancellation(p, &ratio(1, 6), Variant::CPrime)?;
        if report.verdict != Verdict::Pass {
            return Err(Error::NotVerifiedC16);
        }
        let sym = symmetrize(p)?;
        let elements: Vec<Word> = sym.elements().iter().map(|e| e.word.clone()).collect();
        let mut by_first: HashMap<Letter, Vec<usize>> = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            by_first.entry(e.letters()[0]).or_default().push(i);
        }
        Ok(DehnSolver { elements, by_first })
    }

    pub fn is_free(&self) -> bool {
        self.elements.is_empty()
    }

    /// Longest replaceable match starting at `pos`: (length, element).
    fn match_at(&self, letters: &[Letter], pos: usize) -> Option<(usize, usize)> {
        let candidates = self.by_first.get(&letters[pos])?;
        let mut best: Option<(usize, usize)> = None;
        for &e in candidates {
            let el = self.elements[e].letters();
            let l = crate::words::common_prefix_len(&letters[pos..], el);
            if 2 * l > el.len() && best.is_none_or(|(bl, _)| l > bl) {
                best = Some((l, e));
            }
        }
        best
    }

    fn reduce_inner(&self, w: &Word, mut trace: Option<&mut Vec<RewriteStep>>) -> Word {
        let mut cur = w.clone();
        if self.is_free() {
            return cur;
        }
        'outer: loop {
            let letters = cur.letters();
            for pos in 0..letters.len() {
                if let Some((len, e)) = self.match_at(letters, pos) {
                    let el = &self.elements[e];
                    // el = s · t with s the matched prefix, so s = t⁻¹.
                    let inserted = el.suffix_from(len).inverse();
                    if let Some(t) = trace.as_deref_mut() {
                        t.push(RewriteStep {
                            position: pos,
                            removed: cur.subword(pos, pos + len),
                            inserted: inserted.clone(),
                            element: el.clone(),
                        });
                    }
                    cur = cur
                        .prefix(pos)
                        .mul(&inserted)
                        .mul(&cur.suffix_from(pos + len));
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    /// Leftmost, longest replacement first, until no subword is more than
    /// half of a symmetrized relator.
    pub fn reduce(&self, w: &Word) -> DehnOutcome {
        let mut trace = Vec::new();
        let result = self.reduce_inner(w, Some(&mut trace));
        DehnOutcome { result, trace }
    }

    pub fn reduce_word(&self, w: &Word) -> Word {
        self.reduce_inner(w, None)
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.reduce_word(w).is_empty()
    }

    pub fn equal(&self, a: &Word, b: &Word) -> bool {
        a == b || self.is_trivial(&a.mul(&b.inverse()))
    }

    pub fn greendlinger_witness(&self, w: &Word) -> Option<GreendlingerWitness> {
        let letters = w.letters();
        (0..letters.len()).find_map(|pos| {
            self.match_at(letters, pos)
                .map(|(len, e)| GreendlingerWitness {
                    position: pos,
                    length: len,
                    element: self.elements[e].clone(),
                })
        })
    }
}

pub fn dehn_reduce(w: &Word, p: &Presentation) -> Result<DehnOutcome> {
    p.validate(w)?;
    Ok(DehnSolver::new(p)?.reduce(w))
}

pub fn words_equal(w1: &Word, w2: &Word, p: &Presentation) -> Result<bool> {
    p.validate(w1)?;
    p.validate(w2)?;
    Ok(DehnSolver::new(p)?.equal(w1, w2))
}

pub fn greendlinger_witness(w: &Word, p: &Presentation) -> Result<Option<GreendlingerWitness>> {
    p.validate(w)?;
    Ok(DehnSolver::new(p)?.greendlinger_witness(w))
}
