//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use geogrowth::words::{
    free_reduce, parse_presentation, reduced_words, Letter, Presentation, Word,
};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Presentation {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    parse_presentation(&text).expect("fixture parses")
}

pub fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

fn inverse(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inv()).collect()
}

/// Equality oracle built without Dehn's algorithm: all freely reduced words
/// up to `bound` letters are nodes, and two nodes are joined when one comes
/// from the other by replacing a subword s with t where s·t⁻¹ is a cyclic
/// conjugate of a relator or its inverse. Connected components are group
/// elements as far as paths through words of length ≤ bound can see.
pub struct RelatorClosure {
    index: HashMap<Vec<Letter>, usize>,
    parent: Vec<usize>,
    rotations: Vec<Vec<Letter>>,
    pub bound: usize,
}

impl RelatorClosure {
    pub fn new(p: &Presentation, bound: usize) -> Self {
        let words = reduced_words(p.rank(), bound);
        let index: HashMap<Vec<Letter>, usize> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.letters().to_vec(), i))
            .collect();
        let mut rotations: Vec<Vec<Letter>> = Vec::new();
        for r in p.relators() {
            for base in [r.letters().to_vec(), inverse(r.letters())] {
                for k in 0..base.len() {
                    let mut rot = base[k..].to_vec();
                    rot.extend_from_slice(&base[..k]);
                    rotations.push(rot);
                }
            }
        }
        let mut oracle = RelatorClosure {
            index,
            parent: (0..words.len()).collect(),
            rotations: rotations.clone(),
            bound,
        };
        for (i, word) in words.iter().enumerate() {
            let l = word.letters();
            for start in 0..l.len() {
                for rot in &rotations {
                    let mut k = 0;
                    while k < rot.len() && start + k < l.len() && l[start + k] == rot[k] {
                        k += 1;
                        // l[start..start+k] = rot[..k], and rot[..k] = (rot[k..])⁻¹
                        let mut next = l[..start].to_vec();
                        next.extend(inverse(&rot[k..]));
                        next.extend_from_slice(&l[start + k..]);
                        let next = free_reduce(next);
                        if let Some(&j) = oracle.index.get(next.letters()) {
                            oracle.union(i, j);
                        }
                    }
                }
            }
        }
        oracle
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Component of a word of length ≤ bound.
    pub fn class(&mut self, w: &Word) -> usize {
        let i = *self
            .index
            .get(w.letters())
            .expect("word within the oracle bound");
        self.find(i)
    }

    /// Triviality of a word of length ≤ 2·half: split it in the middle and
    /// compare the two halves through the components.
    pub fn is_trivial(&mut self, w: &Word) -> bool {
        let h = w.len().div_ceil(2);
        let (u, v) = (w.prefix(h), w.suffix_from(h));
        self.class(&u) == self.class(&v.inverse())
    }

    pub fn equal(&mut self, a: &Word, b: &Word) -> bool {
        self.class(a) == self.class(b)
    }

    pub fn classes_up_to(&mut self, len: usize) -> usize {
        let keys: Vec<usize> = self
            .index
            .iter()
            .filter(|(k, _)| k.len() <= len)
            .map(|(_, &i)| i)
            .collect();
        let mut roots: Vec<usize> = keys.into_iter().map(|i| self.find(i)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Words of length ≤ len in the component of `w`.
    pub fn members(&mut self, w: &Word, len: usize) -> Vec<Word> {
        let c = self.class(w);
        let mut keys: Vec<(Vec<Letter>, usize)> = self
            .index
            .iter()
            .filter(|(k, _)| k.len() <= len)
            .map(|(k, &i)| (k.clone(), i))
            .collect();
        keys.sort();
        keys.into_iter()
            .filter(|(_, i)| self.find(*i) == c)
            .map(|(k, _)| Word::from_letters(k))
            .collect()
    }
}

/// Shortening-free oracle for U = {a¹⁰, b¹⁰} at p = 1, τ = 15 and the
/// family of all conjugates of ⟨a⁴⁰⟩: a U-word (x = a¹⁰, y = b¹⁰) is free
/// iff no x-letter is immediately followed by a same-sign x-letter, since
/// that is the only way a path travels more than 15 along a translate of
/// the a-axis. Returns |F ∩ B(n)| for n = 0..=max_len.
pub fn a40_free_counts(max_len: usize) -> Vec<usize> {
    let words = reduced_words(2, max_len);
    let mut counts = vec![0usize; max_len + 1];
    for w in &words {
        let l = w.letters();
        let bad = l.windows(2).any(|p| p[0] == p[1] && p[0].generator == 0);
        if !bad {
            for c in counts.iter_mut().skip(w.len()) {
                *c += 1;
            }
        }
    }
    counts
}

/// Seeded test words for the surface-group comparison: half are uniform
/// freely reduced words of length ≤ 8, half are u·v⁻¹ with v drawn from the
/// oracle component of u (so trivial, though rarely freely trivial).
pub fn seeded_surface_words(oracle: &mut RelatorClosure, seed: u64, count: usize) -> Vec<Word> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let letters: Vec<Letter> = (0..4u8)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let random_word = |rng: &mut rand_chacha::ChaCha8Rng, max: usize| {
        let len = rng.gen_range(0..=max);
        let mut out: Vec<Letter> = Vec::new();
        while out.len() < len {
            let l = letters[rng.gen_range(0..letters.len())];
            if out.last() != Some(&l.inv()) {
                out.push(l);
            }
        }
        Word::from_letters(out)
    };
    let mut words = Vec::with_capacity(count);
    for i in 0..count {
        if i % 2 == 0 {
            words.push(random_word(&mut rng, 8));
        } else {
            // every other one starts from half a relator, whose component
            // holds a second spelling of length 4
            let u = if i % 4 == 1 {
                let r = &oracle.rotations[rng.gen_range(0..oracle.rotations.len())];
                Word::from_letters(r[..4].to_vec())
            } else {
                random_word(&mut rng, 4)
            };
            let same = oracle.members(&u, 4);
            let v = &same[rng.gen_range(0..same.len())];
            words.push(u.mul(&v.inverse()));
        }
    }
    words
}

pub struct CliRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn cli(args: &[&str]) -> CliRun {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_geogrowth"))
        .args(args)
        .output()
        .expect("binary runs");
    CliRun {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// One successful invocation per subcommand, paths resolved to fixtures.
pub fn subcommand_invocations() -> Vec<(&'static str, Vec<String>)> {
    let f = |n: &str| fixture_path(n).display().to_string();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let with = |sub: &'static str, file: &str, rest: &[&str]| {
        let mut v = vec![sub.to_string(), f(file)];
        v.extend(s(rest));
        (sub, v)
    };
    vec![
        with(
            "check-sc",
            "surf.txt",
            &["--lambda", "1/6", "--variant", "cprime"],
        ),
        with("dehn", "surf.txt", &["--word", "abABcdC", "--equal", "d"]),
        with(
            "growth",
            "f2.txt",
            &["--radius", "6", "--cert", "a,b", "--cert-power", "1"],
        ),
        with(
            "delta",
            "surf.txt",
            &[
                "--radius",
                "2",
                "--mode",
                "sampled",
                "--samples",
                "5000",
                "--seed",
                "11",
            ],
        ),
        with("energy", "f2.txt", &["--radius", "3", "--set", "a,b"]),
        with(
            "reduced",
            "f2.txt",
            &[
                "--radius",
                "1",
                "--set",
                "a^10,b^10",
                "--alpha",
                "1",
                "--delta",
                "0.005",
                "--max-len",
                "2",
            ],
        ),
        with(
            "pingpong",
            "f2.txt",
            &[
                "--radius", "1", "--set", "a,A,b,B", "--g", "a", "--b", "13", "--alpha", "1",
                "--delta", "0.005",
            ],
        ),
        with(
            "family",
            "f2.txt",
            &[
                "--h",
                "a^40",
                "--conj-radius",
                "25",
                "--lambda",
                "1/100",
                "--mu",
                "10",
                "--delta",
                "0.005",
            ],
        ),
        with(
            "shortfree",
            "f2.txt",
            &[
                "--h",
                "a^40",
                "--conj-radius",
                "25",
                "--set",
                "a^10,b^10",
                "--alpha",
                "1",
                "--delta",
                "0.005",
                "--tau",
                "15",
                "--n",
                "3",
                "--emit-words",
            ],
        ),
        (
            "constants",
            s(&[
                "constants",
                "--input",
                "L0=10",
                "--input",
                "delta=0.005",
                "--monotonicity",
                "10",
            ]),
        ),
    ]
}
