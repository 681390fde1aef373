//! Finite balls in Cayley graphs, exact dedup, distances and growth brackets.
//!
//! Elements are found by breadth-first search over a finite symmetric set U.
//! Each element keeps the shortlex-least spelling over U among its geodesic
//! spellings; that falls out of expanding each sphere in spelling order and
//! keeping the first hit. The identity is always adjoined, so the ball of
//! radius n is (U ∪ {1})ⁿ.

use std::collections::HashMap;

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smallcancel::DehnSolver;
use crate::words::{Presentation, Word};

pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub enum Strategy {
    /// No relators: freely reduced words are normal forms.
    FreeGroup,
    /// Relators verified C'(1/6): equality via Dehn's algorithm.
    DehnC16,
}

#[derive(Clone, Debug)]
pub struct BallElement {
    /// Freely reduced (FreeGroup) or Dehn-reduced (DehnC16) representative
    /// over the presentation generators.
    pub word: Word,
    pub dist: usize,
    /// Index of the element this one was first reached from, and the index
    /// in U of the last letter of its spelling.
    pub parent: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct GroupBall {
    presentation: Presentation,
    generators: Vec<Word>,
    radius: usize,
    cap: usize,
    strategy: Strategy,
    solver: DehnSolver,
    elements: Vec<BallElement>,
    sphere_starts: Vec<usize>,
    exact: HashMap<Word, usize>,
    buckets: HashMap<Vec<i32>, Vec<usize>>,
    standard: bool,
}

pub fn resolve_strategy(p: &Presentation) -> Result<(Strategy, DehnSolver)> {
    if p.is_free() {
        return Ok((Strategy::FreeGroup, DehnSolver::new(p)?));
    }
    match DehnSolver::new(p) {
        Ok(s) => Ok((Strategy::DehnC16, s)),
        Err(Error::NotVerifiedC16) => Err(Error::UnsupportedWordProblem),
        Err(e) => Err(e),
    }
}

pub fn enumerate_ball(p: &Presentation, u: &[Word], radius: usize) -> Result<GroupBall> {
    enumerate_ball_with_cap(p, u, radius, DEFAULT_CAP)
}

pub fn enumerate_ball_with_cap(
    p: &Presentation,
    u: &[Word],
    radius: usize,
    cap: usize,
) -> Result<GroupBall> {
    let (strategy, solver) = resolve_strategy(p)?;
    for w in u {
        p.validate(w)?;
    }
    // Drop the identity and repeated group elements, keeping first occurrences.
    let mut gens: Vec<Word> = Vec::new();
    let mut normal: Vec<Word> = Vec::new();
    for w in u {
        let r = solver.reduce_word(w);
        if r.is_empty() || normal.iter().any(|n| solver.equal(n, &r)) {
            continue;
        }
        gens.push(w.clone());
        normal.push(r);
    }
    for (w, n) in gens.iter().zip(&normal) {
        let inv = n.inverse();
        if !normal.iter().any(|m| solver.equal(m, &inv)) {
            return Err(Error::NotSymmetric(w.to_string()));
        }
    }
    let standard = {
        let mut s: Vec<Word> = p.standard_generators();
        let mut g = normal.clone();
        s.sort();
        g.sort();
        s == g
    };

    let mut ball = GroupBall {
        presentation: p.clone(),
        generators: gens,
        radius,
        cap,
        strategy,
        solver,
        elements: Vec::new(),
        sphere_starts: vec![0],
        exact: HashMap::new(),
        buckets: HashMap::new(),
        standard,
    };
    ball.push(BallElement {
        word: Word::empty(),
        dist: 0,
        parent: None,
    })?;
    ball.sphere_starts.push(1);
    for n in 1..=radius {
        ball.grow_sphere(n, &normal)?;
    }
    Ok(ball)
}

impl GroupBall {
    fn push(&mut self, e: BallElement) -> Result<()> {
        if self.elements.len() >= self.cap {
            return Err(Error::ResourceCap { cap: self.cap });
        }
        let i = self.elements.len();
        self.exact.entry(e.word.clone()).or_insert(i);
        if self.strategy == Strategy::DehnC16 {
            let key = e.word.abelianization(self.presentation.generators());
            self.buckets.entry(key).or_default().push(i);
        }
        self.elements.push(e);
        Ok(())
    }

    /// Index of an element equal to the reduced word `r` among elements with
    /// distance in `dists`.
    fn find_reduced(&self, r: &Word, dists: std::ops::RangeInclusive<usize>) -> Option<usize> {
        if let Some(&i) = self.exact.get(r) {
            if dists.contains(&self.elements[i].dist) {
                return Some(i);
            }
        }
        if self.strategy == Strategy::FreeGroup {
            return None;
        }
        let key = r.abelianization(self.presentation.generators());
        self.buckets.get(&key)?.iter().copied().find(|&i| {
            dists.contains(&self.elements[i].dist) && self.solver.equal(&self.elements[i].word, r)
        })
    }

    fn grow_sphere(&mut self, n: usize, normal: &[Word]) -> Result<()> {
        let prev = self.sphere_starts[n - 1]..self.sphere_starts[n];
        let gens = normal.len();
        // A neighbour of a point at distance n-1 lies at distance n-2, n-1
        // or n, so only those spheres need to be searched.
        let low = n.saturating_sub(2);
        let candidates: Vec<(usize, usize, Word, bool)> = prev
            .clone()
            .into_par_iter()
            .flat_map_iter(|x| (0..gens).map(move |s| (x, s)))
            .map(|(x, s)| {
                let w = self
                    .solver
                    .reduce_word(&self.elements[x].word.mul(&normal[s]));
                let known = self.find_reduced(&w, low..=n - 1).is_some();
                (x, s, w, known)
            })
            .collect();
        for (x, s, w, known) in candidates {
            if known || self.find_reduced(&w, n..=n).is_some() {
                continue;
            }
            self.push(BallElement {
                word: w,
                dist: n,
                parent: Some((x, s)),
            })?;
        }
        self.sphere_starts.push(self.elements.len());
        Ok(())
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn solver(&self) -> &DehnSolver {
        &self.solver
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BallElement] {
        &self.elements
    }

    pub fn sphere(&self, n: usize) -> &[BallElement] {
        &self.elements[self.sphere_starts[n]..self.sphere_starts[n + 1]]
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.sphere_starts.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// |B(n)| for n = 0..=radius.
    pub fn ball_sizes(&self) -> Vec<usize> {
        self.sphere_starts[1..].to_vec()
    }

    /// The ball is the free group on the presentation generators with U the
    /// standard generators and their inverses, so word length is exact at
    /// any scale.
    pub fn is_tree(&self) -> bool {
        self.strategy == Strategy::FreeGroup && self.standard
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    /// The shortlex-least geodesic spelling over U, as indices into U.
    pub fn spelling(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.elements[i].dist);
        let mut cur = i;
        while let Some((parent, s)) = self.elements[cur].parent {
            out.push(s);
            cur = parent;
        }
        out.reverse();
        out
    }

    pub fn spelling_string(&self, i: usize) -> String {
        let parts: Vec<String> = self
            .spelling(i)
            .into_iter()
            .map(|s| self.generators[s].to_string())
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(".")
        }
    }

    pub fn reduce(&self, g: &Word) -> Word {
        self.solver.reduce_word(g)
    }

    pub fn equal(&self, g: &Word, h: &Word) -> bool {
        self.solver.equal(g, h)
    }

    pub fn index_of(&self, g: &Word) -> Option<usize> {
        self.find_reduced(&self.reduce(g), 0..=self.radius)
    }

    /// d(g, h) = |g⁻¹h| when g⁻¹h lies in the ball; `None` means out of range.
    pub fn distance(&self, g: &Word, h: &Word) -> Result<Option<usize>> {
        self.presentation.validate(g)?;
        self.presentation.validate(h)?;
        Ok(self
            .index_of(&g.inverse().mul(h))
            .map(|i| self.elements[i].dist))
    }

    /// Word length used by the geometry routines: exact in the free tree,
    /// otherwise a ball lookup.
    pub fn length(&self, g: &Word) -> Option<usize> {
        if self.is_tree() {
            return Some(g.len());
        }
        self.index_of(g).map(|i| self.elements[i].dist)
    }

    pub fn metric(&self, x: &Word, y: &Word) -> Option<usize> {
        self.length(&x.inverse().mul(y))
    }

    /// A ball over the same group and generators with a different radius.
    pub fn with_radius(&self, radius: usize) -> Result<GroupBall> {
        enumerate_ball_with_cap(&self.presentation, &self.generators, radius, self.cap)
    }

    /// `self` if its radius suffices for `needed`, otherwise a larger scratch
    /// ball. Tree balls never need one.
    pub fn scratch(&self, needed: usize) -> Result<std::borrow::Cow<'_, GroupBall>> {
        if self.is_tree() || needed <= self.radius {
            Ok(std::borrow::Cow::Borrowed(self))
        } else {
            Ok(std::borrow::Cow::Owned(self.with_radius(needed)?))
        }
    }

    /// Points of the ball at distance at most `r` from the identity.
    pub fn points_within(&self, r: usize) -> &[BallElement] {
        let r = r.min(self.radius);
        &self.elements[..self.sphere_starts[r + 1]]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct FreeCertificate {
    /// S, given as words over the presentation generators.
    pub set: Vec<Word>,
    /// c with S ⊂ Uᶜ.
    pub power: usize,
    /// Where freeness of S comes from (for example a verified α-reduced set).
    pub provenance: String,
    /// Whether S ⊂ Uᶜ was confirmed by ball lookup (only possible when
    /// c ≤ radius).
    #[serde(default)]
    pub membership_checked: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct GrowthReport {
    pub radius: usize,
    pub strategy: Strategy,
    pub generators: Vec<Word>,
    pub identity_adjoined: bool,
    pub sphere_sizes: Vec<usize>,
    /// |B(n)| for n = 0..=radius.
    pub ball_sizes: Vec<usize>,
    /// (1/n) log|B(n)| for n = 1..=radius.
    pub fekete_upper: Vec<f64>,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub certificate: Option<FreeCertificate>,
    /// lower_bound / log|U|.
    pub psg_ratio: f64,
    /// |B(m+n)| ≤ |B(m)||B(n)| for all m + n ≤ radius.
    pub submultiplicative: bool,
}

pub fn growth_rate_bounds(ball: &GroupBall, cert: Option<FreeCertificate>) -> Result<GrowthReport> {
    if ball.radius() < 2 {
        return Err(Error::InvalidParameter(
            "growth bracket needs radius at least 2".into(),
        ));
    }
    let sizes = ball.ball_sizes();
    let fekete_upper: Vec<f64> = (1..=ball.radius())
        .map(|n| (sizes[n] as f64).ln() / n as f64)
        .collect();
    let upper_bound = fekete_upper.iter().copied().fold(f64::INFINITY, f64::min);
    let mut submultiplicative = true;
    for m in 0..=ball.radius() {
        for n in 0..=(ball.radius() - m) {
            if (sizes[m + n] as u128) > (sizes[m] as u128) * (sizes[n] as u128) {
                submultiplicative = false;
            }
        }
    }

    let cert = match cert {
        None => None,
        Some(mut c) => {
            if c.power == 0 {
                return Err(Error::InvalidParameter(
                    "certificate power must be positive".into(),
                ));
            }
            for s in &c.set {
                ball.presentation().validate(s)?;
            }
            let mut distinct: Vec<Word> = Vec::new();
            for s in &c.set {
                let r = ball.reduce(s);
                if !distinct.iter().any(|d| ball.equal(d, &r)) {
                    distinct.push(r);
                }
            }
            if distinct.len() != c.set.len() {
                return Err(Error::InvalidParameter(
                    "certificate set has repeated elements".into(),
                ));
            }
            if c.power <= ball.radius() {
                for s in &c.set {
                    match ball.index_of(s) {
                        Some(i) if ball.elements()[i].dist <= c.power => {}
                        _ => {
                            return Err(Error::InvalidParameter(format!(
                                "certificate element {s} is not in U^{}",
                                c.power
                            )))
                        }
                    }
                }
                c.membership_checked = true;
            }
            Some(c)
        }
    };
    let lower_bound = cert
        .as_ref()
        .map(|c| (c.set.len() as f64).ln() / c.power as f64)
        .unwrap_or(0.0);
    let log_u = (ball.generators().len() as f64).ln();
    let psg_ratio = if log_u > 0.0 {
        lower_bound / log_u
    } else {
        0.0
    };
    Ok(GrowthReport {
        radius: ball.radius(),
        strategy: ball.strategy(),
        generators: ball.generators().to_vec(),
        identity_adjoined: true,
        sphere_sizes: ball.sphere_sizes(),
        ball_sizes: sizes,
        fekete_upper,
        upper_bound,
        lower_bound,
        certificate: cert,
        psg_ratio,
        submultiplicative,
    })
}

impl GrowthReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ball_size,fekete_upper\n");
        for n in 1..=self.radius {
            out.push_str(&format!(
                "{},{},{}\n",
                n,
                self.ball_sizes[n],
                self.fekete_upper[n - 1]
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_presentation;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn f2() -> Presentation {
        Presentation::free("ab").unwrap()
    }

    fn surf() -> Presentation {
        parse_presentation("generators: a b c d\nrelators: abABcdCD").unwrap()
    }

    #[test]
    fn free_ball_sizes() {
        let p = f2();
        let ball = enumerate_ball(&p, &p.standard_generators(), 3).unwrap();
        assert_eq!(ball.ball_sizes(), vec![1, 5, 17, 53]);
        assert_eq!(ball.strategy(), Strategy::FreeGroup);
        assert!(ball.is_tree());
    }

    #[test]
    fn surface_ball_radius_two() {
        let p = surf();
        let ball = enumerate_ball(&p, &p.standard_generators(), 2).unwrap();
        assert_eq!(ball.ball_sizes(), vec![1, 9, 65]);
        assert_eq!(ball.strategy(), Strategy::DehnC16);
    }

    #[test]
    fn commutator_group_is_refused() {
        let p = parse_presentation("generators: a b\nrelators: abAB").unwrap();
        assert_eq!(
            enumerate_ball(&p, &p.standard_generators(), 2).unwrap_err(),
            Error::UnsupportedWordProblem
        );
    }

    #[test]
    fn distances() {
        let p = f2();
        let ball = enumerate_ball(&p, &p.standard_generators(), 3).unwrap();
        assert_eq!(ball.distance(&w("ab"), &w("a")).unwrap(), Some(1));
        let small = enumerate_ball(&p, &p.standard_generators(), 2).unwrap();
        assert_eq!(small.distance(&Word::empty(), &w("aaab")).unwrap(), None);
        let s = surf();
        let sb = enumerate_ball(&s, &s.standard_generators(), 2).unwrap();
        assert_eq!(sb.distance(&Word::empty(), &w("abABcdC")).unwrap(), Some(1));
    }

    #[test]
    fn spellings_are_shortlex_least() {
        let p = f2();
        let u = vec![w("a"), w("b"), w("ab"), w("A"), w("B"), w("BA")];
        let ball = enumerate_ball(&p, &u, 2).unwrap();
        let i = ball.index_of(&w("abb")).unwrap();
        assert_eq!(ball.elements()[i].dist, 2);
        // a·bb is not a spelling; ab·b is, and so is nothing shorter.
        assert_eq!(ball.spelling_string(i), "ab.b");
        let i = ball.index_of(&w("ab")).unwrap();
        assert_eq!(ball.spelling_string(i), "ab");
    }

    #[test]
    fn generating_set_checks() {
        let p = f2();
        assert_eq!(
            enumerate_ball(&p, &[w("a"), w("b"), w("B")], 1).unwrap_err(),
            Error::NotSymmetric("a".into())
        );
        let ball = enumerate_ball(&p, &[w("a"), w("A"), Word::empty(), w("a")], 2).unwrap();
        assert_eq!(ball.generators().len(), 2);
        assert_eq!(ball.ball_sizes(), vec![1, 3, 5]);
    }

    #[test]
    fn resource_cap() {
        let p = f2();
        assert_eq!(
            enumerate_ball_with_cap(&p, &p.standard_generators(), 5, 100).unwrap_err(),
            Error::ResourceCap { cap: 100 }
        );
    }

    #[test]
    fn growth_bracket_on_f2() {
        let p = f2();
        let ball = enumerate_ball(&p, &p.standard_generators(), 8).unwrap();
        let cert = FreeCertificate {
            set: vec![w("a"), w("b")],
            power: 1,
            provenance: "test".into(),
            membership_checked: false,
        };
        let rep = growth_rate_bounds(&ball, Some(cert)).unwrap();
        assert!((rep.lower_bound - 2f64.ln()).abs() < 1e-12);
        assert!((rep.upper_bound - (13121f64).ln() / 8.0).abs() < 1e-12);
        assert!(rep.lower_bound <= 3f64.ln() && 3f64.ln() <= rep.upper_bound);
        assert!(rep.submultiplicative);
        assert!(rep.certificate.as_ref().unwrap().membership_checked);
        assert_eq!(rep.to_csv().lines().count(), 9);
    }

    #[test]
    fn growth_of_cyclic_subgroup() {
        let p = f2();
        let ball = enumerate_ball(&p, &[w("a"), w("A")], 8).unwrap();
        let rep = growth_rate_bounds(&ball, None).unwrap();
        assert_eq!(
            rep.ball_sizes,
            (0..=8).map(|n| 2 * n + 1).collect::<Vec<_>>()
        );
        assert_eq!(rep.lower_bound, 0.0);
        assert!(rep.fekete_upper.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn growth_needs_radius_two() {
        let p = f2();
        let ball = enumerate_ball(&p, &p.standard_generators(), 1).unwrap();
        assert!(growth_rate_bounds(&ball, None).is_err());
    }

    #[test]
    fn bad_certificate_is_rejected() {
        let p = f2();
        let ball = enumerate_ball(&p, &p.standard_generators(), 3).unwrap();
        let cert = FreeCertificate {
            set: vec![w("aa")],
            power: 1,
            provenance: "test".into(),
            membership_checked: false,
        };
        assert!(growth_rate_bounds(&ball, Some(cert)).is_err());
    }
}
