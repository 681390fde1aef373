//! Moving families of axes, τ-shortening words and the shortening-free
//! counting bound.
//!
//! Everything here is exact in a free group on its standard generators,
//! where the Cayley graph is a tree and the axis of a loxodromic element is
//! an honest bi-infinite line. Cylinders are replaced by these axes; the eps
//! neighbourhood only enters the fellow-travelling estimate Δ.

use std::collections::{BTreeMap, HashMap, HashSet};

use num::{Signed, Zero};
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::cayley::GroupBall;
use crate::error::{Error, Result};
use crate::hypgeom::ElementaryClosure;
use crate::rational::{floor_to_i64, int, ratio, Rational};
use crate::words::{cyclic_reduce, evaluate, format_uword, reduced_words, Letter, Word};

const AXES_ONLY: &str = "axes stand in for cylinders; lines are exact in the free-group tree";

/// The line through `conj` read with period `root` (cyclically reduced):
/// its vertices are conj·(prefixes of root^∞ and of root^-∞).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct Line {
    pub conj: Word,
    pub root: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    /// Signed position of the foot along the line, 0 at `conj`.
    pub coord: i64,
    pub dist: usize,
    pub point: Word,
}

impl Line {
    pub fn new(conj: Word, root: Word) -> Result<Line> {
        if root.is_empty() || !root.is_cyclically_reduced() {
            return Err(Error::InvalidParameter(
                "line period must be a nonempty cyclically reduced word".into(),
            ));
        }
        Ok(Line { conj, root })
    }

    fn step(&self, i: usize, forward: bool) -> Letter {
        let k = self.root.letters();
        let n = k.len();
        if forward {
            k[i % n]
        } else {
            k[n - 1 - i % n].inv()
        }
    }

    pub fn point(&self, t: i64) -> Word {
        let forward = t >= 0;
        let path =
            Word::from_letters((0..t.unsigned_abs() as usize).map(|i| self.step(i, forward)));
        self.conj.mul(&path)
    }

    /// Nearest point projection; unique in a tree.
    pub fn project(&self, x: &Word) -> Projection {
        let z = self.conj.inverse().mul(x);
        let zl = z.letters();
        let fwd = zl
            .iter()
            .enumerate()
            .take_while(|(i, l)| **l == self.step(*i, true))
            .count();
        let bwd = zl
            .iter()
            .enumerate()
            .take_while(|(i, l)| **l == self.step(*i, false))
            .count();
        let (coord, along) = if fwd > 0 {
            (fwd as i64, fwd)
        } else {
            (-(bwd as i64), bwd)
        };
        Projection {
            coord,
            dist: zl.len() - along,
            point: self.conj.mul(&z.prefix(along)),
        }
    }

    pub fn distance(&self, x: &Word) -> usize {
        self.project(x).dist
    }

    /// Same line, with `conj` moved to the period start at or before the
    /// foot of the identity. Two lines are equal iff their canonical
    /// conjugators are.
    pub fn canonical(&self) -> Line {
        let n = self.root.len() as i64;
        let t = self.project(&Word::empty()).coord;
        Line {
            conj: self.conj.mul(&self.root.pow(t.div_euclid(n))),
            root: self.root.clone(),
        }
    }
}

/// diam(L₁^{+r} ∩ L₂^{+r}) over tree vertices for two distinct lines:
/// overlap + 2r when they meet, 2r − gap when the bridge is short, else 0.
pub fn pair_diameter(l1: &Line, l2: &Line, r: usize) -> Result<usize> {
    let n = l2.root.len() as i64;
    let mut w = l1.distance(&l2.point(0)) as i64 + 2 * n + 2;
    while w <= 1 << 22 {
        let vals: Vec<usize> = (-w..=w).map(|t| l1.distance(&l2.point(t))).collect();
        let m = *vals.iter().min().expect("window is nonempty");
        let first = vals.iter().position(|v| *v == m).unwrap_or(0);
        let last = vals.iter().rposition(|v| *v == m).unwrap_or(0);
        if first > 0 && last + 1 < vals.len() {
            return Ok(if m == 0 {
                last - first + 2 * r
            } else {
                (2 * r).saturating_sub(m)
            });
        }
        w *= 2;
    }
    Err(Error::InvalidParameter(
        "lines do not separate; are they equal?".into(),
    ))
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct Member {
    /// Conjugator u as supplied.
    pub conjugator: Word,
    /// u·h·u⁻¹.
    pub generator: Word,
    /// Canonical conjugator of the axis u·Y.
    pub line: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FamilyScope {
    /// Exactly the listed conjugators.
    Listed,
    /// Every conjugate u⟨h⟩u⁻¹ with |u| ≤ radius. Too many to list, so
    /// members are decided on demand.
    Radius { radius: usize },
}

/// Conjugates of ⟨h⟩ paired with their axes, deduplicated by axis (in a
/// free group the axis determines the subgroup).
#[derive(Clone, Debug, Serialize, JsonSchema)]
pub struct MovingFamily {
    pub h: Word,
    pub root: Word,
    /// h = c·kᵐ·c⁻¹; the axis of h is the line through c with period k.
    pub axis_conjugator: Word,
    pub scope: FamilyScope,
    pub members: Vec<Member>,
    /// Listed conjugators dropped as duplicates.
    pub skipped: Vec<Word>,
    /// T(𝒬): the translation length of h (exact in the tree).
    pub t_estimate: usize,
    /// Δ(𝒬): max diameter of eps-neighbourhood intersections.
    pub delta_estimate: usize,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub eps: Rational,
    pub ball_radius: usize,
    pub approximation: String,
    #[serde(skip)]
    #[schemars(skip)]
    index: HashMap<Word, usize>,
}

impl MovingFamily {
    pub fn base_line(&self) -> Line {
        Line {
            conj: self.axis_conjugator.clone(),
            root: self.root.clone(),
        }
    }

    pub fn line_of(&self, member: usize) -> Line {
        Line {
            conj: self.members[member].line.clone(),
            root: self.root.clone(),
        }
    }

    /// Index of the listed member with this canonical line.
    pub fn member_index(&self, key: &Word) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Whether the line with canonical conjugator `key` belongs to the family.
    pub fn admits(&self, key: &Word) -> bool {
        match self.scope {
            FamilyScope::Listed => self.index.contains_key(key),
            FamilyScope::Radius { radius } => {
                // u = key·kʲ·c⁻¹ for some j, and only small |j| can be short.
                let c_inv = self.axis_conjugator.inverse();
                let n = self.root.len();
                let span = ((radius + key.len() + c_inv.len()) / n + 1) as i64;
                (-span..=span).any(|j| key.mul(&self.root.pow(j)).mul(&c_inv).len() <= radius)
            }
        }
    }
}

fn require_tree(ball: &GroupBall) -> Result<()> {
    if ball.is_tree() {
        Ok(())
    } else {
        Err(Error::UnsupportedStrategy(
            "moving families need a free group on its standard generators".into(),
        ))
    }
}

fn eps_steps(eps: &Rational) -> Result<usize> {
    match floor_to_i64(eps) {
        Some(e) if e >= 0 => Ok(e as usize),
        _ => Err(Error::InvalidParameter("eps must be non-negative".into())),
    }
}

fn axis_of(h: &Word) -> Result<(Word, Word, usize)> {
    let closure = ElementaryClosure::of(h)?;
    let (core, _) = cyclic_reduce(h);
    Ok((closure.conjugator, closure.root, core.len()))
}

/// The family {(u⟨h⟩u⁻¹, u·Y)} over the listed conjugators u.
pub fn build_moving_family(
    ball: &GroupBall,
    h: &Word,
    conjugators: &[Word],
    eps: &Rational,
) -> Result<MovingFamily> {
    require_tree(ball)?;
    let pres = ball.presentation();
    pres.validate(h)?;
    let (c, root, tlen) = axis_of(h)?;
    if conjugators.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let r = eps_steps(eps)?;
    let mut members = Vec::new();
    let mut skipped = Vec::new();
    let mut index = HashMap::new();
    for u in conjugators {
        pres.validate(u)?;
        if u.len() > ball.radius() {
            return Err(Error::OutOfRange);
        }
        let key = Line::new(u.mul(&c), root.clone())?.canonical().conj;
        if index.contains_key(&key) {
            skipped.push(u.clone());
            continue;
        }
        index.insert(key.clone(), members.len());
        members.push(Member {
            conjugator: u.clone(),
            generator: u.inverse().conjugate(h),
            line: key,
        });
    }
    let lines: Vec<Line> = members
        .iter()
        .map(|m| Line {
            conj: m.line.clone(),
            root: root.clone(),
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..lines.len())
        .flat_map(|i| ((i + 1)..lines.len()).map(move |j| (i, j)))
        .collect();
    let delta_estimate = pairs
        .par_iter()
        .map(|&(i, j)| pair_diameter(&lines[i], &lines[j], r))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    Ok(MovingFamily {
        h: h.clone(),
        root,
        axis_conjugator: c,
        scope: FamilyScope::Listed,
        members,
        skipped,
        t_estimate: tlen,
        delta_estimate,
        eps: eps.clone(),
        ball_radius: ball.radius(),
        approximation: AXES_ONLY.into(),
        index,
    })
}

/// All conjugates of ⟨h⟩ by elements of length ≤ radius. Δ is computed on
/// the G-invariant completion: by invariance every pair can be moved so one
/// line is the axis of h and the other passes within 2r of one period of it.
pub fn build_radius_family(
    ball: &GroupBall,
    h: &Word,
    radius: usize,
    eps: &Rational,
) -> Result<MovingFamily> {
    require_tree(ball)?;
    let pres = ball.presentation();
    pres.validate(h)?;
    let (c, root, tlen) = axis_of(h)?;
    let r = eps_steps(eps)?;
    let base = Line {
        conj: c.clone(),
        root: root.clone(),
    };
    let base_key = base.canonical().conj;
    let nearby = ambient_words(ball, 2 * r);
    let mut keys = std::collections::BTreeSet::new();
    for t in 0..root.len() as i64 {
        let v0 = base.point(t);
        for s in &nearby {
            let v = v0.mul(s);
            for q in 0..root.len() {
                let key = Line {
                    conj: v.mul(&root.prefix(q).inverse()),
                    root: root.clone(),
                }
                .canonical()
                .conj;
                if key != base_key {
                    keys.insert(key);
                }
            }
        }
    }
    let keys: Vec<Word> = keys.into_iter().collect();
    let delta_estimate = keys
        .par_iter()
        .map(|k| {
            pair_diameter(
                &base,
                &Line {
                    conj: k.clone(),
                    root: root.clone(),
                },
                r,
            )
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    Ok(MovingFamily {
        h: h.clone(),
        root,
        axis_conjugator: c,
        scope: FamilyScope::Radius { radius },
        members: Vec::new(),
        skipped: Vec::new(),
        t_estimate: tlen,
        delta_estimate,
        eps: eps.clone(),
        ball_radius: ball.radius(),
        approximation: AXES_ONLY.into(),
        index: HashMap::new(),
    })
}

/// Reduced words of length ≤ r over the ambient generators.
fn ambient_words(ball: &GroupBall, r: usize) -> Vec<Word> {
    let gens: Vec<Word> = ball
        .presentation()
        .generators()
        .iter()
        .map(|&g| Word::letter(Letter::new(g, false)))
        .collect();
    reduced_words(gens.len(), r)
        .iter()
        .map(|w| evaluate(w, &gens))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct ScConditionReport {
    pub t_estimate: usize,
    pub delta_estimate: usize,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub lambda: Rational,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub mu: Rational,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub delta: Rational,
    /// Δ < λT.
    pub sc1: bool,
    /// T > μδ.
    pub sc2: bool,
    pub pass: bool,
}

pub fn check_sc_condition(
    fam: &MovingFamily,
    lambda: &Rational,
    mu: &Rational,
    delta: &Rational,
) -> ScConditionReport {
    let t = int(fam.t_estimate as i64);
    let sc1 = int(fam.delta_estimate as i64) < lambda * &t;
    let sc2 = t > mu * delta;
    ScConditionReport {
        t_estimate: fam.t_estimate,
        delta_estimate: fam.delta_estimate,
        lambda: lambda.clone(),
        mu: mu.clone(),
        delta: delta.clone(),
        sc1,
        sc2,
        pass: sc1 && sc2,
    }
}

/// Caller-supplied constants for the gate τ ≥ Δ₀ + 2L₀ + 223δ.
#[derive(Clone, Debug)]
pub struct TauGate {
    pub big_delta0: Rational,
    pub l0: Rational,
}

/// U, the basepoint and the constants shared by every shortening query.
#[derive(Clone, Debug)]
pub struct ShorteningContext<'a> {
    ball: &'a GroupBall,
    u: Vec<Word>,
    p: Word,
    alpha: Rational,
    delta: Rational,
    gate: Option<TauGate>,
    disp: Vec<usize>,
}

impl<'a> ShorteningContext<'a> {
    pub fn new(
        ball: &'a GroupBall,
        u: &[Word],
        p: &Word,
        alpha: &Rational,
        delta: &Rational,
    ) -> Result<Self> {
        require_tree(ball)?;
        if u.is_empty() {
            return Err(Error::EmptyGeneratingSet);
        }
        let pres = ball.presentation();
        pres.validate(p)?;
        for w in u {
            pres.validate(w)?;
            if w.is_empty() {
                return Err(Error::IdentityElement);
            }
        }
        if alpha < &Rational::zero() || delta < &Rational::zero() {
            return Err(Error::InvalidParameter(
                "alpha and delta must be non-negative".into(),
            ));
        }
        let disp = u.iter().map(|w| p.conjugate(w).len()).collect();
        Ok(ShorteningContext {
            ball,
            u: u.to_vec(),
            p: p.clone(),
            alpha: alpha.clone(),
            delta: delta.clone(),
            gate: None,
            disp,
        })
    }

    pub fn with_gate(mut self, gate: TauGate) -> Self {
        self.gate = Some(gate);
        self
    }

    pub fn generators(&self) -> &[Word] {
        &self.u
    }

    /// L(U, p).
    pub fn energy(&self) -> usize {
        self.disp.iter().copied().max().unwrap_or(0)
    }

    pub fn ball(&self) -> &GroupBall {
        self.ball
    }

    pub fn check_tau(&self, tau: &Rational) -> Result<()> {
        if let Some(g) = &self.gate {
            let gate = &g.big_delta0 + int(2) * &g.l0 + int(223) * &self.delta;
            if tau < &gate {
                return Err(Error::TauBelowGate {
                    tau: crate::rational::format_rational(tau),
                    gate: crate::rational::format_rational(&gate),
                });
            }
        }
        Ok(())
    }

    fn check_uword(&self, w: &[Letter]) -> Result<()> {
        if w.iter().any(|l| l.generator as usize >= self.u.len()) {
            return Err(Error::OutOfRange);
        }
        if w.windows(2).any(|p| p[1] == p[0].inv()) {
            return Err(Error::NotReducedWord);
        }
        Ok(())
    }

    /// x₀ = p, xᵢ = u₁⋯uᵢ·p.
    fn path(&self, w: &[Letter]) -> Vec<Word> {
        let mut acc = Word::empty();
        let mut out = vec![self.p.clone()];
        for &l in w {
            let u = &self.u[l.generator as usize];
            acc = if l.inverse {
                acc.mul(&u.inverse())
            } else {
                acc.mul(u)
            };
            out.push(acc.mul(&self.p));
        }
        out
    }

    /// ½|up − p| − α − d(x, Y).
    fn margin(&self, l: Letter, d: usize) -> Rational {
        ratio(self.disp[l.generator as usize] as i64, 2) - &self.alpha - int(d as i64)
    }

    /// The segment x_a..x_b of the path of w measured against `line`.
    fn segment(
        &self,
        w: &[Letter],
        path: &[Word],
        a: usize,
        b: usize,
        line: &Line,
        tau: &Rational,
    ) -> ShorteningVerdict {
        let pa = line.project(&path[a]);
        let pb = line.project(&path[b]);
        let gap = pa.coord.abs_diff(pb.coord) as usize;
        let (margins, shortening) = if b > a {
            let m = vec![self.margin(w[a], pa.dist), self.margin(w[b - 1], pb.dist)];
            let ok = int(gap as i64) > *tau && m.iter().all(|x| !x.is_negative());
            (m, ok)
        } else {
            (Vec::new(), false)
        };
        ShorteningVerdict {
            word: format_uword(&Word::from_letters(w[a..b].iter().copied()), &self.u),
            is_shortening: shortening,
            y0: pa.point,
            yn: pb.point,
            proj_gap: gap,
            end_margins: margins,
            member: None,
            line: line.conj.clone(),
            tau: tau.clone(),
        }
    }

    fn verdict_on_line(&self, w: &[Letter], line: &Line, tau: &Rational) -> ShorteningVerdict {
        let path = self.path(w);
        self.segment(w, &path, 0, w.len(), line, tau)
    }

    /// Canonical lines of the family passing within `reach` of p, where
    /// reach = max_u ⌊½|up − p| − α⌋. Only these can satisfy the first
    /// end condition, so scanning them is exact.
    fn lines_near_p(&self, fam: &MovingFamily) -> Vec<Line> {
        let reach = self
            .disp
            .iter()
            .map(|d| floor_to_i64(&(ratio(*d as i64, 2) - &self.alpha)).unwrap_or(-1))
            .max()
            .unwrap_or(-1);
        if reach < 0 {
            return Vec::new();
        }
        let root = &fam.root;
        let mut keys = std::collections::BTreeSet::new();
        for s in ambient_words(self.ball, reach as usize) {
            let v = self.p.mul(&s);
            for q in 0..root.len() {
                let line = Line {
                    conj: v.mul(&root.prefix(q).inverse()),
                    root: root.clone(),
                };
                let key = line.canonical().conj;
                if fam.admits(&key) {
                    keys.insert(key);
                }
            }
        }
        keys.into_iter()
            .map(|conj| Line {
                conj,
                root: root.clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct ShorteningVerdict {
    pub word: String,
    pub is_shortening: bool,
    pub y0: Word,
    pub yn: Word,
    /// |y₀ − yₙ|.
    pub proj_gap: usize,
    /// ½|u₁p − p| − α − |x₀ − y₀| and ½|uₙp − p| − α − |xₙ − yₙ|; both must
    /// be ≥ 0. Empty for the empty word.
    #[serde(with = "crate::rational::serde_vec_q")]
    #[schemars(with = "Vec<String>")]
    pub end_margins: Vec<Rational>,
    /// Index of the listed member, if the family is listed.
    pub member: Option<usize>,
    /// Canonical conjugator of the axis.
    pub line: Word,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub tau: Rational,
}

/// Is the U-word `w` τ-shortening over the listed member?
pub fn is_shortening_word(
    ctx: &ShorteningContext,
    fam: &MovingFamily,
    member: usize,
    w: &[Letter],
    tau: &Rational,
) -> Result<ShorteningVerdict> {
    if member >= fam.members.len() {
        return Err(Error::OutOfRange);
    }
    ctx.check_uword(w)?;
    ctx.check_tau(tau)?;
    let mut v = ctx.verdict_on_line(w, &fam.line_of(member), tau);
    v.member = Some(member);
    Ok(v)
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct WindowCheck {
    pub word: String,
    pub len: usize,
    /// (τ − 50δ)/L(U,p).
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub lower: Rational,
    /// τ/α + 1, for minimal words and α > 0.
    #[serde(with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub upper: Option<Rational>,
    pub ok: bool,
}

fn window_check(
    ctx: &ShorteningContext,
    word: String,
    len: usize,
    tau: &Rational,
    minimal: bool,
) -> WindowCheck {
    let lower = (tau - int(50) * &ctx.delta) / int(ctx.energy().max(1) as i64);
    let upper = (minimal && !ctx.alpha.is_zero()).then(|| tau / &ctx.alpha + int(1));
    let n = int(len as i64);
    let ok = n >= lower && upper.as_ref().is_none_or(|u| &n <= u);
    WindowCheck {
        word,
        len,
        lower,
        upper,
        ok,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct MinimalShortenings {
    pub member: usize,
    pub line: Word,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub tau: Rational,
    pub max_len: usize,
    pub words: Vec<String>,
    /// At most two minimal shortening words per member.
    pub at_most_two: bool,
    pub window: Vec<WindowCheck>,
    pub window_ok: bool,
}

/// Shortening words over the member with no shortening proper prefix, up
/// to length max_len.
pub fn find_minimal_shortenings(
    ctx: &ShorteningContext,
    fam: &MovingFamily,
    member: usize,
    tau: &Rational,
    max_len: usize,
) -> Result<MinimalShortenings> {
    if member >= fam.members.len() {
        return Err(Error::OutOfRange);
    }
    ctx.check_tau(tau)?;
    let line = fam.line_of(member);
    let words = reduced_words(ctx.u.len(), max_len);
    let flagged: Vec<bool> = words
        .par_iter()
        .map(|w| ctx.verdict_on_line(w.letters(), &line, tau).is_shortening)
        .collect();
    let set: HashSet<&Word> = words
        .iter()
        .zip(&flagged)
        .filter(|(_, f)| **f)
        .map(|(w, _)| w)
        .collect();
    let minimal: Vec<&Word> = words
        .iter()
        .zip(&flagged)
        .filter(|(w, f)| **f && (1..w.len()).all(|k| !set.contains(&w.prefix(k))))
        .map(|(w, _)| w)
        .collect();
    let window: Vec<WindowCheck> = minimal
        .iter()
        .map(|w| window_check(ctx, format_uword(w, &ctx.u), w.len(), tau, true))
        .collect();
    Ok(MinimalShortenings {
        member,
        line: line.conj,
        tau: tau.clone(),
        max_len,
        words: minimal.iter().map(|w| format_uword(w, &ctx.u)).collect(),
        at_most_two: minimal.len() <= 2,
        window_ok: window.iter().all(|c| c.ok),
        window,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct ShorteningHit {
    pub word: String,
    /// Canonical conjugators of every axis the word shortens.
    pub lines: Vec<Word>,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct EnumerationReport {
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub tau: Rational,
    pub n: usize,
    /// Family lines within reach of p that were scanned.
    pub lines_scanned: usize,
    /// |F(τ) ∩ B_U(k)| for k = 0..n.
    pub counts: Vec<usize>,
    pub bound_ok: Vec<bool>,
    pub counting_bound: bool,
    pub shortening_words: Vec<ShorteningHit>,
    /// Largest number of minimal shortening words over one line.
    pub max_minimal_per_member: usize,
    pub minimal_count_ok: bool,
    pub window_violations: Vec<WindowCheck>,
    /// Words shortening over two distinct axes.
    pub multi_member_violations: Vec<String>,
    pub free_words: Option<Vec<String>>,
    pub approximation: String,
}

impl EnumerationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,count,bound_ok\n");
        for (k, (c, ok)) in self.counts.iter().zip(&self.bound_ok).enumerate() {
            out.push_str(&format!("{k},{c},{ok}\n"));
        }
        out
    }
}

/// Counts τ-shortening-free reduced U-words of length ≤ k for k ≤ n. A word
/// is excluded iff one of its subwords, read from p, is shortening over a
/// family axis. `fam = None` is the empty family.
pub fn enumerate_shortening_free(
    ctx: &ShorteningContext,
    fam: Option<&MovingFamily>,
    tau: &Rational,
    n: usize,
    emit_words: bool,
) -> Result<EnumerationReport> {
    ctx.check_tau(tau)?;
    let lines = fam.map(|f| ctx.lines_near_p(f)).unwrap_or_default();
    let words = reduced_words(ctx.u.len(), n);
    let flags: Vec<Vec<usize>> = words
        .par_iter()
        .map(|w| {
            let path = ctx.path(w.letters());
            lines
                .iter()
                .enumerate()
                .filter(|(_, l)| {
                    ctx.segment(w.letters(), &path, 0, w.len(), l, tau)
                        .is_shortening
                })
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let shortening: HashMap<&Word, &Vec<usize>> = words
        .iter()
        .zip(&flags)
        .filter(|(_, f)| !f.is_empty())
        .collect();

    let free: Vec<bool> = words
        .par_iter()
        .map(|w| {
            (0..w.len())
                .all(|i| ((i + 1)..=w.len()).all(|j| !shortening.contains_key(&w.subword(i, j))))
        })
        .collect();
    let mut counts = vec![0usize; n + 1];
    for (w, f) in words.iter().zip(&free) {
        if *f {
            for c in counts.iter_mut().skip(w.len()) {
                *c += 1;
            }
        }
    }

    let mut per_line: BTreeMap<usize, usize> = BTreeMap::new();
    let mut window_violations = Vec::new();
    let mut multi = Vec::new();
    let mut hits = Vec::new();
    for (w, f) in words.iter().zip(&flags) {
        if f.is_empty() {
            continue;
        }
        let name = format_uword(w, &ctx.u);
        if f.len() > 1 {
            multi.push(name.clone());
        }
        for &l in f {
            let minimal =
                (1..w.len()).all(|k| shortening.get(&w.prefix(k)).is_none_or(|g| !g.contains(&l)));
            if minimal {
                *per_line.entry(l).or_default() += 1;
            }
            let check = window_check(ctx, name.clone(), w.len(), tau, minimal);
            if !check.ok {
                window_violations.push(check);
            }
        }
        hits.push(ShorteningHit {
            word: name,
            lines: f.iter().map(|&l| lines[l].conj.clone()).collect(),
        });
    }
    let max_minimal = per_line.values().copied().max().unwrap_or(0);
    let bound_ok = counting_bound_flags(&counts, ctx.u.len());
    let free_words = emit_words.then(|| {
        words
            .iter()
            .zip(&free)
            .filter(|(_, f)| **f)
            .map(|(w, _)| format_uword(w, &ctx.u))
            .collect()
    });
    Ok(EnumerationReport {
        tau: tau.clone(),
        n,
        lines_scanned: lines.len(),
        counting_bound: bound_ok.iter().all(|b| *b),
        bound_ok,
        counts,
        shortening_words: hits,
        max_minimal_per_member: max_minimal,
        minimal_count_ok: max_minimal <= 2,
        window_violations,
        multi_member_violations: multi,
        free_words,
        approximation: AXES_ONLY.into(),
    })
}

/// Per index k: c_k ≥ |U|ᵏ and, for k ≥ 1, c_k ≥ |U|·c_{k−1}.
pub fn counting_bound_flags(counts: &[usize], u_size: usize) -> Vec<bool> {
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let power = (u_size as u128).checked_pow(k as u32);
            let pow_ok = power.is_some_and(|p| c as u128 >= p);
            let step_ok = k == 0 || c as u128 >= u_size as u128 * counts[k - 1] as u128;
            pow_ok && step_ok
        })
        .collect()
}

pub fn verify_counting_bound(counts: &[usize], u_size: usize) -> bool {
    counting_bound_flags(counts, u_size).iter().all(|b| *b)
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct BarrierReport {
    pub word: String,
    pub line: Word,
    /// Gap between the projections of p and wp.
    pub endpoint_gap: usize,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub tau: Rational,
    /// τ − 8L₀ − 8δ.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub reduced_tau: Rational,
    /// Δ₀ + 10L₀ + 240δ₀ ≤ τ.
    pub gate_ok: bool,
    pub triggered: bool,
    /// Letters [start, end) of the shortest witness, leftmost first.
    pub witness: Option<(usize, usize)>,
    pub witness_word: Option<String>,
    pub holds: bool,
}

/// If p and wp project more than τ apart on `line`, look for a subword
/// u_{a+1}⋯u_b that is (τ − 8L₀ − 8δ)-shortening over the translated pair,
/// i.e. whose segment x_a..x_b satisfies both conditions against `line`.
pub fn barrier_check(
    ctx: &ShorteningContext,
    line: &Line,
    w: &[Letter],
    tau: &Rational,
    l0: &Rational,
    big_delta0: &Rational,
    delta0: &Rational,
) -> Result<BarrierReport> {
    ctx.check_uword(w)?;
    let path = ctx.path(w);
    let whole = ctx.segment(w, &path, 0, w.len(), line, tau);
    let reduced_tau = tau - int(8) * l0 - int(8) * &ctx.delta;
    let gate = big_delta0 + int(10) * l0 + int(240) * delta0;
    let triggered = int(whole.proj_gap as i64) > *tau;
    let mut witness = None;
    if triggered {
        'search: for len in 1..=w.len() {
            for a in 0..=(w.len() - len) {
                if ctx
                    .segment(w, &path, a, a + len, line, &reduced_tau)
                    .is_shortening
                {
                    witness = Some((a, a + len));
                    break 'search;
                }
            }
        }
    }
    Ok(BarrierReport {
        word: whole.word,
        line: line.conj.clone(),
        endpoint_gap: whole.proj_gap,
        tau: tau.clone(),
        reduced_tau,
        gate_ok: tau >= &gate,
        triggered,
        witness_word: witness
            .map(|(a, b)| format_uword(&Word::from_letters(w[a..b].iter().copied()), &ctx.u)),
        witness,
        holds: !triggered || witness.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::enumerate_ball;
    use crate::hypgeom::fellow_travelling_delta;
    use crate::words::Presentation;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn f2(radius: usize) -> GroupBall {
        let p = Presentation::free("ab").unwrap();
        let u = p.standard_generators();
        enumerate_ball(&p, &u, radius).unwrap()
    }

    fn ul(pattern: &str) -> Vec<Letter> {
        // 'x' = U[0], 'y' = U[1], capitals invert
        pattern
            .chars()
            .map(|c| {
                Letter::new(
                    if c.eq_ignore_ascii_case(&'x') { 0 } else { 1 },
                    c.is_uppercase(),
                )
            })
            .collect()
    }

    fn fixture(ball: &GroupBall) -> ShorteningContext<'_> {
        ShorteningContext::new(
            ball,
            &[w("a^10"), w("b^10")],
            &Word::empty(),
            &int(1),
            &ratio(1, 200),
        )
        .unwrap()
    }

    #[test]
    fn line_projection_and_canonical_form() {
        let l = Line::new(w("b"), w("ab")).unwrap();
        let pr = l.project(&w("babaB"));
        assert_eq!(pr.coord, 3);
        assert_eq!(pr.dist, 1);
        assert_eq!(pr.point, w("baba"));
        let shifted = Line::new(w("bababab"), w("ab")).unwrap();
        assert_eq!(l.canonical(), shifted.canonical());
        assert_ne!(
            l.canonical(),
            Line::new(w("ba"), w("ab")).unwrap().canonical()
        );
    }

    #[test]
    fn family_of_a40() {
        let ball = f2(2);
        let conj: Vec<Word> = ball
            .points_within(2)
            .iter()
            .map(|e| e.word.clone())
            .collect();
        let fam = build_moving_family(&ball, &w("a^40"), &conj, &int(0)).unwrap();
        assert_eq!(fam.t_estimate, 40);
        assert_eq!(fam.delta_estimate, 0);
        // cosets u⟨a⟩ with |u| ≤ 2: 1, b, B, and the six length-2 words ending in b/B
        assert_eq!(fam.members.len(), 9);

        let two = build_moving_family(&ball, &w("a^40"), &[Word::empty(), w("aaa")], &int(0));
        assert!(two.is_err()); // a³ lies outside the radius-2 ball
        let big = f2(3);
        let two =
            build_moving_family(&big, &w("a^40"), &[Word::empty(), w("aaa")], &int(0)).unwrap();
        assert_eq!(two.members.len(), 1);
        assert_eq!(two.skipped, vec![w("aaa")]);

        assert_eq!(
            build_moving_family(&ball, &w("a^40"), &[], &int(0)).unwrap_err(),
            Error::EmptyFamily
        );
        assert_eq!(
            build_moving_family(&ball, &Word::empty(), &conj, &int(0)).unwrap_err(),
            Error::NotLoxodromic
        );
    }

    #[test]
    fn sc_condition_examples() {
        let ball = f2(2);
        let conj: Vec<Word> = ball
            .points_within(2)
            .iter()
            .map(|e| e.word.clone())
            .collect();
        let fam = build_moving_family(&ball, &w("a^40"), &conj, &int(0)).unwrap();
        let d = ratio(1, 200);
        let ok = check_sc_condition(&fam, &ratio(1, 100), &int(10), &d);
        assert!(ok.sc1 && ok.sc2 && ok.pass);
        let bad = check_sc_condition(&fam, &ratio(1, 100), &int(10_000), &d);
        assert!(bad.sc1 && !bad.sc2);
        assert!(!check_sc_condition(&fam, &int(0), &int(10), &d).sc1);
    }

    #[test]
    fn delta_agrees_with_ball_measurement() {
        // translates of the axis of ab overlap in short segments
        let ball = f2(6);
        let h = w("ab");
        let conj = vec![Word::empty(), w("a"), w("b"), w("ba"), w("aB")];
        for eps in [0, 1] {
            let fam = build_moving_family(&ball, &h, &conj, &int(eps)).unwrap();
            let rep = fellow_travelling_delta(&ball, &h, &conj, &int(eps), &int(0)).unwrap();
            assert_eq!(int(fam.delta_estimate as i64), rep.value, "eps {eps}");
        }
    }

    #[test]
    fn radius_family_matches_listed_delta() {
        let ball = f2(4);
        let h = w("aab");
        let conj: Vec<Word> = ball
            .points_within(4)
            .iter()
            .map(|e| e.word.clone())
            .collect();
        for eps in [0, 1] {
            let listed = build_moving_family(&ball, &h, &conj, &int(eps)).unwrap();
            let radius = build_radius_family(&ball, &h, 4, &int(eps)).unwrap();
            assert_eq!(listed.delta_estimate, radius.delta_estimate, "eps {eps}");
            for m in &listed.members {
                assert!(radius.admits(&m.line));
            }
        }
    }

    #[test]
    fn shortening_examples() {
        let ball = f2(2);
        let ctx = fixture(&ball);
        let fam = build_moving_family(&ball, &w("a^40"), &[Word::empty()], &int(0)).unwrap();
        let tau = int(15);
        let v = is_shortening_word(&ctx, &fam, 0, &ul("xx"), &tau).unwrap();
        assert!(v.is_shortening);
        assert_eq!(v.proj_gap, 20);
        assert_eq!(v.end_margins, vec![int(4), int(4)]);
        let v = is_shortening_word(&ctx, &fam, 0, &ul("y"), &tau).unwrap();
        assert!(!v.is_shortening);
        assert_eq!(v.proj_gap, 0);
        assert_eq!(
            is_shortening_word(&ctx, &fam, 0, &ul("xX"), &tau).unwrap_err(),
            Error::NotReducedWord
        );
        assert!(
            !is_shortening_word(&ctx, &fam, 0, &[], &tau)
                .unwrap()
                .is_shortening
        );
    }

    #[test]
    fn tau_gate() {
        let ball = f2(2);
        let ctx = fixture(&ball).with_gate(TauGate {
            big_delta0: ratio(1, 2),
            l0: int(10),
        });
        let fam = build_moving_family(&ball, &w("a^40"), &[Word::empty()], &int(0)).unwrap();
        assert!(matches!(
            is_shortening_word(&ctx, &fam, 0, &ul("xx"), &int(15)),
            Err(Error::TauBelowGate { .. })
        ));
        assert!(is_shortening_word(&ctx, &fam, 0, &ul("xx"), &int(22)).is_ok());
    }

    #[test]
    fn minimal_shortenings() {
        let ball = f2(2);
        let ctx = fixture(&ball);
        let fam = build_moving_family(&ball, &w("a^40"), &[Word::empty()], &int(0)).unwrap();
        let m = find_minimal_shortenings(&ctx, &fam, 0, &int(15), 4).unwrap();
        assert_eq!(
            m.words,
            ["a^10.a^10", "A^10.A^10"]
                .iter()
                .map(|s| fmt(s))
                .collect::<Vec<_>>()
        );
        assert!(m.at_most_two && m.window_ok);
        let m = find_minimal_shortenings(&ctx, &fam, 0, &int(25), 4).unwrap();
        assert_eq!(m.words.len(), 2);
        assert!(m.words.iter().all(|s| s.split('.').count() == 3));
        assert!(find_minimal_shortenings(&ctx, &fam, 0, &int(45), 4)
            .unwrap()
            .words
            .is_empty());
    }

    fn fmt(s: &str) -> String {
        s.split('.')
            .map(|p| w(p).to_string())
            .collect::<Vec<_>>()
            .join(".")
    }

    #[test]
    fn counting_fixture() {
        let ball = f2(2);
        let ctx = fixture(&ball);
        let fam = build_radius_family(&ball, &w("a^40"), 25, &int(0)).unwrap();
        let rep = enumerate_shortening_free(&ctx, Some(&fam), &int(15), 2, true).unwrap();
        assert_eq!(rep.counts, vec![1, 5, 15]);
        assert!(rep.counting_bound);
        assert!(rep.multi_member_violations.is_empty());
        assert_eq!(
            rep.to_csv(),
            "k,count,bound_ok\n0,1,true\n1,5,true\n2,15,true\n"
        );
        let none = enumerate_shortening_free(&ctx, None, &int(15), 2, false).unwrap();
        assert_eq!(none.counts, vec![1, 5, 17]);
        let zero = enumerate_shortening_free(&ctx, Some(&fam), &int(15), 0, false).unwrap();
        assert_eq!(zero.counts, vec![1]);
    }

    #[test]
    fn counting_bound_examples() {
        assert!(verify_counting_bound(&[1, 5, 15], 2));
        assert!(!verify_counting_bound(&[1, 1], 2));
        assert!(verify_counting_bound(&[1], 7));
    }

    #[test]
    fn barrier_finds_short_subword() {
        let ball = f2(2);
        let ctx = fixture(&ball);
        let line = Line::new(w("b^10"), w("a")).unwrap();
        let word = ul("yxxxxxxxxxxxy");
        let rep = barrier_check(
            &ctx,
            &line,
            &word,
            &int(102),
            &int(10),
            &ratio(1, 2),
            &ratio(1, 200),
        )
        .unwrap();
        assert!(rep.gate_ok && rep.triggered && rep.holds);
        assert_eq!(rep.witness, Some((1, 4)));
    }
}
