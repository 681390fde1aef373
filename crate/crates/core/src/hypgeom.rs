//! Hyperbolic geometry measured on a finite ball: Gromov products, the
//! four-point δ, ℓ∞-energy, translation lengths, axes and fellow travelling.
//!
//! Distances are integers, so Gromov products are half-integers and are
//! carried doubled internally. Balls over the free group with its standard
//! generators are trees and get exact word-length shortcuts; anything else is
//! resolved by ball lookup, growing a scratch ball when a computation needs
//! a larger radius.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::cayley::{GroupBall, Strategy};
use crate::error::{Error, Result};
use crate::rational::{int, ratio, Rational};
use crate::words::{cyclic_reduce, Word};

/// Above this many quadruples `DeltaMode::Auto` samples instead of scanning.
pub const EXHAUSTIVE_LIMIT: u128 = 20_000_000;
pub const AUTO_SAMPLES: u64 = 1_000_000;

fn resolve(ball: &GroupBall, g: &Word) -> Result<usize> {
    ball.length(g).ok_or(Error::OutOfRange)
}

fn dist(ball: &GroupBall, x: &Word, y: &Word) -> Result<usize> {
    ball.metric(x, y).ok_or(Error::OutOfRange)
}

/// |g·x − x| = |x⁻¹gx|.
pub fn displacement(ball: &GroupBall, g: &Word, x: &Word) -> Result<usize> {
    resolve(ball, &x.inverse().mul(g).mul(x))
}

pub fn gromov_product(ball: &GroupBall, x: &Word, y: &Word, z: &Word) -> Result<Rational> {
    let twice = dist(ball, x, z)? + dist(ball, y, z)? - dist(ball, x, y)?;
    Ok(ratio(twice as i64, 2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum DeltaMode {
    Exhaustive,
    Sampled {
        count: u64,
        seed: u64,
    },
    /// Exhaustive up to `EXHAUSTIVE_LIMIT` quadruples, sampled beyond.
    Auto {
        seed: u64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct DeltaReport {
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub delta: Rational,
    pub mode: DeltaMode,
    /// True only when every quadruple of the ball was scanned.
    pub certified: bool,
    pub points: usize,
    pub quadruples: u128,
    /// (x, y, z, t) attaining the maximum, when it is positive.
    pub witness: Option<[Word; 4]>,
}

/// max over quadruples of min{(x,y)_t, (y,z)_t} − (x,z)_t, clamped at 0.
pub fn estimate_delta(ball: &GroupBall, mode: DeltaMode) -> Result<DeltaReport> {
    let pts: Vec<&Word> = ball.elements().iter().map(|e| &e.word).collect();
    let n = pts.len();
    let total = (n as u128).pow(4);
    let mode = match mode {
        DeltaMode::Auto { seed } if total > EXHAUSTIVE_LIMIT => DeltaMode::Sampled {
            count: AUTO_SAMPLES,
            seed,
        },
        DeltaMode::Auto { .. } => DeltaMode::Exhaustive,
        m => m,
    };
    let metric_ball = ball.scratch(2 * ball.radius())?;
    let mb: &GroupBall = &metric_ball;

    let (best, witness_idx, quadruples) = match mode {
        DeltaMode::Exhaustive => {
            let d: Vec<Vec<i32>> = pts
                .par_iter()
                .map(|x| {
                    pts.iter()
                        .map(|y| dist(mb, x, y).map(|v| v as i32))
                        .collect::<Result<Vec<i32>>>()
                })
                .collect::<Result<_>>()?;
            let (best, idx) = scan_all(&d);
            (best, idx, total)
        }
        DeltaMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = 0i64;
            let mut idx = None;
            for _ in 0..count {
                let q: [usize; 4] = [
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                ];
                let v = four_point_twice(mb, [pts[q[0]], pts[q[1]], pts[q[2]], pts[q[3]]])?;
                if v > best {
                    best = v;
                    idx = Some(q);
                }
            }
            (best, idx, count as u128)
        }
        DeltaMode::Auto { .. } => unreachable!("auto resolved above"),
    };
    Ok(DeltaReport {
        delta: ratio(best, 2),
        mode,
        certified: matches!(mode, DeltaMode::Exhaustive),
        points: n,
        quadruples,
        witness: witness_idx.map(|q| q.map(|i| pts[i].clone())),
    })
}

/// Twice the four-point defect of (x, y, z, t).
pub fn four_point_twice(ball: &GroupBall, q: [&Word; 4]) -> Result<i64> {
    let [x, y, z, t] = q;
    let g = |a: &Word, b: &Word| -> Result<i64> {
        Ok(dist(ball, a, t)? as i64 + dist(ball, b, t)? as i64 - dist(ball, a, b)? as i64)
    };
    Ok(g(x, y)?.min(g(y, z)?) - g(x, z)?)
}

fn scan_all(d: &[Vec<i32>]) -> (i64, Option<[usize; 4]>) {
    let n = d.len();
    // Per basepoint t: the defect is symmetric in x and z, so z ≥ x suffices.
    let per_t: Vec<(i64, Option<[usize; 4]>)> = (0..n)
        .into_par_iter()
        .map(|t| {
            let g: Vec<Vec<i32>> = (0..n)
                .map(|x| (0..n).map(|y| d[x][t] + d[y][t] - d[x][y]).collect())
                .collect();
            let mut best = 0i64;
            let mut at = None;
            for x in 0..n {
                let gx = &g[x];
                for z in x..n {
                    let gz = &g[z];
                    let m = gx.iter().zip(gz).map(|(a, b)| *a.min(b)).max().unwrap_or(0);
                    let v = (m - gx[z]) as i64;
                    if v > best {
                        let y = (0..n).find(|&y| gx[y].min(gz[y]) == m).unwrap_or(0);
                        best = v;
                        at = Some([x, y, z, t]);
                    }
                }
            }
            (best, at)
        })
        .collect();
    per_t
        .into_iter()
        .fold((0, None), |acc, cur| if cur.0 > acc.0 { cur } else { acc })
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct PointEnergy {
    pub point: Word,
    pub value: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct EnergyReport {
    pub set: Vec<Word>,
    /// Only points at distance ≤ radius − max|u| are scanned.
    pub scan_radius: usize,
    pub per_point: Vec<PointEnergy>,
    pub min_value: usize,
    pub argmin: Word,
    pub skipped: usize,
}

/// L(U, x) = max_u |ux − x| over the ball points far enough from the boundary.
pub fn energy_profile(ball: &GroupBall, u: &[Word]) -> Result<EnergyReport> {
    if u.is_empty() {
        return Err(Error::EmptyGeneratingSet);
    }
    for w in u {
        ball.presentation().validate(w)?;
    }
    let lens = u
        .iter()
        .map(|w| resolve(ball, w))
        .collect::<Result<Vec<_>>>()?;
    let max_len = lens.iter().copied().max().unwrap_or(0);
    let scan_radius = ball.radius().saturating_sub(max_len);
    if max_len > ball.radius() {
        return Err(Error::OutOfRange);
    }
    let points = ball.points_within(scan_radius);
    let metric_ball = ball.scratch(2 * scan_radius + max_len)?;
    let mb: &GroupBall = &metric_ball;
    let per_point: Vec<PointEnergy> = points
        .par_iter()
        .map(|e| {
            let value = u
                .iter()
                .map(|g| displacement(mb, g, &e.word))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(0);
            Ok(PointEnergy {
                point: e.word.clone(),
                value,
            })
        })
        .collect::<Result<_>>()?;
    let best = per_point
        .iter()
        .min_by_key(|p| p.value)
        .expect("identity is always scanned");
    Ok(EnergyReport {
        set: u.to_vec(),
        scan_radius,
        min_value: best.value,
        argmin: best.point.clone(),
        skipped: ball.len() - points.len(),
        per_point,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct StableSample {
    pub n: usize,
    pub displacement: usize,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub value: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct TranslationReport {
    pub g: Word,
    /// min over scanned points of |gx − x|.
    pub tlen: usize,
    /// In the free tree the translation length is the cyclic core length.
    pub exact: bool,
    pub stable_samples: Vec<StableSample>,
    /// Interval containing ‖g‖∞.
    #[serde(with = "crate::rational::serde_vec_q")]
    #[schemars(with = "Vec<String>")]
    pub stable_bracket: Vec<Rational>,
    /// tlen ≤ upper end of the bracket + 16δ, when δ is supplied.
    pub slack_check: Option<bool>,
}

pub fn translation_lengths(
    ball: &GroupBall,
    g: &Word,
    power_cap: usize,
    delta: Option<&Rational>,
) -> Result<TranslationReport> {
    ball.presentation().validate(g)?;
    if ball.reduce(g).is_empty() {
        return Err(Error::IdentityElement);
    }
    if power_cap == 0 {
        return Err(Error::InvalidParameter("power cap must be positive".into()));
    }
    let glen = resolve(ball, g)?;
    let needed = (2 * ball.radius() + glen).max(power_cap * glen);
    let scratch = ball.scratch(needed)?;
    let sb: &GroupBall = &scratch;

    let tlen = if ball.is_tree() {
        cyclic_reduce(g).0.len()
    } else {
        ball.elements()
            .par_iter()
            .map(|e| displacement(sb, g, &e.word))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .expect("ball contains the identity")
    };
    let mut stable_samples = Vec::with_capacity(power_cap);
    for n in 1..=power_cap {
        let d = resolve(sb, &g.pow(n as i64))?;
        stable_samples.push(StableSample {
            n,
            displacement: d,
            value: ratio(d as i64, n as i64),
        });
    }
    let upper = stable_samples
        .iter()
        .map(|s| s.value.clone())
        .min()
        .expect("power cap is positive");
    let lower = if ball.is_tree() {
        int(tlen as i64)
    } else {
        int(0)
    };
    let slack_check = delta.map(|d| int(tlen as i64) <= upper.clone() + int(16) * d);
    Ok(TranslationReport {
        g: g.clone(),
        tlen,
        exact: ball.is_tree(),
        stable_samples,
        stable_bracket: vec![lower, upper],
        slack_check,
    })
}

/// E(g) in a free group: the maximal cyclic subgroup c⟨k⟩c⁻¹ containing
/// g = c kᵐ c⁻¹ with k primitive and cyclically reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryClosure {
    pub conjugator: Word,
    pub root: Word,
}

impl ElementaryClosure {
    pub fn of(g: &Word) -> Result<Self> {
        let (core, conjugator) = cyclic_reduce(g);
        if core.is_empty() {
            return Err(Error::NotLoxodromic);
        }
        let (root, _) = core.primitive_root();
        Ok(ElementaryClosure { conjugator, root })
    }

    /// w ∈ c⟨k⟩c⁻¹, i.e. c⁻¹wc is a power of k.
    pub fn contains(&self, w: &Word) -> bool {
        let x = self.conjugator.conjugate(w);
        if x.is_empty() {
            return true;
        }
        let k = &self.root;
        let base = if x.starts_with(k) {
            k.clone()
        } else {
            k.inverse()
        };
        x.len().is_multiple_of(base.len()) && base.pow((x.len() / base.len()) as i64) == x
    }

    /// u ∼ v iff u⁻¹v ∈ E(g).
    pub fn equivalent(&self, u: &Word, v: &Word) -> bool {
        self.contains(&u.inverse().mul(v))
    }
}

/// Keeps the first member of each ∼_g class, in input order.
pub fn class_representatives(e: &ElementaryClosure, words: &[Word]) -> (Vec<Word>, Vec<usize>) {
    let mut reps: Vec<Word> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for w in words {
        match reps.iter().position(|r| e.equivalent(r, w)) {
            Some(i) => sizes[i] += 1,
            None => {
                reps.push(w.clone());
                sizes.push(1);
            }
        }
    }
    (reps, sizes)
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct PairDiameter {
    pub u: Word,
    pub v: Word,
    pub intersection_size: usize,
    pub diameter: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct FellowReport {
    pub g: Word,
    pub tlen: usize,
    /// A = {x : |gx − x| ≤ tlen + slack}.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub axis_slack: Rational,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub eps: Rational,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub value: Rational,
    pub pairs: Vec<PairDiameter>,
    /// Translates dropped because they are ∼_g to an earlier one.
    pub skipped: Vec<Word>,
    /// Axes stand in for invariant cylinders; intersections are taken
    /// inside the ball only.
    pub approximation: String,
}

/// Distance from z to the axis set A = {x : |gx − x| ≤ tlen + slack}.
fn axis_distance(
    ball: &GroupBall,
    g: &Word,
    tlen: usize,
    slack: usize,
    axis: &[Word],
    z: &Word,
) -> Result<usize> {
    if ball.is_tree() {
        axis_distance_tree(ball, g, tlen, slack, z)
    } else {
        axis_distance_scan(ball, axis, z)
    }
}

/// In a tree |gz − z| = ‖g‖ + 2 d(z, line), and A is the ⌊slack/2⌋
/// neighbourhood of the line.
fn axis_distance_tree(
    ball: &GroupBall,
    g: &Word,
    tlen: usize,
    slack: usize,
    z: &Word,
) -> Result<usize> {
    let d_line = (displacement(ball, g, z)? - tlen) / 2;
    Ok(d_line.saturating_sub(slack / 2))
}

fn axis_distance_scan(ball: &GroupBall, axis: &[Word], z: &Word) -> Result<usize> {
    axis.iter()
        .map(|a| dist(ball, z, a))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .ok_or(Error::OutOfRange)
}

/// max over inequivalent pairs (u, v) of diam(u·A^{+eps} ∩ v·A^{+eps}),
/// measured on the points of the ball; diam(∅) = 0.
pub fn fellow_travelling_delta(
    ball: &GroupBall,
    g: &Word,
    translates: &[Word],
    eps: &Rational,
    delta: &Rational,
) -> Result<FellowReport> {
    if ball.strategy() != Strategy::FreeGroup {
        return Err(Error::UnsupportedStrategy(
            "elementary closures are exact only in free groups".into(),
        ));
    }
    ball.presentation().validate(g)?;
    for t in translates {
        ball.presentation().validate(t)?;
    }
    let closure = ElementaryClosure::of(g)?;
    let tr = translation_lengths(ball, g, 1, None)?;
    let tlen = tr.tlen;
    let axis_slack = int(8) * delta;
    let slack = crate::rational::floor_to_i64(&axis_slack)
        .unwrap_or(0)
        .max(0) as usize;
    let eps_steps = crate::rational::floor_to_i64(eps).unwrap_or(-1);
    if eps_steps < 0 {
        return Err(Error::InvalidParameter("eps must be non-negative".into()));
    }
    let eps_steps = eps_steps as usize;

    let axis: Vec<Word> = if ball.is_tree() {
        Vec::new()
    } else {
        ball.elements()
            .iter()
            .filter(|e| matches!(displacement(ball, g, &e.word), Ok(d) if d <= tlen + slack))
            .map(|e| e.word.clone())
            .collect()
    };

    let (reps, _) = class_representatives(&closure, translates);
    let skipped: Vec<Word> = translates
        .iter()
        .enumerate()
        .filter(|(i, t)| translates[..*i].iter().any(|s| closure.equivalent(s, t)))
        .map(|(_, t)| t.clone())
        .collect();

    // Membership of every ball point in every translated neighbourhood.
    let member: Vec<Vec<bool>> = reps
        .iter()
        .map(|u| {
            let ui = u.inverse();
            ball.elements()
                .par_iter()
                .map(|e| {
                    let z = ui.mul(&e.word);
                    Ok(axis_distance(ball, g, tlen, slack, &axis, &z)? <= eps_steps)
                })
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<_>>()?;

    let mut pairs = Vec::new();
    let mut value = 0usize;
    for i in 0..reps.len() {
        for j in (i + 1)..reps.len() {
            let common: Vec<&Word> = ball
                .elements()
                .iter()
                .enumerate()
                .filter(|(k, _)| member[i][*k] && member[j][*k])
                .map(|(_, e)| &e.word)
                .collect();
            let mut diam = 0usize;
            for a in 0..common.len() {
                for b in (a + 1)..common.len() {
                    diam = diam.max(dist(ball, common[a], common[b])?);
                }
            }
            value = value.max(diam);
            pairs.push(PairDiameter {
                u: reps[i].clone(),
                v: reps[j].clone(),
                intersection_size: common.len(),
                diameter: diam,
            });
        }
    }
    Ok(FellowReport {
        g: g.clone(),
        tlen,
        axis_slack,
        eps: eps.clone(),
        value: int(value as i64),
        pairs,
        skipped,
        approximation:
            "axis sets stand in for invariant cylinders; intersections restricted to the ball"
                .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::enumerate_ball;
    use crate::words::{parse_presentation, Presentation};

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn f2_ball(r: usize) -> GroupBall {
        let p = Presentation::free("abc").unwrap();
        enumerate_ball(&p, &p.standard_generators(), r).unwrap()
    }

    #[test]
    fn gromov_products_in_tree() {
        let b = f2_ball(3);
        assert_eq!(
            gromov_product(&b, &w("ab"), &w("ac"), &Word::empty()).unwrap(),
            int(1)
        );
        assert_eq!(
            gromov_product(&b, &w("a"), &w("A"), &Word::empty()).unwrap(),
            int(0)
        );
        assert_eq!(
            gromov_product(&b, &w("ab"), &w("ab"), &w("c")).unwrap(),
            int(3)
        );
    }

    #[test]
    fn delta_of_small_balls() {
        let p = Presentation::free("ab").unwrap();
        let b = enumerate_ball(&p, &p.standard_generators(), 2).unwrap();
        let r = estimate_delta(&b, DeltaMode::Exhaustive).unwrap();
        assert_eq!(r.delta, int(0));
        assert!(r.certified);
        let b0 = enumerate_ball(&p, &p.standard_generators(), 0).unwrap();
        assert_eq!(
            estimate_delta(&b0, DeltaMode::Exhaustive).unwrap().delta,
            int(0)
        );
    }

    #[test]
    fn delta_of_surface_ball() {
        let p = parse_presentation("generators: a b c d\nrelators: abABcdCD").unwrap();
        let b = enumerate_ball(&p, &p.standard_generators(), 2).unwrap();
        assert_eq!(
            estimate_delta(&b, DeltaMode::Exhaustive).unwrap().delta,
            int(0)
        );
    }

    /// With a and a² both generators, 1, a, a², a³ span a 4-cycle with
    /// defect 1/2 at t = 1.
    #[test]
    fn delta_detects_non_tree() {
        let p = Presentation::free("ab").unwrap();
        let u = vec![w("a"), w("A"), w("b"), w("B"), w("aa"), w("AA")];
        let b = enumerate_ball(&p, &u, 2).unwrap();
        let r = estimate_delta(&b, DeltaMode::Exhaustive).unwrap();
        assert_eq!(r.delta, ratio(1, 2));
        let q = r.witness.unwrap();
        let twice = four_point_twice(&b.scratch(4).unwrap(), [&q[0], &q[1], &q[2], &q[3]]).unwrap();
        assert_eq!(ratio(twice, 2), r.delta);
        let s = estimate_delta(
            &b,
            DeltaMode::Sampled {
                count: 2000,
                seed: 1,
            },
        )
        .unwrap();
        assert!(s.delta <= r.delta);
    }

    #[test]
    fn sampling_is_reproducible() {
        let b = f2_ball(2);
        let m = DeltaMode::Sampled {
            count: 500,
            seed: 3,
        };
        let a = estimate_delta(&b, m).unwrap();
        let c = estimate_delta(&b, m).unwrap();
        assert_eq!(a.delta, c.delta);
        assert!(!a.certified);
    }

    #[test]
    fn energy_examples() {
        let p = Presentation::free("ab").unwrap();
        let b = enumerate_ball(&p, &p.standard_generators(), 4).unwrap();
        let r = energy_profile(&b, &p.standard_generators()).unwrap();
        assert_eq!(r.per_point[0].value, 1);
        assert_eq!((r.min_value, r.argmin.clone()), (1, Word::empty()));
        let r = energy_profile(&b, &[w("abA")]).unwrap();
        assert_eq!(r.per_point[0].value, 3);
        assert_eq!((r.min_value, r.argmin), (1, w("a")));
        assert_eq!(
            energy_profile(&b, &[]).unwrap_err(),
            Error::EmptyGeneratingSet
        );
    }

    #[test]
    fn translation_examples() {
        let p = Presentation::free("ab").unwrap();
        let b = enumerate_ball(&p, &p.standard_generators(), 3).unwrap();
        let r = translation_lengths(&b, &w("ab"), 4, None).unwrap();
        assert_eq!(r.tlen, 2);
        assert_eq!(r.stable_samples[3].value, int(2));
        assert_eq!(translation_lengths(&b, &w("abA"), 2, None).unwrap().tlen, 1);
        assert_eq!(
            translation_lengths(&b, &Word::empty(), 2, None).unwrap_err(),
            Error::IdentityElement
        );
    }

    #[test]
    fn translation_on_non_tree_ball_matches_scan() {
        let p = Presentation::free("ab").unwrap();
        let u = vec![w("a"), w("A"), w("b"), w("B"), w("ab"), w("BA")];
        let b = enumerate_ball(&p, &u, 2).unwrap();
        assert!(!b.is_tree());
        let r = translation_lengths(&b, &w("abab"), 2, Some(&int(0))).unwrap();
        assert_eq!(r.tlen, 2);
        assert_eq!(r.stable_bracket[1], int(2));
        assert_eq!(r.slack_check, Some(true));
    }

    #[test]
    fn closures() {
        let e = ElementaryClosure::of(&w("a")).unwrap();
        assert!(e.equivalent(&w("a"), &w("A")));
        assert!(!e.equivalent(&w("a"), &w("b")));
        let e = ElementaryClosure::of(&w("Baab")).unwrap();
        assert!(e.contains(&w("BaaaaaB").mul(&w("bb"))));
        assert!(e.contains(&w("BAb")));
        assert!(!e.contains(&w("b")));
        let e = ElementaryClosure::of(&w("abab")).unwrap();
        assert_eq!(e.root, w("ab"));
        assert!(e.contains(&w("BA")));
        assert_eq!(
            ElementaryClosure::of(&w("aA")).unwrap_err(),
            Error::NotLoxodromic
        );
    }

    #[test]
    fn fellow_travelling_examples() {
        let p = Presentation::free("ab").unwrap();
        let b = enumerate_ball(&p, &p.standard_generators(), 3).unwrap();
        let one = Word::empty();
        let r =
            fellow_travelling_delta(&b, &w("a"), &[one.clone(), w("b")], &int(1), &int(0)).unwrap();
        assert_eq!(r.value, int(1));
        assert_eq!(r.pairs[0].intersection_size, 2);
        let r =
            fellow_travelling_delta(&b, &w("a"), &[one.clone(), w("b")], &int(0), &int(0)).unwrap();
        assert_eq!(r.value, int(0));
        let r = fellow_travelling_delta(
            &b,
            &w("a"),
            &[one.clone(), w("a"), w("b")],
            &int(0),
            &int(0),
        )
        .unwrap();
        assert_eq!(r.skipped, vec![w("a")]);
        assert_eq!(r.pairs.len(), 1);
        assert_eq!(
            fellow_travelling_delta(&b, &one, std::slice::from_ref(&one), &int(0), &int(0))
                .unwrap_err(),
            Error::NotLoxodromic
        );
    }

    #[test]
    fn axis_distance_scan_agrees_with_tree_formula() {
        let b = f2_ball(3);
        let g = w("ab");
        for slack in [0usize, 2] {
            let axis: Vec<Word> = crate::words::reduced_words(3, 7)
                .into_iter()
                .filter(|x| displacement(&b, &g, x).unwrap() <= 2 + slack)
                .collect();
            for e in b.elements() {
                assert_eq!(
                    axis_distance_tree(&b, &g, 2, slack, &e.word).unwrap(),
                    axis_distance_scan(&b, &axis, &e.word).unwrap(),
                    "{} slack {slack}",
                    e.word
                );
            }
        }
    }
}
