//! α-reduced sets, the free-subgroup certificates they give, elementary
//! classes U(g) and the ping-pong set {u gᵇ u⁻¹ : u ∈ U(g)}.

use num::Zero;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::cayley::{GroupBall, Strategy};
use crate::error::{Error, Result};
use crate::hypgeom::{
    class_representatives, displacement, fellow_travelling_delta, gromov_product,
    translation_lengths, ElementaryClosure,
};
use crate::rational::{int, ratio, Rational};
use crate::words::{evaluate, format_uword, reduced_words, Presentation, Word};

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct PairMargin {
    pub u1: Word,
    pub u2: Word,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub product: Rational,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub threshold: Rational,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct ReducedReport {
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub alpha: Rational,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub delta: Rational,
    pub basepoint: Word,
    pub set: Vec<Word>,
    /// |up − p| for u in U.
    pub displacements: Vec<usize>,
    /// U ∩ U⁻¹ = ∅.
    pub disjoint_from_inverses: bool,
    /// Every distinct pair of U ⊔ U⁻¹.
    pub pair_margins: Vec<PairMargin>,
    pub verdict: bool,
    pub failing_pair: Option<(Word, Word)>,
    pub reason: Option<String>,
    /// When the verdict holds: |up − p| > 2(α + 50δ) for every u.
    pub displacement_bound: Option<bool>,
}

fn check_alpha(alpha: &Rational, delta: &Rational) -> Result<()> {
    if delta.is_zero() && alpha.is_zero() {
        return Ok(());
    }
    if *delta < Rational::zero() || *alpha < int(3) * delta {
        return Err(Error::InvalidParameter(format!(
            "alpha must be at least 3·delta (alpha {alpha}, delta {delta})"
        )));
    }
    Ok(())
}

fn dedup_group(ball: &GroupBall, u: &[Word]) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    for w in u {
        if !out.iter().any(|x| ball.equal(x, w)) {
            out.push(w.clone());
        }
    }
    out
}

pub fn check_reduced(
    ball: &GroupBall,
    u: &[Word],
    p: &Word,
    alpha: &Rational,
    delta: &Rational,
) -> Result<ReducedReport> {
    check_alpha(alpha, delta)?;
    for w in u.iter().chain(std::iter::once(p)) {
        ball.presentation().validate(w)?;
    }
    let set = dedup_group(ball, u);
    let displacements = set
        .iter()
        .map(|w| displacement(ball, w, p))
        .collect::<Result<Vec<_>>>()?;
    let mut report = ReducedReport {
        alpha: alpha.clone(),
        delta: delta.clone(),
        basepoint: p.clone(),
        set: set.clone(),
        displacements: displacements.clone(),
        disjoint_from_inverses: true,
        pair_margins: Vec::new(),
        verdict: false,
        failing_pair: None,
        reason: None,
        displacement_bound: None,
    };

    for a in &set {
        if let Some(b) = set.iter().find(|b| ball.equal(&a.inverse(), b)) {
            report.disjoint_from_inverses = false;
            report.failing_pair = Some((a.clone(), b.clone()));
            report.reason = Some(format!("{b} is the inverse of {a}"));
            return Ok(report);
        }
    }

    // U ⊔ U⁻¹ with |up − p| = |u⁻¹p − p|.
    let mut sym: Vec<(Word, usize)> = set
        .iter()
        .cloned()
        .zip(displacements.iter().copied())
        .collect();
    sym.extend(
        set.iter()
            .map(|w| w.inverse())
            .zip(displacements.iter().copied()),
    );
    let pairs: Vec<(usize, usize)> = (0..sym.len())
        .flat_map(|i| ((i + 1)..sym.len()).map(move |j| (i, j)))
        .collect();
    let slack = alpha + int(50) * delta;
    let margins: Vec<PairMargin> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (u1, d1) = &sym[i];
            let (u2, d2) = &sym[j];
            let product = gromov_product(ball, &u1.mul(p), &u2.mul(p), p)?;
            let threshold = ratio((*d1).min(*d2) as i64, 2) - &slack;
            Ok(PairMargin {
                u1: u1.clone(),
                u2: u2.clone(),
                ok: product < threshold,
                product,
                threshold,
            })
        })
        .collect::<Result<_>>()?;
    let failing = margins.iter().find(|m| !m.ok);
    report.verdict = failing.is_none();
    if let Some(m) = failing {
        report.failing_pair = Some((m.u1.clone(), m.u2.clone()));
        report.reason = Some(format!(
            "({}p, {}p)_p = {} is not below {}",
            m.u1,
            m.u2,
            crate::rational::format_rational(&m.product),
            crate::rational::format_rational(&m.threshold)
        ));
    }
    if report.verdict {
        let bound = int(2) * &slack;
        report.displacement_bound = Some(displacements.iter().all(|d| int(*d as i64) > bound));
    }
    report.pair_margins = margins;
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct QiViolation {
    pub word: String,
    pub displacement: usize,
    pub reason: String,
}

/// Desk-scale freeness audit of a set S at p: every reduced word over S of
/// length ≤ max_len is checked against the two-sided QI bound, the broken
/// geodesic lower bound, pairwise distinctness and the geodesic extension
/// property.
#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct FreenessReport {
    pub max_len: usize,
    /// Nonempty reduced words tested.
    pub words_tested: usize,
    /// L(S, p) = max |sp − p|.
    pub energy: usize,
    pub qi_violations: Vec<QiViolation>,
    pub broken_geodesic_violations: Vec<QiViolation>,
    pub distinct_elements: usize,
    pub all_distinct: bool,
    pub extension_pairs_tested: usize,
    pub extension_violations: Vec<(String, String)>,
    pub ok: bool,
}

pub fn check_freeness(
    ball: &GroupBall,
    s: &[Word],
    p: &Word,
    alpha: &Rational,
    delta: &Rational,
    max_len: usize,
) -> Result<FreenessReport> {
    let disp = s
        .iter()
        .map(|w| displacement(ball, w, p))
        .collect::<Result<Vec<_>>>()?;
    let energy = disp.iter().copied().max().unwrap_or(0);
    let uwords = reduced_words(s.len(), max_len);
    let values: Vec<(Word, usize)> = uwords
        .par_iter()
        .map(|w| {
            let g = evaluate(w, s);
            let d = displacement(ball, &g, p)?;
            Ok((g, d))
        })
        .collect::<Result<_>>()?;

    let mut qi_violations = Vec::new();
    let mut broken_geodesic_violations = Vec::new();
    let letter_disp = |l: crate::words::Letter| disp[l.generator as usize];
    for (w, (_, d)) in uwords.iter().zip(&values) {
        let n = w.len();
        if n == 0 {
            continue;
        }
        let d_q = int(*d as i64);
        let lower = int(2) * alpha * int(n as i64);
        let upper = int((energy * n) as i64);
        if d_q < lower || d_q > upper {
            qi_violations.push(QiViolation {
                word: format_uword(w, s),
                displacement: *d,
                reason: format!("outside [{lower}, {upper}]"),
            });
        }
        if n >= 2 {
            let first = letter_disp(w.letters()[0]);
            let last = letter_disp(w.letters()[n - 1]);
            let m = int(n as i64 - 1);
            let bound = ratio((first + last) as i64, 2)
                + int(2) * &m * (alpha + int(40) * delta)
                + int(4) * &m * delta;
            if d_q < bound {
                broken_geodesic_violations.push(QiViolation {
                    word: format_uword(w, s),
                    displacement: *d,
                    reason: format!("below {bound}"),
                });
            }
        }
    }

    let mut distinct: Vec<&Word> = Vec::new();
    if ball.strategy() == Strategy::FreeGroup {
        let mut seen = std::collections::HashSet::new();
        for (g, _) in &values {
            if seen.insert(g.clone()) {
                distinct.push(g);
            }
        }
    } else {
        for (g, _) in &values {
            if !distinct.iter().any(|x| ball.equal(x, g)) {
                distinct.push(g);
            }
        }
    }

    // Geodesic extension: (p, w'p)_{wp} ≤ ½|u_m p − p| forces w ⊑ w'.
    let indices: Vec<usize> = (1..uwords.len()).collect();
    let extension: Vec<(usize, Vec<(String, String)>)> = indices
        .par_iter()
        .map(|&i| {
            let w = &uwords[i];
            let wp = values[i].0.mul(p);
            let half = ratio(letter_disp(w.letters()[w.len() - 1]) as i64, 2);
            let mut bad = Vec::new();
            let mut tested = 0usize;
            for (j, w2) in uwords.iter().enumerate() {
                if j == i {
                    continue;
                }
                tested += 1;
                let prod = gromov_product(ball, p, &values[j].0.mul(p), &wp)?;
                if prod <= half && !w2.starts_with(w) {
                    bad.push((format_uword(w, s), format_uword(w2, s)));
                }
            }
            Ok((tested, bad))
        })
        .collect::<Result<_>>()?;
    let extension_pairs_tested = extension.iter().map(|e| e.0).sum();
    let extension_violations: Vec<(String, String)> =
        extension.into_iter().flat_map(|e| e.1).collect();

    let all_distinct = distinct.len() == values.len();
    let ok = qi_violations.is_empty()
        && broken_geodesic_violations.is_empty()
        && all_distinct
        && extension_violations.is_empty();
    Ok(FreenessReport {
        max_len,
        words_tested: uwords.len() - 1,
        energy,
        qi_violations,
        broken_geodesic_violations,
        distinct_elements: distinct.len(),
        all_distinct,
        extension_pairs_tested,
        extension_violations,
        ok,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct ClassReport {
    pub g: Word,
    pub representatives: Vec<Word>,
    pub class_sizes: Vec<usize>,
}

/// U(g) = U/∼_g with u ∼_g v iff u⁻¹v ∈ E(g); exact in free groups only.
pub fn classes_mod_elementary(p: &Presentation, u: &[Word], g: &Word) -> Result<ClassReport> {
    if !p.is_free() {
        return Err(Error::UnsupportedStrategy(
            "elementary closures are exact only in free groups".into(),
        ));
    }
    for w in u.iter().chain(std::iter::once(g)) {
        p.validate(w)?;
    }
    let closure = ElementaryClosure::of(g)?;
    let mut set: Vec<Word> = Vec::new();
    for w in u {
        if !set.contains(w) {
            set.push(w.clone());
        }
    }
    let (representatives, class_sizes) = class_representatives(&closure, &set);
    Ok(ClassReport {
        g: g.clone(),
        representatives,
        class_sizes,
    })
}

/// b₀ = (2/‖g‖∞)[Δ(g) + 5L(U,p) + 104δ + α].
pub fn pingpong_b0(
    stable_tlen_g: &Rational,
    delta_g: &Rational,
    energy: &Rational,
    delta: &Rational,
    alpha: &Rational,
) -> Result<Rational> {
    if *stable_tlen_g <= Rational::zero() {
        return Err(Error::NonPositiveTranslation);
    }
    for (name, v) in [
        ("Delta(g)", delta_g),
        ("L(U,p)", energy),
        ("delta", delta),
        ("alpha", alpha),
    ] {
        if *v < Rational::zero() {
            return Err(Error::InvalidParameter(format!(
                "{name} must be non-negative"
            )));
        }
    }
    Ok(int(2) / stable_tlen_g * (delta_g + int(5) * energy + int(104) * delta + alpha))
}

/// a₀ = 2N(8L(U)/‖g‖∞ + 1) and whether |U(g)| ≥ |U|/a₀.
pub fn loxodromic_count_bound(
    u_size: usize,
    classes: usize,
    energy: &Rational,
    stable_tlen_g: &Rational,
    n: u64,
) -> Result<(Rational, bool)> {
    if *stable_tlen_g <= Rational::zero() {
        return Err(Error::NonPositiveTranslation);
    }
    let a0 = int(2 * n as i64) * (int(8) * energy / stable_tlen_g + int(1));
    let holds = int(classes as i64) * &a0 >= int(u_size as i64);
    Ok((a0, holds))
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct PingPongReport {
    pub g: Word,
    pub b: usize,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub stable_tlen_g: Rational,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub fellow_delta_g: Rational,
    pub energy: usize,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub b0: Rational,
    pub warning: Option<String>,
    pub classes: Vec<Word>,
    /// S as group elements and as products u·gᵇ·u⁻¹.
    pub set: Vec<Word>,
    pub spellings: Vec<String>,
    /// S ⊂ U^{b+2}.
    pub in_power: bool,
    pub power: usize,
    /// |S| = |U(g)|.
    pub size_matches: bool,
    pub reduced: ReducedReport,
}

pub fn build_pingpong_set(
    ball: &GroupBall,
    u: &[Word],
    g: &Word,
    b: usize,
    alpha: &Rational,
    delta: &Rational,
) -> Result<PingPongReport> {
    check_alpha(alpha, delta)?;
    let p = Word::empty();
    ball.presentation().validate(g)?;
    if ball.reduce(g).is_empty() {
        return Err(Error::NotLoxodromic);
    }
    let classes = classes_mod_elementary(ball.presentation(), u, g)?;
    let tr = translation_lengths(ball, g, 1, None)?;
    let stable = tr.stable_bracket[0].clone();
    if stable <= Rational::zero() {
        return Err(Error::NotLoxodromic);
    }
    let fellow =
        fellow_travelling_delta(ball, g, &classes.representatives, &(int(20) * delta), delta)?;
    let energy = u
        .iter()
        .map(|w| displacement(ball, w, &p))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let b0 = pingpong_b0(&stable, &fellow.value, &int(energy as i64), delta, alpha)?;
    let warning = if int(b as i64) < b0 {
        Some(format!(
            "BBelowThreshold: b = {b} is below b0 = {}",
            crate::rational::format_rational(&b0)
        ))
    } else {
        None
    };

    let gb = g.pow(b as i64);
    let set: Vec<Word> = classes
        .representatives
        .iter()
        .map(|r| r.mul(&gb).mul(&r.inverse()))
        .collect();
    let spellings: Vec<String> = classes
        .representatives
        .iter()
        .map(|r| format!("{r}.({g})^{b}.{}", r.inverse()))
        .collect();
    // Each element is a product of b+2 letters of U when g, r and r⁻¹ lie in U.
    let in_power = u.iter().any(|x| x == g)
        && classes
            .representatives
            .iter()
            .all(|r| u.contains(r) && u.iter().any(|x| ball.equal(x, &r.inverse())));
    let distinct = dedup_group(ball, &set).len();
    let reduced = check_reduced(ball, &set, &p, alpha, delta)?;
    Ok(PingPongReport {
        g: g.clone(),
        b,
        stable_tlen_g: stable,
        fellow_delta_g: fellow.value,
        energy,
        b0,
        warning,
        size_matches: distinct == classes.representatives.len(),
        classes: classes.representatives,
        set,
        spellings,
        in_power,
        power: b + 2,
        reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::enumerate_ball;
    use crate::rational::parse_rational;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn f2_ball() -> GroupBall {
        let p = Presentation::free("ab").unwrap();
        enumerate_ball(&p, &p.standard_generators(), 2).unwrap()
    }

    #[test]
    fn reduced_examples() {
        let b = f2_ball();
        let r = check_reduced(
            &b,
            &[w("a^10"), w("b^10")],
            &Word::empty(),
            &q("1"),
            &q("0.005"),
        )
        .unwrap();
        assert!(r.verdict);
        assert_eq!(r.pair_margins.len(), 6);
        assert!(r
            .pair_margins
            .iter()
            .all(|m| m.product == int(0) && m.threshold == q("3.75")));
        assert_eq!(r.displacement_bound, Some(true));

        let r = check_reduced(
            &b,
            &[w("a"), w("ab")],
            &Word::empty(),
            &q("0.015"),
            &q("0.005"),
        )
        .unwrap();
        assert!(!r.verdict);
        assert_eq!(r.failing_pair, Some((w("a"), w("ab"))));

        let r = check_reduced(&b, &[w("a"), w("A")], &Word::empty(), &q("1"), &q("0")).unwrap();
        assert!(!r.verdict);
        assert!(!r.disjoint_from_inverses);
    }

    #[test]
    fn alpha_gate() {
        let b = f2_ball();
        assert!(check_reduced(&b, &[w("a")], &Word::empty(), &q("0.01"), &q("0.005")).is_err());
    }

    #[test]
    fn classes_examples() {
        let f2 = Presentation::free("ab").unwrap();
        let u = f2.standard_generators();
        let c = classes_mod_elementary(&f2, &u, &w("a")).unwrap();
        assert_eq!(c.representatives, vec![w("a"), w("b"), w("B")]);
        assert_eq!(c.class_sizes, vec![2, 1, 1]);
        // A⁻¹b = ab, so A ∼ b.
        let c = classes_mod_elementary(&f2, &u, &w("ab")).unwrap();
        assert_eq!(c.representatives, vec![w("a"), w("A"), w("B")]);
        assert_eq!(c.class_sizes, vec![1, 2, 1]);
        assert_eq!(
            classes_mod_elementary(&f2, &[w("a")], &w("a"))
                .unwrap()
                .representatives
                .len(),
            1
        );
        let surf =
            crate::words::parse_presentation("generators: a b c d\nrelators: abABcdCD").unwrap();
        assert!(matches!(
            classes_mod_elementary(&surf, &[w("a")], &w("a")),
            Err(Error::UnsupportedStrategy(_))
        ));
    }

    #[test]
    fn b0_formula() {
        let v = pingpong_b0(&int(1), &int(0), &int(1), &q("0.005"), &q("0.015")).unwrap();
        assert_eq!(v, q("11.07"));
        let half = pingpong_b0(&int(2), &int(0), &int(1), &q("0.005"), &q("0.015")).unwrap();
        assert_eq!(half * int(2), v);
        assert_eq!(
            pingpong_b0(&int(0), &int(0), &int(1), &q("0.005"), &q("0.015")).unwrap_err(),
            Error::NonPositiveTranslation
        );
    }

    #[test]
    fn pingpong_fixture() {
        let b = f2_ball();
        let u = b.presentation().standard_generators();
        let r = build_pingpong_set(&b, &u, &w("a"), 13, &q("1"), &q("0.005")).unwrap();
        assert_eq!(r.set, vec![w("a^13"), w("ba^13B"), w("Ba^13b")]);
        assert!(r.reduced.verdict);
        assert!(r.in_power && r.size_matches);
        assert_eq!(r.b0, q("13.04"));
        assert!(r.warning.is_some());
        let r = build_pingpong_set(&b, &u, &w("a"), 14, &q("1"), &q("0.005")).unwrap();
        assert!(r.warning.is_none());
        assert_eq!(
            build_pingpong_set(&b, &u, &Word::empty(), 13, &q("1"), &q("0.005")).unwrap_err(),
            Error::NotLoxodromic
        );
    }

    #[test]
    fn small_b_can_fail_verification() {
        let b = f2_ball();
        let u = b.presentation().standard_generators();
        let r = build_pingpong_set(&b, &u, &w("a"), 2, &q("1"), &q("0.005")).unwrap();
        assert!(r.warning.is_some());
        assert!(!r.reduced.verdict);
    }

    #[test]
    fn freeness_of_powers() {
        let b = f2_ball();
        let s = [w("a^10"), w("b^10")];
        let r = check_freeness(&b, &s, &Word::empty(), &q("1"), &q("0.005"), 3).unwrap();
        assert_eq!(r.words_tested, 52);
        assert!(r.ok, "{r:?}");
        assert_eq!(r.energy, 10);
    }

    #[test]
    fn count_bound() {
        let (a0, ok) = loxodromic_count_bound(4, 3, &int(1), &int(1), 1).unwrap();
        assert_eq!(a0, int(18));
        assert!(ok);
    }
}
