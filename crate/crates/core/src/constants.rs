//! The explicit constant pipeline: from (δ, δ₀, Δ₀, ρ₀, κ, N, L₀, ε, ξ) to
//! τ₀, b, M, M₀, τ₁, ρ, τ₂, the rescaling factors and the growth transfer.
//!
//! Rational formulas are evaluated exactly. log, sinh and π go through
//! double precision and come back as enclosures with rational endpoints;
//! after that every operation is exact again, so an inequality verdict is
//! either certain or reported as undecided.

use std::sync::OnceLock;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, ratio, to_f64, Rational};

// 40-digit brackets; both endpoints are exact decimals.
const LN2_LO: &str = "0.6931471805599453094172321214581765680755";
const LN2_HI: &str = "0.6931471805599453094172321214581765680756";
const PI_LO: &str = "3.1415926535897932384626433832795028841971";
const PI_HI: &str = "3.1415926535897932384626433832795028841972";

/// A closed interval [lo, hi] with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

/// Double-precision view of an enclosure: lo rounded down, hi rounded up.
#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
    /// The exact value, when the enclosure is a single rational.
    pub exact: Option<String>,
}

impl Enclosure {
    pub fn exact(q: Rational) -> Self {
        Enclosure {
            lo: q.clone(),
            hi: q,
        }
    }

    fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn add_q(&self, q: &Rational) -> Enclosure {
        Enclosure::new(&self.lo + q, &self.hi + q)
    }

    pub fn sub(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let zero = Rational::zero();
        if self.lo >= zero && o.lo >= zero {
            return Enclosure::new(&self.lo * &o.lo, &self.hi * &o.hi);
        }
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().expect("four products").clone();
        let hi = c.iter().max().expect("four products").clone();
        Enclosure::new(lo, hi)
    }

    pub fn scale(&self, q: &Rational) -> Enclosure {
        self.mul(&Enclosure::exact(q.clone()))
    }

    pub fn div(&self, o: &Enclosure) -> Result<Enclosure> {
        if o.lo <= Rational::zero() && o.hi >= Rational::zero() {
            return Err(Error::InputOutOfRange(
                "division by an interval containing 0".into(),
            ));
        }
        let inv = Enclosure::new(o.hi.recip(), o.lo.recip());
        Ok(self.mul(&inv))
    }

    pub fn max(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new((&self.lo).max(&o.lo).clone(), (&self.hi).max(&o.hi).clone())
    }

    pub fn min(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new((&self.lo).min(&o.lo).clone(), (&self.hi).min(&o.hi).clone())
    }

    /// Some(true) if every point of self is ≤ every point of o, Some(false)
    /// if every point is >, None otherwise.
    pub fn le(&self, o: &Enclosure) -> Option<bool> {
        if self.hi <= o.lo {
            Some(true)
        } else if self.lo > o.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn lt(&self, o: &Enclosure) -> Option<bool> {
        if self.hi < o.lo {
            Some(true)
        } else if self.lo >= o.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Pushes inexact endpoints out to the dyadic grid; exact values stay.
    fn coarse(self) -> Enclosure {
        if self.is_exact() {
            self
        } else {
            outward(&self.lo, &self.hi)
        }
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            lo: round_down(&self.lo),
            hi: round_up(&self.hi),
            exact: self.as_exact().map(format_rational),
        }
    }
}

impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.bounds().serialize(s)
    }
}

impl JsonSchema for Enclosure {
    fn schema_name() -> String {
        "Bounds".into()
    }

    fn json_schema(gen: &mut schemars::gen::SchemaGenerator) -> schemars::schema::Schema {
        Bounds::json_schema(gen)
    }
}

fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite double")
}

/// Largest double ≤ q (−∞ below range).
fn round_down(q: &Rational) -> f64 {
    let mut x = to_f64(q);
    if !x.is_finite() {
        return if x > 0.0 { f64::MAX } else { f64::NEG_INFINITY };
    }
    while from_f64(x) > *q {
        x = x.next_down();
    }
    while x.next_up().is_finite() && from_f64(x.next_up()) <= *q {
        x = x.next_up();
    }
    x
}

/// Smallest double ≥ q (+∞ above range).
fn round_up(q: &Rational) -> f64 {
    -round_down(&-q)
}

fn decimal(s: &str) -> Rational {
    parse_rational(s).expect("constant literal")
}

/// Endpoints are pushed outward to multiples of 2^-GRID so that repeated
/// arithmetic stays on small dyadic rationals.
const GRID: usize = 96;

fn outward(lo: &Rational, hi: &Rational) -> Enclosure {
    let scale = Rational::from_integer(BigInt::one() << GRID);
    let lo = (lo * &scale).floor() / &scale;
    let hi = (hi * &scale).ceil() / &scale;
    Enclosure::new(lo, hi)
}

pub fn ln2() -> Enclosure {
    static LN2: OnceLock<Enclosure> = OnceLock::new();
    LN2.get_or_init(|| outward(&decimal(LN2_LO), &decimal(LN2_HI)))
        .clone()
}

pub fn pi() -> Enclosure {
    static PI: OnceLock<Enclosure> = OnceLock::new();
    PI.get_or_init(|| outward(&decimal(PI_LO), &decimal(PI_HI)))
        .clone()
}

fn bits(n: &BigInt) -> i64 {
    n.bits() as i64
}

/// ln q for q > 0: q = y·2ᵏ with y near 1, ln y from libm widened by two
/// ulps on each side, k·ln 2 from the bracket.
fn ln_q(q: &Rational) -> Result<Enclosure> {
    if !q.is_positive() {
        return Err(Error::InputOutOfRange(
            "logarithm of a non-positive value".into(),
        ));
    }
    let k = bits(q.numer()) - bits(q.denom());
    let two_k = if k >= 0 {
        Rational::from_integer(BigInt::one() << k as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    };
    let y = q / two_k;
    let lo = round_down(&y).ln().next_down().next_down();
    let hi = round_up(&y).ln().next_up().next_up();
    let ly = Enclosure::new(from_f64(lo), from_f64(hi));
    let e = ly.add(&ln2().scale(&int(k)));
    Ok(outward(&e.lo, &e.hi))
}

pub fn ln(x: &Enclosure) -> Result<Enclosure> {
    let lo = ln_q(&x.lo)?;
    let hi = ln_q(&x.hi)?;
    Ok(Enclosure::new(lo.lo, hi.hi))
}

/// sinh is increasing; libm result widened by two ulps.
pub fn sinh(x: &Enclosure) -> Result<Enclosure> {
    let lo = round_down(&x.lo).sinh().next_down().next_down();
    let hi = round_up(&x.hi).sinh().next_up().next_up();
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InputOutOfRange(
            "sinh overflows double precision".into(),
        ));
    }
    Ok(Enclosure::new(from_f64(lo), from_f64(hi)))
}

/// Inputs of the pipeline. Keys in `--input k=v` are the serialized names.
#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct ConstantsInputs {
    /// Hyperbolicity constant δ of X.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub delta: Rational,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub delta0: Rational,
    #[serde(rename = "Delta0", with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub big_delta0: Rational,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub rho0: Rational,
    /// Acylindricity constant κ.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub kappa: Rational,
    /// Acylindricity constant N.
    #[serde(rename = "N")]
    pub n: u64,
    /// L₀; when absent it is derived as 10¹³C³L from `L`.
    #[serde(rename = "L0", with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub l0: Option<Rational>,
    #[serde(rename = "L", with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub l: Option<Rational>,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub epsilon: Rational,
    /// Growth lower bound ξ fed to the transfer.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub xi: Rational,
    /// |U| in ν and ξ of the counting argument.
    #[serde(rename = "U")]
    pub u_size: usize,
    /// Δ(𝒬, X) for the rescaling factor; defaults to Δ₀.
    #[serde(rename = "Delta_family", with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub family_delta: Option<Rational>,
    /// L(U, p), for a₀ and b₀.
    #[serde(with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub energy: Option<Rational>,
    /// ‖g‖∞, for a₀ and b₀.
    #[serde(with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub stable_tlen: Option<Rational>,
    /// Δ(g), for b₀.
    #[serde(with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub fellow_delta_g: Option<Rational>,
}

impl Default for ConstantsInputs {
    /// Demonstration values only: the universal constants are not fixed
    /// numerically anywhere, so every one of them is an input.
    fn default() -> Self {
        ConstantsInputs {
            delta: ratio(1, 100),
            delta0: ratio(1, 100),
            big_delta0: int(1),
            rho0: int(1),
            kappa: int(1),
            n: 1,
            l0: Some(int(1)),
            l: None,
            epsilon: ratio(1, 2),
            xi: int(1),
            u_size: 2,
            family_delta: None,
            energy: None,
            stable_tlen: None,
            fellow_delta_g: None,
        }
    }
}

impl ConstantsInputs {
    pub const KEYS: [&'static str; 15] = [
        "delta",
        "delta0",
        "Delta0",
        "rho0",
        "kappa",
        "N",
        "L0",
        "L",
        "epsilon",
        "xi",
        "U",
        "Delta_family",
        "energy",
        "stable_tlen",
        "fellow_delta_g",
    ];

    /// Sets one input from its `key=value` form. Unknown keys are
    /// InvalidParameter.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let q = || parse_rational(value);
        let count = |v: &str| {
            v.trim().parse::<u64>().map_err(|_| {
                Error::InvalidParameter(format!("{key} must be a non-negative integer"))
            })
        };
        match key {
            "delta" => self.delta = q()?,
            "delta0" => self.delta0 = q()?,
            "Delta0" => self.big_delta0 = q()?,
            "rho0" => self.rho0 = q()?,
            "kappa" => self.kappa = q()?,
            "N" => self.n = count(value)?,
            "L0" => self.l0 = Some(q()?),
            "L" => {
                self.l = Some(q()?);
                self.l0 = None;
            }
            "epsilon" => self.epsilon = q()?,
            "xi" => self.xi = q()?,
            "U" => self.u_size = count(value)? as usize,
            "Delta_family" => self.family_delta = Some(q()?),
            "energy" => self.energy = Some(q()?),
            "stable_tlen" => self.stable_tlen = Some(q()?),
            "fellow_delta_g" => self.fellow_delta_g = Some(q()?),
            _ => return Err(Error::InvalidParameter(format!("unknown input {key:?}"))),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let out = |m: &str| Err(Error::InputOutOfRange(m.into()));
        let zero = Rational::zero();
        if self.delta <= zero || self.delta0 <= zero {
            return out("delta and delta0 must be positive");
        }
        if self.delta > self.delta0 {
            return out("delta must not exceed delta0");
        }
        if self.big_delta0 <= zero {
            return out("Delta0 must be positive");
        }
        if self.rho0 < zero {
            return out("rho0 must be non-negative");
        }
        if self.kappa <= zero {
            return out("kappa must be positive");
        }
        if self.n < 1 {
            return out("N must be at least 1");
        }
        if self.epsilon <= zero || self.epsilon >= ratio(3, 4) {
            return out("epsilon must lie in (0, 3/4)");
        }
        if self.u_size < 1 {
            return out("U must be at least 1");
        }
        match (&self.l0, &self.l) {
            (Some(l0), _) if l0 <= &zero => return out("L0 must be positive"),
            (None, Some(l)) if l <= &zero => return out("L must be positive"),
            (None, None) => return out("one of L0 or L is required"),
            _ => {}
        }
        for (name, v) in [
            ("Delta_family", &self.family_delta),
            ("energy", &self.energy),
            ("fellow_delta_g", &self.fellow_delta_g),
        ] {
            if v.as_ref().is_some_and(|v| v < &zero) {
                return out(&format!("{name} must be non-negative"));
            }
        }
        if self.stable_tlen.as_ref().is_some_and(|v| v <= &zero) {
            return Err(Error::NonPositiveTranslation);
        }
        Ok(())
    }
}

/// min{ξ/10⁸, 10⁻⁵ log 2}, with the branch that won.
#[derive(Clone, Debug, Serialize, JsonSchema)]
pub struct GrowthTransfer {
    pub value: Enclosure,
    /// "xi", "log2", or "undecided" when the enclosures overlap.
    pub branch: String,
}

pub fn growth_transfer(xi: &Rational) -> Result<GrowthTransfer> {
    if !xi.is_positive() {
        return Err(Error::NonPositiveXi);
    }
    let a = Enclosure::exact(xi / int(100_000_000));
    let cap = ln2().scale(&ratio(1, 100_000));
    let (value, branch) = match a.le(&cap) {
        Some(true) => (a, "xi"),
        Some(false) => (cap, "log2"),
        None => (a.min(&cap), "undecided"),
    };
    Ok(GrowthTransfer {
        value,
        branch: branch.into(),
    })
}

/// Internal consistency flags; null means the enclosures could not decide.
#[derive(Clone, Debug, Serialize, JsonSchema)]
pub struct ConsistencyChecks {
    /// M ≥ b with M = ⌊(τ₁ − 50δ₀)/L₀⌋, as the counting argument requires.
    pub m_at_least_b: Option<bool>,
    pub tau1_at_least_tau0: Option<bool>,
    /// ⌊(τ₁ − 50δ₀)/L₀⌋ ≥ M₀.
    pub m_tau1_at_least_m0: Option<bool>,
    /// τ₁ ≥ Δ₀ + 10L₀ + 240δ₀ (gate of the barrier check).
    pub tau1_meets_barrier_gate: Option<bool>,
}

#[derive(Clone, Debug, Serialize, JsonSchema)]
pub struct ConstantsRecord {
    pub inputs: ConstantsInputs,
    /// L₀ actually used.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub l0: Rational,
    /// "input" or "10^13 C^3 L".
    pub l0_source: String,
    /// C = 10⁶(N+1).
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub c: Rational,
    /// α = 200δ.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub alpha: Rational,
    /// τ₀ = Δ₀ + 2L₀ + 223δ.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub tau0: Rational,
    /// b = ⌈τ₀/(200δ) + 2⌉ + 1.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub b: Rational,
    /// M = ⌊(τ₀ − 50δ)/L₀⌋.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub m: Rational,
    /// d₁ = b log 4 − log(ε/(1−ε)).
    pub d1: Enclosure,
    /// d₂ = log 4 + log(1−ε).
    pub d2: Enclosure,
    /// M₀ = d₁/d₂.
    pub m0: Enclosure,
    /// τ₁ = max{τ₀, L₀(M₀+1) + 50δ₀}.
    pub tau1: Enclosure,
    /// ⌊(τ₁ − 50δ₀)/L₀⌋, when τ₁ pins it down.
    #[serde(with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub m_tau1: Option<Rational>,
    /// ρ = max{ρ₀, log(2[2τ₁ + 23δ₀] + 1)}.
    pub rho: Enclosure,
    /// τ₂ = τ₁ + 8L₀ + 8δ.
    pub tau2: Enclosure,
    /// 100π sinh ρ, the injectivity radius the rescaled family must reach.
    pub t_required: Enclosure,
    /// λ₀ = Δ₀/(100π sinh ρ).
    pub lambda0: Enclosure,
    /// μ₀ = (100π sinh ρ/δ₀)(κ/δ).
    pub mu0: Enclosure,
    /// σ = min{δ₀/κ, Δ₀/Δ(𝒬,X)}.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub sigma_rescale: Rational,
    /// ν = (1−ε)·2|U|.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub nu: Rational,
    /// ξ = 2(2|U|)ᵇ, printed only when b is small enough to write out.
    pub xi_count: Option<String>,
    pub log_xi_count: Enclosure,
    /// 2(2|U|−1)ᵇ, the variant used inside the counting proof.
    pub log_xi_count_reduced: Enclosure,
    /// σ = ε/(2(1−ε)ξ).
    #[serde(with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub sigma_counting: Option<Rational>,
    pub log_sigma_counting: Enclosure,
    /// min{ξ/10⁸, 10⁻⁵ log 2}.
    pub xi_out: GrowthTransfer,
    /// a₀ = 2N(8L(U)/‖g‖∞ + 1), with L(U) taken as the supplied energy.
    #[serde(with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub a0: Option<Rational>,
    /// b₀ = (2/‖g‖∞)[Δ(g) + 5L(U,p) + 104δ + α].
    #[serde(with = "crate::rational::serde_opt_q")]
    #[schemars(with = "Option<String>")]
    pub b0: Option<Rational>,
    /// Δ₀ + 10L₀ + 240δ₀.
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub barrier_gate: Rational,
    pub checks: ConsistencyChecks,
}

/// Largest exponent b for which ξ = 2(2|U|)ᵇ is written out in full.
const XI_DIGITS_CAP: i64 = 4096;

fn pow_int(base: u64, e: u64) -> BigInt {
    num::pow(BigInt::from(base), e as usize)
}

fn floor_q(q: &Rational) -> Rational {
    q.floor()
}

/// σ = min{δ₀/κ, Δ₀/Δ(𝒬,X)}; a family with Δ = 0 imposes nothing.
pub fn sigma_rescale(
    delta0: &Rational,
    kappa: &Rational,
    big_delta0: &Rational,
    family_delta: &Rational,
) -> Rational {
    let a = delta0 / kappa;
    if family_delta.is_zero() {
        a
    } else {
        a.min(big_delta0 / family_delta)
    }
}

pub fn constants_pipeline(inputs: &ConstantsInputs) -> Result<ConstantsRecord> {
    inputs.validate()?;
    let i = inputs;
    let c = int(1_000_000) * Rational::from_integer(BigInt::from(i.n) + BigInt::one());
    let (l0, l0_source) = match (&i.l0, &i.l) {
        (Some(l0), _) => (l0.clone(), "input"),
        (None, Some(l)) => (int(10).pow(13) * c.pow(3) * l, "10^13 C^3 L"),
        (None, None) => unreachable!("validated"),
    };
    let alpha = int(200) * &i.delta;
    let tau0 = &i.big_delta0 + int(2) * &l0 + int(223) * &i.delta;
    let b = (&tau0 / (int(200) * &i.delta) + int(2)).ceil() + int(1);
    let m = floor_q(&((&tau0 - int(50) * &i.delta) / &l0));

    let one_minus = int(1) - &i.epsilon;
    let ln4 = ln2().scale(&int(2));
    let d1 = ln4.scale(&b).sub(&ln_q(&(&i.epsilon / &one_minus))?);
    let d2 = ln_q(&(int(4) * &one_minus))?;
    let m0 = d1.div(&d2)?.coarse();
    let tau1 = Enclosure::exact(tau0.clone())
        .max(&m0.add_q(&int(1)).scale(&l0).add_q(&(int(50) * &i.delta0)));
    let m_of = |t: &Rational| floor_q(&((t - int(50) * &i.delta0) / &l0));
    let m_tau1 = {
        let (lo, hi) = (m_of(tau1.lo()), m_of(tau1.hi()));
        (lo == hi).then_some(lo)
    };
    let rho_arg = tau1
        .scale(&int(2))
        .add_q(&(int(23) * &i.delta0))
        .scale(&int(2))
        .add_q(&int(1));
    let rho = Enclosure::exact(i.rho0.clone()).max(&ln(&rho_arg)?);
    let tau2 = tau1.add_q(&(int(8) * &l0 + int(8) * &i.delta));
    let t_required = pi().mul(&sinh(&rho)?).scale(&int(100)).coarse();
    let lambda0 = Enclosure::exact(i.big_delta0.clone())
        .div(&t_required)?
        .coarse();
    let mu0 = t_required.scale(&(&i.kappa / (&i.delta0 * &i.delta)));
    let family_delta = i
        .family_delta
        .clone()
        .unwrap_or_else(|| i.big_delta0.clone());
    let sigma_rescale = sigma_rescale(&i.delta0, &i.kappa, &i.big_delta0, &family_delta);
    let two_u = 2 * i.u_size as u64;
    let nu = &one_minus * int(two_u as i64);

    let ln_two_u = ln_q(&int(two_u as i64))?;
    let log_xi_count = ln2().add(&ln_two_u.scale(&b));
    let log_xi_count_reduced = if two_u > 1 {
        ln2().add(&ln_q(&int(two_u as i64 - 1))?.scale(&b))
    } else {
        ln2()
    };
    let b_int = b.to_integer().to_i64().filter(|v| *v <= XI_DIGITS_CAP);
    let xi_exact = b_int.map(|e| BigInt::from(2) * pow_int(two_u, e as u64));
    let sigma_counting = xi_exact
        .as_ref()
        .map(|x| &i.epsilon / (int(2) * &one_minus * Rational::from_integer(x.clone())));
    let log_sigma_counting = Enclosure::exact(Rational::zero())
        .add(&ln_q(&(&i.epsilon / (int(2) * &one_minus)))?)
        .sub(&log_xi_count);

    let xi_out = growth_transfer(&i.xi)?;
    let a0 = match (&i.energy, &i.stable_tlen) {
        (Some(e), Some(t)) => Some(int(2 * i.n as i64) * (int(8) * e / t + int(1))),
        _ => None,
    };
    let b0 = match (&i.stable_tlen, &i.fellow_delta_g, &i.energy) {
        (Some(t), Some(dg), Some(e)) => {
            Some(crate::freesets::pingpong_b0(t, dg, e, &i.delta, &alpha)?)
        }
        _ => None,
    };
    let barrier_gate = &i.big_delta0 + int(10) * &l0 + int(240) * &i.delta0;

    let checks = ConsistencyChecks {
        m_at_least_b: m_tau1.as_ref().map(|mt| mt >= &b),
        tau1_at_least_tau0: Enclosure::exact(tau0.clone()).le(&tau1),
        m_tau1_at_least_m0: m_tau1
            .as_ref()
            .and_then(|mt| m0.le(&Enclosure::exact(mt.clone()))),
        tau1_meets_barrier_gate: Enclosure::exact(barrier_gate.clone()).le(&tau1),
    };

    Ok(ConstantsRecord {
        inputs: inputs.clone(),
        l0,
        l0_source: l0_source.into(),
        c,
        alpha,
        tau0,
        b,
        m,
        d1,
        d2,
        m0,
        tau1,
        m_tau1,
        rho,
        tau2,
        t_required,
        lambda0,
        mu0,
        sigma_rescale,
        nu,
        xi_count: xi_exact.map(|x| x.to_string()),
        log_xi_count,
        log_xi_count_reduced,
        sigma_counting,
        log_sigma_counting,
        xi_out,
        a0,
        b0,
        barrier_gate,
        checks,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct PingpongConstants {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "L", with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub l: Rational,
    #[serde(with = "crate::rational::serde_q")]
    #[schemars(with = "String")]
    pub kappa: Rational,
    /// C = 10⁶(N+1).
    pub c: String,
    /// n₁ = 4C².
    pub n1: String,
    /// n₂ = 3304·n₁.
    pub n2: String,
    /// The ping-pong exponent satisfies n > C³.
    pub n_lower: String,
    /// L(U^{n₂}) ≤ 13216·C²·L.
    pub power_energy_bound: String,
    /// L(S, p) ≤ 10¹²·C³·L(U) ≤ 10¹²·C³·L.
    pub set_energy_bound: String,
    /// L(S, p) ≤ 10¹³·C³·L, the L₀ of the growth argument.
    pub l0: String,
    /// S ⊂ U^{10⁷ n}.
    pub word_length_factor: String,
    /// L > 10⁴κ is required.
    pub energy_threshold: String,
    pub above_threshold: bool,
}

pub fn pingpong_constants(n: u64, l: &Rational, kappa: &Rational) -> Result<PingpongConstants> {
    if n < 1 {
        return Err(Error::InputOutOfRange("N must be at least 1".into()));
    }
    if !l.is_positive() || !kappa.is_positive() {
        return Err(Error::InputOutOfRange(
            "L and kappa must be positive".into(),
        ));
    }
    let c = BigInt::from(1_000_000u64) * (BigInt::from(n) + BigInt::one());
    let n1 = BigInt::from(4) * &c * &c;
    let n2 = BigInt::from(3304) * &n1;
    let cq = Rational::from_integer(c.clone());
    let show = |q: Rational| format_rational(&q);
    let threshold = int(10_000) * kappa;
    Ok(PingpongConstants {
        n,
        l: l.clone(),
        kappa: kappa.clone(),
        n_lower: (&c * &c * &c).to_string(),
        c: c.to_string(),
        n1: n1.to_string(),
        n2: n2.to_string(),
        power_energy_bound: show(int(13216) * &cq * &cq * l),
        set_energy_bound: show(int(10).pow(12) * cq.pow(3) * l),
        l0: show(int(10).pow(13) * cq.pow(3) * l),
        word_length_factor: "10^7 n".into(),
        above_threshold: l > &threshold,
        energy_threshold: show(threshold),
    })
}

#[derive(Clone, Debug, Serialize, JsonSchema)]
pub struct MonotoneCheck {
    pub name: String,
    pub pairs_tested: usize,
    pub violations: usize,
    /// Pairs whose enclosures overlap, so neither order is certain.
    pub undecided: usize,
}

#[derive(Clone, Debug, Serialize, JsonSchema)]
pub struct MonotonicityReport {
    pub points: usize,
    pub checks: Vec<MonotoneCheck>,
    pub ok: bool,
}

/// Walks `points` values of one input at a time from `base` and checks the
/// expected direction of every listed constant between neighbours.
pub fn monotonicity_suite(base: &ConstantsInputs, points: usize) -> Result<MonotonicityReport> {
    type Get = fn(&ConstantsRecord) -> Enclosure;
    let tau0: Get = |r| Enclosure::exact(r.tau0.clone());
    let tau1: Get = |r| r.tau1.clone();
    let tau2: Get = |r| r.tau2.clone();
    let rho: Get = |r| r.rho.clone();
    let lambda0: Get = |r| r.lambda0.clone();
    let mu0: Get = |r| r.mu0.clone();

    let step = |q: &Rational, k: usize| q * (int(1) + ratio(k as i64, 10));
    let sweep =
        |set: &(dyn Fn(&mut ConstantsInputs, usize) + Sync)| -> Result<Vec<ConstantsRecord>> {
            (0..points)
                .into_par_iter()
                .map(|k| {
                    let mut x = base.clone();
                    set(&mut x, k);
                    constants_pipeline(&x)
                })
                .collect()
        };
    let grow = |name: &str, recs: &[ConstantsRecord], get: Get, increasing: bool| {
        let mut c = MonotoneCheck {
            name: name.into(),
            pairs_tested: 0,
            violations: 0,
            undecided: 0,
        };
        for w in recs.windows(2) {
            let (a, b) = (get(&w[0]), get(&w[1]));
            // identical enclosures come from the same evaluation
            let verdict = if a == b {
                Some(true)
            } else if increasing {
                a.le(&b)
            } else {
                b.le(&a)
            };
            c.pairs_tested += 1;
            match verdict {
                Some(true) => {}
                Some(false) => c.violations += 1,
                None => c.undecided += 1,
            }
        }
        c
    };

    let l0 = base.l0.clone().unwrap_or_else(|| int(1));
    let by_big_delta0 = sweep(&|x, k| x.big_delta0 = step(&base.big_delta0, k))?;
    let by_l0 = sweep(&|x, k| {
        x.l0 = Some(step(&l0, k));
        x.l = None;
    })?;
    let by_rho0 = sweep(&|x, k| x.rho0 = int(5) + int(k as i64))?;
    let by_kappa = sweep(&|x, k| x.kappa = step(&base.kappa, k))?;

    let mut checks = Vec::new();
    for (name, get) in [("tau0", tau0), ("tau1", tau1), ("tau2", tau2), ("rho", rho)] {
        checks.push(grow(
            &format!("{name} in Delta0"),
            &by_big_delta0,
            get,
            true,
        ));
        checks.push(grow(&format!("{name} in L0"), &by_l0, get, true));
    }
    // λ₀ against ρ: ρ₀ = 5, 6, … dominates once it exceeds the log term
    let rho_driven: Vec<ConstantsRecord> = by_rho0
        .into_iter()
        .filter(|r| r.rho.as_exact().is_some())
        .collect();
    checks.push(grow("rho in rho0", &rho_driven, rho, true));
    checks.push(grow("lambda0 in rho", &rho_driven, lambda0, false));
    checks.push(grow("mu0 in kappa", &by_kappa, mu0, true));

    // σ_rescale ≤ 1 whenever κ ≥ δ₀ and Δ(𝒬) ≥ Δ₀.
    let mut sigma = MonotoneCheck {
        name: "sigma_rescale <= 1".into(),
        pairs_tested: 0,
        violations: 0,
        undecided: 0,
    };
    for k in 0..points {
        let kappa = step(&base.delta0, k);
        let family = step(&base.big_delta0, points - 1 - k);
        sigma.pairs_tested += 1;
        if sigma_rescale(&base.delta0, &kappa, &base.big_delta0, &family) > int(1) {
            sigma.violations += 1;
        }
    }
    checks.push(sigma);

    let ok = checks.iter().all(|c| c.violations == 0);
    Ok(MonotonicityReport { points, checks, ok })
}
