//! Exact-arithmetic counting certificates.
//!
//! Everything here is big-integer or big-rational arithmetic — no floating
//! point. The centrepiece is the pigeonhole certificate: the layered
//! attachment instance carries more special vertices, pairwise within
//! distance r of each other, than there are possible palettes of size r−1
//! drawn from Δ+C colours, so no palette assignment can distinguish them
//! all. Verdicts are therefore machine-checked impossibility proofs for the
//! given parameters.
//!
//! Transcendental comparisons (anything involving e^x) go through two-sided
//! Taylor enclosures with outward rounding: a verdict of `Holds` or `Fails`
//! is certified, and anything the enclosure cannot separate at the highest
//! precision is reported `Undetermined` rather than guessed.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigRational, BigUint, One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Exact binomial coefficient.
pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut result = BigUint::one();
    for i in 1..=b {
        result = result * BigUint::from(a - b + i) / BigUint::from(i);
    }
    result
}

/// Number of special degree-(r−1) vertices in the layered attachment
/// instance with scale `n_scale`: `2·(N(r−1))^(r−1)·(r−2)^(r−2)`.
pub fn special_vertex_count(r: u32, n_scale: u64) -> BigUint {
    assert!(r >= 3);
    let base = BigUint::from(n_scale) * BigUint::from(r as u64 - 1);
    BigUint::from(2u32) * base.pow(r - 1) * BigUint::from(r as u64 - 2).pow(r - 2)
}

/// Maximum degree of that instance: `2N(r−1)²`.
pub fn instance_max_degree(r: u32, n_scale: u64) -> BigUint {
    BigUint::from(2u64) * BigUint::from(n_scale) * BigUint::from(r as u64 - 1).pow(2)
}

/// Pigeonhole certificate: with `Δ+C` colours there are only
/// `binomial(Δ+C, r−1)` palettes available to the special vertices, all of
/// which need pairwise distinct palettes. `verdict` is true when the
/// specials outnumber the palettes — an exact impossibility proof.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub r: u32,
    pub n_scale: u64,
    pub c: u64,
    /// Count of special vertices.
    pub lhs: BigUint,
    /// Count of available palettes.
    pub rhs: BigUint,
    pub verdict: bool,
    pub derivation: Vec<String>,
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Certificate", 7)?;
        s.serialize_field("r", &self.r)?;
        s.serialize_field("nScale", &self.n_scale)?;
        s.serialize_field("c", &self.c)?;
        s.serialize_field("lhs", &self.lhs.to_string())?;
        s.serialize_field("rhs", &self.rhs.to_string())?;
        s.serialize_field("verdict", &self.verdict)?;
        s.serialize_field("derivation", &self.derivation)?;
        s.end()
    }
}

pub fn palette_count_certificate(r: u32, n_scale: u64, c: u64) -> Certificate {
    assert!(r >= 3, "the layered instance needs r >= 3");
    assert!(n_scale >= 1);
    let lhs = special_vertex_count(r, n_scale);
    let max_degree = instance_max_degree(r, n_scale);
    let colours = &max_degree + BigUint::from(c);
    let colours_u64: u64 = colours
        .clone()
        .try_into()
        .expect("colour count fits in 64 bits for any feasible sweep");
    let rhs = binomial(colours_u64, r as u64 - 1);
    let verdict = lhs > rhs;
    let derivation = vec![
        format!(
            "special vertices of degree {}: 2*({}*{})^{} * {}^{} = {}",
            r - 1,
            n_scale,
            r - 1,
            r - 1,
            r - 2,
            r - 2,
            lhs
        ),
        format!(
            "maximum degree of the instance: 2*{}*({})^2 = {}",
            n_scale,
            r - 1,
            max_degree
        ),
        format!("colours available: {} + {} = {}", max_degree, c, colours),
        format!(
            "palettes of size {} from {} colours: binomial({}, {}) = {}",
            r - 1,
            colours,
            colours,
            r - 1,
            rhs
        ),
        format!(
            "{} special vertices vs {} palettes: {}",
            lhs,
            rhs,
            if verdict {
                "specials exceed palettes; no assignment distinguishes them"
            } else {
                "palettes suffice; no impossibility certified"
            }
        ),
    ];
    Certificate {
        r,
        n_scale,
        c,
        lhs,
        rhs,
        verdict,
        derivation,
    }
}

/// First scale at which the certificate verdict turns true, searching
/// `1..=search_cap`.
pub fn certificate_threshold(r: u32, c: u64, search_cap: u64) -> Option<u64> {
    (1..=search_cap).find(|&n| palette_count_certificate(r, n, c).verdict)
}

fn big_ratio(num: i64, den: i64) -> BigRational {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// Growth-margin comparison `((r−2)/5.5)^(r−2) > 11/4`, evaluated exactly.
/// The margin is what makes the palette certificate eventually win for
/// large r; it first holds at r = 9.
#[derive(Debug, Clone)]
pub struct MarginCheck {
    pub r: u32,
    pub value: BigRational,
    pub threshold: BigRational,
    pub holds: bool,
    pub next_value: BigRational,
    /// Value strictly increases from r to r+1.
    pub increasing: bool,
}

impl Serialize for MarginCheck {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("MarginCheck", 6)?;
        s.serialize_field("r", &self.r)?;
        s.serialize_field("value", &self.value.to_string())?;
        s.serialize_field("threshold", &self.threshold.to_string())?;
        s.serialize_field("holds", &self.holds)?;
        s.serialize_field("nextValue", &self.next_value.to_string())?;
        s.serialize_field("increasing", &self.increasing)?;
        s.end()
    }
}

fn margin_value(r: u32) -> BigRational {
    // (r-2)/5.5 = 2(r-2)/11.
    big_ratio(2 * (i64::from(r) - 2), 11).pow((r - 2) as i32)
}

pub fn asymptotic_margin_check(r: u32) -> MarginCheck {
    assert!(r >= 3);
    let value = margin_value(r);
    let next_value = margin_value(r + 1);
    let threshold = big_ratio(11, 4);
    MarginCheck {
        r,
        holds: value > threshold,
        increasing: next_value > value,
        value,
        threshold,
        next_value,
    }
}

/// Certified rational upper bound on e, used only where an upper bound
/// keeps the checked inequality a sound claim.
fn e_upper() -> BigRational {
    Ratio::new(
        BigInt::from(27_182_818_285u64),
        BigInt::from(10_000_000_000u64),
    )
}

/// The chain `(a/b)^b ≤ binomial(a,b) ≤ a^b/b! ≤ (ea/b)^b`, each comparison
/// exact. The last uses the rational upper bound on e, which preserves the
/// claim that the right-hand side dominates the binomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BinomialBounds {
    pub lower_ok: bool,
    pub middle_ok: bool,
    pub upper_ok: bool,
}

impl BinomialBounds {
    pub fn all(self) -> bool {
        self.lower_ok && self.middle_ok && self.upper_ok
    }
}

pub fn binomial_bounds_check(a: u64, b: u64) -> BinomialBounds {
    assert!(1 <= b && b <= a);
    let binom = Ratio::from_integer(BigInt::from(binomial(a, b)));
    let a_big = BigInt::from(a);
    let b_big = BigInt::from(b);
    let ratio_pow = Ratio::new(a_big.clone(), b_big.clone()).pow(b as i32);
    let mut factorial = BigInt::one();
    for i in 1..=b {
        factorial *= BigInt::from(i);
    }
    let power_over_factorial = Ratio::new(a_big.pow(b as u32), factorial);
    let scaled = e_upper() * Ratio::new(BigInt::from(a), BigInt::from(b));
    let scaled_pow = scaled.pow(b as i32);
    BinomialBounds {
        lower_ok: ratio_pow <= binom,
        middle_ok: binom <= power_over_factorial,
        upper_ok: power_over_factorial <= scaled_pow,
    }
}

/// Verdict of a certified inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum CertOutcome {
    Holds,
    Fails,
    /// Enclosures could not separate the sides at the given Taylor depth.
    Undetermined {
        precision: u32,
    },
}

/// Two-sided enclosure of e^x at Taylor depth `k`; `None` when the depth
/// cannot bound the tail (|x| ≥ k+1).
fn exp_enclosure(x: &BigRational, k: u32) -> Option<(BigRational, BigRational)> {
    if x.is_negative() {
        let (lo, hi) = exp_enclosure(&-x.clone(), k)?;
        // e^x = 1/e^(-x); reciprocal swaps the bounds.
        return Some((hi.recip(), lo.recip()));
    }
    let kp1 = Ratio::from_integer(BigInt::from(k + 1));
    if *x >= kp1 {
        return None;
    }
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for i in 1..=k {
        term = term * x / Ratio::from_integer(BigInt::from(i));
        sum += term.clone();
    }
    // Tail after k terms: term_{k+1} · (1 + x/(k+1) + (x/(k+1))² + ..)
    //                    ≤ term · x/(k+1) · (k+1)/(k+1−x).
    let tail = term * x / (kp1 - x);
    Some((sum.clone(), sum + tail))
}

/// The two technical inequalities behind the dense pipeline's probability
/// budget, certified with enclosures:
/// the slack inequality `e^(10(1−1/ε))·ε⁻² ≤ ε²` and the decay inequality
/// `2·e^(−(4r+170)/15)·(5r+100) ≤ 1/(100r)`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TechnicalInequalities {
    pub epsilon: String,
    pub r: u32,
    pub slack: CertOutcome,
    pub decay: CertOutcome,
}

const TAYLOR_DEPTHS: [u32; 7] = [8, 16, 32, 64, 128, 256, 512];

fn certify_le(
    lhs_exp_arg: &BigRational,
    lhs_factor: &BigRational,
    rhs: &BigRational,
) -> CertOutcome {
    let mut last = TAYLOR_DEPTHS[0];
    for &k in &TAYLOR_DEPTHS {
        last = k;
        if let Some((lo, hi)) = exp_enclosure(lhs_exp_arg, k) {
            if hi * lhs_factor <= *rhs {
                return CertOutcome::Holds;
            }
            if lo * lhs_factor > *rhs {
                return CertOutcome::Fails;
            }
        }
    }
    CertOutcome::Undetermined { precision: last }
}

pub fn observation2_check(epsilon: &BigRational, r: u32) -> TechnicalInequalities {
    assert!(r >= 1);
    assert!(epsilon > &BigRational::zero() && epsilon <= &BigRational::one());

    // Slack: exponent 10(1 − 1/ε) ≤ 0, factor ε⁻², target ε².
    let ten = Ratio::from_integer(BigInt::from(10));
    let slack_arg = ten * (BigRational::one() - epsilon.recip());
    let slack_factor = epsilon.recip() * epsilon.recip();
    let slack_rhs = epsilon * epsilon;
    let slack = certify_le(&slack_arg, &slack_factor, &slack_rhs);

    // Decay: exponent −(4r+170)/15, factor 2(5r+100), target 1/(100r).
    let decay_arg = -big_ratio(i64::from(4 * r + 170), 15);
    let decay_factor = big_ratio(2 * i64::from(5 * r + 100), 1);
    let decay_rhs = big_ratio(1, 100 * i64::from(r));
    let decay = certify_le(&decay_arg, &decay_factor, &decay_rhs);

    TechnicalInequalities {
        epsilon: epsilon.to_string(),
        r,
        slack,
        decay,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_lower_bound_instance;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(8, 2), BigUint::from(28u32));
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(10, 0), BigUint::one());
        assert_eq!(binomial(10, 10), BigUint::one());
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(52, 5), BigUint::from(2_598_960u64));
    }

    #[test]
    fn base_case_certificate_fails_as_expected() {
        let cert = palette_count_certificate(3, 1, 0);
        assert_eq!(cert.lhs, BigUint::from(8u32));
        assert_eq!(cert.rhs, BigUint::from(28u32));
        assert!(!cert.verdict);
        assert!(cert.derivation.len() >= 4);
    }

    #[test]
    fn large_scale_certificate_holds_for_r9() {
        let cert = palette_count_certificate(9, 1_000_000, 300);
        assert!(cert.verdict);
    }

    #[test]
    fn lhs_matches_generated_instances() {
        for (r, n) in [(3u32, 1u64), (3, 2), (4, 1)] {
            let inst = gen_lower_bound_instance(r, n as u32).unwrap();
            let cert = palette_count_certificate(r, n, 0);
            assert_eq!(
                BigUint::from(inst.special_vertices.len() as u64),
                cert.lhs,
                "r={r} N={n}"
            );
        }
    }

    #[test]
    fn thresholds_exist_and_stay_true() {
        for c in [0u64, 300] {
            let threshold = certificate_threshold(9, c, 500).expect("threshold within range");
            for n in threshold..threshold + 50 {
                assert!(
                    palette_count_certificate(9, n, c).verdict,
                    "verdict regressed at N={n}, C={c}"
                );
            }
            if threshold > 1 {
                assert!(!palette_count_certificate(9, threshold - 1, c).verdict);
            }
        }
    }

    #[test]
    fn margin_first_holds_at_nine() {
        for r in 3..=8 {
            assert!(!asymptotic_margin_check(r).holds, "r={r}");
        }
        for r in 9..=20 {
            let check = asymptotic_margin_check(r);
            assert!(check.holds, "r={r}");
            assert!(check.increasing, "r={r}");
        }
    }

    #[test]
    fn margin_values_match_hand_arithmetic() {
        // r=9: (14/11)^7 compared against 11/4.
        let check = asymptotic_margin_check(9);
        let expected = big_ratio(14, 11).pow(7);
        assert_eq!(check.value, expected);
        // r=8: (12/11)^6 ≈ 1.69 under 2.75.
        let r8 = asymptotic_margin_check(8);
        assert_eq!(r8.value, big_ratio(12, 11).pow(6));
        assert!(!r8.holds);
    }

    #[test]
    fn binomial_chain_examples() {
        let b = binomial_bounds_check(4, 2);
        assert!(b.all());
        assert!(binomial_bounds_check(10, 1).all());
        assert!(binomial_bounds_check(7, 7).all());
        assert!(binomial_bounds_check(60, 17).all());
    }

    #[test]
    fn binomial_chain_full_grid() {
        for a in 1..=40u64 {
            for b in 1..=a {
                assert!(binomial_bounds_check(a, b).all(), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn enclosures_bracket_known_values() {
        // e^1 enclosure straddles 2.718281828...
        let one = BigRational::one();
        let (lo, hi) = exp_enclosure(&one, 16).unwrap();
        assert!(lo < e_upper());
        assert!(hi > Ratio::new(BigInt::from(27_182u64), BigInt::from(10_000u64)));
        assert!(hi.clone() - lo.clone() < big_ratio(1, 1_000_000));
        // x = 0 is exact.
        let (zl, zh) = exp_enclosure(&BigRational::zero(), 8).unwrap();
        assert_eq!(zl, BigRational::one());
        assert_eq!(zh, BigRational::one());
        // Depth too small for the magnitude is refused.
        assert!(exp_enclosure(&big_ratio(20, 1), 8).is_none());
    }

    #[test]
    fn technical_inequalities_hold_on_grid() {
        for (num, den) in [(1i64, 1i64), (1, 2), (1, 4), (1, 10)] {
            let eps = big_ratio(num, den);
            for r in 1..=10 {
                let report = observation2_check(&eps, r);
                assert_eq!(report.slack, CertOutcome::Holds, "eps={num}/{den} r={r}");
                assert_eq!(report.decay, CertOutcome::Holds, "eps={num}/{den} r={r}");
            }
        }
    }

    #[test]
    fn slack_boundary_is_equality_at_epsilon_one() {
        // At ε = 1 the exponent is zero and both sides equal 1; the
        // enclosure is exact there, so the verdict is a certified Holds.
        let report = observation2_check(&BigRational::one(), 1);
        assert_eq!(report.slack, CertOutcome::Holds);
    }

    #[test]
    fn certify_le_reports_failure_when_reversed() {
        // e^0 · 2 ≤ 1 is false and the enclosure proves it.
        let outcome = certify_le(&BigRational::zero(), &big_ratio(2, 1), &BigRational::one());
        assert_eq!(outcome, CertOutcome::Fails);
    }

    #[test]
    fn certificate_serialises_with_decimal_strings() {
        let cert = palette_count_certificate(3, 1, 0);
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["lhs"], "8");
        assert_eq!(json["rhs"], "28");
        assert_eq!(json["verdict"], false);
    }
}
