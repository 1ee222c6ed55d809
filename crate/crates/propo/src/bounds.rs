//! High-precision evaluation of the closed-form quantities attached to
//! Property O: the k! lower bound, the probabilistic upper bound and its
//! union-bound certificate, the falling-factorial binomial estimates, and
//! the two-phase argument's parameters.
//!
//! All integers (factorials, binomials at integer n) are exact big integers.
//! Real arithmetic runs at a configurable decimal precision (default 50
//! significant digits) on arbitrary-precision binary floats; sign-critical
//! results are re-evaluated at twice the precision to detect rounding
//! trouble near zero. Asymptotic formulas from the source material carry
//! (1+o(1)) factors that cannot be evaluated; they are implemented with the
//! leading term only and tagged `asymptotic` in reports.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

#[derive(thiserror::Error, Debug)]
pub enum BoundsError {
    #[error("k must be at least 2, got {0}")]
    KTooSmall(usize),
    #[error("need 2 <= k <= n, got k = {k}, n = {n}")]
    BadUniformity { k: usize, n: u64 },
    #[error("alpha must lie in the open interval (0, 1), got {0}")]
    AlphaOutOfRange(f64),
}

pub const DEFAULT_DIGITS: usize = 50;

const RM: RoundingMode = RoundingMode::ToEven;

/// Shared arbitrary-precision context (precision in bits plus a cache of
/// computed constants).
pub struct Ctx {
    bits: usize,
    cc: Consts,
}

impl Ctx {
    pub fn with_digits(digits: usize) -> Self {
        // log2(10) with headroom for intermediate rounding.
        let bits = (digits as f64 * 3.3219281).ceil() as usize + 64;
        Ctx {
            bits,
            cc: Consts::new().expect("constants cache"),
        }
    }

    fn u(&self, v: u64) -> BigFloat {
        BigFloat::from_u64(v, self.bits)
    }

    fn big(&mut self, v: &BigUint) -> BigFloat {
        BigFloat::parse(&v.to_string(), Radix::Dec, self.bits, RM, &mut self.cc)
    }

    fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.bits, RM)
    }

    fn e(&mut self) -> BigFloat {
        self.cc.e(self.bits, RM)
    }

    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.bits, RM, &mut self.cc)
    }

    fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.cc)
    }

    fn pow(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.pow(b, self.bits, RM, &mut self.cc)
    }

    fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }

    /// Decimal rendering (scientific notation) of a value.
    pub fn dec(&mut self, a: &BigFloat) -> String {
        a.format(Radix::Dec, RM, &mut self.cc)
            .expect("finite value formats")
    }

    pub fn to_f64(&mut self, a: &BigFloat) -> f64 {
        self.dec(a).parse().unwrap_or(f64::NAN)
    }

    pub fn parse_dec(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.bits, RM, &mut self.cc)
    }
}

// ---------------------------------------------------------------------------
// Exact integer pieces
// ---------------------------------------------------------------------------

pub fn factorial_big(k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=k {
        acc *= BigUint::from(i);
    }
    acc
}

/// The k! lower bound on f(k), exactly.
pub fn factorial_lower_bound(k: usize) -> Result<BigUint, BoundsError> {
    if k < 2 {
        return Err(BoundsError::KTooSmall(k));
    }
    Ok(factorial_big(k as u64))
}

pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

// ---------------------------------------------------------------------------
// Theorem 1 machinery
// ---------------------------------------------------------------------------

/// n(k) = (k/e)^2 (pi * exp(e^2/2) * k^3 ln k)^(1/k), evaluated at the
/// context's precision.
pub fn theorem1_n(k: usize, ctx: &mut Ctx) -> Result<BigFloat, BoundsError> {
    if k < 2 {
        return Err(BoundsError::KTooSmall(k));
    }
    let kf = ctx.u(k as u64);
    let e = ctx.e();
    let k_over_e = ctx.div(&kf, &e);
    let lead = ctx.mul(&k_over_e, &k_over_e);
    let e2_half = {
        let e2 = ctx.mul(&e, &e);
        ctx.div(&e2, &ctx.u(2))
    };
    let exp_term = ctx.exp(&e2_half);
    let pi = ctx.pi();
    let k3 = ctx.u((k * k * k) as u64);
    let lnk = ctx.ln(&kf);
    let mut inner = ctx.mul(&pi, &exp_term);
    inner = ctx.mul(&inner, &k3);
    inner = ctx.mul(&inner, &lnk);
    let inv_k = ctx.div(&ctx.u(1), &kf);
    let tail = ctx.pow(&inner, &inv_k);
    Ok(ctx.mul(&lead, &tail))
}

/// Smallest integer at or above the Theorem 1 n. The value is re-derived at
/// double precision so a ceiling astride a representation boundary is caught.
pub fn theorem1_n_ceil(k: usize, ctx: &mut Ctx) -> Result<u64, BoundsError> {
    let v = theorem1_n(k, ctx)?;
    let f = ctx.to_f64(&v);
    // f64 has ~16 digits; n stays far below 2^52 here, so the rounded
    // neighborhood contains the true ceiling. Pick the first integer >= v.
    let mut candidate = f.floor() as u64;
    while matches!(BigFloat::from_u64(candidate, ctx.bits).cmp(&v), Some(c) if c < 0) {
        candidate += 1;
    }
    Ok(candidate)
}

/// ln(1 - 1/k!) by the series -sum_{i>=1} x^i / i with x = 1/k!. The series
/// is evaluated term by term, so the tiny x never cancels against 1.
fn ln_one_minus_inv_factorial(k: usize, ctx: &mut Ctx) -> BigFloat {
    let kfact = factorial_big(k as u64);
    let kf = ctx.big(&kfact);
    let x = ctx.div(&ctx.u(1), &kf);
    // Terms decay by a factor of 1/k!, i.e. floor(log2 k!) bits per term.
    let term_bits = (kfact.bits() as usize - 1).max(1);
    let max_terms = ctx.bits / term_bits + 2;
    let mut power = x.clone();
    let mut sum = x.clone();
    for i in 2..=max_terms as u64 {
        power = ctx.mul(&power, &x);
        let term = ctx.div(&power, &ctx.u(i));
        sum = ctx.add(&sum, &term);
    }
    sum.neg()
}

/// ln(n!) + C(n,k) ln(1 - 1/k!), in log space with exact big-integer n! and
/// C(n,k). A negative value certifies n!(1 - 1/k!)^C(n,k) < 1 at (n, k).
pub fn union_bound_log(n: u64, k: usize, ctx: &mut Ctx) -> Result<BigFloat, BoundsError> {
    if k < 2 || (k as u64) > n {
        return Err(BoundsError::BadUniformity { k, n });
    }
    let n_fact = ctx.big(&factorial_big(n));
    let ln_nfact = ctx.ln(&n_fact);
    let binom = ctx.big(&binomial_big(n, k as u64));
    let ln_term = ln_one_minus_inv_factorial(k, ctx);
    let penalty = ctx.mul(&binom, &ln_term);
    Ok(ctx.add(&ln_nfact, &penalty))
}

/// Evaluates the union bound at the working precision and again at twice the
/// precision; `sign_agrees` is false when the two runs disagree about the
/// sign, i.e. the value sits too close to zero for the working precision.
pub fn union_bound_log_certified(
    n: u64,
    k: usize,
    digits: usize,
) -> Result<(BigFloat, bool), BoundsError> {
    let mut ctx = Ctx::with_digits(digits);
    let value = union_bound_log(n, k, &mut ctx)?;
    let mut ctx2 = Ctx::with_digits(digits * 2);
    let check = union_bound_log(n, k, &mut ctx2)?;
    let agree = value.is_negative() == check.is_negative();
    Ok((value, agree))
}

// ---------------------------------------------------------------------------
// Falling-factorial binomial estimates
// ---------------------------------------------------------------------------

/// (n)(n-1)...(n-k+1) at a real n.
fn falling_factorial_real(n: &BigFloat, k: usize, ctx: &mut Ctx) -> BigFloat {
    let mut acc = ctx.u(1);
    for j in 0..k as u64 {
        let factor = ctx.sub(n, &ctx.u(j));
        acc = ctx.mul(&acc, &factor);
    }
    acc
}

/// C(n,k)/k! at real n, using the falling-factorial extension of the
/// binomial.
pub fn expected_consistent(n: &BigFloat, k: usize, ctx: &mut Ctx) -> BigFloat {
    let num = falling_factorial_real(n, k, ctx);
    let kf = ctx.big(&factorial_big(k as u64));
    let kf2 = ctx.mul(&kf, &kf);
    ctx.div(&num, &kf2)
}

#[derive(Clone, Debug)]
pub struct Eq3Ratio {
    /// C(n,k)/k! at n = theorem1_n(k).
    pub value: BigFloat,
    /// value / (k^2 ln k / 2); tends to 1 as k grows, slowly.
    pub ratio_to_half_k2_lnk: BigFloat,
}

pub fn eq3_ratio(k: usize, ctx: &mut Ctx) -> Result<Eq3Ratio, BoundsError> {
    let n = theorem1_n(k, ctx)?;
    let value = expected_consistent(&n, k, ctx);
    let kf = ctx.u(k as u64);
    let lnk = ctx.ln(&kf);
    let k2 = ctx.mul(&kf, &kf);
    let mut half = ctx.mul(&k2, &lnk);
    half = ctx.div(&half, &ctx.u(2));
    let ratio = ctx.div(&value, &half);
    Ok(Eq3Ratio {
        value,
        ratio_to_half_k2_lnk: ratio,
    })
}

/// (n)_k / n^k at integer n, as an exact rational rendered at the context's
/// precision. At n near (k/e)^2 it approaches exp(-e^2/2) as k grows.
pub fn fact_ratio(n: u64, k: usize, ctx: &mut Ctx) -> Result<BigFloat, BoundsError> {
    if k < 2 || (k as u64) > n {
        return Err(BoundsError::BadUniformity { k, n });
    }
    let mut num = BigUint::one();
    for j in 0..k as u64 {
        num *= BigUint::from(n - j);
    }
    let den = BigUint::from(n).pow(k as u32);
    let num_f = ctx.big(&num);
    let den_f = ctx.big(&den);
    Ok(ctx.div(&num_f, &den_f))
}

// ---------------------------------------------------------------------------
// Two-phase argument parameters
// ---------------------------------------------------------------------------

/// The two published values of the constant c do not agree: the theorem
/// statement has 2*pi / e^(1 + e^2/2) while the proof works with
/// (2*pi / 3e) e^(e^2/2). Both are computed; neither is silently preferred.
#[derive(Clone, Debug)]
pub struct Thm2Params {
    pub omega: BigFloat,
    pub omega_prime: BigFloat,
    pub c_stmt: BigFloat,
    pub c_proof: BigFloat,
    pub n_stmt: BigFloat,
    pub n_proof: BigFloat,
    /// C(n,k)/k! at n = n_proof (falling-factorial extension).
    pub expected_c: BigFloat,
    /// Always true: the two c variants differ.
    pub c_discrepancy: bool,
}

pub fn theorem2_params(k: usize, alpha: f64, ctx: &mut Ctx) -> Result<Thm2Params, BoundsError> {
    if k < 2 {
        return Err(BoundsError::KTooSmall(k));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundsError::AlphaOutOfRange(alpha));
    }
    let a = ctx.parse_dec(&format!("{alpha:.17e}"));
    let kf = ctx.u(k as u64);
    let e = ctx.e();
    let three_e = ctx.mul(&ctx.u(3), &e);
    let sqrt_k = ctx.sqrt(&kf);

    // omega = (alpha / 3e) sqrt(k); omega' = (2/alpha) omega = 2 sqrt(k)/(3e).
    let omega = {
        let lead = ctx.div(&a, &three_e);
        ctx.mul(&lead, &sqrt_k)
    };
    let omega_prime = {
        let two_sqrt = ctx.mul(&ctx.u(2), &sqrt_k);
        ctx.div(&two_sqrt, &three_e)
    };

    let e2_half = {
        let e2 = ctx.mul(&e, &e);
        ctx.div(&e2, &ctx.u(2))
    };
    let pi = ctx.pi();
    let two_pi = ctx.mul(&ctx.u(2), &pi);
    let c_stmt = {
        let expo = ctx.add(&ctx.u(1), &e2_half);
        let denom = ctx.exp(&expo);
        ctx.div(&two_pi, &denom)
    };
    let c_proof = {
        let lead = ctx.div(&two_pi, &three_e);
        let tail = ctx.exp(&e2_half);
        ctx.mul(&lead, &tail)
    };

    // n = (c alpha)^(1/k) (k/e)^2 k^(3/(2k)), with the (1+o(1)) factor
    // dropped.
    let n_for = |c: &BigFloat, ctx: &mut Ctx| {
        let ca = ctx.mul(c, &a);
        let inv_k = ctx.div(&ctx.u(1), &kf);
        let head = ctx.pow(&ca, &inv_k);
        let k_over_e = ctx.div(&kf, &e);
        let mid = ctx.mul(&k_over_e, &k_over_e);
        let expo = {
            let three = ctx.u(3);
            let two_k = ctx.mul(&ctx.u(2), &kf);
            ctx.div(&three, &two_k)
        };
        let tail = ctx.pow(&kf, &expo);
        let hm = ctx.mul(&head, &mid);
        ctx.mul(&hm, &tail)
    };
    let n_stmt = n_for(&c_stmt.clone(), ctx);
    let n_proof = n_for(&c_proof.clone(), ctx);
    let expected_c = expected_consistent(&n_proof, k, ctx);

    Ok(Thm2Params {
        omega,
        omega_prime,
        c_discrepancy: c_stmt.cmp(&c_proof) != Some(0),
        c_stmt,
        c_proof,
        n_stmt,
        n_proof,
        expected_c,
    })
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

/// One evaluated quantity: full-precision decimal, f64 convenience value,
/// and whether the defining formula is exact or carries dropped (1+o(1))
/// factors.
#[derive(Clone, Debug, Serialize)]
pub struct ReportValue {
    pub value: String,
    pub approx: f64,
    pub kind: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub k: usize,
    pub alpha: Option<f64>,
    pub precision_digits: usize,
    /// k!, the unconditional lower bound on f(k).
    pub factorial_lower: String,
    /// (k^2 ln k) k!, the probabilistic upper bound on f(k).
    pub upper_bound_value: ReportValue,
    pub n_thm1: ReportValue,
    pub n_thm1_ceil: u64,
    /// C(n,k)/k! at n_thm1.
    pub eq3_value: ReportValue,
    pub eq3_ratio_to_half_k2_lnk: ReportValue,
    /// ln n! + C(n,k) ln(1 - 1/k!) at the report's n (given n, or ceil of
    /// n_thm1). Negative certifies the union bound.
    pub eq4_n: u64,
    pub eq4_log: ReportValue,
    pub eq4_sign_certified: bool,
    /// (n)_k / n^k at the report's n.
    pub fact_ratio: ReportValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<ReportValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_prime: Option<ReportValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_stmt: Option<ReportValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_proof: Option<ReportValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_discrepancy: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_thm2_stmt: Option<ReportValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_thm2_proof: Option<ReportValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_consistent: Option<ReportValue>,
}

pub fn bounds_report(
    k: usize,
    alpha: Option<f64>,
    n_override: Option<u64>,
    digits: usize,
) -> Result<BoundsReport, BoundsError> {
    let mut ctx = Ctx::with_digits(digits);
    let mk = |v: &BigFloat, kind: &'static str, ctx: &mut Ctx| ReportValue {
        value: ctx.dec(v),
        approx: ctx.to_f64(v),
        kind,
    };

    let factorial_lower = factorial_lower_bound(k)?.to_string();
    let n1 = theorem1_n(k, &mut ctx)?;
    let n1_ceil = theorem1_n_ceil(k, &mut ctx)?;
    let upper = {
        let kf = ctx.u(k as u64);
        let lnk = ctx.ln(&kf);
        let k2 = ctx.mul(&kf, &kf);
        let lead = ctx.mul(&k2, &lnk);
        let kfact = ctx.big(&factorial_big(k as u64));
        ctx.mul(&lead, &kfact)
    };
    let eq3 = eq3_ratio(k, &mut ctx)?;
    let eq4_n = n_override.unwrap_or(n1_ceil);
    let (eq4, eq4_certified) = union_bound_log_certified(eq4_n, k, digits)?;
    let fr = fact_ratio(eq4_n, k, &mut ctx)?;

    let thm2 = match alpha {
        Some(a) => Some(theorem2_params(k, a, &mut ctx)?),
        None => None,
    };

    Ok(BoundsReport {
        k,
        alpha,
        precision_digits: digits,
        factorial_lower,
        upper_bound_value: mk(&upper, "asymptotic", &mut ctx),
        n_thm1: mk(&n1, "asymptotic", &mut ctx),
        n_thm1_ceil: n1_ceil,
        eq3_value: mk(&eq3.value, "asymptotic", &mut ctx),
        eq3_ratio_to_half_k2_lnk: mk(&eq3.ratio_to_half_k2_lnk, "asymptotic", &mut ctx),
        eq4_n,
        eq4_log: mk(&eq4, "exact", &mut ctx),
        eq4_sign_certified: eq4_certified,
        fact_ratio: mk(&fr, "exact", &mut ctx),
        omega: thm2.as_ref().map(|t| mk(&t.omega, "asymptotic", &mut ctx)),
        omega_prime: thm2
            .as_ref()
            .map(|t| mk(&t.omega_prime, "asymptotic", &mut ctx)),
        c_stmt: thm2.as_ref().map(|t| mk(&t.c_stmt, "exact", &mut ctx)),
        c_proof: thm2.as_ref().map(|t| mk(&t.c_proof, "exact", &mut ctx)),
        c_discrepancy: thm2.as_ref().map(|t| t.c_discrepancy),
        n_thm2_stmt: thm2.as_ref().map(|t| mk(&t.n_stmt, "asymptotic", &mut ctx)),
        n_thm2_proof: thm2
            .as_ref()
            .map(|t| mk(&t.n_proof, "asymptotic", &mut ctx)),
        expected_consistent: thm2
            .as_ref()
            .map(|t| mk(&t.expected_c, "asymptotic", &mut ctx)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::with_digits(DEFAULT_DIGITS)
    }

    /// Relative agreement with an independently computed 55-digit value.
    fn assert_golden(got: &BigFloat, golden: &str, ctx: &mut Ctx) {
        let pinned = ctx.parse_dec(golden);
        let diff = ctx.sub(got, &pinned);
        let rel = ctx.div(&diff, &pinned);
        let tol = ctx.parse_dec("1e-45");
        let abs_rel = rel.abs();
        assert!(
            matches!(abs_rel.cmp(&tol), Some(c) if c < 0),
            "value {} deviates from golden {golden}",
            ctx.dec(got)
        );
    }

    #[test]
    fn factorials_are_exact() {
        assert_eq!(factorial_lower_bound(2).unwrap(), BigUint::from(2u32));
        assert_eq!(factorial_lower_bound(3).unwrap(), BigUint::from(6u32));
        assert_eq!(
            factorial_lower_bound(20).unwrap(),
            BigUint::from(2432902008176640000u64)
        );
        assert!(factorial_lower_bound(1).is_err());
    }

    #[test]
    fn theorem1_n_golden_values() {
        let mut c = ctx();
        let n3 = theorem1_n(3, &mut c).unwrap();
        assert_golden(
            &n3,
            "18.92099439872599955056127075176602459537046737940783762",
            &mut c,
        );
        let n20 = theorem1_n(20, &mut c).unwrap();
        assert_golden(
            &n20,
            "114.1652225691770295622336507277223432485536949590562013",
            &mut c,
        );
        // k = 2 is finite and positive (ln 2 > 0, no singularity).
        let n2 = theorem1_n(2, &mut c).unwrap();
        assert!(n2.is_positive());
        assert_golden(
            &n2,
            "14.33046426349853001944969474264293942008918805799650752",
            &mut c,
        );
    }

    #[test]
    fn theorem1_n_ceil_values() {
        let mut c = ctx();
        assert_eq!(theorem1_n_ceil(2, &mut c).unwrap(), 15);
        assert_eq!(theorem1_n_ceil(3, &mut c).unwrap(), 19);
        assert_eq!(theorem1_n_ceil(20, &mut c).unwrap(), 115);
    }

    #[test]
    fn theorem1_n_approaches_k_over_e_squared() {
        // The (...)^(1/k) factor tends to 1; at k = 200 it is still ~1.12,
        // dropping within 5% of 1 only around k = 600.
        let mut c = ctx();
        for (k, tol) in [(200usize, 0.12), (600, 0.05)] {
            let n = theorem1_n(k, &mut c).unwrap();
            let f = c.to_f64(&n);
            let lead = (k as f64 / std::f64::consts::E).powi(2);
            assert!((f / lead - 1.0).abs() < tol, "k={k}: {}", f / lead);
        }
    }

    #[test]
    fn union_bound_golden_values() {
        let mut c = ctx();
        let v = union_bound_log(15, 2, &mut c).unwrap();
        assert_golden(
            &v,
            "-44.88118257495336592271993348943807288873412096226059734",
            &mut c,
        );
        let v = union_bound_log(19, 3, &mut c).unwrap();
        assert_golden(
            &v,
            "-137.3297043461425387629301139801572984865788112322400343",
            &mut c,
        );
        let v = union_bound_log(115, 20, &mut c).unwrap();
        assert_golden(
            &v,
            "-4350.040231467902085909062753515083016317360843001014663",
            &mut c,
        );
    }

    #[test]
    fn union_bound_n_equals_k_2_is_zero() {
        // ln 2 + ln(1/2) = 0: borderline, not a certification.
        let mut c = ctx();
        let v = union_bound_log(2, 2, &mut c).unwrap();
        let tol = c.parse_dec("1e-45");
        assert!(matches!(v.abs().cmp(&tol), Some(c) if c < 0));
        assert!(!v.is_negative() || v.is_zero());
    }

    #[test]
    fn union_bound_monotone_in_n_at_k5() {
        // For k = 5 the value first turns negative at n = 16 and keeps
        // falling.
        let mut c = ctx();
        let v15 = union_bound_log(15, 5, &mut c).unwrap();
        let v16 = union_bound_log(16, 5, &mut c).unwrap();
        assert!(!v15.is_negative());
        assert!(v16.is_negative());
        let mut prev = union_bound_log(16, 5, &mut c).unwrap();
        for n in 17..30 {
            let v = union_bound_log(n, 5, &mut c).unwrap();
            assert!(matches!(v.cmp(&prev), Some(c) if c < 0), "n={n}");
            prev = v;
        }
    }

    #[test]
    fn union_bound_certified_at_k20() {
        let mut c = ctx();
        let n = theorem1_n_ceil(20, &mut c).unwrap();
        let (v, agrees) = union_bound_log_certified(n, 20, DEFAULT_DIGITS).unwrap();
        assert!(v.is_negative());
        assert!(agrees);
    }

    #[test]
    fn union_bound_rejects_bad_input() {
        let mut c = ctx();
        assert!(union_bound_log(3, 4, &mut c).is_err());
        assert!(union_bound_log(5, 1, &mut c).is_err());
    }

    #[test]
    fn eq3_golden_at_k200() {
        let mut c = ctx();
        let r = eq3_ratio(200, &mut c).unwrap();
        assert_golden(
            &r.value,
            "153482.2569729735930722095981391878454607670059147585432",
            &mut c,
        );
        assert_golden(
            &r.ratio_to_half_k2_lnk,
            "1.448405657445266035333931105418251810166676591688566206",
            &mut c,
        );
    }

    #[test]
    fn eq3_value_positive_at_k2_and_below_k2lnk_for_large_k() {
        let mut c = ctx();
        let r2 = eq3_ratio(2, &mut c).unwrap();
        assert!(r2.value.is_positive());
        // Scan: value <= k^2 ln k from the empirical threshold k = 91 up.
        for k in [91usize, 120, 200, 350, 500] {
            let r = eq3_ratio(k, &mut c).unwrap();
            let two = c.u(2);
            assert!(
                matches!(r.ratio_to_half_k2_lnk.cmp(&two), Some(c) if c < 0),
                "k={k}"
            );
        }
        // Just below the threshold the bound still fails.
        let r90 = eq3_ratio(90, &mut c).unwrap();
        let two = c.u(2);
        assert!(matches!(r90.ratio_to_half_k2_lnk.cmp(&two), Some(c) if c > 0));
    }

    #[test]
    fn fact_ratio_values() {
        let mut c = ctx();
        let v = fact_ratio(2, 2, &mut c).unwrap();
        assert_golden(&v, "0.5", &mut c);
        let v = fact_ratio(1353, 100, &mut c).unwrap();
        assert_golden(
            &v,
            "0.02347849306342825488955827154392255919508854391339709451",
            &mut c,
        );
        // Within 10% of exp(-e^2/2) at k = 100, n = round((k/e)^2).
        let target = c.parse_dec("0.02485918319919408572158702515674119471791755511958028191");
        let rel = {
            let d = c.sub(&v, &target);
            c.div(&d, &target)
        };
        assert!(c.to_f64(&rel).abs() < 0.10);
    }

    #[test]
    fn fact_ratio_decreasing_in_k() {
        let mut c = ctx();
        let mut prev = fact_ratio(50, 2, &mut c).unwrap();
        for k in 3..=10 {
            let v = fact_ratio(50, k, &mut c).unwrap();
            assert!(matches!(v.cmp(&prev), Some(c) if c < 0));
            prev = v;
        }
    }

    #[test]
    fn theorem2_golden_values() {
        let mut c = ctx();
        let p = theorem2_params(9, 0.5, &mut c).unwrap();
        assert_golden(
            &p.omega,
            "0.1839397205857211607977618850807304337229055655158839173",
            &mut c,
        );
        assert_golden(
            &p.c_stmt,
            "0.05746087583354317501847367424933529489402562855744703316",
            &mut c,
        );
        assert_golden(
            &p.c_proof,
            "30.99397488995507163386272449231236875233299845328846172",
            &mut c,
        );
        assert_golden(
            &p.n_stmt,
            "10.65715217747050299089529910954158084262122385584759771",
            &mut c,
        );
        assert_golden(
            &p.n_proof,
            "21.43809401841060706012553604507019022499617399497860364",
            &mut c,
        );
        assert_golden(
            &p.expected_c,
            "1.023910269582297873337275452076326550126565129995843236",
            &mut c,
        );
        assert!(p.c_discrepancy);
    }

    #[test]
    fn omega_prime_is_alpha_free() {
        let mut c = ctx();
        let a = theorem2_params(16, 0.25, &mut c).unwrap();
        let b = theorem2_params(16, 0.75, &mut c).unwrap();
        let d = c.sub(&a.omega_prime, &b.omega_prime);
        let tol = c.parse_dec("1e-40");
        assert!(matches!(d.abs().cmp(&tol), Some(c) if c < 0));
        // omega' = 2 sqrt(k) / (3e) = 8/(3e) at k = 16.
        let expect = {
            let e = c.e();
            let den = c.mul(&c.u(3), &e);
            c.div(&c.u(8), &den)
        };
        let d2 = c.sub(&a.omega_prime, &expect);
        assert!(matches!(d2.abs().cmp(&tol), Some(c) if c < 0));
    }

    #[test]
    fn theorem2_rejects_closed_interval_ends() {
        let mut c = ctx();
        assert!(theorem2_params(9, 1.0, &mut c).is_err());
        assert!(theorem2_params(9, 0.0, &mut c).is_err());
        assert!(theorem2_params(9, -0.5, &mut c).is_err());
    }

    #[test]
    fn expected_c_matches_eq3_machinery() {
        // theorem2's expected_C must equal C(n,k)/k! at its own n.
        let mut c = ctx();
        let p = theorem2_params(9, 0.5, &mut c).unwrap();
        let again = expected_consistent(&p.n_proof.clone(), 9, &mut c);
        let d = c.sub(&p.expected_c, &again);
        assert!(d.is_zero());
    }

    #[test]
    fn report_assembles() {
        let r = bounds_report(3, Some(0.5), None, DEFAULT_DIGITS).unwrap();
        assert_eq!(r.factorial_lower, "6");
        assert_eq!(r.n_thm1_ceil, 19);
        assert!(r.eq4_log.approx < 0.0);
        assert!(r.eq4_sign_certified);
        assert!(r.c_discrepancy.unwrap());
        assert!((r.upper_bound_value.approx - 59.32506358807792).abs() < 1e-9);
        let plain = bounds_report(3, None, None, DEFAULT_DIGITS).unwrap();
        assert!(plain.omega.is_none());
    }
}
