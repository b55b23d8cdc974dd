//! Exact arithmetic over the Gaussian rationals `Q(i)`.
//!
//! Rational components use an `i64` fast path and promote to arbitrary
//! precision on overflow, so results are always exact.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid scalar literal `{0}`")]
    Parse(String),
}

/// Rational number in lowest terms with a positive denominator.
#[derive(Clone)]
pub enum Rational {
    Small(i64, i64),
    Big(Box<BigRational>),
}

impl Rational {
    pub fn zero() -> Self {
        Rational::Small(0, 1)
    }

    pub fn one() -> Self {
        Rational::Small(1, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Rational::Small(n, 1)
    }

    /// Builds `num/den`; panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::normalize_small(num as i128, den as i128)
    }

    fn normalize_small(num: i128, den: i128) -> Self {
        if den == 1 {
            if let Ok(a) = i64::try_from(num) {
                return Rational::Small(a, 1);
            }
        }
        let (mut n, mut d) = (num, den);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        if n == 0 {
            return Rational::Small(0, 1);
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Rational::Small(a, b),
            _ => Rational::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // BigRational arithmetic keeps lowest terms with positive denominator.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Rational::Small(n, d);
        }
        Rational::Big(Box::new(r))
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rational::Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rational::Small(n, _) => *n < 0,
            Rational::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(_, d) => *d == 1,
            Rational::Big(b) => b.is_integer(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Rational::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Self, ScalarError> {
        match self {
            Rational::Small(0, _) => Err(ScalarError::DivisionByZero),
            Rational::Small(n, d) => Ok(Self::normalize_small(*d as i128, *n as i128)),
            Rational::Big(b) => Ok(Self::from_big(b.recip())),
        }
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => a == c && b == d,
            // canonical forms: a Big value never fits in Small
            (Rational::Big(x), Rational::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rational::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Rational::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    if let Some(n) = a.checked_add(*c) {
                        return Rational::Small(n, 1);
                    }
                }
                if let Some(r) = add_small(*a, *b, *c, *d) {
                    return r;
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Rational::normalize_small(a * d + c * b, b * d)
            }
            _ => Rational::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *d == 1 || *b == 1 {
                    // only the integer factor can cancel against the other denominator
                    let (num, den, int) = if *d == 1 { (*a, *b, *c) } else { (*c, *d, *a) };
                    let g = int.gcd(&den);
                    if g > 0 {
                        if let Some(n) = num.checked_mul(int / g) {
                            return if n == 0 { Rational::Small(0, 1) } else { Rational::Small(n, den / g) };
                        }
                    }
                }
                // cross-cancel so the product stays in lowest terms
                let (g1, g2) = (a.gcd(d), c.gcd(b));
                if g1 > 0 && g2 > 0 {
                    if let (Some(n), Some(m)) = ((a / g1).checked_mul(c / g2), (b / g2).checked_mul(d / g1)) {
                        return if n == 0 { Rational::Small(0, 1) } else { Rational::Small(n, m) };
                    }
                }
                Rational::normalize_small(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rational::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            Rational::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational::Small(m, d),
                None => Rational::normalize_small(-(n as i128), d as i128),
            },
            Rational::Big(b) => Rational::from_big(-*b),
        }
    }
}

/// `a/b + c/d` in lowest terms without widening, or `None` on overflow.
fn add_small(a: i64, b: i64, c: i64, d: i64) -> Option<Rational> {
    let g = b.gcd(&d);
    let (bg, dg) = (b / g, d / g);
    let num = a.checked_mul(dg)?.checked_add(c.checked_mul(bg)?)?;
    if num == 0 {
        return Some(Rational::Small(0, 1));
    }
    // any common factor of num and b*d/g divides g
    let h = num.gcd(&g);
    let den = bg.checked_mul(d / h)?;
    Some(Rational::Small(num / h, den))
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs.clone())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ScalarError;

    /// Accepts `a` or `a/b` with an optional sign on `a`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ScalarError::Parse(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rational::from_big(BigRational::new(num, den)))
    }
}

/// An element `re + im·i` of `Q(i)`, always in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRational { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(Rational::from_int(n), Rational::zero())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(Rational::new(num, den), Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2`, a non-negative rational.
    pub fn norm_sqr(&self) -> Rational {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let n = rhs.norm_sqr();
        let inv = n.recip()?;
        let num = self * &rhs.conj();
        Ok(Self::new(&num.re * &inv, &num.im * &inv))
    }

    pub fn scale_int(&self, k: i64) -> Self {
        if k == 1 {
            return self.clone();
        }
        let k = Rational::from_int(k);
        Self::new(&self.re * &k, &self.im * &k)
    }
}

impl Default for GaussRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for GaussRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for GaussRational {
    fn from(r: Rational) -> Self {
        Self::new(r, Rational::zero())
    }
}

impl Add for &GaussRational {
    type Output = GaussRational;
    fn add(self, rhs: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Add for GaussRational {
    type Output = GaussRational;
    fn add(self, rhs: GaussRational) -> GaussRational {
        &self + &rhs
    }
}

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, rhs: &GaussRational) {
        *self = &*self + rhs;
    }
}

impl Sub for &GaussRational {
    type Output = GaussRational;
    fn sub(self, rhs: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Sub for GaussRational {
    type Output = GaussRational;
    fn sub(self, rhs: GaussRational) -> GaussRational {
        &self - &rhs
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, rhs: &GaussRational) {
        *self = &*self - rhs;
    }
}

impl Mul for &GaussRational {
    type Output = GaussRational;
    fn mul(self, rhs: &GaussRational) -> GaussRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussRational::new(&self.re * &rhs.re, Rational::zero());
        }
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        GaussRational::new(re, im)
    }
}

impl Mul for GaussRational {
    type Output = GaussRational;
    fn mul(self, rhs: GaussRational) -> GaussRational {
        &self * &rhs
    }
}

impl MulAssign<&GaussRational> for GaussRational {
    fn mul_assign(&mut self, rhs: &GaussRational) {
        *self = &*self * rhs;
    }
}

impl Div for &GaussRational {
    type Output = GaussRational;
    /// Panics on a zero divisor; use [`GaussRational::checked_div`] otherwise.
    fn div(self, rhs: &GaussRational) -> GaussRational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        -self.clone()
    }
}

impl Ord for GaussRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl PartialOrd for GaussRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GaussRational {
    /// Canonical literal: `a/b`, `c/d i`, `a/b+c/d i`; `i` and `-i` for unit imaginary parts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |im: &Rational| -> String {
            if im.is_one() {
                "i".to_string()
            } else if (-im.clone()).is_one() {
                "-i".to_string()
            } else {
                format!("{im} i")
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let im = im_part(&self.im);
                if im.starts_with('-') {
                    write!(f, "{}{}", self.re, im)
                } else {
                    write!(f, "{}+{}", self.re, im)
                }
            }
        }
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GaussRational {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ScalarError::Parse(s.to_string()));
        }
        let imag_of = |t: &str| -> Result<Rational, ScalarError> {
            let body = &t[..t.len() - 1];
            match body {
                "" | "+" => Ok(Rational::one()),
                "-" => Ok(-Rational::one()),
                _ => body.parse(),
            }
        };
        if !compact.ends_with('i') {
            return Ok(Self::new(compact.parse()?, Rational::zero()));
        }
        // split the real part from the imaginary part at the last interior sign
        let split = compact
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(k, _)| k)
            .last();
        match split {
            Some(k) => {
                let re: Rational = compact[..k].parse()?;
                let im = imag_of(&compact[k..])?;
                Ok(Self::new(re, im))
            }
            None => Ok(Self::new(Rational::zero(), imag_of(&compact)?)),
        }
    }
}

/// Generalized binomial coefficient `p(p-1)...(p-j+1)/j!`.
pub fn binomial(p: i64, j: u32) -> i64 {
    let mut acc: i128 = 1;
    for t in 0..j as i128 {
        acc = acc * (p as i128 - t) / (t + 1);
    }
    acc as i64
}

/// Binary operations exposed for table-driven checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Conj,
}

pub fn gauss_arith(
    op: GaussOp,
    a: &GaussRational,
    b: Option<&GaussRational>,
) -> Result<GaussRational, ScalarError> {
    let rhs = || b.cloned().unwrap_or_else(GaussRational::zero);
    Ok(match op {
        GaussOp::Add => a + &rhs(),
        GaussOp::Sub => a - &rhs(),
        GaussOp::Mul => a * &rhs(),
        GaussOp::Div => a.checked_div(&rhs())?,
        GaussOp::Neg => -a,
        GaussOp::Conj => a.conj(),
    })
}

impl Zero for GaussRational {
    fn zero() -> Self {
        GaussRational::zero()
    }
    fn is_zero(&self) -> bool {
        GaussRational::is_zero(self)
    }
}

impl One for GaussRational {
    fn one() -> Self {
        GaussRational::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(s: &str) -> GaussRational {
        s.parse().unwrap()
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&GaussRational::i() * &GaussRational::i(), GaussRational::from_int(-1));
    }

    #[test]
    fn halves_add_to_one() {
        assert_eq!(&g("1/2") + &g("1/2"), GaussRational::one());
    }

    #[test]
    fn norm_of_one_plus_i() {
        assert_eq!(&g("1+i") * &g("1-i"), GaussRational::from_int(2));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let r = gauss_arith(GaussOp::Div, &g("3"), Some(&GaussRational::zero()));
        assert_eq!(r, Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn literal_round_trip() {
        for s in ["0", "-3", "1/2", "i", "-i", "1/2 i", "-2/3+1/4 i", "1-i", "5+i"] {
            let v = g(s);
            assert_eq!(g(&v.to_string()), v, "{s}");
        }
        assert_eq!(g("1/2+1/2 i").to_string(), "1/2+1/2 i");
        assert_eq!(g("-i").to_string(), "-i");
    }

    #[test]
    fn overflow_promotes_to_big() {
        let big = GaussRational::from_int(i64::MAX);
        let sq = &big * &big;
        let back = sq.checked_div(&big).unwrap();
        assert_eq!(back, big);
        assert!(matches!(sq.re, Rational::Big(_)));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(-1, 2), 1);
        assert_eq!(binomial(-7, 0), 1);
        assert_eq!(binomial(2, 1), 2);
        assert_eq!(binomial(-2, 3), -4);
    }

    #[test]
    fn pascal_rule() {
        for p in -10..=10 {
            for j in 1..=10 {
                assert_eq!(binomial(p, j), binomial(p - 1, j) + binomial(p - 1, j - 1));
            }
        }
    }

    fn arb_gauss() -> impl Strategy<Value = GaussRational> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| {
            GaussRational::new(Rational::new(a, b), Rational::new(c, d))
        })
    }

    fn canonical(r: &Rational) -> bool {
        match r {
            Rational::Small(n, d) => *d > 0 && n.gcd(d) == 1 && (*n != 0 || *d == 1),
            Rational::Big(b) => b.numer().to_i64().is_none() || b.denom().to_i64().is_none(),
        }
    }

    fn arb_wide() -> impl Strategy<Value = Rational> {
        let mag = prop_oneof![-60i64..60, -(1i64 << 40)..(1i64 << 40), Just(i64::MAX), Just(i64::MIN + 1)];
        let den = prop_oneof![1i64..30, 1i64..(1i64 << 40), Just(i64::MAX)];
        (mag, den).prop_map(|(n, d)| Rational::new(n, d))
    }

    proptest! {
        #[test]
        fn small_paths_agree_with_bigrational(a in arb_wide(), b in arb_wide()) {
            let (x, y) = (a.to_big(), b.to_big());
            for (got, want) in [(&a + &b, &x + &y), (&a * &b, &x * &y), (&a - &b, &x - &y), (-a.clone(), -x.clone())] {
                prop_assert!(canonical(&got));
                prop_assert_eq!(got.to_big(), want);
            }
        }

        #[test]
        fn add_commutes(a in arb_gauss(), b in arb_gauss()) {
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn mul_distributes(a in arb_gauss(), b in arb_gauss(), c in arb_gauss()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn conj_is_an_involutive_automorphism(a in arb_gauss(), b in arb_gauss()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        }

        #[test]
        fn div_inverts_mul(a in arb_gauss(), b in arb_gauss()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).checked_div(&b).unwrap(), a);
        }
    }
}
