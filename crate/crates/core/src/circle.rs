//! Exact arithmetic on the circle of external angles `R/Z`.
//!
//! Every angle is a reduced rational in `[0, 1)`. Nothing in this module
//! touches floating point except [`Angle::to_f64`], which exists for
//! rendering and regression at the boundary of the crate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircleError {
    #[error("degree must be at least 2, got {0}")]
    InvalidDegree(u32),
    #[error("angle denominator must be positive")]
    ZeroDenominator,
    #[error("cannot parse angle {0:?}: expected \"p/q\" or an integer")]
    Parse(String),
    #[error("arc endpoints coincide at {0}")]
    DegenerateArc(Angle),
    #[error("points {0} and {1} are antipodal: the shorter arc is not defined")]
    Antipodal(Angle, Angle),
}

/// Degree of the circle map `t -> d*t`. Always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree(u32);

impl Degree {
    pub const TWO: Degree = Degree(2);

    pub fn new(d: u32) -> Result<Self, CircleError> {
        if d < 2 {
            return Err(CircleError::InvalidDegree(d));
        }
        Ok(Degree(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    pub fn ln(self) -> f64 {
        f64::from(self.0).ln()
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point of `S^1 = R/Z`, stored as a reduced fraction `p/q` with `0 <= p < q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(BigRational);

/// Reduce a rational into `[0, 1)`.
pub(crate) fn frac(r: BigRational) -> BigRational {
    let fl = r.floor();
    r - fl
}

impl Angle {
    pub fn zero() -> Self {
        Angle(BigRational::zero())
    }

    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Result<Self, CircleError> {
        let den = denominator.into();
        if den.is_zero() {
            return Err(CircleError::ZeroDenominator);
        }
        Ok(Self::from_ratio(BigRational::new(numerator.into(), den)))
    }

    /// Construct from small integers. Panics on a zero denominator.
    pub fn frac(numerator: i64, denominator: i64) -> Self {
        Self::new(numerator, denominator).expect("nonzero denominator")
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Angle(frac(r))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }

    /// `d * t mod 1`.
    pub fn mul_by(&self, d: Degree) -> Angle {
        Angle::from_ratio(&self.0 * BigRational::from_integer(d.as_bigint()))
    }

    /// The `d` preimages `(t + k)/d`, in increasing order from 0.
    pub fn preimages(&self, d: Degree) -> Vec<Angle> {
        let dd = BigRational::from_integer(d.as_bigint());
        (0..d.get())
            .map(|k| Angle((&self.0 + BigRational::from_integer(BigInt::from(k))) / &dd))
            .collect()
    }

    /// Counterclockwise distance from `self` to `other`, in `[0, 1)`.
    pub fn ccw_to(&self, other: &Angle) -> BigRational {
        frac(&other.0 - &self.0)
    }

    /// Shift by an exact rational amount, mod 1.
    pub fn shifted(&self, by: &BigRational) -> Angle {
        Angle::from_ratio(&self.0 + by)
    }

    /// The reflection `c - t` mod 1.
    pub fn reflect_about(&self, c: &Angle) -> Angle {
        Angle::from_ratio(&c.0 - &self.0)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Angle {
    type Err = CircleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || CircleError::Parse(s.to_string());
        match s.split_once('/') {
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Angle::from_ratio(BigRational::from_integer(n)))
            }
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(CircleError::ZeroDenominator);
                }
                if q.is_negative() {
                    return Err(bad());
                }
                Angle::new(p, q)
            }
        }
    }
}

pub fn mul_by_d(t: &Angle, d: u32) -> Result<Angle, CircleError> {
    Ok(t.mul_by(Degree::new(d)?))
}

pub fn preimages(t: &Angle, d: u32) -> Result<Vec<Angle>, CircleError> {
    Ok(t.preimages(Degree::new(d)?))
}

/// Distance along the shorter arc; always in `[0, 1/2]`.
pub fn tau(a: &Angle, b: &Angle) -> BigRational {
    let l = a.ccw_to(b);
    let other = BigRational::one() - &l;
    if l.is_zero() {
        return l;
    }
    std::cmp::min(l, other)
}

pub(crate) fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Whether `t` lies strictly inside the shorter arc between `a` and `b`.
pub fn shorter_arc_contains(t: &Angle, a: &Angle, b: &Angle) -> Result<bool, CircleError> {
    if a == b {
        return Err(CircleError::DegenerateArc(a.clone()));
    }
    let l = a.ccw_to(b);
    let (start, end) = match l.cmp(&half()) {
        Ordering::Less => (a, b),
        Ordering::Greater => (b, a),
        Ordering::Equal => return Err(CircleError::Antipodal(a.clone(), b.clone())),
    };
    Ok(ArcInterval { start: start.clone(), end: end.clone() }.contains(t))
}

/// Open arc swept counterclockwise from `start` to `end`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ArcInterval {
    start: Angle,
    end: Angle,
}

impl ArcInterval {
    pub fn new(start: Angle, end: Angle) -> Result<Self, CircleError> {
        if start == end {
            return Err(CircleError::DegenerateArc(start));
        }
        Ok(ArcInterval { start, end })
    }

    pub fn start(&self) -> &Angle {
        &self.start
    }

    pub fn end(&self) -> &Angle {
        &self.end
    }

    /// Length in `(0, 1)`.
    pub fn length(&self) -> BigRational {
        self.start.ccw_to(&self.end)
    }

    pub fn complement(&self) -> ArcInterval {
        ArcInterval { start: self.end.clone(), end: self.start.clone() }
    }

    /// Strict containment of a point in the open arc.
    pub fn contains(&self, t: &Angle) -> bool {
        let off = self.start.ccw_to(t);
        !off.is_zero() && off < self.length()
    }

    /// Whether `other` (as an open arc) is a subset of `self`.
    pub fn contains_arc(&self, other: &ArcInterval) -> bool {
        let off = self.start.ccw_to(&other.start);
        off + other.length() <= self.length()
    }

    /// Whether the closures of the two arcs are disjoint.
    pub fn closure_disjoint(&self, other: &ArcInterval) -> bool {
        self.start.ccw_to(&other.start) > self.length()
            && other.start.ccw_to(&self.start) > other.length()
    }

    /// Whether the open arcs are disjoint (shared endpoints allowed).
    pub fn disjoint(&self, other: &ArcInterval) -> bool {
        self.start.ccw_to(&other.start) >= self.length()
            && other.start.ccw_to(&self.start) >= other.length()
    }
}

impl fmt::Display for ArcInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end)
    }
}

/// `n^e` as an exact big integer.
pub(crate) fn big_pow(n: u32, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(n), e as usize)
}

/// Exact rational `1 / d^e`.
pub(crate) fn inv_pow(d: Degree, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), big_pow(d.get(), e))
}

#[cfg(test)]
pub(crate) fn gcd_reduced(a: &Angle) -> bool {
    use num_integer::Integer;
    a.numerator().gcd(a.denominator()).is_one()
}
