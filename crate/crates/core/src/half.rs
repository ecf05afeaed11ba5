use core::fmt;
use core::ops::{Add, Neg, Sub};

/// An element of ½ℤ, stored as twice its value.
///
/// Used for every quantum number that may be half-integer: the irrep label
/// `k`, the s₀ eigenvalue `m` and the total rotation eigenvalue `j`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    /// Exact conversion; `None` unless `x` is a multiple of ½.
    pub fn from_f64(x: f64) -> Option<Self> {
        let t = 2.0 * x;
        if !t.is_finite() || t.abs() > 9.0e15 {
            return None;
        }
        let r = libm::round(t);
        (r == t).then_some(HalfInt(r as i64))
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Whether `self - other` is an integer.
    pub const fn same_grid(self, other: HalfInt) -> bool {
        (self.0 - other.0) % 2 == 0
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Add<i64> for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: i64) -> HalfInt {
        HalfInt(self.0 + 2 * rhs)
    }
}

impl Sub<i64> for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: i64) -> HalfInt {
        HalfInt(self.0 - 2 * rhs)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        if self.is_integer() {
            s.serialize_i64(self.0 / 2)
        } else {
            s.serialize_f64(self.to_f64())
        }
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        HalfInt::from_f64(x)
            .ok_or_else(|| serde::de::Error::custom("expected an integer or half-integer"))
    }
}
