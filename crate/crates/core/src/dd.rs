//! Double-double scalar used inside the closed-form pipeline.
//!
//! The four-term sums produced by photon subtraction cancel to roughly
//! `(1 - T)^2` of their individual size, so near `T = 1` plain `f64` loses
//! about ten digits. Every coefficient and every term of a sum is carried
//! in `Dd` and only the final observable is rounded to `f64`.

use core::cmp::Ordering;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use qd::Quad;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd(Quad);

impl Dd {
    pub const ZERO: Dd = Dd(Quad(0.0, 0.0));
    pub const ONE: Dd = Dd(Quad(1.0, 0.0));
    pub const PI: Dd = Dd(Quad::PI);
    pub const FRAC_PI_2: Dd = Dd(Quad(1.5707963267948966, 6.123233995736766e-17));

    #[inline]
    pub const fn new(x: f64) -> Dd {
        Dd(Quad(x, 0.0))
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.0 .0 + self.0 .1
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.0 .0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0 .0.is_finite() && self.0 .1.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.0 .0 < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn sqrt(self) -> Dd {
        if self.0 .0 == 0.0 {
            return Dd::ZERO;
        }
        Dd(self.0.sqrt())
    }

    pub fn exp(self) -> Dd {
        Dd(self.0.exp())
    }

    pub fn ln(self) -> Dd {
        Dd(self.0.ln())
    }

    pub fn cosh(self) -> Dd {
        let e = self.exp();
        (e + e.recip()) * 0.5
    }

    pub fn sinh(self) -> Dd {
        // the exponential form loses relative accuracy for tiny arguments
        if self.abs().hi() < 1e-3 {
            let x2 = self.sqr();
            let mut term = self;
            let mut acc = self;
            for k in 1..12 {
                term = term * x2 / ((2 * k) as f64 * (2 * k + 1) as f64);
                acc += term;
            }
            return acc;
        }
        let e = self.exp();
        (e - e.recip()) * 0.5
    }

    pub fn tanh(self) -> Dd {
        self.sinh() / self.cosh()
    }

    #[inline]
    pub fn recip(self) -> Dd {
        Dd(self.0.recip())
    }

    pub fn powi(self, n: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            k >>= 1;
        }
        acc
    }

    pub fn atan(self) -> Dd {
        if !self.is_finite() {
            return Dd::new(self.hi().atan());
        }
        if self.hi() < 0.0 {
            return -(-self).atan();
        }
        if self.hi() > 1.0 {
            return Dd::FRAC_PI_2 - self.recip().atan();
        }
        // halve the angle until the Taylor series converges fast
        let mut x = self;
        let mut doublings = 0u32;
        while x.hi() > 1e-2 {
            x = x / (Dd::ONE + (Dd::ONE + x.sqr()).sqrt());
            doublings += 1;
        }
        let x2 = x.sqr();
        let mut power = x;
        let mut acc = x;
        for k in 1..40 {
            power = -(power * x2);
            let term = power / (2 * k + 1) as f64;
            acc += term;
            if term.abs().hi() < 1e-34 * acc.abs().hi() {
                break;
            }
        }
        acc * (1u64 << doublings) as f64
    }

    /// `asin` on `[-1, 1]`; NaN outside.
    pub fn asin(self) -> Dd {
        let one_minus = Dd::ONE - self.sqr();
        if one_minus.hi() < 0.0 {
            return Dd::new(f64::NAN);
        }
        if one_minus.hi() == 0.0 {
            return if self.hi() > 0.0 { Dd::FRAC_PI_2 } else { -Dd::FRAC_PI_2 };
        }
        (self / one_minus.sqrt()).atan()
    }

    pub fn max(self, other: Dd) -> Dd {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for Dd {
    #[inline]
    fn from(x: f64) -> Dd {
        Dd::new(x)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        PartialOrd::partial_cmp(&self.0, &other.0)
    }
}

impl PartialEq<f64> for Dd {
    fn eq(&self, other: &f64) -> bool {
        *self == Dd::new(*other)
    }
}

impl PartialOrd<f64> for Dd {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.partial_cmp(&Dd::new(*other))
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $atr:ident, $af:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr for Dd {
            type Output = Dd;
            #[inline]
            fn $f(self, rhs: Dd) -> Dd {
                let ($a, $b) = (self.0, rhs.0);
                Dd($body)
            }
        }
        impl $tr<f64> for Dd {
            type Output = Dd;
            #[inline]
            fn $f(self, rhs: f64) -> Dd {
                let ($a, $b) = (self.0, Quad(rhs, 0.0));
                Dd($body)
            }
        }
        impl $tr<Dd> for f64 {
            type Output = Dd;
            #[inline]
            fn $f(self, rhs: Dd) -> Dd {
                let ($a, $b) = (Quad(self, 0.0), rhs.0);
                Dd($body)
            }
        }
        impl $atr for Dd {
            #[inline]
            fn $af(&mut self, rhs: Dd) {
                *self = $tr::$f(*self, rhs);
            }
        }
        impl $atr<f64> for Dd {
            #[inline]
            fn $af(&mut self, rhs: f64) {
                *self = $tr::$f(*self, rhs);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, |a, b| a.add_accurate(b));
binop!(Sub, sub, SubAssign, sub_assign, |a, b| a.sub_accurate(b));
binop!(Mul, mul, MulAssign, mul_assign, |a, b| a * b);
binop!(Div, div, DivAssign, div_assign, |a, b| a / b);

impl Sum for Dd {
    fn sum<I: Iterator<Item = Dd>>(iter: I) -> Dd {
        iter.fold(Dd::ZERO, |acc, x| acc + x)
    }
}
