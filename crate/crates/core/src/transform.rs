//! Transform families used inside the tail inequality.
//!
//! Each family supplies a base function `g(x / d)` that is zero at the
//! origin and strictly increasing on the positive reals; the bound uses
//! `g(.)^k`. Everything is evaluated in log space so that large exponents
//! on large execution times do not overflow.

use core::f64::consts::FRAC_PI_2;
use core::fmt;

/// Which base function the bound raises to the power `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `g(x) = x`; the scale divisor plays no role.
    PowerK,
    /// `g(x) = arctan(x / d)`, saturating at `pi / 2`.
    Atan,
    /// `g(x) = tanh(x / d)`, saturating at `1`.
    Tanh,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::PowerK, Family::Atan, Family::Tanh];

    /// Method name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Family::PowerK => "MEMIK",
            Family::Atan => "ATAN",
            Family::Tanh => "TANH",
        }
    }

    /// Parses a method name, case-insensitively.
    pub fn from_name(name: &str) -> Option<Self> {
        let matches = |candidate: &str| name.eq_ignore_ascii_case(candidate);
        if matches("memik") || matches("power") || matches("power_k") {
            Some(Family::PowerK)
        } else if matches("atan") || matches("arctan") {
            Some(Family::Atan)
        } else if matches("tanh") {
            Some(Family::Tanh)
        } else {
            None
        }
    }

    pub fn is_saturating(self) -> bool {
        !matches!(self, Family::PowerK)
    }

    /// Least upper bound of the base function on `[0, inf)`.
    pub fn supremum(self) -> f64 {
        match self {
            Family::PowerK => f64::INFINITY,
            Family::Atan => FRAC_PI_2,
            Family::Tanh => 1.0,
        }
    }

    /// `g(x / d)`.
    pub fn base(self, x: f64, d: f64) -> f64 {
        match self {
            Family::PowerK => x,
            Family::Atan => libm::atan(x / d),
            Family::Tanh => libm::tanh(x / d),
        }
    }

    /// `ln g(x / d)`; `-inf` at `x = 0`.
    ///
    /// The tanh branch stays accurate where `tanh` itself rounds to one.
    pub fn ln_base(self, x: f64, d: f64) -> f64 {
        match self {
            Family::PowerK => libm::log(x),
            Family::Atan => libm::log(libm::atan(x / d)),
            Family::Tanh => {
                let y = x / d;
                if y > 0.5 {
                    // tanh(y) = 1 - 2 / (e^{2y} + 1)
                    libm::log1p(-2.0 / (libm::exp(2.0 * y) + 1.0))
                } else {
                    libm::log(libm::tanh(y))
                }
            }
        }
    }

    /// Solves `ln g(b / d) = level` for `b`.
    ///
    /// Returns `None` when `level` is at or above `ln sup g`, i.e. when no
    /// finite execution time reaches it.
    pub fn inverse_ln_base(self, level: f64, d: f64) -> Option<f64> {
        // A few ulps of slack so that `level` sitting exactly on the
        // supremum (up to rounding) is reported as unreachable.
        const SLACK: f64 = 8.0 * f64::EPSILON;
        match self {
            Family::PowerK => Some(libm::exp(level)),
            Family::Atan => {
                let t = libm::exp(level);
                if t >= FRAC_PI_2 * (1.0 - SLACK) {
                    None
                } else {
                    Some(d * libm::tan(t))
                }
            }
            Family::Tanh => {
                if level >= -SLACK {
                    return None;
                }
                // atanh(t) = (ln(1 + t) - ln(1 - t)) / 2 with 1 - t = -expm1(level)
                let gap = -libm::expm1(level);
                let t = libm::exp(level);
                Some(d * 0.5 * (libm::log1p(t) - libm::log(gap)))
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
