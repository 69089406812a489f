//! Closed-form bounds used to sanity-check the simulations.
//!
//! All bounds share four terms in `L = ln(n/2)` and `H = ln n + 1`:
//! `a/L + b/L^2 + c*H/L^3 + d*H^2/L^4`, with coefficients built from
//! `zeta(3)`.

use crate::torus::TorusSize;

/// `zeta(3) = sum i^-3`, rounded up at the fifth decimal.
pub const ZETA3: f64 = 1.20206;

/// Coefficients of `a/L + b/L^2 + c*H/L^3 + d*H^2/L^4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSeries {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl LogSeries {
    pub fn eval(&self, n: TorusSize) -> f64 {
        self.eval_at(n.get() as f64)
    }

    /// Evaluates at a real-valued size, for sizes beyond [`TorusSize::MAX`].
    pub fn eval_at(&self, n: f64) -> f64 {
        let l = (n / 2.0).ln();
        let h = n.ln() + 1.0;
        self.a / l + self.b / (l * l) + self.c * h / (l * l * l) + self.d * h * h / (l * l * l * l)
    }
}

/// Union bound on the probability of a forbidden four-cycle at a vertex.
pub const FORBIDDEN_CYCLE: LogSeries = LogSeries {
    a: 70.0 / 9.0,
    b: 65.0 / 2.0 * ZETA3 + 403.0 / 128.0,
    c: 24.0 * ZETA3 + 8.0,
    d: 3.0 / 4.0 * ZETA3 + 1.0 / 4.0,
};

/// Excess of the expected cycle-set size over 4.
pub const CYCLE_SET_EXCESS: LogSeries = LogSeries {
    a: 146.0 / 9.0,
    b: 89.0 / 2.0 * ZETA3 + 583.0 / 128.0,
    c: 24.0 * ZETA3 + 8.0,
    d: 3.0 / 4.0 * ZETA3 + 1.0 / 4.0,
};

/// Upper bound on the probability that some four-cycle rooted at a vertex
/// uses a long-range edge.
pub fn theoretical_eu_bound(n: TorusSize) -> f64 {
    FORBIDDEN_CYCLE.eval(n)
}

/// Upper bound on the expected number of four-cycles at a vertex.
pub fn cycle_set_size_bound(n: TorusSize) -> f64 {
    4.0 + CYCLE_SET_EXCESS.eval(n)
}

/// Lower bound `1 - 4 Pr(E_u)` on the probability that a vertex is
/// detected. Negative (vacuous) for small tori.
pub fn detection_lower_bound(n: TorusSize) -> f64 {
    1.0 - 4.0 * theoretical_eu_bound(n)
}
