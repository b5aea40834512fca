//! Interval arithmetic with conservative endpoints.
//!
//! Rather than switching hardware rounding modes, every rounded operation
//! (`+`, `-`, `*`, `/`, `sqrt`, `powi(2)`) widens its result by one ULP on
//! each side via `next_down`/`next_up`. IEEE 754 rounds these primitives to
//! nearest, so the computed value is within half an ULP of the exact one and
//! the widened interval is guaranteed to contain it. Exact endpoint
//! selections (negation, hull, intersection, bisection) are not widened.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntervalError {
    /// Division by an interval that contains zero.
    #[error("division by an interval containing zero")]
    DivisionByZeroInterval,
    /// The operand lies entirely outside the function domain.
    #[error("interval entirely outside function domain")]
    EmptyDomain,
    /// Attempt to bisect a box along an axis of zero width.
    #[error("cannot bisect along axis {0}: zero width")]
    DegenerateAxis(usize),
}

/// A closed real interval `[lo, hi]` with `lo <= hi`.
///
/// There is no empty interval: `intersect` returns `None` when two intervals
/// are disjoint, and arithmetic never produces one.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[inline]
fn outward(lo: f64, hi: f64) -> Interval {
    Interval {
        lo: lo.next_down(),
        hi: hi.next_up(),
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite interval endpoint");
        Self { lo: x, hi: x }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    #[inline]
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    #[inline]
    pub fn add(self, rhs: Interval) -> Interval {
        outward(self.lo + rhs.lo, self.hi + rhs.hi)
    }

    #[inline]
    pub fn sub(self, rhs: Interval) -> Interval {
        outward(self.lo - rhs.hi, self.hi - rhs.lo)
    }

    #[inline]
    pub fn mul(self, rhs: Interval) -> Interval {
        let a = self.lo * rhs.lo;
        let b = self.lo * rhs.hi;
        let c = self.hi * rhs.lo;
        let d = self.hi * rhs.hi;
        outward(a.min(b).min(c.min(d)), a.max(b).max(c.max(d)))
    }

    /// Errors with [`IntervalError::DivisionByZeroInterval`] when `0 ∈ rhs`.
    /// No expression in this crate divides by a quantity that may vanish, so
    /// extended (split) division is deliberately unsupported.
    pub fn div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if rhs.contains_zero() {
            return Err(IntervalError::DivisionByZeroInterval);
        }
        let a = self.lo / rhs.lo;
        let b = self.lo / rhs.hi;
        let c = self.hi / rhs.lo;
        let d = self.hi / rhs.hi;
        Ok(outward(a.min(b).min(c.min(d)), a.max(b).max(c.max(d))))
    }

    #[inline]
    pub fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// Tight square: `[0, max(lo², hi²)]` when the interval straddles zero.
    #[inline]
    pub fn pow2(self) -> Interval {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.contains_zero() {
            Interval {
                lo: 0.0,
                hi: a.max(b).next_up(),
            }
        } else {
            outward(a.min(b), a.max(b)).max_lo(0.0)
        }
    }

    /// Square root over the nonnegative part of the interval; any negative
    /// part is clipped. Errors with [`IntervalError::EmptyDomain`] when the
    /// whole interval is negative.
    pub fn sqrt(self) -> Result<Interval, IntervalError> {
        if self.hi < 0.0 {
            return Err(IntervalError::EmptyDomain);
        }
        let lo = if self.lo <= 0.0 {
            0.0
        } else {
            self.lo.sqrt().next_down().max(0.0)
        };
        Ok(Interval {
            lo,
            hi: self.hi.sqrt().next_up(),
        })
    }

    #[inline]
    pub fn hull(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo.min(rhs.lo),
            hi: self.hi.max(rhs.hi),
        }
    }

    /// `None` when the intervals are disjoint.
    pub fn intersect(self, rhs: Interval) -> Option<Interval> {
        let lo = self.lo.max(rhs.lo);
        let hi = self.hi.min(rhs.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Clamp the lower endpoint up to `floor` (used for domain clipping).
    #[inline]
    pub fn max_lo(self, floor: f64) -> Interval {
        Interval {
            lo: self.lo.max(floor),
            hi: self.hi.max(floor),
        }
    }

    /// Split at the midpoint into two intervals sharing one endpoint.
    pub fn bisect(self) -> Result<(Interval, Interval), IntervalError> {
        let m = self.midpoint();
        if !(self.lo < m && m < self.hi) {
            return Err(IntervalError::DegenerateAxis(0));
        }
        Ok((
            Interval {
                lo: self.lo,
                hi: m,
            },
            Interval {
                lo: m,
                hi: self.hi,
            },
        ))
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::add(self, rhs)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::sub(self, rhs)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        Interval::mul(self, rhs)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::neg(self)
    }
}

/// An axis-aligned product of 2 or 3 intervals (a Cartesian box).
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct IntervalBox {
    dims: [Interval; 3],
    dim: usize,
}

const AXIS_LABELS: [&str; 3] = ["x", "y", "z"];

impl IntervalBox {
    pub fn new2(x: Interval, y: Interval) -> Self {
        Self {
            dims: [x, y, Interval::point(0.0)],
            dim: 2,
        }
    }

    pub fn new3(x: Interval, y: Interval, z: Interval) -> Self {
        Self {
            dims: [x, y, z],
            dim: 3,
        }
    }

    /// A degenerate (zero-width) box at a point.
    pub fn degenerate(coords: &[f64]) -> Self {
        Self::from_fn(coords.len(), |i| Interval::point(coords[i]))
    }

    /// Cube (or square) of the given half-edge centered at `center`.
    pub fn cube(center: &[f64], half_edge: f64) -> Self {
        assert!(half_edge >= 0.0);
        Self::from_fn(center.len(), |i| {
            Interval::new(center[i] - half_edge, center[i] + half_edge)
        })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize) -> Interval) -> Self {
        assert!(dim == 2 || dim == 3, "boxes have 2 or 3 dimensions");
        let mut dims = [Interval::point(0.0); 3];
        for (i, d) in dims.iter_mut().take(dim).enumerate() {
            *d = f(i);
        }
        Self { dims, dim }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn axis(&self, i: usize) -> Interval {
        debug_assert!(i < self.dim);
        self.dims[i]
    }

    pub fn axes(&self) -> &[Interval] {
        &self.dims[..self.dim]
    }

    /// Coordinate names, `x, y[, z]`.
    pub fn labels(&self) -> &'static [&'static str] {
        &AXIS_LABELS[..self.dim]
    }

    pub fn max_width(&self) -> f64 {
        self.axes()
            .iter()
            .map(Interval::width)
            .fold(0.0, f64::max)
    }

    /// Widest axis; ties broken by lowest index.
    pub fn widest_axis(&self) -> usize {
        let mut best = 0;
        let mut w = self.dims[0].width();
        for i in 1..self.dim {
            if self.dims[i].width() > w {
                w = self.dims[i].width();
                best = i;
            }
        }
        best
    }

    pub fn midpoint(&self) -> [f64; 3] {
        [
            self.dims[0].midpoint(),
            self.dims[1].midpoint(),
            self.dims[2].midpoint(),
        ]
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.axes().iter().zip(p).all(|(iv, &x)| iv.contains(x))
    }

    pub fn is_subset_of(&self, other: &IntervalBox) -> bool {
        self.dim == other.dim
            && self
                .axes()
                .iter()
                .zip(other.axes())
                .all(|(a, b)| a.is_subset_of(b))
    }

    /// Volume in 3D, area in 2D.
    pub fn volume(&self) -> f64 {
        self.axes().iter().map(Interval::width).product()
    }

    /// Grow the box by `amount` on each side of every axis.
    pub fn inflate(&self, amount: f64) -> IntervalBox {
        Self::from_fn(self.dim, |i| {
            Interval::new(self.dims[i].lo() - amount, self.dims[i].hi() + amount)
        })
    }

    /// Split along `axis` at the midpoint; the children partition the box.
    pub fn bisect(&self, axis: usize) -> Result<(IntervalBox, IntervalBox), IntervalError> {
        assert!(axis < self.dim, "axis {axis} out of range");
        let (lo, hi) = self.dims[axis]
            .bisect()
            .map_err(|_| IntervalError::DegenerateAxis(axis))?;
        let mut left = *self;
        left.dims[axis] = lo;
        let mut right = *self;
        right.dims[axis] = hi;
        Ok((left, right))
    }
}
