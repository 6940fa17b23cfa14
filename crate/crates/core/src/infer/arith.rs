/// Scalar arithmetic used by the activation kernels.
///
/// Inference runs on plain `f64` through [`Plain`]; the learner runs the same
/// kernels on a recording tape to get gradients. Branching (clamp guards,
/// interval tightening, min/max aggregation) is decided on [`Arith::value`],
/// so both instances follow the same control flow.
pub trait Arith {
    type S: Copy;

    fn constant(&mut self, v: f64) -> Self::S;
    fn value(&self, s: Self::S) -> f64;
    fn add(&mut self, a: Self::S, b: Self::S) -> Self::S;
    fn sub(&mut self, a: Self::S, b: Self::S) -> Self::S;
    fn mul(&mut self, a: Self::S, b: Self::S) -> Self::S;
    fn div(&mut self, a: Self::S, b: Self::S) -> Self::S;
    /// Clamp into `[0, 1]`.
    fn clamp01(&mut self, a: Self::S) -> Self::S;

    fn one_minus(&mut self, a: Self::S) -> Self::S {
        let one = self.constant(1.0);
        self.sub(one, a)
    }
}

/// Plain floating-point evaluation.
#[derive(Debug, Default, Clone, Copy)]
pub struct Plain;

impl Arith for Plain {
    type S = f64;

    fn constant(&mut self, v: f64) -> f64 {
        v
    }
    fn value(&self, s: f64) -> f64 {
        s
    }
    fn add(&mut self, a: f64, b: f64) -> f64 {
        a + b
    }
    fn sub(&mut self, a: f64, b: f64) -> f64 {
        a - b
    }
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        a * b
    }
    fn div(&mut self, a: f64, b: f64) -> f64 {
        a / b
    }
    fn clamp01(&mut self, a: f64) -> f64 {
        a.clamp(0.0, 1.0)
    }
}

/// A `[lower, upper]` pair over an arithmetic scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<S> {
    pub lower: S,
    pub upper: S,
}

impl<S: Copy> Interval<S> {
    pub fn new(lower: S, upper: S) -> Interval<S> {
        Interval { lower, upper }
    }

    pub fn complement<A: Arith<S = S>>(self, ar: &mut A) -> Interval<S> {
        Interval { lower: ar.one_minus(self.upper), upper: ar.one_minus(self.lower) }
    }
}
