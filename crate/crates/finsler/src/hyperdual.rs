//! Third-order truncated polynomial ("hyperdual") arithmetic.
//!
//! A [`Dual3`] is an element of `R[e1,e2,e3] / (e1^2, e2^2, e3^2)`: a real
//! part plus seven nilpotent components indexed by the nonempty subsets of
//! the three generators. Because every generator squares to zero, arithmetic
//! on these numbers propagates derivatives exactly (no truncation error):
//! seeding generator `i` on input coordinate `a` makes the `e_i` component of
//! `f(x)` equal to `df/dv_a`, the two-generator components hold second mixed
//! partials and the `e1 e2 e3` component holds the third partial.
//!
//! Repeated coordinates are handled by seeding several generators on the same
//! coordinate: with `x = a + e1 + e2`, the `e1 e2` component of `f(x)` is
//! `d2f/da2` (not half of it).

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Number of components: one per subset of the three generators.
const COMPONENTS: usize = 8;

/// Truncated polynomial carrying partial derivatives up to third order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual3 {
    /// `c[m]` multiplies the product of the generators in the bitmask `m`;
    /// `c[0]` is the real part.
    c: [f64; COMPONENTS],
}

impl Dual3 {
    pub const ZERO: Dual3 = Dual3 {
        c: [0.0; COMPONENTS],
    };
    pub const ONE: Dual3 = Dual3 {
        c: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    };

    /// A constant: real part only, all derivative components zero.
    pub fn constant(x: f64) -> Self {
        let mut c = [0.0; COMPONENTS];
        c[0] = x;
        Dual3 { c }
    }

    /// A variable with value `x`, seeded with unit coefficient on each of the
    /// listed generators (0, 1 or 2). Listing the same generator twice is a
    /// caller bug and panics.
    pub fn variable(x: f64, generators: &[usize]) -> Self {
        let mut out = Dual3::constant(x);
        for &g in generators {
            assert!(g < 3, "Dual3 has three generators, got index {g}");
            assert!(out.c[1 << g] == 0.0, "generator {g} seeded twice");
            out.c[1 << g] = 1.0;
        }
        out
    }

    /// A dual with a single nonzero component at the given subset bitmask.
    pub fn from_component(mask: usize, x: f64) -> Self {
        assert!(mask < COMPONENTS, "component mask out of range: {mask}");
        let mut c = [0.0; COMPONENTS];
        c[mask] = x;
        Dual3 { c }
    }

    /// The real part.
    pub fn re(&self) -> f64 {
        self.c[0]
    }

    /// Raw component for a generator-subset bitmask (0..8).
    pub fn component(&self, mask: usize) -> f64 {
        self.c[mask]
    }

    /// First derivative along generator `i`.
    pub fn d1(&self, i: usize) -> f64 {
        self.c[1 << i]
    }

    /// Second mixed derivative along generators `i` and `j` (`i != j`).
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i != j);
        self.c[(1 << i) | (1 << j)]
    }

    /// Third mixed derivative along all three generators.
    pub fn d3(&self) -> f64 {
        self.c[7]
    }

    /// Applies a smooth scalar function given its value and first three
    /// derivatives at the real part: with `x = a + n` (`n` nilpotent),
    /// `f(x) = f(a) + f'(a) n + f''(a)/2 n^2 + f'''(a)/6 n^3` exactly.
    pub fn compose(self, derivatives: [f64; 4]) -> Self {
        let mut n = self;
        n.c[0] = 0.0;
        let n2 = n * n;
        let n3 = n2 * n;
        let mut out =
            n * derivatives[1] + n2 * (derivatives[2] / 2.0) + n3 * (derivatives[3] / 6.0);
        out.c[0] = derivatives[0];
        out
    }

    /// Square root; requires a positive real part.
    pub fn sqrt(self) -> Self {
        let a = self.c[0];
        assert!(
            a > 0.0,
            "Dual3::sqrt requires a positive real part, got {a}"
        );
        let s = a.sqrt();
        self.compose([s, 0.5 / s, -0.25 / (s * a), 0.375 / (s * a * a)])
    }

    /// Real power; requires a positive real part.
    pub fn powf(self, p: f64) -> Self {
        let a = self.c[0];
        assert!(
            a > 0.0,
            "Dual3::powf requires a positive real part, got {a}"
        );
        self.compose([
            a.powf(p),
            p * a.powf(p - 1.0),
            p * (p - 1.0) * a.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * a.powf(p - 3.0),
        ])
    }

    /// Nonnegative integer power by repeated multiplication (exact for any
    /// real part, unlike `powf`).
    pub fn powi(self, k: u32) -> Self {
        let mut out = Dual3::ONE;
        for _ in 0..k {
            out = out * self;
        }
        out
    }
}

impl Add for Dual3 {
    type Output = Dual3;
    fn add(self, rhs: Dual3) -> Dual3 {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        Dual3 { c }
    }
}

impl AddAssign for Dual3 {
    fn add_assign(&mut self, rhs: Dual3) {
        *self = *self + rhs;
    }
}

impl Sub for Dual3 {
    type Output = Dual3;
    fn sub(self, rhs: Dual3) -> Dual3 {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
        Dual3 { c }
    }
}

impl Neg for Dual3 {
    type Output = Dual3;
    fn neg(self) -> Dual3 {
        let mut c = self.c;
        for a in c.iter_mut() {
            *a = -*a;
        }
        Dual3 { c }
    }
}

impl Mul for Dual3 {
    type Output = Dual3;
    fn mul(self, rhs: Dual3) -> Dual3 {
        // Subset convolution: generators are nilpotent, so a product term
        // survives only when the two masks are disjoint.
        let mut c = [0.0; COMPONENTS];
        for a in 0..COMPONENTS {
            for b in 0..COMPONENTS {
                if a & b == 0 {
                    c[a | b] += self.c[a] * rhs.c[b];
                }
            }
        }
        Dual3 { c }
    }
}

impl Mul<f64> for Dual3 {
    type Output = Dual3;
    fn mul(self, rhs: f64) -> Dual3 {
        let mut c = self.c;
        for a in c.iter_mut() {
            *a *= rhs;
        }
        Dual3 { c }
    }
}

impl Mul<Dual3> for f64 {
    type Output = Dual3;
    fn mul(self, rhs: Dual3) -> Dual3 {
        rhs * self
    }
}

impl Add<f64> for Dual3 {
    type Output = Dual3;
    fn add(self, rhs: f64) -> Dual3 {
        let mut c = self.c;
        c[0] += rhs;
        Dual3 { c }
    }
}

impl Sub<f64> for Dual3 {
    type Output = Dual3;
    fn sub(self, rhs: f64) -> Dual3 {
        let mut c = self.c;
        c[0] -= rhs;
        Dual3 { c }
    }
}
