//! Truncated Taylor arithmetic in one real variable.
//!
//! A [`Jet`] of order `d` holds `c_0, ..., c_d` with `f(x0 + ε) = Σ c_i ε^i + O(ε^{d+1})`.
//! Arithmetic on jets yields exact derivatives of compositions up to rounding, which is
//! how cutoff profiles are differentiated.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest supported derivative order.
pub const MAX_ORDER: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    order: usize,
    c: [f64; MAX_ORDER + 1],
}

impl Jet {
    /// The identity `x` expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; MAX_ORDER + 1];
        c[0] = value;
        Jet { order, c }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient `c_i`.
    pub fn coeff(&self, i: usize) -> f64 {
        self.c[i]
    }

    /// `f^{(i)}(x0) = i! c_i`.
    pub fn derivative(&self, i: usize) -> f64 {
        self.c[i] * (1..=i).map(|v| v as f64).product::<f64>()
    }

    /// All derivatives `f^{(0)}, ..., f^{(order)}`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order).map(|i| self.derivative(i)).collect()
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.c.iter_mut().for_each(|v| *v *= s);
        self
    }

    pub fn offset(mut self, s: f64) -> Self {
        self.c[0] += s;
        self
    }

    pub fn exp(self) -> Self {
        let mut e = Self::constant(self.c[0].exp(), self.order);
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * e.c[k - j];
            }
            e.c[k] = acc / k as f64;
        }
        e
    }

    pub fn sqrt(self) -> Self {
        let r0 = self.c[0].sqrt();
        let mut r = Self::constant(r0, self.order);
        for k in 1..=self.order {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= r.c[j] * r.c[k - j];
            }
            r.c[k] = acc / (2.0 * r0);
        }
        r
    }

    pub fn recip(self) -> Self {
        Self::constant(1.0, self.order) / self
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for i in 0..=self.order {
            self.c[i] += rhs.c[i];
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        for i in 0..=self.order {
            self.c[i] -= rhs.c[i];
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = Jet::constant(0.0, self.order);
        for k in 0..=self.order {
            out.c[k] = (0..=k).map(|j| self.c[j] * rhs.c[k - j]).sum();
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let mut q = Jet::constant(0.0, self.order);
        for k in 0..=self.order {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= rhs.c[j] * q.c[k - j];
            }
            q.c[k] = acc / rhs.c[0];
        }
        q
    }
}
