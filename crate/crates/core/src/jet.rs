//! Second-order forward-mode jets, used to get exact first and second
//! frequency derivatives of spectral integrands for the integration-by-parts
//! tail certificates.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value with first and second derivative with respect to one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet { v, d1: 0.0, d2: 0.0 }
    }

    pub const fn variable(v: f64) -> Self {
        Jet { v, d1: 1.0, d2: 0.0 }
    }

    /// Applies f with f(v), f'(v), f''(v) supplied by the caller.
    pub fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        Jet {
            v: f,
            d1: df * self.d1,
            d2: ddf * self.d1 * self.d1 + df * self.d2,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Jet::constant(1.0);
        }
        let nf = n as f64;
        let f = self.v.powi(n);
        let df = nf * self.v.powi(n - 1);
        let ddf = if n == 1 { 0.0 } else { nf * (nf - 1.0) * self.v.powi(n - 2) };
        self.chain(f, df, ddf)
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn scale(self, a: f64) -> Self {
        Jet { v: a * self.v, d1: a * self.d1, d2: a * self.d2 }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
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
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet { v: self.v + c, ..self }
    }
}

/// x·coth(x) for x ≥ 0, smooth and even; series below |x| = 0.05.
pub fn x_coth_x(x: Jet) -> Jet {
    let a = x.v.abs();
    if a < 0.05 {
        let x2 = a * a;
        let f = 1.0 + x2 * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 - x2 / 4725.0)));
        let df = x.v * (2.0 / 3.0 + x2 * (-4.0 / 45.0 + x2 * (12.0 / 945.0 - x2 * 8.0 / 4725.0)));
        let ddf = 2.0 / 3.0 + x2 * (-12.0 / 45.0 + x2 * (60.0 / 945.0 - x2 * 56.0 / 4725.0));
        return x.chain(f, df, ddf);
    }
    let e = (-2.0 * a).exp();
    let coth = (1.0 + e) / (1.0 - e);
    let csch2 = 4.0 * e / ((1.0 - e) * (1.0 - e));
    let f = a * coth;
    let df_abs = coth - a * csch2;
    let ddf = 2.0 * (f - 1.0) * csch2;
    x.chain(f, df_abs * x.v.signum(), ddf)
}
