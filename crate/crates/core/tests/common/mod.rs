//! Shared test support: an independent linear-response model of the slopes
//! and published table values.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Superstable parameters `s_0..s_11`, computed separately with 40-digit
/// arithmetic (root of `f^{2^n}(1/2) = 1/2`).
pub const SUPERSTABLE: [f64; 12] = [
    2.0,
    3.2360679774997896964,
    3.49856169932770152,
    3.5546408627688248654,
    3.566667379856268514,
    3.5692435316371103378,
    3.5697952937499446205,
    3.5699134654223485148,
    3.5699387742333054878,
    3.5699441946080649332,
    3.5699453554864685809,
    3.5699456041110784381,
];

pub fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Forcing {
    Multiplicative,
    /// Additive with second-harmonic weight `E` (0 for the plain cosine).
    Additive(f64),
}

#[derive(Clone, Copy)]
struct C(f64, f64);

impl C {
    fn mul(self, o: C) -> C {
        C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn scale(self, s: f64) -> C {
        C(self.0 * s, self.1 * s)
    }
    fn add(self, r: f64) -> C {
        C(self.0 + r, self.1)
    }
    fn turn(t: f64) -> C {
        C((2.0 * PI * t).cos(), (2.0 * PI * t).sin())
    }
}

/// First-order model of `S_n^∓` at `ε → 0`: along the superstable cycle the
/// period map displaces the critical point by `A δα + ε u(θ)`, with `A` the
/// α-derivative of `f^{2^n}(1/2)` and `u` a trigonometric polynomial carried
/// by the forcing harmonics. Tangency at the extremes of `u` gives
/// `(α', β') = (−max u / A, −min u / A)` sorted.
pub fn linear_response_slopes(n: usize, omega: f64, forcing: Forcing) -> (f64, f64) {
    let s = SUPERSTABLE[n];
    let period = 1usize << n;
    let mut p = vec![0.5];
    for _ in 1..period {
        let x = *p.last().unwrap();
        p.push(s * x * (1.0 - x));
    }
    let fp: Vec<f64> = p.iter().map(|x| s * (1.0 - 2.0 * x)).collect();
    let mut a = 0.25;
    for j in 1..period {
        a = fp[j] * a + p[j] * (1.0 - p[j]);
    }
    let (r1, r2) = (C::turn(-omega), C::turn(-2.0 * omega));
    let (mut c1, mut c2) = (C(0.0, 0.0), C(0.0, 0.0));
    for j in 0..period {
        let (h1, h2) = match forcing {
            Forcing::Multiplicative => (s * p[j] * (1.0 - p[j]), 0.0),
            Forcing::Additive(e) => (1.0, e),
        };
        c1 = c1.scale(fp[j]).add(h1).mul(r1);
        c2 = c2.scale(fp[j]).add(h2).mul(r2);
    }
    let u = |t: f64| c1.mul(C::turn(t)).0 + c2.mul(C::turn(2.0 * t)).0;
    let du = |t: f64| -2.0 * PI * (c1.mul(C::turn(t)).1 + 2.0 * c2.mul(C::turn(2.0 * t)).1);
    let d2u = |t: f64| -4.0 * PI * PI * (c1.mul(C::turn(t)).0 + 4.0 * c2.mul(C::turn(2.0 * t)).0);
    // coarse scan, then Newton on u' from the best nodes
    let m = 4096;
    let polish = |mut t: f64| {
        for _ in 0..50 {
            let step = du(t) / d2u(t);
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        u(t)
    };
    let best = |sign: f64| {
        let j = (0..m).max_by(|&a, &b| (sign * u(a as f64 / m as f64)).total_cmp(&(sign * u(b as f64 / m as f64)))).unwrap();
        polish(j as f64 / m as f64)
    };
    let (umax, umin) = (best(1.0), best(-1.0));
    let (x, y) = (-umax / a, -umin / a);
    (x.min(y), x.max(y))
}

/// Published `α'_n` columns, `n = 0..=11`.
pub mod published {
    /// Multiplicative cosine, ω = golden mean.
    pub const FLM_GOLDEN: [f64; 12] = [
        -2.0000000000e+00,
        -5.8329149229e+00,
        -8.4942599432e+00,
        -1.6351279467e+01,
        -1.1252460775e+01,
        -1.2243326651e+01,
        -1.8079693906e+01,
        -3.4735234067e+01,
        -2.9583312211e+01,
        -4.1569457725e+01,
        -7.8965495522e+01,
        -7.4500733455e+01,
    ];
    /// Multiplicative cosine, ω = 2·golden.
    pub const FLM_2GOLDEN: [f64; 12] = [
        -2.0000000000e+00,
        -4.7793787548e+00,
        -9.9177338359e+00,
        -6.9333908531e+00,
        -7.5678156188e+00,
        -1.1183261803e+01,
        -2.1488744556e+01,
        -1.8302110429e+01,
        -2.5717669657e+01,
        -4.8853450105e+01,
        -4.6091257360e+01,
        -7.1498516059e+01,
    ];
    /// Additive cosine, ω = golden mean.
    pub const ADD_GOLDEN: [f64; 12] = [
        -4.0000000000e+00,
        -8.1607837043e+00,
        -1.1166652707e+01,
        -2.1221554117e+01,
        -1.4564213015e+01,
        -1.5837452605e+01,
        -2.3384207858e+01,
        -4.4925217655e+01,
        -3.8261700375e+01,
        -5.3763965691e+01,
        -1.0213020106e+02,
        -9.6355685578e+01,
    ];
    /// Additive cosine, ω = 2·golden.
    pub const ADD_2GOLDEN: [f64; 12] = [
        -4.0000000000e+00,
        -6.2417012728e+00,
        -1.2036825830e+01,
        -8.2891818940e+00,
        -9.0187641307e+00,
        -1.3318271659e+01,
        -2.5587438370e+01,
        -2.1792312360e+01,
        -3.0621808757e+01,
        -5.8169300479e+01,
        -5.4880369083e+01,
        -8.5132515708e+01,
    ];
    /// Two harmonics, E = 0.1, ω = golden mean.
    pub const TWO_E1_GOLDEN: [f64; 12] = [
        -4.4000000000e+00,
        -8.5708073961e+00,
        -1.2367363641e+01,
        -2.2002414361e+01,
        -1.5466051366e+01,
        -1.7124001858e+01,
        -2.5233583736e+01,
        -4.5526415150e+01,
        -4.0793050977e+01,
        -5.9579098646e+01,
        -1.0695246126e+02,
        -1.0464907069e+02,
    ];
    /// Two harmonics, E = 0.001, ω = golden mean.
    pub const TWO_E3_GOLDEN: [f64; 12] = [
        -4.0040000000e+00,
        -8.1643491058e+00,
        -1.1178647202e+01,
        -2.1229290655e+01,
        -1.4573231305e+01,
        -1.5850170411e+01,
        -2.3400073191e+01,
        -4.4929300750e+01,
        -3.8285483755e+01,
        -5.3822109356e+01,
        -1.0217709608e+02,
        -9.6437862923e+01,
    ];
    /// `δ_{1,n}`, multiplicative cosine, ω = golden, `n = 1..=11`.
    pub const DELTA1_FLM_GOLDEN: [f64; 11] = [
        1.36175279e+01,
        8.29844510e+00,
        7.69807112e+00,
        7.57782290e+00,
        7.55390503e+00,
        7.54857906e+00,
        7.54747726e+00,
        7.54724159e+00,
        7.54719154e+00,
        7.54718076e+00,
        7.54717846e+00,
    ];
    /// `δ_{1,n}`, multiplicative cosine, ω = 2·golden, `n = 1..=11`.
    pub const DELTA1_FLM_2GOLDEN: [f64; 11] = [
        1.11579415e+01,
        7.57460662e+00,
        6.97211386e+00,
        6.83972864e+00,
        6.81347460e+00,
        6.80758174e+00,
        6.80631795e+00,
        6.80604419e+00,
        6.80598601e+00,
        6.80597353e+00,
        6.80597086e+00,
    ];
    /// `δ_{1,n}`, additive cosine, ω = golden, `n = 1..=11`.
    pub const DELTA1_ADD_GOLDEN: [f64; 11] = [
        9.52608610e+00,
        8.35338804e+00,
        8.23204689e+00,
        8.20385506e+00,
        8.19937833e+00,
        8.19817945e+00,
        8.19796400e+00,
        8.19791815e+00,
        8.19790879e+00,
        8.19790672e+00,
        8.19790628e+00,
    ];
}

#[test]
fn oracle_matches_exact_anchor() {
    let (a, b) = linear_response_slopes(0, golden(), Forcing::Multiplicative);
    assert!((a + 2.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
    let (a, b) = linear_response_slopes(0, golden(), Forcing::Additive(0.1));
    assert!((a + 4.4).abs() < 1e-12 && (b - 3.6).abs() < 1e-12);
}
