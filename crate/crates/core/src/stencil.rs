//! Six-step stroboscopic stencils.
//!
//! Six consecutive elementary steps of either Fibonacci walk act as a
//! 13-site-wide linear map that only couples even offsets:
//!
//! ```text
//! u'[m] = Σ_k  A[2k](α,β)   u[m+2k] + B[2k](α,β)   d[m+2k]
//! d'[m] = Σ_k  B[-2k](-α,-β) u[m+2k] + A[-2k](-α,-β) d[m+2k]     k = -3..=3
//! ```
//!
//! [`closed_form_coefficients`] evaluates the trigonometric expressions for
//! `A` and `B`. [`oracle_coefficients`] reads the same numbers off an explicit
//! composition of six [`step`](crate::engine::step) calls on basis states and
//! is the reference the closed forms are tested against.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coins::six_step_word;
use crate::engine::step;
use crate::error::{Error, Result};
use crate::types::{AnglePair, CoinMatrix, FibModel, SpinorField};

/// Even site offsets of the stencil.
pub const OFFSETS: [i32; 7] = [-6, -4, -2, 0, 2, 4, 6];

/// Smallest lattice on which the oracle can read off all 13 offsets
/// without periodic wrap.
pub const MIN_ORACLE_SITES: usize = 16;

/// The `u` row of the six-step map: `A` couples `u`, `B` couples `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilCoefficients {
    pub model: FibModel,
    pub angles: AnglePair,
    pub a: BTreeMap<i32, f64>,
    pub b: BTreeMap<i32, f64>,
}

impl StencilCoefficients {
    pub fn a(&self, offset: i32) -> f64 {
        self.a.get(&offset).copied().unwrap_or(0.0)
    }

    pub fn b(&self, offset: i32) -> f64 {
        self.b.get(&offset).copied().unwrap_or(0.0)
    }

    /// Largest absolute difference between two tables over all offsets.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        OFFSETS
            .iter()
            .flat_map(|&o| {
                [
                    (self.a(o) - other.a(o)).abs(),
                    (self.b(o) - other.b(o)).abs(),
                ]
            })
            .fold(0.0, f64::max)
    }

    /// `(Σ (o/6) A[o], Σ (o/6) B[o])`.
    pub fn first_moments(&self) -> (f64, f64) {
        let p1 = OFFSETS.iter().map(|&o| o as f64 / 6.0 * self.a(o)).sum();
        let p2 = OFFSETS.iter().map(|&o| o as f64 / 6.0 * self.b(o)).sum();
        (p1, p2)
    }

    fn from_arrays(model: FibModel, angles: AnglePair, a: [f64; 7], b: [f64; 7]) -> Self {
        Self {
            model,
            angles,
            a: OFFSETS.iter().copied().zip(a).collect(),
            b: OFFSETS.iter().copied().zip(b).collect(),
        }
    }
}

/// Both rows of the six-step map, indexed by site offset.
#[derive(Debug, Clone, PartialEq)]
pub struct FullStencil {
    pub uu: BTreeMap<i32, f64>,
    pub ud: BTreeMap<i32, f64>,
    pub du: BTreeMap<i32, f64>,
    pub dd: BTreeMap<i32, f64>,
}

impl FullStencil {
    /// Builds the `d` row from the `u`-row tables at negated angles.
    pub fn from_closed_form(model: FibModel, angles: AnglePair) -> Self {
        let up = closed_form_coefficients(model, angles);
        let mirror = closed_form_coefficients(model, angles.negated());
        Self {
            uu: up.a.clone(),
            ud: up.b.clone(),
            du: OFFSETS.iter().map(|&o| (o, mirror.b(-o))).collect(),
            dd: OFFSETS.iter().map(|&o| (o, mirror.a(-o))).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let rows = [
            (&self.uu, &other.uu),
            (&self.ud, &other.ud),
            (&self.du, &other.du),
            (&self.dd, &other.dd),
        ];
        let mut worst = 0.0f64;
        for (x, y) in rows {
            for o in OFFSETS {
                let a = x.get(&o).copied().unwrap_or(0.0);
                let b = y.get(&o).copied().unwrap_or(0.0);
                worst = worst.max((a - b).abs());
            }
        }
        worst
    }

    /// Momentum-space symbol `Σ_o coef[o] e^{i q o}` of each block.
    pub fn symbol(&self, q: f64) -> CoinMatrix {
        let fourier = |row: &BTreeMap<i32, f64>| -> Complex64 {
            row.iter()
                .map(|(&o, &c)| Complex64::from_polar(c, q * o as f64))
                .sum()
        };
        CoinMatrix([
            [fourier(&self.uu), fourier(&self.ud)],
            [fourier(&self.du), fourier(&self.dd)],
        ])
    }
}

fn c(x: f64) -> f64 {
    x.cos()
}

fn s(x: f64) -> f64 {
    x.sin()
}

/// Evaluates the trigonometric closed forms of the `u`-row tables.
pub fn closed_form_coefficients(model: FibModel, angles: AnglePair) -> StencilCoefficients {
    let (a, b) = (angles.alpha(), angles.beta());
    let (ta, tb) = match model {
        FibModel::Coin => fib_coin_tables(a, b),
        FibModel::Step => fib_step_tables(a, b),
    };
    StencilCoefficients::from_arrays(model, angles, ta, tb)
}

fn fib_coin_tables(a: f64, b: f64) -> ([f64; 7], [f64; 7]) {
    let cab2 = c(a - b).powi(2);
    let a_m6 = c(a).powi(2) * c(b) * cab2 * c(2.0 * a - b);
    let a_m4 = -0.25
        * c(a)
        * cab2
        * (c(a - 2.0 * b) + 3.0 * c(3.0 * a - 2.0 * b) - 5.0 * c(a) + c(3.0 * a));
    let a_m2 = (-6.0 * c(2.0 * (a - b)) + 4.0 * c(4.0 * (a - b))
        - c(2.0 * (a + b))
        - c(2.0 * (a - 2.0 * b))
        + 2.0 * c(4.0 * a - 2.0 * b)
        - c(6.0 * a - 2.0 * b)
        + c(6.0 * a - 4.0 * b)
        - 2.0 * c(4.0 * a)
        - 2.0 * c(2.0 * b)
        + 6.0)
        / 16.0;
    let a_0 = 0.25
        * cab2
        * (-6.0 * c(2.0 * (a - b)) + c(4.0 * a - 2.0 * b) - 2.0 * c(2.0 * a)
            + c(4.0 * a)
            + c(2.0 * b)
            + 5.0);
    let a_2 = 0.125
        * cab2
        * (6.0 * c(2.0 * (a - b)) - 3.0 * c(4.0 * a - 2.0 * b) - 2.0 * c(2.0 * a)
            + c(4.0 * a)
            + c(2.0 * b)
            - 3.0);
    let a_4 = 0.5 * s(2.0 * a) * s(b) * cab2 * c(2.0 * a - b);

    let b_m6 = 0.5 * s(2.0 * a) * c(b) * cab2 * c(2.0 * a - b);
    let b_m4 = (s(2.0 * a) * s(b) * (s(b) - s(4.0 * a - 3.0 * b))
        + c(b)
            * (3.0 * s(2.0 * a - b) - s(4.0 * a - b) + 3.0 * s(4.0 * a - 3.0 * b)
                - s(6.0 * a - 3.0 * b)))
        / 8.0;
    let b_m2 = ((c(2.0 * a) - 3.0) * s(4.0 * a - 4.0 * b) - 2.0 * s(4.0 * a) * cab2) / 8.0;
    let b_0 = (-s(2.0 * a - 4.0 * b)
        + 4.0 * s(4.0 * a - 4.0 * b)
        + s(6.0 * a - 4.0 * b)
        + 2.0
            * c(a)
            * (s(a + 2.0 * b) - s(a - 2.0 * b) - 3.0 * s(3.0 * a - 2.0 * b)
                + s(5.0 * a - 2.0 * b))
        - 2.0 * s(2.0 * a)
        + 2.0 * s(4.0 * a))
        / 16.0;
    let b_2 = -c(a)
        * (s(3.0 * a - 4.0 * b)
            + 3.0 * s(5.0 * a - 4.0 * b)
            + 8.0 * s(a).powi(3) * c(2.0 * a - 2.0 * b)
            + 4.0 * s(a)
            - 2.0 * s(3.0 * a))
        / 16.0;
    let b_4 = -c(a).powi(2) * s(b) * cab2 * c(2.0 * a - b);

    (
        [a_m6, a_m4, a_m2, a_0, a_2, a_4, 0.0],
        [b_m6, b_m4, b_m2, b_0, b_2, b_4, 0.0],
    )
}

fn fib_step_tables(a: f64, b: f64) -> ([f64; 7], [f64; 7]) {
    let a_m6 = c(a).powi(4) * c(b).powi(2);
    let a_m4 = c(a).powi(2) * s(a) * (c(b).powi(2) * s(a) + 2.0 * c(a) * s(2.0 * b));
    let a_m2 =
        -0.125 * s(2.0 * a) * (-2.0 * s(2.0 * a) + s(2.0 * (a - b)) + 5.0 * s(2.0 * (a + b)));
    // The overall sign here is positive: with a leading minus the table no
    // longer sums to one and the six-step map stops being unitary.
    let a_0 = 0.125
        * (3.0 + c(4.0 * a)
            - (1.0 + 3.0 * c(4.0 * a)) * c(2.0 * b)
            - 16.0 * c(a) * s(a).powi(3) * s(2.0 * b));
    let a_2 = c(b).powi(2) * s(a).powi(4) - 2.0 * c(a).powi(3) * c(b) * s(a) * s(b)
        + c(a) * s(a).powi(3) * s(2.0 * b);
    let a_4 = c(a).powi(2) * c(b).powi(2) * s(a).powi(2);

    let b_m6 = c(a).powi(3) * c(b).powi(2) * s(a);
    let b_m4 = c(a) * c(b) * (s(a).powi(3) * c(b) + c(a) * (1.0 - 2.0 * c(2.0 * a)) * s(b));
    let b_m2 = (s(4.0 * a) * (3.0 * c(2.0 * b) - 1.0)
        - 4.0 * s(a).powi(2) * (2.0 * c(2.0 * a) + 1.0) * s(2.0 * b))
        / 8.0;
    let b_0 = (4.0 * s(a).powi(2) * (2.0 * c(2.0 * a) + 1.0) * s(2.0 * b)
        + s(4.0 * a) * (1.0 - 3.0 * c(2.0 * b)))
        / 8.0;
    let b_2 = c(a) * c(b) * (c(a) * (2.0 * c(2.0 * a) - 1.0) * s(b) - s(a).powi(3) * c(b));
    let b_4 = -s(a) * c(a).powi(3) * c(b).powi(2);

    (
        [a_m6, a_m4, a_m2, a_0, a_2, a_4, 0.0],
        [b_m6, b_m4, b_m2, b_0, b_2, b_4, 0.0],
    )
}

/// Response of six explicit steps to the two basis states at one site.
fn six_step_response(
    model: FibModel,
    angles: AnglePair,
    n: usize,
) -> Result<(usize, SpinorField, SpinorField)> {
    if n < MIN_ORACLE_SITES {
        return Err(Error::LatticeTooSmall(n, MIN_ORACLE_SITES));
    }
    let word = six_step_word(&model.with_angles(angles)).expect("fibonacci model");
    let m0 = n / 2;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut from_u = SpinorField::delta(n, m0, [one, zero])?;
    let mut from_d = SpinorField::delta(n, m0, [zero, one])?;
    for coin in &word {
        step(&mut from_u, coin);
        step(&mut from_d, coin);
    }
    Ok((m0, from_u, from_d))
}

/// Reads the `u`-row tables off six explicit steps on an `n`-site lattice.
pub fn oracle_coefficients(
    model: FibModel,
    angles: AnglePair,
    n: usize,
) -> Result<StencilCoefficients> {
    let full = oracle_full_stencil(model, angles, n)?;
    Ok(StencilCoefficients {
        model,
        angles,
        a: full.uu,
        b: full.ud,
    })
}

/// Both rows of the six-step map, read off explicit steps.
///
/// The input at site `m0` lands at `m0 - o` for a coefficient multiplying
/// `field[m + o]`.
pub fn oracle_full_stencil(model: FibModel, angles: AnglePair, n: usize) -> Result<FullStencil> {
    let (m0, from_u, from_d) = six_step_response(model, angles, n)?;
    let read = |v: &[Complex64]| -> BTreeMap<i32, f64> {
        OFFSETS
            .iter()
            .map(|&o| {
                let m = (m0 as i64 - o as i64).rem_euclid(n as i64) as usize;
                (o, v[m].re)
            })
            .collect()
    };
    Ok(FullStencil {
        uu: read(&from_u.u),
        ud: read(&from_d.u),
        du: read(&from_u.d),
        dd: read(&from_d.d),
    })
}

/// Largest modulus the explicit six-step response leaves outside the even
/// offsets `-6..=6` or in imaginary parts. Zero up to rounding.
pub fn oracle_leakage(model: FibModel, angles: AnglePair, n: usize) -> Result<f64> {
    let (m0, from_u, from_d) = six_step_response(model, angles, n)?;
    let mut worst = 0.0f64;
    for field in [&from_u, &from_d] {
        for (m, (u, d)) in field.u.iter().zip(&field.d).enumerate() {
            let off = m0 as i64 - m as i64;
            let on_stencil = off.abs() <= 6 && off % 2 == 0;
            if on_stencil {
                worst = worst.max(u.im.abs()).max(d.im.abs());
            } else {
                worst = worst.max(u.norm()).max(d.norm());
            }
        }
    }
    Ok(worst)
}

/// Advances a field by one six-step block using the closed-form tables.
///
/// Only the model and angles of `coeffs` are used for the `d` row, which is
/// regenerated from the closed forms at negated angles.
pub fn apply_stencil(field: &SpinorField, coeffs: &StencilCoefficients) -> Result<SpinorField> {
    let n = field.len();
    if n < 14 {
        return Err(Error::LatticeTooSmall(n, 14));
    }
    let mirror = closed_form_coefficients(coeffs.model, coeffs.angles.negated());
    let taps: Vec<(usize, f64, f64, f64, f64)> = OFFSETS
        .iter()
        .map(|&o| {
            (
                o.rem_euclid(n as i32) as usize,
                coeffs.a(o),
                coeffs.b(o),
                mirror.b(-o),
                mirror.a(-o),
            )
        })
        .collect();
    let mut out = field.clone();
    for m in 0..n {
        let mut u = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &(shift, uu, ud, du, dd) in &taps {
            let k = (m + shift) % n;
            u += field.u[k] * uu + field.d[k] * ud;
            d += field.u[k] * du + field.d[k] * dd;
        }
        out.u[m] = u;
        out.d[m] = d;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, TAU};

    fn angles(a: f64, b: f64) -> AnglePair {
        AnglePair::new(a, b).unwrap()
    }

    #[test]
    fn zero_angles_are_pure_transport() {
        for model in [FibModel::Coin, FibModel::Step] {
            let t = closed_form_coefficients(model, angles(0.0, 0.0));
            for o in OFFSETS {
                let expect_a = if o == -6 { 1.0 } else { 0.0 };
                assert!((t.a(o) - expect_a).abs() < 1e-15, "{model:?} A[{o}]");
                assert!(t.b(o).abs() < 1e-15, "{model:?} B[{o}]");
            }
            let o = oracle_coefficients(model, angles(0.0, 0.0), 16).unwrap();
            assert_eq!(o.a(-6), 1.0);
        }
    }

    #[test]
    fn top_offset_vanishes_exactly() {
        for model in [FibModel::Coin, FibModel::Step] {
            let t = closed_form_coefficients(model, angles(1.1, 0.4));
            assert_eq!(t.a(6), 0.0);
            assert_eq!(t.b(6), 0.0);
        }
    }

    #[test]
    fn closed_form_matches_oracle_examples() {
        let cases = [
            (FibModel::Coin, angles(FRAC_PI_4, FRAC_PI_8)),
            (FibModel::Step, angles(FRAC_PI_3, FRAC_PI_6)),
            (FibModel::Coin, angles(1.0, 0.3)),
        ];
        for (model, a) in cases {
            let cf = closed_form_coefficients(model, a);
            let or = oracle_coefficients(model, a, 32).unwrap();
            assert!(cf.max_abs_diff(&or) < 1e-10, "{model:?}");
        }
    }

    #[test]
    fn d_row_follows_angle_negation() {
        for model in [FibModel::Coin, FibModel::Step] {
            for k in 0..25 {
                let a = angles(0.29 * k as f64, 1.7 - 0.41 * k as f64);
                let closed = FullStencil::from_closed_form(model, a);
                let oracle = oracle_full_stencil(model, a, 24).unwrap();
                assert!(closed.max_abs_diff(&oracle) < 1e-10);
            }
        }
    }

    #[test]
    fn oracle_has_no_odd_offsets() {
        for model in [FibModel::Coin, FibModel::Step] {
            let leak = oracle_leakage(model, angles(0.7, 2.1), 32).unwrap();
            assert!(leak < 1e-15);
        }
    }

    #[test]
    fn oracle_rejects_small_lattices() {
        assert_eq!(
            oracle_coefficients(FibModel::Coin, angles(0.1, 0.2), 15),
            Err(Error::LatticeTooSmall(15, 16))
        );
    }

    #[test]
    fn symbol_is_unitary() {
        for model in [FibModel::Coin, FibModel::Step] {
            for k in 0..50 {
                let a = angles(0.123 * k as f64, 2.0 - 0.077 * k as f64);
                let full = FullStencil::from_closed_form(model, a);
                for j in 0..64 {
                    let q = TAU * j as f64 / 64.0;
                    assert!(full.symbol(q).is_unitary(1e-10));
                }
            }
        }
    }

    #[test]
    fn printed_sign_of_step_a0_breaks_unitarity() {
        let a = angles(0.7, 0.3);
        let mut full = FullStencil::from_closed_form(FibModel::Step, a);
        let flipped = -full.uu[&0];
        full.uu.insert(0, flipped);
        assert!(flipped.abs() > 0.1);
        assert!(!full.symbol(0.0).is_unitary(1e-3));
    }

    #[test]
    fn zeroth_moments() {
        for model in [FibModel::Coin, FibModel::Step] {
            let t = closed_form_coefficients(model, angles(0.9, 0.2));
            let sa: f64 = t.a.values().sum();
            let sb: f64 = t.b.values().sum();
            assert!((sa - 1.0).abs() < 1e-12);
            assert!(sb.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let z = SpinorField::zeros(32).unwrap();
        let t = closed_form_coefficients(FibModel::Coin, angles(0.4, 0.1));
        assert_eq!(apply_stencil(&z, &t).unwrap(), z);
    }

    #[test]
    fn delta_moves_six_sites_at_zero_angles() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let f = SpinorField::delta(32, 10, [one, zero]).unwrap();
        let t = closed_form_coefficients(FibModel::Coin, angles(0.0, 0.0));
        let g = apply_stencil(&f, &t).unwrap();
        assert!((g.u[16] - one).norm() < 1e-15);
        assert!((g.norm_sqr() - 1.0).abs() < 1e-15);
    }
}
