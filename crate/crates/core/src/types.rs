//! State and operator types shared by the rest of the crate.
//!
//! The walker lives on a periodic lattice of `n` sites. At every site it
//! carries a two-component spinor `(u, d)`; the translation moves the `u`
//! component one site towards `+x` and the `d` component one site towards
//! `-x`.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The pair of angles `(alpha, beta)` parametrizing both Fibonacci walks.
///
/// Angles are reduced into `[0, 2π)` on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair {
    alpha: f64,
    beta: f64,
}

impl AnglePair {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for a in [alpha, beta] {
            if !a.is_finite() {
                return Err(Error::NonFiniteAngle(a));
            }
        }
        Ok(Self {
            alpha: reduce_angle(alpha),
            beta: reduce_angle(beta),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `(-alpha, -beta)`, used to build the `d` row of the six-step stencil.
    pub fn negated(&self) -> Self {
        Self {
            alpha: reduce_angle(-self.alpha),
            beta: reduce_angle(-self.beta),
        }
    }
}

fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A 2×2 complex matrix acting on the internal spinor, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix(pub [[Complex64; 2]; 2]);

impl CoinMatrix {
    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    pub fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    /// The generalized Hadamard coin `[[cos θ, sin θ], [sin θ, -cos θ]]`.
    pub fn hadamard(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_real([[c, s], [s, -c]])
    }

    /// Proper rotation `[[cos φ, -sin φ], [sin φ, cos φ]]`.
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::from_real([[c, -s], [s, c]])
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Self([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    /// Deviation of `C†C` from the identity, entrywise max.
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() < tol
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }
}

impl Mul for CoinMatrix {
    type Output = CoinMatrix;

    fn mul(self, rhs: CoinMatrix) -> CoinMatrix {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        CoinMatrix(out)
    }
}

/// Generalized Hadamard coin at angle `theta`.
pub fn make_hadamard_coin(theta: f64) -> CoinMatrix {
    CoinMatrix::hadamard(theta)
}

/// Matrix product `a · b`.
pub fn coin_multiply(a: &CoinMatrix, b: &CoinMatrix) -> CoinMatrix {
    *a * *b
}

/// Two complex amplitude arrays over a periodic lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub u: Vec<Complex64>,
    pub d: Vec<Complex64>,
    dx: f64,
}

impl SpinorField {
    /// All-zero field with the default spacing `2π / n`.
    pub fn zeros(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::LatticeTooSmall(n, 2));
        }
        Ok(Self {
            u: vec![ZERO; n],
            d: vec![ZERO; n],
            dx: TAU / n as f64,
        })
    }

    pub fn from_components(u: Vec<Complex64>, d: Vec<Complex64>) -> Result<Self> {
        if u.len() != d.len() {
            return Err(Error::SizeMismatch {
                expected: u.len(),
                found: d.len(),
            });
        }
        let n = u.len();
        if n < 2 {
            return Err(Error::LatticeTooSmall(n, 2));
        }
        Ok(Self {
            u,
            d,
            dx: TAU / n as f64,
        })
    }

    /// Spinor `spin` (not renormalized) concentrated on a single site.
    pub fn delta(n: usize, site: usize, spin: [Complex64; 2]) -> Result<Self> {
        let mut f = Self::zeros(n)?;
        let m = site % n;
        f.u[m] = spin[0];
        f.d[m] = spin[1];
        Ok(f)
    }

    /// `√N₀(m) · spin` with `N₀(m) ∝ exp(-((m - center) / width)²)`,
    /// normalized to unit total probability.
    pub fn gaussian(n: usize, center: f64, width_sites: f64, spin: [Complex64; 2]) -> Result<Self> {
        let mut f = Self::zeros(n)?;
        let spin_norm = (spin[0].norm_sqr() + spin[1].norm_sqr()).sqrt();
        let profile: Vec<f64> = (0..n)
            .map(|m| {
                // nearest periodic image of the center
                let mut z = m as f64 - center;
                z -= (z / n as f64).round() * n as f64;
                (-(z / width_sites).powi(2)).exp()
            })
            .collect();
        let total: f64 = profile.iter().sum();
        for (m, p) in profile.iter().enumerate() {
            let amp = (p / total).sqrt() / spin_norm;
            f.u[m] = spin[0] * amp;
            f.d[m] = spin[1] * amp;
        }
        Ok(f)
    }

    /// Initial condition of the density-profile figures: a Gaussian of
    /// width `width_sites` centered on the lattice with spinor `(1, i)/√2`.
    pub fn default_gaussian(n: usize, width_sites: f64) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::gaussian(
            n,
            (n / 2) as f64,
            width_sites,
            [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
        )
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn with_dx(mut self, dx: f64) -> Self {
        self.dx = dx;
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.d)
            .map(|(u, d)| u.norm_sqr() + d.norm_sqr())
            .sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            self.u
                .iter_mut()
                .chain(self.d.iter_mut())
                .for_each(|z| *z *= inv);
        }
    }

    /// Site-local coin: `(u_m, d_m) ← coin · (u_m, d_m)` for every `m`.
    pub fn apply_coin(&mut self, coin: &CoinMatrix) {
        let [[a, b], [c, d]] = coin.0;
        for (u, dn) in self.u.iter_mut().zip(self.d.iter_mut()) {
            let (u0, d0) = (*u, *dn);
            *u = a * u0 + b * d0;
            *dn = c * u0 + d * d0;
        }
    }

    /// Chiral shift: `u[m] ← u[m-1]`, `d[m] ← d[m+1]` (periodic).
    pub fn apply_translation(&mut self) {
        self.u.rotate_right(1);
        self.d.rotate_left(1);
    }

    pub fn apply_inverse_translation(&mut self) {
        self.u.rotate_left(1);
        self.d.rotate_right(1);
    }

    /// Max-norm distance between two fields of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .chain(self.d.iter().zip(&other.d))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        let comb = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()
        };
        Self {
            u: comb(&self.u, &other.u),
            d: comb(&self.d, &other.d),
            dx: self.dx,
        }
    }
}

/// Non-mutating form of [`SpinorField::apply_coin`].
pub fn apply_coin(field: &SpinorField, coin: &CoinMatrix) -> SpinorField {
    let mut out = field.clone();
    out.apply_coin(coin);
    out
}

/// Non-mutating form of [`SpinorField::apply_translation`].
pub fn apply_translation(field: &SpinorField) -> SpinorField {
    let mut out = field.clone();
    out.apply_translation();
    out
}

/// Which walk to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkModel {
    /// Fixed generalized Hadamard coin at every step.
    Standard { theta: f64 },
    /// Coins follow the matrix Fibonacci recursion (period 6).
    FibCoin(AnglePair),
    /// Step operators follow the Fibonacci recursion, periodically extended.
    FibStep(AnglePair),
}

impl WalkModel {
    pub fn name(&self) -> &'static str {
        match self {
            WalkModel::Standard { .. } => "standard",
            WalkModel::FibCoin(_) => "fib-coin",
            WalkModel::FibStep(_) => "fib-step",
        }
    }

    pub fn angles(&self) -> Option<AnglePair> {
        match self {
            WalkModel::Standard { .. } => None,
            WalkModel::FibCoin(a) | WalkModel::FibStep(a) => Some(*a),
        }
    }

    pub fn fibonacci_kind(&self) -> Option<FibModel> {
        match self {
            WalkModel::Standard { .. } => None,
            WalkModel::FibCoin(_) => Some(FibModel::Coin),
            WalkModel::FibStep(_) => Some(FibModel::Step),
        }
    }
}

impl fmt::Display for WalkModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkModel::Standard { theta } => write!(f, "standard(theta={theta})"),
            WalkModel::FibCoin(a) => write!(f, "fib-coin(alpha={}, beta={})", a.alpha, a.beta),
            WalkModel::FibStep(a) => write!(f, "fib-step(alpha={}, beta={})", a.alpha, a.beta),
        }
    }
}

/// The two Fibonacci walks, without their angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FibModel {
    Coin,
    Step,
}

impl FibModel {
    pub fn with_angles(self, angles: AnglePair) -> WalkModel {
        match self {
            FibModel::Coin => WalkModel::FibCoin(angles),
            FibModel::Step => WalkModel::FibStep(angles),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FibModel::Coin => "fib-coin",
            FibModel::Step => "fib-step",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hadamard_examples() {
        let h0 = make_hadamard_coin(0.0);
        assert!(h0.max_abs_diff(&CoinMatrix::from_real([[1.0, 0.0], [0.0, -1.0]])) < 1e-15);
        let h = make_hadamard_coin(FRAC_PI_2);
        assert!(h.max_abs_diff(&CoinMatrix::from_real([[0.0, 1.0], [1.0, 0.0]])) < 1e-15);
        let s = FRAC_1_SQRT_2;
        let h = make_hadamard_coin(FRAC_PI_4);
        assert!(h.max_abs_diff(&CoinMatrix::from_real([[s, s], [s, -s]])) < 1e-15);
        for z in h.0.iter().flatten() {
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn hadamard_is_unitary_involution_with_det_minus_one() {
        for k in 0..100 {
            let theta = k as f64 * 0.0731 - 3.0;
            let h = make_hadamard_coin(theta);
            assert!(h.is_unitary(1e-12));
            assert!((h * h).max_abs_diff(&CoinMatrix::identity()) < 1e-12);
            assert!((h.det() - c(-1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn products_of_hadamards() {
        let p = coin_multiply(&make_hadamard_coin(0.0), &make_hadamard_coin(FRAC_PI_2));
        assert!(p.max_abs_diff(&CoinMatrix::from_real([[0.0, 1.0], [-1.0, 0.0]])) < 1e-15);
        for k in 0..50 {
            let (a, b) = (0.37 * k as f64, 1.1 - 0.23 * k as f64);
            let p = coin_multiply(&make_hadamard_coin(a), &make_hadamard_coin(b));
            assert!(p.max_abs_diff(&CoinMatrix::rotation(a - b)) < 1e-12);
            assert!(p.is_unitary(1e-12));
        }
    }

    #[test]
    fn angles_reduce_mod_two_pi() {
        let a = AnglePair::new(-FRAC_PI_2, 5.0 * PI).unwrap();
        assert_abs_diff_eq!(a.alpha(), 1.5 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(a.beta(), PI, epsilon = 1e-12);
        assert!(AnglePair::new(f64::NAN, 0.0).is_err());
        let z = AnglePair::new(-1e-300, 0.0).unwrap();
        assert!(z.alpha() < TAU);
    }

    #[test]
    fn coin_on_delta_states() {
        let n = 8;
        let mut f = SpinorField::delta(n, 3, [c(0.0), c(1.0)]).unwrap();
        f.apply_coin(&make_hadamard_coin(0.0));
        assert_eq!(f.d[3], c(-1.0));
        assert_eq!(f.u[3], c(0.0));

        let mut f = SpinorField::delta(n, 3, [c(1.0), c(0.0)]).unwrap();
        f.apply_coin(&make_hadamard_coin(FRAC_PI_4));
        assert_abs_diff_eq!(f.u[3].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(f.d[3].re, FRAC_1_SQRT_2, epsilon = 1e-15);

        let g = SpinorField::default_gaussian(64, 4.0).unwrap();
        assert_eq!(apply_coin(&g, &CoinMatrix::identity()), g);
    }

    #[test]
    fn translation_orientation() {
        let n = 10;
        let f = SpinorField::delta(n, 4, [c(1.0), c(0.0)]).unwrap();
        let g = apply_translation(&f);
        assert_eq!(g.u[5], c(1.0));
        let f = SpinorField::delta(n, 4, [c(0.0), c(1.0)]).unwrap();
        let g = apply_translation(&f);
        assert_eq!(g.d[3], c(1.0));
        // wraps
        let f = SpinorField::delta(n, 9, [c(1.0), c(1.0)]).unwrap();
        let g = apply_translation(&f);
        assert_eq!(g.u[0], c(1.0));
        assert_eq!(g.d[8], c(1.0));

        let uni = SpinorField::from_components(vec![c(0.3); n], vec![c(-0.2); n]).unwrap();
        assert_eq!(apply_translation(&uni), uni);
    }

    #[test]
    fn translation_inverse_is_exact() {
        let f = SpinorField::default_gaussian(33, 3.0).unwrap();
        let mut g = f.clone();
        g.apply_translation();
        g.apply_inverse_translation();
        assert_eq!(f, g);
    }

    #[test]
    fn long_composition_keeps_norm() {
        let mut f = SpinorField::default_gaussian(128, 6.0).unwrap();
        let coin = make_hadamard_coin(0.77);
        for _ in 0..10_000 {
            f.apply_coin(&coin);
            f.apply_translation();
        }
        assert!((f.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_is_normalized_and_has_requested_spin() {
        let g = SpinorField::default_gaussian(2048, 20.0).unwrap();
        assert_abs_diff_eq!(g.norm_sqr(), 1.0, epsilon = 1e-12);
        let m = 1024;
        assert_abs_diff_eq!(g.d[m].im, g.u[m].re, epsilon = 1e-15);
        assert_eq!(g.dx(), TAU / 2048.0);
    }

    #[test]
    fn lattice_must_have_two_sites() {
        assert!(SpinorField::zeros(1).is_err());
        assert!(SpinorField::zeros(2).is_ok());
    }
}
