//! Time-ordered coin words for the Fibonacci walks.
//!
//! `FibCoin` applies the coins of the matrix recursion `C_{j+1} = C_j C_{j-1}`
//! with `C_0 = C(α)` and `C_1 = C(α)C(β)`. The sequence has period six.
//!
//! `FibStep` follows the step-operator recursion `U_j = U_{j-1} U_{j-2}` with
//! `U_0 = T C(α)` and `U_1 = T C(α) T C(β)`. Expanding `U_2 U_1 U_0` and
//! reading it right to left gives the six coins `(α, β, α, α, β, α)`, which
//! is the word applied by the periodic extension used here.

use crate::error::{Error, Result};
use crate::types::{AnglePair, CoinMatrix, WalkModel};

/// Coins in application order (index 0 first).
#[derive(Debug, Clone, PartialEq)]
pub struct CoinWord {
    pub coins: Vec<CoinMatrix>,
    pub labels: Vec<String>,
    pub period: Option<usize>,
}

impl CoinWord {
    pub fn len(&self) -> usize {
        self.coins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coins.is_empty()
    }

    /// Coin applied at step `j`. Aperiodic words panic past their end.
    pub fn coin_at(&self, j: usize) -> &CoinMatrix {
        match self.period {
            Some(p) => &self.coins[j % p],
            None => &self.coins[j],
        }
    }

    pub fn label_at(&self, j: usize) -> &str {
        match self.period {
            Some(p) => &self.labels[j % p],
            None => &self.labels[j],
        }
    }

    /// Largest deviation from `coins[j] == coins[j mod p]` over the stored
    /// letters. Zero for aperiodic words.
    pub fn periodicity_defect(&self) -> f64 {
        let Some(p) = self.period else {
            return 0.0;
        };
        (p..self.coins.len())
            .map(|j| self.coins[j].max_abs_diff(&self.coins[j % p]))
            .fold(0.0, f64::max)
    }
}

/// `C_0 .. C_{count-1}` from the matrix recursion, computed literally.
pub fn fib_coin_sequence(angles: AnglePair, count: usize) -> CoinWord {
    let count = count.max(1);
    let mut coins = Vec::with_capacity(count);
    coins.push(CoinMatrix::hadamard(angles.alpha()));
    if count > 1 {
        coins.push(CoinMatrix::hadamard(angles.alpha()) * CoinMatrix::hadamard(angles.beta()));
    }
    while coins.len() < count {
        let j = coins.len();
        coins.push(coins[j - 1] * coins[j - 2]);
    }
    let labels = (0..count).map(|j| format!("C{}", j % 6)).collect();
    CoinWord {
        coins,
        labels,
        period: Some(6),
    }
}

/// Closed forms of the first six recursion coins.
pub fn closed_form_coin(angles: AnglePair, j: usize) -> Result<CoinMatrix> {
    let (a, b) = (angles.alpha(), angles.beta());
    Ok(match j {
        0 | 3 => CoinMatrix::hadamard(a),
        1 => CoinMatrix::rotation(a - b),
        2 => CoinMatrix::hadamard(2.0 * a - b),
        4 => CoinMatrix::rotation(-(a - b)),
        5 => CoinMatrix::hadamard(b),
        _ => return Err(Error::CoinIndexOutOfRange(j)),
    })
}

/// The applied coin word of the periodically extended step-sequence walk,
/// `translations` letters long.
pub fn fib_step_coin_word(angles: AnglePair, translations: usize) -> CoinWord {
    const BLOCK: [bool; 3] = [false, true, false]; // true = beta
    let ca = CoinMatrix::hadamard(angles.alpha());
    let cb = CoinMatrix::hadamard(angles.beta());
    let len = translations.max(1);
    let (coins, labels) = (0..len)
        .map(|j| {
            if BLOCK[j % 3] {
                (cb, "beta".to_string())
            } else {
                (ca, "alpha".to_string())
            }
        })
        .unzip();
    CoinWord {
        coins,
        labels,
        period: Some(3),
    }
}

/// Periodic word for any model, truncated to one period.
pub fn model_word(model: &WalkModel) -> CoinWord {
    match model {
        WalkModel::Standard { theta } => CoinWord {
            coins: vec![CoinMatrix::hadamard(*theta)],
            labels: vec!["theta".to_string()],
            period: Some(1),
        },
        WalkModel::FibCoin(a) => fib_coin_sequence(*a, 6),
        WalkModel::FibStep(a) => fib_step_coin_word(*a, 3),
    }
}

/// The first six coins of a Fibonacci model in application order.
pub fn six_step_word(model: &WalkModel) -> Option<[CoinMatrix; 6]> {
    let word = match model {
        WalkModel::Standard { .. } => return None,
        _ => model_word(model),
    };
    Some(std::array::from_fn(|j| *word.coin_at(j)))
}

/// Translation-count clock of the step-sequence walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibonacciClock {
    /// Step-operator index.
    pub j: usize,
    /// Translations applied before operator `j`: `Σ_{k<j} F(k)`.
    pub r: u128,
    /// `F(0) .. F(j)` with `F(0) = 1`, `F(1) = 2`.
    pub f: Vec<u128>,
}

pub fn fibonacci_clock(j: usize) -> Result<FibonacciClock> {
    let mut f: Vec<u128> = Vec::with_capacity(j + 1);
    for k in 0..=j {
        let next = match k {
            0 => 1,
            1 => 2,
            _ => f[k - 1]
                .checked_add(f[k - 2])
                .ok_or(Error::ClockOverflow(k))?,
        };
        f.push(next);
    }
    let mut r: u128 = 0;
    for v in &f[..j] {
        r = r.checked_add(*v).ok_or(Error::ClockOverflow(j))?;
    }
    Ok(FibonacciClock { j, r, f })
}
