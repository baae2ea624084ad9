//! Time stepping.

use crate::coins::model_word;
use crate::error::{Error, Result};
use crate::stencil::{apply_stencil, closed_form_coefficients};
use crate::types::{CoinMatrix, SpinorField, WalkModel};

/// One elementary step: coin, then chiral shift.
pub fn step(field: &mut SpinorField, coin: &CoinMatrix) {
    field.apply_coin(coin);
    field.apply_translation();
}

/// How the initial state was prepared, kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Gaussian { center: f64, width_sites: f64 },
    Delta { site: usize },
    Custom,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub field: SpinorField,
}

#[derive(Debug, Clone)]
pub struct WalkRun {
    pub model: WalkModel,
    pub n: usize,
    /// Total translation count.
    pub steps: usize,
    /// Always starts with step 0 and ends with `steps`.
    pub snapshots: Vec<Snapshot>,
    pub initial: InitialCondition,
    /// Labels of the first twelve coins actually applied.
    pub word_prefix: Vec<String>,
}

impl WalkRun {
    pub fn initial_field(&self) -> &SpinorField {
        &self.snapshots[0].field
    }

    pub fn final_field(&self) -> &SpinorField {
        &self.snapshots.last().expect("run has snapshots").field
    }

    /// Largest `|1 - Σ|Ψ|²|` over all snapshots.
    pub fn norm_drift(&self) -> f64 {
        self.snapshots
            .iter()
            .map(|s| (1.0 - s.field.norm_sqr()).abs())
            .fold(0.0, f64::max)
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }
}

/// Iterate `step` with the model's coin word for `steps` translations,
/// keeping a snapshot every `snapshot_stride` steps (plus the first and
/// last state).
pub fn run(
    model: &WalkModel,
    initial: &SpinorField,
    steps: usize,
    snapshot_stride: usize,
) -> Result<WalkRun> {
    if snapshot_stride == 0 {
        return Err(Error::InvalidStride);
    }
    if steps == 0 {
        return Err(Error::InvalidSteps);
    }
    let word = model_word(model);
    let mut field = initial.clone();
    let mut snapshots = vec![Snapshot {
        step: 0,
        field: field.clone(),
    }];
    for j in 0..steps {
        step(&mut field, word.coin_at(j));
        let done = j + 1;
        if done % snapshot_stride == 0 || done == steps {
            snapshots.push(Snapshot {
                step: done,
                field: field.clone(),
            });
        }
    }
    Ok(WalkRun {
        model: *model,
        n: initial.len(),
        steps,
        snapshots,
        initial: InitialCondition::Custom,
        word_prefix: (0..12).map(|j| word.label_at(j).to_string()).collect(),
    })
}

/// Same evolution as [`run`] over `6 · six_step_count` steps, but advanced
/// one six-step block at a time through the closed-form stencil. One
/// snapshot per block.
pub fn run_stroboscopic(
    model: &WalkModel,
    initial: &SpinorField,
    six_step_count: usize,
) -> Result<WalkRun> {
    let (kind, angles) = match (model.fibonacci_kind(), model.angles()) {
        (Some(k), Some(a)) => (k, a),
        _ => return Err(Error::NotStroboscopic(model.name())),
    };
    let coeffs = closed_form_coefficients(kind, angles);
    let mut field = initial.clone();
    let mut snapshots = vec![Snapshot {
        step: 0,
        field: field.clone(),
    }];
    for block in 1..=six_step_count {
        field = apply_stencil(&field, &coeffs)?;
        snapshots.push(Snapshot {
            step: 6 * block,
            field: field.clone(),
        });
    }
    let word = model_word(model);
    Ok(WalkRun {
        model: *model,
        n: initial.len(),
        steps: 6 * six_step_count,
        snapshots,
        initial: InitialCondition::Custom,
        word_prefix: (0..12).map(|j| word.label_at(j).to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::AnglePair;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn step_examples() {
        let n = 16;
        let mut f = SpinorField::delta(n, 8, [c(1.0), c(0.0)]).unwrap();
        step(&mut f, &CoinMatrix::hadamard(0.0));
        assert_eq!(f.u[9], c(1.0));

        let mut f = SpinorField::delta(n, 8, [c(0.0), c(1.0)]).unwrap();
        step(&mut f, &CoinMatrix::hadamard(0.0));
        assert_eq!(f.d[7], c(-1.0));

        let mut f = SpinorField::delta(n, 8, [c(1.0), c(0.0)]).unwrap();
        step(&mut f, &CoinMatrix::hadamard(FRAC_PI_4));
        assert!((f.u[9].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((f.d[7].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((f.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn standard_zero_is_pure_transport() {
        let n = 1024;
        let init = SpinorField::delta(n, 100, [c(1.0), c(0.0)]).unwrap();
        let r = run(&WalkModel::Standard { theta: 0.0 }, &init, 800, 100).unwrap();
        let f = r.final_field();
        assert_eq!(f.u[900], c(1.0));
        assert!((f.norm_sqr() - 1.0).abs() < 1e-15);
        let steps: Vec<_> = r.snapshots.iter().map(|s| s.step).collect();
        assert_eq!(steps, [0, 100, 200, 300, 400, 500, 600, 700, 800]);
    }

    #[test]
    fn snapshot_indices_include_final_step() {
        let init = SpinorField::default_gaussian(64, 3.0).unwrap();
        let model = WalkModel::FibCoin(AnglePair::new(0.3, 0.2).unwrap());
        let r = run(&model, &init, 25, 10).unwrap();
        let steps: Vec<_> = r.snapshots.iter().map(|s| s.step).collect();
        assert_eq!(steps, [0, 10, 20, 25]);
        assert!(matches!(
            run(&model, &init, 25, 0),
            Err(Error::InvalidStride)
        ));
    }

    #[test]
    fn fib_coin_zero_angles_transports_rigidly() {
        let n = 512;
        let init = SpinorField::default_gaussian(n, 10.0).unwrap();
        let model = WalkModel::FibCoin(AnglePair::new(0.0, 0.0).unwrap());
        let r = run(&model, &init, 60, 60).unwrap();
        let f = r.final_field();
        // every coin is diag(±1), so |u| moves +60 and |d| moves -60
        for m in 0..n {
            assert!((f.u[(m + 60) % n].norm() - init.u[m].norm()).abs() < 1e-14);
            assert!((f.d[(m + n - 60) % n].norm() - init.d[m].norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn word_prefix_is_recorded() {
        let init = SpinorField::default_gaussian(32, 2.0).unwrap();
        let model = WalkModel::FibStep(AnglePair::new(0.3, 0.2).unwrap());
        let r = run(&model, &init, 6, 6).unwrap();
        assert_eq!(r.word_prefix.len(), 12);
        assert_eq!(
            &r.word_prefix[..6],
            ["alpha", "beta", "alpha", "alpha", "beta", "alpha"]
        );
    }

    #[test]
    fn stroboscopic_zero_blocks_is_identity() {
        let init = SpinorField::default_gaussian(64, 3.0).unwrap();
        let model = WalkModel::FibCoin(AnglePair::new(FRAC_PI_2, 0.1).unwrap());
        let r = run_stroboscopic(&model, &init, 0).unwrap();
        assert_eq!(r.final_field(), &init);
        let std = WalkModel::Standard { theta: 0.1 };
        assert!(run_stroboscopic(&std, &init, 1).is_err());
    }
}
