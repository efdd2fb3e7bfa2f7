//! The low-multiplicative-complexity product: 26 real multiplications.

pub mod build;
pub mod pipeline;
pub mod stage;

use std::sync::OnceLock;

use crate::octo::{Octo, DIM};
use crate::scalar::{Plain, Scalar};
use crate::verify::{certify_pipeline, CertifiedPipeline};

pub use build::{build_pipeline, precompute_recipe, CORRECTION_COUNT, OUTER_ZERO_ROWS};
pub use pipeline::{EntryLocation, Pipeline, PrecomputeRecipe, Slot, Source};
pub use stage::{QdEntry, Stage, StageKind};

/// The fixed pipeline, certified on first use.
///
/// # Panics
///
/// Panics if certification fails, which would mean the frozen stages are wrong.
pub fn certified_pipeline() -> &'static CertifiedPipeline {
    static CERTIFIED: OnceLock<CertifiedPipeline> = OnceLock::new();
    CERTIFIED.get_or_init(|| {
        certify_pipeline(build_pipeline())
            .unwrap_or_else(|report| panic!("fixed pipeline failed certification:\n{report}"))
    })
}

/// `x · b` with 26 general multiplications.
pub fn mul_fast<T: Scalar>(x: &Octo<T>, b: &Octo<T>) -> Octo<T> {
    certified_pipeline().multiply(x, b)
}

/// Values read by the data-dependent stage for one right operand.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecomputeSet<T> {
    /// `s_k = c_k / 8`.
    pub s: [T; DIM],
    /// Correction entries by slot name, in slot order.
    pub corrections: Vec<(String, T)>,
}

/// The eight scaled sums `s_k`, computed with additions and shifts only.
pub fn precompute_s<T: Scalar>(b: &Octo<T>) -> [T; DIM] {
    precompute_corrections(b).s
}

/// All slot values for `b`, from the certified pipeline.
pub fn precompute_corrections<T: Scalar>(b: &Octo<T>) -> PrecomputeSet<T> {
    certified_pipeline().precompute_set(b)
}

impl CertifiedPipeline {
    pub fn multiply<T: Scalar>(&self, x: &Octo<T>, b: &Octo<T>) -> Octo<T> {
        let y = self.execute(&mut Plain::<T>::new(), x.coeffs(), b.coeffs());
        Octo::new(y.try_into().expect("pipeline yields 8 lanes"))
    }

    pub fn precompute_set<T: Scalar>(&self, b: &Octo<T>) -> PrecomputeSet<T> {
        let values = self.precompute(&mut Plain::<T>::new(), b.coeffs());
        let mut s: [T; DIM] = std::array::from_fn(|_| T::zero());
        let mut corrections = Vec::new();
        for (slot, v) in self.slots().iter().zip(values) {
            debug_assert!(
                slot.form.eval(b.coeffs()).near(&v),
                "slot {} disagrees with its declared form",
                slot.name
            );
            match slot.source {
                Source::Scaled(k) if slot.factor == crate::scalar::Pow2::ONE => s[k] = v,
                _ => corrections.push((slot.name.clone(), v)),
            }
        }
        PrecomputeSet { s, corrections }
    }
}
