//! Exact symbolic certification of a pipeline against the schoolbook matrix.
//!
//! Every constant stage is an exact rational matrix and the single
//! data-dependent stage is a matrix of linear forms in `b`, so the product
//! of all stages is again a matrix of linear forms. Equality with the
//! schoolbook matrix entrywise is a proof that the pipeline computes
//! `x · b` for every input, by bilinearity.

use std::fmt;
use std::ops::Deref;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::pipeline::Pipeline;
use crate::linform::{LinForm, RatMatrix, SymMatrix};
use crate::octo::DIM;
use crate::scalar::Rational;
use crate::schoolbook::schoolbook_matrix;

/// Product of all stage matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Composition {
    /// No data-dependent stage: a constant matrix.
    Constant(RatMatrix),
    /// Exactly one data-dependent stage: entries are linear forms in `b`.
    Linear(SymMatrix),
}

impl Composition {
    /// Entry `(r, c)` as a linear form, if the composition is linear.
    pub fn linear(&self) -> Option<&SymMatrix> {
        match self {
            Composition::Linear(m) => Some(m),
            Composition::Constant(_) => None,
        }
    }
}

/// Multiplies out all stages exactly.
///
/// Fails with [`Error::Structural`] if two data-dependent stages occur,
/// since their product would be quadratic in `b`.
pub fn compose_symbolic(p: &Pipeline) -> Result<Composition> {
    let forms = p.slot_forms();
    let mut acc = Composition::Constant(RatMatrix::identity(DIM));
    let mut data_stage: Option<usize> = None;
    for (index, stage) in p.stages().iter().enumerate() {
        acc = match (stage.symbolic_matrix(&forms), acc) {
            (Some(sym), Composition::Constant(m)) => {
                data_stage = Some(index);
                Composition::Linear(sym.mul_const(&m))
            }
            (Some(_), Composition::Linear(_)) => {
                return Err(Error::Structural {
                    first: data_stage.expect("linear composition has a data stage"),
                    second: index,
                })
            }
            (None, Composition::Constant(m)) => Composition::Constant(stage.matrix().expect("constant stage").mul(&m)),
            (None, Composition::Linear(s)) => {
                Composition::Linear(s.premul_const(&stage.matrix().expect("constant stage")))
            }
        };
    }
    Ok(acc)
}

/// One mismatching entry of a composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub row: usize,
    pub col: usize,
    pub expected: LinForm,
    pub got: LinForm,
    pub difference: LinForm,
}

/// Result of [`certify`]; empty means the pipeline is exactly correct.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResidualReport {
    pub residuals: Vec<Residual>,
    /// Set when the pipeline could not be composed into linear forms at all.
    pub structural: Option<String>,
}

impl ResidualReport {
    pub fn is_certified(&self) -> bool {
        self.residuals.is_empty() && self.structural.is_none()
    }

    /// Output rows that carry at least one residual.
    pub fn rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self.residuals.iter().map(|r| r.row).collect();
        rows.dedup();
        rows
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = &self.structural {
            writeln!(f, "structural: {s}")?;
        }
        if self.is_certified() {
            return writeln!(f, "certified: 64 of 64 entries match");
        }
        if !self.residuals.is_empty() {
            writeln!(
                f,
                "{:>3} {:>3}  {:<28} {:<28} difference",
                "row", "col", "expected", "got"
            )?;
            for r in &self.residuals {
                writeln!(
                    f,
                    "{:>3} {:>3}  {:<28} {:<28} {}",
                    r.row,
                    r.col,
                    r.expected.to_string(),
                    r.got.to_string(),
                    r.difference
                )?;
            }
            writeln!(f, "{} of 64 entries differ", self.residuals.len())?;
        }
        Ok(())
    }
}

/// Compares the pipeline's composition with the schoolbook matrix entrywise.
pub fn certify(p: &Pipeline) -> ResidualReport {
    let composed = match compose_symbolic(p) {
        Ok(Composition::Linear(m)) => m,
        Ok(Composition::Constant(_)) => {
            return ResidualReport {
                residuals: Vec::new(),
                structural: Some("composition does not depend on b".into()),
            }
        }
        Err(e) => {
            return ResidualReport {
                residuals: Vec::new(),
                structural: Some(e.to_string()),
            }
        }
    };
    let expected = schoolbook_matrix();
    let residuals = (0..DIM)
        .flat_map(|r| (0..DIM).map(move |c| (r, c)))
        .filter_map(|(row, col)| {
            let (e, g) = (expected.get(row, col), composed.get(row, col));
            (e != g).then(|| Residual {
                row,
                col,
                expected: e.clone(),
                got: g.clone(),
                difference: g - e,
            })
        })
        .collect();
    ResidualReport {
        residuals,
        structural: None,
    }
}

/// A pipeline whose composition has been proven equal to the schoolbook
/// matrix. Only obtainable through [`certify_pipeline`].
#[derive(Clone, Debug)]
pub struct CertifiedPipeline(Pipeline);

impl CertifiedPipeline {
    pub fn pipeline(&self) -> &Pipeline {
        &self.0
    }
}

impl Deref for CertifiedPipeline {
    type Target = Pipeline;

    fn deref(&self) -> &Pipeline {
        &self.0
    }
}

pub fn certify_pipeline(p: Pipeline) -> Result<CertifiedPipeline, ResidualReport> {
    let report = certify(&p);
    if report.is_certified() {
        Ok(CertifiedPipeline(p))
    } else {
        Err(report)
    }
}

/// Outcome of [`solve_corrections`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionSolution {
    /// `(slot, form)` for every requested slot, in request order.
    pub forms: Vec<(usize, LinForm)>,
    /// Slots left undetermined by the equations; these are set to zero.
    pub free_slots: Vec<usize>,
}

impl CorrectionSolution {
    pub fn is_unique(&self) -> bool {
        self.free_slots.is_empty()
    }

    pub fn form(&self, slot: usize) -> Option<&LinForm> {
        self.forms.iter().find(|(s, _)| *s == slot).map(|(_, f)| f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("no assignment of the unknown slots certifies the pipeline ({0} inconsistent equations)")]
    Inconsistent(usize),
    #[error("pipeline does not have exactly one data-dependent stage")]
    NoDataStage,
    #[error("slot {0} is not referenced by the data-dependent stage")]
    Unreferenced(usize),
}

/// Finds linear forms for the `unknown` slots that make the pipeline
/// certify, treating every other slot as fixed.
///
/// The composition is `L · D · R` with constant `L`, `R` and `D` linear in
/// the slots, so each entry of the composed matrix is affine in the
/// unknowns. The resulting 64-equation system is solved exactly, once per
/// coefficient `b_q`. Free unknowns (if any) are set to zero and reported;
/// pivots are taken at the lowest slot index.
pub fn solve_corrections(p: &Pipeline, unknown: &[usize]) -> Result<CorrectionSolution, SolveError> {
    let Some((q, rows)) = p.data_stage() else {
        return Err(SolveError::NoDataStage);
    };
    let stages = p.stages();
    let product = |range: std::ops::Range<usize>, width: usize| {
        stages[range].iter().fold(RatMatrix::identity(width), |acc, s| {
            s.matrix().expect("constant stage").mul(&acc)
        })
    };
    let right = product(0..q, DIM);
    let left = product(q + 1..stages.len(), stages[q].out_dim());

    let forms = p.slot_forms();
    let expected = schoolbook_matrix();
    let n = unknown.len();
    // alpha[j][r * 8 + c]: coefficient of unknown j in composed entry (r, c).
    let mut alpha = vec![vec![Rational::zero(); DIM * DIM]; n];
    let mut target: Vec<LinForm> = (0..DIM * DIM).map(|k| expected.get(k / DIM, k % DIM).clone()).collect();
    let mut referenced = vec![false; n];
    for (row, entries) in rows.iter().enumerate() {
        for e in entries {
            let sign = if e.negate { -Rational::one() } else { Rational::one() };
            let j = unknown.iter().position(|&u| u == e.slot);
            if let Some(j) = j {
                referenced[j] = true;
            }
            for r in 0..DIM {
                let l = left.get(r, row);
                if l.is_zero() {
                    continue;
                }
                for c in 0..DIM {
                    let rr = right.get(e.col, c);
                    if rr.is_zero() {
                        continue;
                    }
                    let w = &sign * l * rr;
                    match j {
                        Some(j) => alpha[j][r * DIM + c] += w,
                        None => target[r * DIM + c] = &target[r * DIM + c] - &forms[e.slot].scale(&w),
                    }
                }
            }
        }
    }
    if let Some(j) = referenced.iter().position(|r| !r) {
        return Err(SolveError::Unreferenced(unknown[j]));
    }

    // Augmented system [A | T] with 8 right-hand sides (one per b_q).
    let mut sys: Vec<Vec<Rational>> = (0..DIM * DIM)
        .map(|k| {
            alpha
                .iter()
                .map(|a| a[k].clone())
                .chain(target[k].coeffs().iter().cloned())
                .collect()
        })
        .collect();
    let pivots = row_reduce(&mut sys, n);
    let inconsistent = sys[pivots.len()..]
        .iter()
        .filter(|row| row[n..].iter().any(|v| !v.is_zero()))
        .count();
    if inconsistent > 0 {
        return Err(SolveError::Inconsistent(inconsistent));
    }
    let mut solved = vec![LinForm::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        let coeffs: [Rational; DIM] = std::array::from_fn(|k| sys[i][n + k].clone());
        solved[col] = LinForm::from_coeffs(coeffs);
    }
    let free_slots = (0..n).filter(|j| !pivots.contains(j)).map(|j| unknown[j]).collect();
    Ok(CorrectionSolution {
        forms: unknown.iter().copied().zip(solved).collect(),
        free_slots,
    })
}

/// Reduced row echelon form over the first `n` columns; returns pivot columns.
fn row_reduce(m: &mut [Vec<Rational>], n: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for k in 0..m[r].len() {
                    let delta = &factor * &m[row][k];
                    m[r][k] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::build_pipeline;
    use crate::kernel::stage::{QdEntry, Stage};
    use crate::kernel::PrecomputeRecipe;

    #[test]
    fn identity_pipeline_composes_to_identity() {
        let c = compose_symbolic(&Pipeline::identity()).unwrap();
        assert_eq!(c, Composition::Constant(RatMatrix::identity(8)));
        assert!(!certify(&Pipeline::identity()).is_certified());
    }

    #[test]
    fn fixed_pipeline_certifies() {
        let report = certify(&build_pipeline());
        assert!(report.is_certified(), "{report}");
    }

    #[test]
    fn composed_spot_entries() {
        let m = compose_symbolic(&build_pipeline()).unwrap();
        let m = m.linear().unwrap();
        assert_eq!(*m.get(0, 0), LinForm::coef(0));
        assert_eq!(*m.get(7, 7), LinForm::coef(0));
    }

    #[test]
    fn zeroed_correction_is_detected() {
        let p = build_pipeline();
        let slot = p.slot_index("ms[1,3]").unwrap();
        let report = certify(&p.with_slot_zeroed(slot));
        assert!(!report.is_certified());
    }

    #[test]
    fn output_sign_flip_is_confined_to_its_row() {
        let p = build_pipeline();
        let last = p.stages().len() - 1;
        let flipped = p.with_flipped_entry(crate::kernel::EntryLocation {
            stage: last,
            row: 5,
            col: 5,
        });
        let report = certify(&flipped);
        assert_eq!(report.rows(), vec![5]);
        assert_eq!(report.residuals.len(), 8);
    }

    #[test]
    fn two_data_stages_are_a_structural_violation() {
        let p = build_pipeline();
        let qd = Stage::quasi_diagonal("extra", 8, (0..8).map(|k| vec![QdEntry::new(k, 0)]).collect());
        let mut stages = p.stages().to_vec();
        stages.push(qd);
        let p2 = Pipeline::new(stages, p.slots().to_vec(), p.recipe().clone()).unwrap();
        assert_eq!(
            compose_symbolic(&p2).unwrap_err(),
            Error::Structural { first: 6, second: 14 }
        );
        assert!(certify(&p2).structural.is_some());
    }

    #[test]
    fn report_renders_table() {
        let p = build_pipeline();
        let text = certify(&p.with_slot_zeroed(0)).to_string();
        assert!(text.starts_with("row col"));
        assert!(text.trim_end().ends_with("entries differ"));
    }

    fn slots_named(p: &Pipeline, prefix: &str) -> Vec<usize> {
        (0..p.slots().len())
            .filter(|&i| p.slots()[i].name.starts_with(prefix))
            .collect()
    }

    #[test]
    fn recovers_sum_corrections() {
        let p = build_pipeline();
        let slots = slots_named(&p, "ms[");
        let sol = solve_corrections(&p, &slots).unwrap();
        assert!(sol.is_unique());
        let expected = [
            [0, 0, 0, 0, 0, -1, 0, 0],
            [0, 0, 0, 0, 0, 0, -1, 0],
            [0, 0, 0, 0, 0, 0, 0, -1],
            [0, 0, -1, 0, 0, 0, -1, 0],
            [0, 0, 0, -1, 0, 0, 0, -1],
            [0, -1, 0, 0, 0, -1, 0, 0],
        ];
        for ((_, got), want) in sol.forms.iter().zip(expected) {
            assert_eq!(*got, LinForm::from_ints(want));
        }
    }

    #[test]
    fn recovers_difference_corrections_and_corrects_first_row() {
        let p = build_pipeline();
        let slots = slots_named(&p, "md[");
        let sol = solve_corrections(&p, &slots).unwrap();
        assert!(sol.is_unique());
        let got: Vec<String> = sol.forms.iter().map(|(_, f)| f.to_string()).collect();
        assert_eq!(got, ["-b5", "-b6", "-b7", "b3 - b7", "b1 - b5", "b2 - b6"]);
        // A repeated-b5 first row disagrees in two entries.
        let repeated = ["-b5", "-b5", "-b5"];
        let differing = got.iter().zip(repeated).filter(|(g, r)| g.as_str() != *r).count();
        assert_eq!(differing, 2);
    }

    #[test]
    fn recovers_all_slots_at_once() {
        let p = build_pipeline();
        let all: Vec<usize> = (0..p.slots().len()).collect();
        let sol = solve_corrections(&p, &all).unwrap();
        assert!(sol.is_unique());
        for (slot, form) in &sol.forms {
            assert_eq!(*form, p.slots()[*slot].form, "slot {}", p.slots()[*slot].name);
        }
    }

    #[test]
    fn nothing_unknown_is_trivially_consistent() {
        let sol = solve_corrections(&build_pipeline(), &[]).unwrap();
        assert!(sol.forms.is_empty() && sol.is_unique());
    }

    #[test]
    fn wrong_fixed_stage_is_inconsistent() {
        let p = build_pipeline();
        let last = p.stages().len() - 1;
        let broken = p.with_flipped_entry(crate::kernel::EntryLocation {
            stage: last,
            row: 0,
            col: 0,
        });
        let slots = slots_named(&broken, "m");
        assert!(matches!(
            solve_corrections(&broken, &slots),
            Err(SolveError::Inconsistent(_))
        ));
    }

    #[test]
    fn solve_needs_a_data_stage() {
        assert_eq!(
            solve_corrections(&Pipeline::identity(), &[]),
            Err(SolveError::NoDataStage)
        );
        let _ = PrecomputeRecipe::default();
    }
}
