//! Stage pipelines and the right-operand precompute.

use crate::error::{Error, Result};
use crate::kernel::stage::{QdEntry, Stage, StageKind};
use crate::linform::{symbolic_operand, LinForm, Symbolic};
use crate::octo::DIM;
use crate::scalar::{Arith, Pow2};

/// Where a slot value comes from, before its `±2^k` factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// A raw coefficient `b_i`.
    Coef(usize),
    /// Lane `i` of the folded operand (output of the recipe's first half).
    Fold(usize),
    /// Lane `i` of the combined output (the scaled sums `s_k`).
    Scaled(usize),
    /// Constant zero.
    Zero,
}

/// A data-dependent value read by the quasi-diagonal stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    /// Declared value as a linear form in `b0..b7`.
    pub form: LinForm,
    pub source: Source,
    pub factor: Pow2,
}

impl Slot {
    pub fn new(name: impl Into<String>, form: LinForm, source: Source, factor: Pow2) -> Self {
        Slot {
            name: name.into(),
            form,
            source,
            factor,
        }
    }
}

/// Stage lists computing the right-operand values shared by all slots:
/// `fold` maps `b` to the folded operand, `combine` maps that to the scaled sums.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PrecomputeRecipe {
    pub fold: Vec<Stage>,
    pub combine: Vec<Stage>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pipeline {
    stages: Vec<Stage>,
    slots: Vec<Slot>,
    recipe: PrecomputeRecipe,
}

/// Location of one structurally nonzero stage entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EntryLocation {
    pub stage: usize,
    pub row: usize,
    pub col: usize,
}

fn check_chain(stages: &[Stage], slot_count: usize, start: usize) -> Result<usize> {
    let mut width = start;
    for (index, stage) in stages.iter().enumerate() {
        stage.validate(slot_count).map_err(|reason| Error::MalformedStage {
            index,
            name: stage.name().to_string(),
            reason,
        })?;
        if stage.in_dim() != width {
            return Err(Error::DimensionChain {
                index,
                name: stage.name().to_string(),
                expected: stage.in_dim(),
                found: width,
            });
        }
        width = stage.out_dim();
    }
    Ok(width)
}

impl Pipeline {
    /// Validates every stage, the 8 → … → 8 dimension chain of both the
    /// main stages and the recipe, and that every slot recipe evaluates to
    /// its declared form.
    pub fn new(stages: Vec<Stage>, slots: Vec<Slot>, recipe: PrecomputeRecipe) -> Result<Self> {
        let out = check_chain(&stages, slots.len(), DIM)?;
        if out != DIM {
            return Err(Error::PipelineShape {
                input: DIM,
                output: out,
            });
        }
        for part in [&recipe.fold, &recipe.combine] {
            let out = check_chain(part, 0, DIM)?;
            if out != DIM {
                return Err(Error::PipelineShape {
                    input: DIM,
                    output: out,
                });
            }
        }
        let p = Pipeline { stages, slots, recipe };
        let forms = p.precompute(&mut Symbolic, &symbolic_operand());
        for (slot, (s, got)) in p.slots.iter().zip(forms).enumerate() {
            if s.form != got {
                return Err(Error::SlotRecipe {
                    slot,
                    name: s.name.clone(),
                    recipe: got.to_string(),
                    declared: s.form.to_string(),
                });
            }
        }
        Ok(p)
    }

    /// A single pass-through stage over 8 lanes, no slots.
    pub fn identity() -> Self {
        Pipeline::new(
            vec![Stage::permute("identity", (0..DIM).collect())],
            Vec::new(),
            PrecomputeRecipe::default(),
        )
        .expect("identity pipeline is well formed")
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn recipe(&self) -> &PrecomputeRecipe {
        &self.recipe
    }

    pub fn slot_forms(&self) -> Vec<LinForm> {
        self.slots.iter().map(|s| s.form.clone()).collect()
    }

    pub fn slot_index(&self, name: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.name == name)
    }

    /// Lane widths between stages, starting with the input width.
    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(DIM)
            .chain(self.stages.iter().map(Stage::out_dim))
            .collect()
    }

    /// Slot values for right operand `b`, in slot order. The fold and
    /// combine stages run only if some slot reads them.
    pub fn precompute<A: Arith>(&self, arith: &mut A, b: &[A::Value]) -> Vec<A::Value> {
        assert_eq!(b.len(), DIM, "right operand must have 8 coefficients");
        let needs = |pred: fn(&Source) -> bool| self.slots.iter().any(|s| pred(&s.source));
        let needs_scaled = needs(|s| matches!(s, Source::Scaled(_)));
        let needs_fold = needs_scaled || needs(|s| matches!(s, Source::Fold(_)));

        let fold = needs_fold.then(|| run_stages(&self.recipe.fold, arith, b.to_vec()));
        let scaled = match (&fold, needs_scaled) {
            (Some(f), true) => Some(run_stages(&self.recipe.combine, arith, f.clone())),
            _ => None,
        };
        self.slots
            .iter()
            .map(|s| {
                let base = match s.source {
                    Source::Coef(i) => b[i].clone(),
                    Source::Fold(i) => fold.as_ref().expect("fold computed")[i].clone(),
                    Source::Scaled(i) => scaled.as_ref().expect("sums computed")[i].clone(),
                    Source::Zero => arith.zero(),
                };
                if s.factor == Pow2::ONE {
                    base
                } else {
                    arith.scale(&base, s.factor)
                }
            })
            .collect()
    }

    /// Runs the main stages on `x` using precomputed slot values.
    pub fn execute_with<A: Arith>(&self, arith: &mut A, x: &[A::Value], slots: &[A::Value]) -> Vec<A::Value> {
        assert_eq!(x.len(), DIM, "left operand must have 8 coefficients");
        self.stages
            .iter()
            .fold(x.to_vec(), |v, stage| stage.apply(arith, &v, slots))
    }

    /// Full product `x · b`: precompute, then the main stages. No
    /// certification is checked here; see
    /// [`CertifiedPipeline`](crate::verify::CertifiedPipeline).
    pub fn execute<A: Arith>(&self, arith: &mut A, x: &[A::Value], b: &[A::Value]) -> Vec<A::Value> {
        let slots = self.precompute(arith, b);
        self.execute_with(arith, x, &slots)
    }

    /// Every structurally nonzero entry of every main stage.
    pub fn entry_locations(&self) -> Vec<EntryLocation> {
        self.stages
            .iter()
            .enumerate()
            .flat_map(|(stage, s)| {
                s.entry_positions()
                    .into_iter()
                    .map(move |(row, col)| EntryLocation { stage, row, col })
            })
            .collect()
    }

    /// A copy with one stage entry's sign flipped.
    pub fn with_flipped_entry(&self, at: EntryLocation) -> Pipeline {
        let mut p = self.clone();
        p.stages[at.stage] = self.stages[at.stage].with_flipped_entry(at.row, at.col);
        p
    }

    /// A copy whose slot `slot` is the constant zero.
    pub fn with_slot_zeroed(&self, slot: usize) -> Pipeline {
        let mut p = self.clone();
        let s = &mut p.slots[slot];
        s.form = LinForm::zero();
        s.source = Source::Zero;
        s.factor = Pow2::ONE;
        p
    }

    /// A copy with one stage replaced, unchecked.
    pub fn with_stage(&self, index: usize, stage: Stage) -> Pipeline {
        let mut p = self.clone();
        p.stages[index] = stage;
        p
    }

    /// A copy with the sign of the output factor of `slot` flipped, unchecked.
    pub fn with_slot_negated(&self, slot: usize) -> Pipeline {
        let mut p = self.clone();
        let s = &mut p.slots[slot];
        s.factor = s.factor.negated();
        s.form = -&s.form;
        p
    }

    /// The single quasi-diagonal stage, if exactly one exists.
    pub fn data_stage(&self) -> Option<(usize, &[Vec<QdEntry>])> {
        let mut found = self.stages.iter().enumerate().filter_map(|(i, s)| match s.kind() {
            StageKind::QuasiDiagonal(rows) => Some((i, rows.as_slice())),
            _ => None,
        });
        let first = found.next()?;
        found.next().is_none().then_some(first)
    }
}

fn run_stages<A: Arith>(stages: &[Stage], arith: &mut A, v: Vec<A::Value>) -> Vec<A::Value> {
    stages.iter().fold(v, |v, s| s.apply(arith, &v, &[]))
}
