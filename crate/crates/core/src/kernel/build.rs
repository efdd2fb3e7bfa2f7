//! The fixed 26-multiplication pipeline.
//!
//! Write `x'` for `x` with coordinates 0 and 4 swapped. Then
//!
//! ```text
//! B(b)·x = R8 · ( B''·x' + 2·M0·x' )        R8 = diag(1,1,1,1,1,-1,-1,-1)
//! B''    = (H2⊗I4) · ½[E ⊕ F] · (H2⊗I4)
//! E      = diag(-1,1,1,1) · (Te + 2·Ms)     F = Tf + 2·Md
//! ```
//!
//! where `Te`, `Tf` are symmetric Toeplitz blocks `[[P,Q],[Q,P]]` of 2×2
//! circulants, each factored once more by `H2⊗I2` and then by `H2` per 2×2
//! block. The three butterfly levels contribute `½·½·½`, which is folded into
//! the eight diagonal values `s_k = c_k / 8`; the outer `½` and the `2` of the
//! corrections cancel, so `Ms` and `Md` enter unscaled and `M0` enters doubled.
//!
//! Lane layout of the data-dependent stage (input 18 lanes → output 22):
//!
//! | in      | out     | content                                  |
//! |---------|---------|------------------------------------------|
//! | 0..4    | 0..4    | sum half, diagonal `s0..s3`              |
//! | 4..7    | 4..8    | sum half lanes 1..3, correction `Ms`     |
//! | 7..11   | 8..12   | difference half, diagonal `s4..s7`       |
//! | 11..14  | 12..16  | difference half lanes 1..3, correction `Md` |
//! | 14..18  | 16..22  | `x'1..x'4`, correction `2·M0` rows 1,2,3,5,6,7 |
//!
//! Correction columns and rows that are identically zero carry no lane, so
//! every stage entry influences the product.

use crate::kernel::pipeline::{Pipeline, PrecomputeRecipe, Slot, Source};
use crate::kernel::stage::{h2_kron_identity, identity_kron_h2, QdEntry, Stage};
use crate::linform::LinForm;
use crate::scalar::{Pow2, Rational, Scalar};

/// `c_k` coefficient rows; `s_k = c_k / 8`.
pub const SUM_FORMS: [[i64; 8]; 8] = [
    [-1, 1, 1, 1, -1, 1, 1, 1],
    [-1, -1, 1, -1, -1, -1, 1, -1],
    [-1, 1, -1, -1, -1, 1, -1, -1],
    [-1, -1, -1, 1, -1, -1, -1, 1],
    [-1, -1, -1, -1, 1, 1, 1, 1],
    [-1, 1, -1, 1, 1, -1, 1, -1],
    [-1, -1, 1, 1, 1, 1, -1, -1],
    [-1, 1, 1, -1, 1, -1, -1, 1],
];

struct Correction {
    name: &'static str,
    /// Row within its correction block.
    row: usize,
    /// Input lane of the data-dependent stage.
    lane: usize,
    form: [i64; 8],
    source: Source,
    factor: Pow2,
}

const NEG: Pow2 = Pow2::MINUS_ONE;
const POS: Pow2 = Pow2::ONE;
const TWICE: Pow2 = Pow2 {
    negative: false,
    exp: 1,
};
const NEG_TWICE: Pow2 = Pow2 { negative: true, exp: 1 };

const fn corr(name: &'static str, row: usize, lane: usize, form: [i64; 8], source: Source, factor: Pow2) -> Correction {
    Correction {
        name,
        row,
        lane,
        form,
        source,
        factor,
    }
}

// Derived by solving for these slots against the schoolbook matrix (see
// `verify::solve_corrections` and the `recovers_*` tests there).
//
// Folded operand: u = (-b0+b4, b1+b5, b2+b6, b3+b7, -b0-b4, b1-b5, b2-b6, b3-b7).
const SUM_CORRECTIONS: [Correction; 6] = [
    corr("ms[0,1]", 0, 4, [0, 0, 0, 0, 0, -1, 0, 0], Source::Coef(5), NEG),
    corr("ms[0,2]", 0, 5, [0, 0, 0, 0, 0, 0, -1, 0], Source::Coef(6), NEG),
    corr("ms[0,3]", 0, 6, [0, 0, 0, 0, 0, 0, 0, -1], Source::Coef(7), NEG),
    corr("ms[1,3]", 1, 6, [0, 0, -1, 0, 0, 0, -1, 0], Source::Fold(2), NEG),
    corr("ms[2,1]", 2, 4, [0, 0, 0, -1, 0, 0, 0, -1], Source::Fold(3), NEG),
    corr("ms[3,2]", 3, 5, [0, -1, 0, 0, 0, -1, 0, 0], Source::Fold(1), NEG),
];

// Row 0 is (-b5, -b6, -b7); (-b5, -b5, -b5) does not certify.
const DIFF_CORRECTIONS: [Correction; 6] = [
    corr("md[0,1]", 0, 11, [0, 0, 0, 0, 0, -1, 0, 0], Source::Coef(5), NEG),
    corr("md[0,2]", 0, 12, [0, 0, 0, 0, 0, 0, -1, 0], Source::Coef(6), NEG),
    corr("md[0,3]", 0, 13, [0, 0, 0, 0, 0, 0, 0, -1], Source::Coef(7), NEG),
    corr("md[1,2]", 1, 12, [0, 0, 0, 1, 0, 0, 0, -1], Source::Fold(7), POS),
    corr("md[2,3]", 2, 13, [0, 1, 0, 0, 0, -1, 0, 0], Source::Fold(5), POS),
    corr("md[3,1]", 3, 11, [0, 0, 1, 0, 0, 0, -1, 0], Source::Fold(6), POS),
];

// Doubled outer correction; rows index the six nonzero rows 1,2,3,5,6,7.
const OUTER_CORRECTIONS: [Correction; 6] = [
    corr("m0[1,1]", 0, 14, [2, 0, 0, 0, 0, 0, 0, 0], Source::Coef(0), TWICE),
    corr("m0[2,2]", 1, 15, [2, 0, 0, 0, 0, 0, 0, 0], Source::Coef(0), TWICE),
    corr("m0[3,3]", 2, 16, [2, 0, 0, 0, 0, 0, 0, 0], Source::Coef(0), TWICE),
    corr("m0[5,4]", 3, 17, [0, 0, 0, 0, 0, -2, 0, 0], Source::Coef(5), NEG_TWICE),
    corr("m0[6,4]", 4, 17, [0, 0, 0, 0, 0, 0, -2, 0], Source::Coef(6), NEG_TWICE),
    corr("m0[7,4]", 5, 17, [0, 0, 0, 0, 0, 0, 0, -2], Source::Coef(7), NEG_TWICE),
];

/// Number of correction slots (all three correction blocks).
pub const CORRECTION_COUNT: usize = 18;

/// Rows of the doubled outer correction that are identically zero (rows 0
/// and 4). A layout that merges all eight rows spends one addition on each.
pub const OUTER_ZERO_ROWS: usize = 2;

/// Stages computing the folded operand and the eight scaled sums.
pub fn precompute_recipe() -> PrecomputeRecipe {
    let pairs = identity_kron_h2(0, 4);
    PrecomputeRecipe {
        fold: vec![
            Stage::negate_lanes("negate b0", 8, &[0]),
            Stage::butterfly("fold halves", 8, h2_kron_identity(0, 4)),
        ],
        combine: vec![
            Stage::permute("group for first level", vec![4, 2, 1, 3, 0, 6, 5, 7]),
            Stage::butterfly("first-level pairs", 8, pairs.clone()),
            Stage::permute("group for second level", vec![0, 2, 1, 3, 5, 6, 4, 7]),
            Stage::butterfly("second-level pairs", 8, pairs),
            Stage::permute("order sums", vec![0, 1, 2, 3, 5, 4, 7, 6]),
            Stage::sign_scale("scale by 1/8", vec![Pow2::new(false, -3); 8]),
        ],
    }
}

fn slots() -> Vec<Slot> {
    let eighth = Rational::from_i64(1).mul_pow2(-3);
    let sums = SUM_FORMS.iter().enumerate().map(|(k, c)| {
        Slot::new(
            format!("s{k}"),
            LinForm::from_ints(*c).scale(&eighth),
            Source::Scaled(k),
            Pow2::ONE,
        )
    });
    let corrections = SUM_CORRECTIONS
        .iter()
        .chain(&DIFF_CORRECTIONS)
        .chain(&OUTER_CORRECTIONS)
        .map(|c| Slot::new(c.name, LinForm::from_ints(c.form), c.source, c.factor));
    sums.chain(corrections).collect()
}

fn data_stage() -> Stage {
    let diag = |lane0: usize, slot0: usize| -> Vec<Vec<QdEntry>> {
        (0..4).map(|k| vec![QdEntry::new(lane0 + k, slot0 + k)]).collect()
    };
    let block = |cs: &[Correction], slot0: usize, rows: usize| -> Vec<Vec<QdEntry>> {
        let mut out = vec![Vec::new(); rows];
        for (i, c) in cs.iter().enumerate() {
            out[c.row].push(QdEntry::new(c.lane, slot0 + i));
        }
        out
    };
    let rows = [
        diag(0, 0),
        block(&SUM_CORRECTIONS, 8, 4),
        diag(7, 4),
        block(&DIFF_CORRECTIONS, 14, 4),
        block(&OUTER_CORRECTIONS, 20, 6),
    ]
    .concat();
    Stage::quasi_diagonal("data-dependent products", 18, rows)
}

/// Builds the fixed pipeline. Its symbolic composition equals the schoolbook
/// matrix; see [`certify`](crate::verify::certify).
pub fn build_pipeline() -> Pipeline {
    let inner =
        |offset_a: usize, offset_b: usize| [h2_kron_identity(offset_a, 2), h2_kron_identity(offset_b, 2)].concat();
    let pair =
        |offset_a: usize, offset_b: usize| [identity_kron_h2(offset_a, 2), identity_kron_h2(offset_b, 2)].concat();
    let stages = vec![
        Stage::permute("swap x0 and x4", vec![4, 1, 2, 3, 0, 5, 6, 7]),
        Stage::fan_out("copy correction inputs", 8, vec![0, 1, 2, 3, 4, 5, 6, 7, 1, 2, 3, 4]),
        Stage::butterfly("outer butterfly", 12, h2_kron_identity(0, 4)),
        Stage::fan_out(
            "split halves",
            12,
            vec![0, 1, 2, 3, 1, 2, 3, 4, 5, 6, 7, 5, 6, 7, 8, 9, 10, 11],
        ),
        Stage::butterfly("inner butterfly", 18, inner(0, 7)),
        Stage::butterfly("pair butterfly", 18, pair(0, 7)),
        data_stage(),
        Stage::butterfly("pair butterfly", 22, pair(0, 8)),
        Stage::butterfly("inner butterfly", 22, inner(0, 8)),
        Stage::sum(
            "merge corrections",
            22,
            (0..4)
                .map(|k| vec![k, 4 + k])
                .chain((0..4).map(|k| vec![8 + k, 12 + k]))
                .chain((16..22).map(|k| vec![k]))
                .collect(),
        ),
        Stage::negate_lanes("restore first row sign", 14, &[0]),
        Stage::butterfly("outer butterfly", 14, h2_kron_identity(0, 4)),
        Stage::sum(
            "merge outer correction",
            14,
            vec![
                vec![0],
                vec![1, 8],
                vec![2, 9],
                vec![3, 10],
                vec![4],
                vec![5, 11],
                vec![6, 12],
                vec![7, 13],
            ],
        ),
        Stage::negate_lanes("output signs", 8, &[5, 6, 7]),
    ];
    Pipeline::new(stages, slots(), precompute_recipe()).expect("fixed pipeline is well formed")
}
