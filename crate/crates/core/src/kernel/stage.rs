//! Sparse linear stages and their interpreter.
//!
//! A stage is data, not code: the same value is applied numerically, turned
//! into an exact matrix for symbolic composition, counted, and flattened.

use num_traits::Zero;

use crate::linform::{LinForm, RatMatrix, SymMatrix};
use crate::scalar::{Arith, Pow2};

/// One data-dependent term of a quasi-diagonal row: `±slot · v[col]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QdEntry {
    pub col: usize,
    pub slot: usize,
    pub negate: bool,
}

impl QdEntry {
    pub fn new(col: usize, slot: usize) -> Self {
        QdEntry {
            col,
            slot,
            negate: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StageKind {
    /// `out[i] = v[map[i]]`, a bijection.
    Permute(Vec<usize>),
    /// `out[i] = v[map[i]]`; lanes may be duplicated or dropped.
    FanOut(Vec<usize>),
    /// `out[i] = factor[i] · v[i]`.
    SignScale(Vec<Pow2>),
    /// Disjoint lane pairs `(i, j)`: `out[i] = v[i] + v[j]`, `out[j] = v[i] - v[j]`.
    /// Lanes outside every pair pass through.
    Butterfly(Vec<(usize, usize)>),
    /// `out[i] = Σ v[k]` over `rows[i]`.
    Sum(Vec<Vec<usize>>),
    /// `out[i] = Σ ±slot · v[col]` over `rows[i]`; the only stage kind whose
    /// entries depend on the right operand.
    QuasiDiagonal(Vec<Vec<QdEntry>>),
    /// General constant stage with entries in `{0, ±2^k}`; rows hold `(col, factor)`.
    Dense(Vec<Vec<(usize, Pow2)>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    name: String,
    kind: StageKind,
    in_dim: usize,
    out_dim: usize,
}

/// Pairs of `H2 ⊗ I_m` placed at `offset`.
pub fn h2_kron_identity(offset: usize, m: usize) -> Vec<(usize, usize)> {
    (0..m).map(|k| (offset + k, offset + m + k)).collect()
}

/// Pairs of `I_n ⊗ H2` placed at `offset`.
pub fn identity_kron_h2(offset: usize, n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|k| (offset + 2 * k, offset + 2 * k + 1)).collect()
}

impl Stage {
    pub fn permute(name: &str, map: Vec<usize>) -> Self {
        let n = map.len();
        Self::with_dims(name, StageKind::Permute(map), n, n)
    }

    pub fn fan_out(name: &str, in_dim: usize, map: Vec<usize>) -> Self {
        let out = map.len();
        Self::with_dims(name, StageKind::FanOut(map), in_dim, out)
    }

    pub fn sign_scale(name: &str, factors: Vec<Pow2>) -> Self {
        let n = factors.len();
        Self::with_dims(name, StageKind::SignScale(factors), n, n)
    }

    /// Diagonal `±1` stage, negating the listed lanes.
    pub fn negate_lanes(name: &str, dim: usize, lanes: &[usize]) -> Self {
        let factors = (0..dim)
            .map(|i| if lanes.contains(&i) { Pow2::MINUS_ONE } else { Pow2::ONE })
            .collect();
        Self::sign_scale(name, factors)
    }

    pub fn butterfly(name: &str, dim: usize, pairs: Vec<(usize, usize)>) -> Self {
        Self::with_dims(name, StageKind::Butterfly(pairs), dim, dim)
    }

    pub fn sum(name: &str, in_dim: usize, rows: Vec<Vec<usize>>) -> Self {
        let out = rows.len();
        Self::with_dims(name, StageKind::Sum(rows), in_dim, out)
    }

    pub fn quasi_diagonal(name: &str, in_dim: usize, rows: Vec<Vec<QdEntry>>) -> Self {
        let out = rows.len();
        Self::with_dims(name, StageKind::QuasiDiagonal(rows), in_dim, out)
    }

    pub fn dense(name: &str, in_dim: usize, rows: Vec<Vec<(usize, Pow2)>>) -> Self {
        let out = rows.len();
        Self::with_dims(name, StageKind::Dense(rows), in_dim, out)
    }

    fn with_dims(name: &str, kind: StageKind, in_dim: usize, out_dim: usize) -> Self {
        Stage {
            name: name.to_string(),
            kind,
            in_dim,
            out_dim,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &StageKind {
        &self.kind
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn is_data_dependent(&self) -> bool {
        matches!(self.kind, StageKind::QuasiDiagonal(_))
    }

    /// Checks lane indices and per-kind shape rules.
    pub fn validate(&self, slot_count: usize) -> Result<(), String> {
        let in_range = |i: &usize| *i < self.in_dim;
        match &self.kind {
            StageKind::Permute(map) => {
                let mut seen = vec![false; self.in_dim];
                for &i in map {
                    if i >= self.in_dim || seen[i] {
                        return Err(format!("lane {i} is not a valid permutation target"));
                    }
                    seen[i] = true;
                }
            }
            StageKind::FanOut(map) => {
                if let Some(i) = map.iter().find(|i| !in_range(i)) {
                    return Err(format!("source lane {i} out of range"));
                }
            }
            StageKind::SignScale(f) => {
                if f.len() != self.in_dim {
                    return Err("factor count differs from lane count".into());
                }
            }
            StageKind::Butterfly(pairs) => {
                let mut seen = vec![false; self.in_dim];
                for &(i, j) in pairs {
                    if i == j || !in_range(&i) || !in_range(&j) || seen[i] || seen[j] {
                        return Err(format!("butterfly pair ({i}, {j}) overlaps or is out of range"));
                    }
                    seen[i] = true;
                    seen[j] = true;
                }
            }
            StageKind::Sum(rows) => {
                if let Some(i) = rows.iter().flatten().find(|i| !in_range(i)) {
                    return Err(format!("source lane {i} out of range"));
                }
            }
            StageKind::QuasiDiagonal(rows) => {
                for e in rows.iter().flatten() {
                    if e.col >= self.in_dim {
                        return Err(format!("source lane {} out of range", e.col));
                    }
                    if e.slot >= slot_count {
                        return Err(format!("slot {} does not exist", e.slot));
                    }
                }
            }
            StageKind::Dense(rows) => {
                if let Some((i, _)) = rows.iter().flatten().find(|(i, _)| !in_range(i)) {
                    return Err(format!("source lane {i} out of range"));
                }
            }
        }
        Ok(())
    }

    /// Applies the stage; `slots` supplies quasi-diagonal entry values.
    ///
    /// # Panics
    ///
    /// Panics if `v.len() != in_dim`.
    pub fn apply<A: Arith>(&self, arith: &mut A, v: &[A::Value], slots: &[A::Value]) -> Vec<A::Value> {
        assert_eq!(
            v.len(),
            self.in_dim,
            "stage `{}` expects {} lanes, got {}",
            self.name,
            self.in_dim,
            v.len()
        );
        match &self.kind {
            StageKind::Permute(map) | StageKind::FanOut(map) => map.iter().map(|&i| v[i].clone()).collect(),
            StageKind::SignScale(factors) => v
                .iter()
                .zip(factors)
                .map(|(x, &f)| if f == Pow2::ONE { x.clone() } else { arith.scale(x, f) })
                .collect(),
            StageKind::Butterfly(pairs) => {
                let mut out = v.to_vec();
                for &(i, j) in pairs {
                    out[i] = arith.add(&v[i], &v[j]);
                    out[j] = arith.sub(&v[i], &v[j]);
                }
                out
            }
            StageKind::Sum(rows) => rows
                .iter()
                .map(|row| match row.split_first() {
                    None => arith.zero(),
                    Some((&first, rest)) => rest.iter().fold(v[first].clone(), |acc, &k| arith.add(&acc, &v[k])),
                })
                .collect(),
            StageKind::QuasiDiagonal(rows) => rows
                .iter()
                .map(|row| {
                    let mut acc: Option<A::Value> = None;
                    for e in row {
                        let term = arith.mul(&slots[e.slot], &v[e.col]);
                        let sign = if e.negate { Pow2::MINUS_ONE } else { Pow2::ONE };
                        acc = Some(match acc {
                            None => arith.scale(&term, sign),
                            Some(a) => arith.accumulate(&a, &term, sign),
                        });
                    }
                    acc.unwrap_or_else(|| arith.zero())
                })
                .collect(),
            StageKind::Dense(rows) => rows
                .iter()
                .map(|row| {
                    let mut acc: Option<A::Value> = None;
                    for &(col, f) in row {
                        acc = Some(match acc {
                            None => arith.scale(&v[col], f),
                            Some(a) => arith.accumulate(&a, &v[col], f),
                        });
                    }
                    acc.unwrap_or_else(|| arith.zero())
                })
                .collect(),
        }
    }

    /// Sparse rows `(col, coefficient)` of a constant stage; `None` for a
    /// quasi-diagonal stage.
    fn constant_rows(&self) -> Option<Vec<Vec<(usize, Pow2)>>> {
        let one = |i: usize| vec![(i, Pow2::ONE)];
        Some(match &self.kind {
            StageKind::Permute(map) | StageKind::FanOut(map) => map.iter().map(|&i| one(i)).collect(),
            StageKind::SignScale(f) => f.iter().enumerate().map(|(i, &p)| vec![(i, p)]).collect(),
            StageKind::Butterfly(pairs) => {
                let mut rows: Vec<_> = (0..self.in_dim).map(one).collect();
                for &(i, j) in pairs {
                    rows[i] = vec![(i, Pow2::ONE), (j, Pow2::ONE)];
                    rows[j] = vec![(i, Pow2::ONE), (j, Pow2::MINUS_ONE)];
                }
                rows
            }
            StageKind::Sum(rows) => rows
                .iter()
                .map(|r| r.iter().map(|&k| (k, Pow2::ONE)).collect())
                .collect(),
            StageKind::Dense(rows) => rows.clone(),
            StageKind::QuasiDiagonal(_) => return None,
        })
    }

    /// Exact matrix of a constant stage; `None` for a quasi-diagonal stage.
    pub fn matrix(&self) -> Option<RatMatrix> {
        let rows = self.constant_rows()?;
        let mut m = RatMatrix::zeros(self.out_dim, self.in_dim);
        for (r, row) in rows.iter().enumerate() {
            for &(c, f) in row {
                let cur = m.get(r, c) + f.to_rational();
                m.set(r, c, cur);
            }
        }
        Some(m)
    }

    /// Symbolic matrix of a quasi-diagonal stage given the slot forms;
    /// `None` for a constant stage.
    pub fn symbolic_matrix(&self, slot_forms: &[LinForm]) -> Option<SymMatrix> {
        let StageKind::QuasiDiagonal(rows) = &self.kind else {
            return None;
        };
        let mut m = SymMatrix::zeros(self.out_dim, self.in_dim);
        for (r, row) in rows.iter().enumerate() {
            for e in row {
                let f = &slot_forms[e.slot];
                let term = if e.negate { -f } else { f.clone() };
                let cur = m.get(r, e.col) + &term;
                m.set(r, e.col, cur);
            }
        }
        Some(m)
    }

    /// Positions `(row, col)` of every structurally nonzero entry.
    pub fn entry_positions(&self) -> Vec<(usize, usize)> {
        match &self.kind {
            StageKind::QuasiDiagonal(rows) => rows
                .iter()
                .enumerate()
                .flat_map(|(r, row)| row.iter().map(move |e| (r, e.col)))
                .collect(),
            _ => {
                let m = self.matrix().expect("constant stage");
                (0..self.out_dim)
                    .flat_map(|r| (0..self.in_dim).map(move |c| (r, c)))
                    .filter(|&(r, c)| !m.get(r, c).is_zero())
                    .collect()
            }
        }
    }

    /// A copy with the sign of entry `(row, col)` flipped. Constant stages
    /// are rewritten as [`StageKind::Dense`].
    ///
    /// # Panics
    ///
    /// Panics if `(row, col)` is not a nonzero entry.
    pub fn with_flipped_entry(&self, row: usize, col: usize) -> Stage {
        let name = format!("{} (entry {row},{col} flipped)", self.name);
        match &self.kind {
            StageKind::QuasiDiagonal(rows) => {
                let mut rows = rows.clone();
                let e = rows[row]
                    .iter_mut()
                    .find(|e| e.col == col)
                    .expect("no entry at that position");
                e.negate = !e.negate;
                Stage::quasi_diagonal(&name, self.in_dim, rows)
            }
            _ => {
                let m = self.matrix().expect("constant stage");
                assert!(!m.get(row, col).is_zero(), "no entry at that position");
                let rows = (0..self.out_dim)
                    .map(|r| {
                        (0..self.in_dim)
                            .filter(|&c| !m.get(r, c).is_zero())
                            .map(|c| {
                                let f = Pow2::from_rational(m.get(r, c)).expect("power-of-two entry");
                                (c, if (r, c) == (row, col) { f.negated() } else { f })
                            })
                            .collect()
                    })
                    .collect();
                Stage::dense(&name, self.in_dim, rows)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Plain;

    fn run(stage: &Stage, v: &[f64]) -> Vec<f64> {
        stage.apply(&mut Plain::<f64>::new(), v, &[])
    }

    #[test]
    fn butterfly_on_two_lanes() {
        let s = Stage::butterfly("h2", 2, h2_kron_identity(0, 1));
        assert_eq!(run(&s, &[3.0, 5.0]), vec![8.0, -2.0]);
    }

    #[test]
    fn identity_permutation() {
        let s = Stage::permute("id", (0..5).collect());
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(run(&s, &v), v.to_vec());
    }

    #[test]
    fn sign_scale_on_ones() {
        let s = Stage::negate_lanes("r", 8, &[5, 6, 7]);
        assert_eq!(run(&s, &[1.0; 8]), vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn kron_pair_patterns() {
        assert_eq!(h2_kron_identity(0, 4), vec![(0, 4), (1, 5), (2, 6), (3, 7)]);
        assert_eq!(identity_kron_h2(8, 2), vec![(8, 9), (10, 11)]);
    }

    #[test]
    fn quasi_diagonal_reads_slots() {
        let s = Stage::quasi_diagonal(
            "qd",
            2,
            vec![
                vec![QdEntry::new(0, 1)],
                vec![],
                vec![
                    QdEntry::new(0, 0),
                    QdEntry {
                        col: 1,
                        slot: 1,
                        negate: true,
                    },
                ],
            ],
        );
        let out = s.apply(&mut Plain::<f64>::new(), &[2.0, 3.0], &[10.0, 100.0]);
        assert_eq!(out, vec![200.0, 0.0, 20.0 - 300.0]);
    }

    #[test]
    fn validate_catches_bad_shapes() {
        assert!(Stage::permute("p", vec![0, 0]).validate(0).is_err());
        assert!(Stage::butterfly("b", 4, vec![(0, 1), (1, 2)]).validate(0).is_err());
        assert!(Stage::fan_out("f", 2, vec![0, 2]).validate(0).is_err());
        assert!(Stage::quasi_diagonal("q", 1, vec![vec![QdEntry::new(0, 3)]])
            .validate(2)
            .is_err());
    }

    #[test]
    #[should_panic]
    fn apply_rejects_wrong_width() {
        run(&Stage::permute("p", vec![1, 0]), &[1.0]);
    }

    #[test]
    fn matrix_agrees_with_apply() {
        let stages = [
            Stage::butterfly("b", 6, vec![(0, 3), (4, 5)]),
            Stage::fan_out("f", 3, vec![2, 0, 0, 1]),
            Stage::sum("s", 4, vec![vec![0, 3], vec![], vec![1, 2, 3]]),
            Stage::sign_scale("k", vec![Pow2::new(true, 1), Pow2::new(false, -3)]),
        ];
        for s in &stages {
            let m = s.matrix().unwrap();
            let v: Vec<f64> = (0..s.in_dim()).map(|i| (i * i + 1) as f64).collect();
            let got = run(s, &v);
            for (r, g) in got.iter().enumerate() {
                let want: f64 = (0..s.in_dim())
                    .map(|c| <f64 as crate::scalar::Scalar>::from_rational(m.get(r, c)) * v[c])
                    .sum();
                assert_eq!(*g, want, "stage {} row {r}", s.name());
            }
        }
    }

    #[test]
    fn flipping_an_entry_changes_the_matrix_there_only() {
        let s = Stage::butterfly("b", 4, h2_kron_identity(0, 2));
        for (r, c) in s.entry_positions() {
            let m = s.matrix().unwrap();
            let f = s.with_flipped_entry(r, c).matrix().unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    if (i, j) == (r, c) {
                        assert_eq!(f.get(i, j), &-m.get(i, j));
                    } else {
                        assert_eq!(f.get(i, j), m.get(i, j));
                    }
                }
            }
        }
    }
}
