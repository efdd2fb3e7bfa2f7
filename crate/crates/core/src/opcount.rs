//! Operation counting by instrumented execution.
//!
//! Counts come from running the kernel in a [`Counting`] context, so they
//! describe what the code does rather than what a formula claims. Negation
//! and multiplication by `2^k` are free; subtraction counts as an addition.

use std::fmt;
use std::ops::Add;

use crate::kernel::{certified_pipeline, Pipeline};
use crate::octo::DIM;
use crate::scalar::Arith;
use crate::schoolbook::naive_product;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpCount {
    pub mults: usize,
    pub adds: usize,
}

impl OpCount {
    pub fn new(mults: usize, adds: usize) -> Self {
        OpCount { mults, adds }
    }
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(self, rhs: OpCount) -> OpCount {
        OpCount {
            mults: self.mults + rhs.mults,
            adds: self.adds + rhs.adds,
        }
    }
}

impl fmt::Display for OpCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mults={} adds={}", self.mults, self.adds)
    }
}

/// Wraps another context and tallies the operations passed through it.
#[derive(Debug, Default)]
pub struct Counting<A> {
    pub inner: A,
    pub count: OpCount,
}

impl<A> Counting<A> {
    pub fn new(inner: A) -> Self {
        Counting {
            inner,
            count: OpCount::default(),
        }
    }
}

impl<A: Arith> Arith for Counting<A> {
    type Value = A::Value;

    fn zero(&mut self) -> A::Value {
        self.inner.zero()
    }

    fn add(&mut self, a: &A::Value, b: &A::Value) -> A::Value {
        self.count.adds += 1;
        self.inner.add(a, b)
    }

    fn sub(&mut self, a: &A::Value, b: &A::Value) -> A::Value {
        self.count.adds += 1;
        self.inner.sub(a, b)
    }

    fn neg(&mut self, a: &A::Value) -> A::Value {
        self.inner.neg(a)
    }

    fn shift(&mut self, a: &A::Value, k: i32) -> A::Value {
        self.inner.shift(a, k)
    }

    fn mul(&mut self, a: &A::Value, b: &A::Value) -> A::Value {
        self.count.mults += 1;
        self.inner.mul(a, b)
    }
}

/// The empty context: values carry no data, so counting through it is
/// independent of any input.
impl Arith for () {
    type Value = ();

    fn zero(&mut self) {}
    fn add(&mut self, _: &(), _: &()) {}
    fn sub(&mut self, _: &(), _: &()) {}
    fn neg(&mut self, _: &()) {}
    fn shift(&mut self, _: &(), _: i32) {}
    fn mul(&mut self, _: &(), _: &()) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Naive,
    Fast,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Fast => "fast",
        }
    }
}

/// Counts for a pipeline, split by phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PipelineCount {
    /// Work depending only on the right operand.
    pub precompute: OpCount,
    /// Work per left operand, given the precomputed values.
    pub main: OpCount,
}

impl PipelineCount {
    pub fn total(&self) -> OpCount {
        self.precompute + self.main
    }
}

pub fn count_pipeline(p: &Pipeline) -> PipelineCount {
    let mut pre = Counting::new(());
    let slots = p.precompute(&mut pre, &[(); DIM]);
    let mut main = Counting::new(());
    p.execute_with(&mut main, &[(); DIM], &slots);
    PipelineCount {
        precompute: pre.count,
        main: main.count,
    }
}

/// Total operations for one product.
pub fn count_algorithm(algo: Algorithm) -> OpCount {
    match algo {
        Algorithm::Naive => {
            let mut c = Counting::new(());
            naive_product(&mut c, &[(); DIM], &[(); DIM]);
            c.count
        }
        Algorithm::Fast => count_pipeline(certified_pipeline()).total(),
    }
}
