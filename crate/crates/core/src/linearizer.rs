//! Straight-line three-address programs.
//!
//! [`flatten`] traces a certified pipeline through a recording arithmetic
//! context, shares identical instructions, drops unused ones and numbers the
//! rest densely. The listing is a textual data-flow diagram of the product.

use std::collections::HashMap;
use std::fmt;

use crate::kernel::Pipeline;
use crate::octo::{Octo, DIM};
use crate::opcount::OpCount;
use crate::scalar::{Arith, Scalar};
use crate::verify::CertifiedPipeline;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    X(usize),
    B(usize),
    T(usize),
    Zero,
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::X(i) => write!(f, "x{i}"),
            Operand::B(i) => write!(f, "b{i}"),
            Operand::T(k) => write!(f, "t{k}"),
            Operand::Zero => f.write_str("0"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Neg,
    /// Multiplication by `2^k`.
    Shift(i32),
    Mul,
}

impl Op {
    fn mnemonic(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Neg => "neg",
            Op::Shift(_) => "shift",
            Op::Mul => "mul",
        }
    }
}

/// `t<dest> = op src1 [src2]`; for [`Op::Shift`] the second source is the
/// exponent and `src2` is `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Instr {
    pub dest: usize,
    pub op: Op,
    pub src1: Operand,
    pub src2: Option<Operand>,
}

impl Instr {
    fn sources(&self) -> impl Iterator<Item = Operand> {
        std::iter::once(self.src1).chain(self.src2)
    }

    fn second_field(&self) -> String {
        match (self.op, self.src2) {
            (Op::Shift(k), _) => k.to_string(),
            (_, Some(s)) => s.to_string(),
            (_, None) => String::new(),
        }
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{} = {} {}", self.dest, self.op.mnemonic(), self.src1)?;
        match self.second_field() {
            s if s.is_empty() => Ok(()),
            s => write!(f, " {s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub instrs: Vec<Instr>,
    pub outputs: [Operand; DIM],
}

impl Program {
    /// Checks single assignment, definition before use, and that outputs
    /// are defined.
    pub fn validate(&self) -> Result<(), String> {
        let mut defined = std::collections::HashSet::new();
        let ok = |o: &Operand, defined: &std::collections::HashSet<usize>| match o {
            Operand::T(k) => defined.contains(k),
            Operand::X(i) | Operand::B(i) => *i < DIM,
            Operand::Zero => true,
        };
        for (n, ins) in self.instrs.iter().enumerate() {
            if let Some(s) = ins.sources().find(|s| !ok(s, &defined)) {
                return Err(format!("instruction {n} reads undefined {s}"));
            }
            if !defined.insert(ins.dest) {
                return Err(format!("t{} assigned twice", ins.dest));
            }
        }
        match self.outputs.iter().find(|o| !ok(o, &defined)) {
            Some(o) => Err(format!("output reads undefined {o}")),
            None => Ok(()),
        }
    }

    pub fn op_count(&self) -> OpCount {
        self.instrs.iter().fold(OpCount::default(), |mut c, i| {
            match i.op {
                Op::Add | Op::Sub => c.adds += 1,
                Op::Mul => c.mults += 1,
                Op::Neg | Op::Shift(_) => {}
            }
            c
        })
    }
}

/// Records operations as instructions, reusing an existing destination for
/// a repeated `(op, src1, src2)`.
#[derive(Debug, Default)]
struct Tracer {
    instrs: Vec<Instr>,
    seen: HashMap<(Op, Operand, Option<Operand>), Operand>,
}

impl Tracer {
    fn emit(&mut self, op: Op, src1: Operand, src2: Option<Operand>) -> Operand {
        let key = match (op, src2) {
            (Op::Add | Op::Mul, Some(s2)) if s2 < src1 => (op, s2, Some(src1)),
            _ => (op, src1, src2),
        };
        if let Some(&t) = self.seen.get(&key) {
            return t;
        }
        let dest = self.instrs.len();
        self.instrs.push(Instr { dest, op, src1, src2 });
        self.seen.insert(key, Operand::T(dest));
        Operand::T(dest)
    }
}

impl Arith for Tracer {
    type Value = Operand;

    fn zero(&mut self) -> Operand {
        Operand::Zero
    }

    fn add(&mut self, a: &Operand, b: &Operand) -> Operand {
        self.emit(Op::Add, *a, Some(*b))
    }

    fn sub(&mut self, a: &Operand, b: &Operand) -> Operand {
        self.emit(Op::Sub, *a, Some(*b))
    }

    fn neg(&mut self, a: &Operand) -> Operand {
        self.emit(Op::Neg, *a, None)
    }

    fn shift(&mut self, a: &Operand, k: i32) -> Operand {
        self.emit(Op::Shift(k), *a, None)
    }

    fn mul(&mut self, a: &Operand, b: &Operand) -> Operand {
        self.emit(Op::Mul, *a, Some(*b))
    }
}

/// Removes instructions whose results are unused and renumbers the rest
/// in order.
fn eliminate_dead(instrs: Vec<Instr>, outputs: [Operand; DIM]) -> Program {
    let mut live = vec![false; instrs.len()];
    let mark = |o: Operand, live: &mut Vec<bool>| {
        if let Operand::T(k) = o {
            live[k] = true;
        }
    };
    for &o in &outputs {
        mark(o, &mut live);
    }
    for ins in instrs.iter().rev() {
        if live[ins.dest] {
            for s in ins.sources() {
                mark(s, &mut live);
            }
        }
    }
    let mut renumber = HashMap::new();
    let mut kept = Vec::new();
    for ins in instrs.into_iter().filter(|i| live[i.dest]) {
        let map = |o: Operand| match o {
            Operand::T(k) => Operand::T(renumber[&k]),
            other => other,
        };
        let (src1, src2) = (map(ins.src1), ins.src2.map(map));
        let dest = kept.len();
        renumber.insert(ins.dest, dest);
        kept.push(Instr {
            dest,
            op: ins.op,
            src1,
            src2,
        });
    }
    let outputs = outputs.map(|o| match o {
        Operand::T(k) => Operand::T(renumber[&k]),
        other => other,
    });
    Program { instrs: kept, outputs }
}

/// Traces any pipeline, certified or not.
pub fn lower(p: &Pipeline) -> Program {
    let mut tracer = Tracer::default();
    let x: Vec<Operand> = (0..DIM).map(Operand::X).collect();
    let b: Vec<Operand> = (0..DIM).map(Operand::B).collect();
    let y = p.execute(&mut tracer, &x, &b);
    let outputs: [Operand; DIM] = y.try_into().expect("pipeline yields 8 lanes");
    eliminate_dead(tracer.instrs, outputs)
}

/// The straight-line program of a certified pipeline.
pub fn flatten(p: &CertifiedPipeline) -> Program {
    lower(p)
}

/// Interprets the program on `(x, b)`.
///
/// # Panics
///
/// Panics if the program reads an undefined temporary.
pub fn eval_program<T: Scalar>(prog: &Program, x: &Octo<T>, b: &Octo<T>) -> Octo<T> {
    let mut t: Vec<Option<T>> = vec![None; prog.instrs.len()];
    fn read<'a, T: Scalar>(o: Operand, x: &'a Octo<T>, b: &'a Octo<T>, t: &'a [Option<T>], zero: &'a T) -> &'a T {
        match o {
            Operand::X(i) => &x.coeffs()[i],
            Operand::B(i) => &b.coeffs()[i],
            Operand::T(k) => t[k].as_ref().unwrap_or_else(|| panic!("t{k} read before assignment")),
            Operand::Zero => zero,
        }
    }
    let zero = T::zero();
    for ins in &prog.instrs {
        let a = read(ins.src1, x, b, &t, &zero);
        let second = || read(ins.src2.expect("binary instruction has two sources"), x, b, &t, &zero);
        let v = match ins.op {
            Op::Add => a.add_ref(second()),
            Op::Sub => a.sub_ref(second()),
            Op::Mul => a.mul_ref(second()),
            Op::Neg => -a.clone(),
            Op::Shift(k) => a.mul_pow2(k),
        };
        t[ins.dest] = Some(v);
    }
    Octo::new(prog.outputs.map(|o| read(o, x, b, &t, &zero).clone()))
}

/// One line per instruction, outputs as comments, then the summary line.
pub fn emit_text(prog: &Program) -> String {
    let mut out = String::from("# straight-line program for y = x * b\n# inputs: x0..x7, b0..b7\n");
    for ins in &prog.instrs {
        out.push_str(&ins.to_string());
        out.push('\n');
    }
    for (i, o) in prog.outputs.iter().enumerate() {
        out.push_str(&format!("# y{i} = {o}\n"));
    }
    out.push_str(&format!("# {}\n", prog.op_count()));
    out
}

/// CSV listing with header `dest,op,src1,src2`; one row per instruction.
pub fn emit_csv(prog: &Program) -> String {
    let mut out = String::from("dest,op,src1,src2\n");
    for ins in &prog.instrs {
        out.push_str(&format!(
            "t{},{},{},{}\n",
            ins.dest,
            ins.op.mnemonic(),
            ins.src1,
            ins.second_field()
        ));
    }
    out
}
