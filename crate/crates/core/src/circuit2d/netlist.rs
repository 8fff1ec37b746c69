//! Combinational netlists over AND, OR, XOR and NOT gates.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ca::{resolve_cell, BoundaryMode, Parity};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    In,
    Out,
    And,
    Or,
    Xor,
    Not,
}

impl GateKind {
    fn arity(self) -> usize {
        match self {
            GateKind::In => 0,
            GateKind::Out | GateKind::Not => 1,
            GateKind::And | GateKind::Or | GateKind::Xor => 2,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::In => "IN",
            GateKind::Out => "OUT",
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Xor => "XOR",
            GateKind::Not => "NOT",
        })
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "IN" => GateKind::In,
            "OUT" => GateKind::Out,
            "AND" => GateKind::And,
            "OR" => GateKind::Or,
            "XOR" => GateKind::Xor,
            "NOT" => GateKind::Not,
            _ => return Err(Error::Parse(format!("unknown gate kind {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<usize>,
}

/// Gates in topological order; a gate's id is its index. Inputs and outputs
/// are listed in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Netlist {
    gates: Vec<Gate>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl Netlist {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Evaluates 64 independent input vectors at once, one per bit lane.
    pub fn eval_lanes(&self, inputs: &[u64]) -> Result<Vec<u64>> {
        if inputs.len() != self.inputs.len() {
            return Err(Error::LengthMismatch {
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        let mut val = vec![0u64; self.gates.len()];
        let mut next_in = 0;
        for (id, g) in self.gates.iter().enumerate() {
            let x = |k: usize| val[g.inputs[k]];
            val[id] = match g.kind {
                GateKind::In => {
                    next_in += 1;
                    inputs[next_in - 1]
                }
                GateKind::Out => x(0),
                GateKind::Not => !x(0),
                GateKind::And => x(0) & x(1),
                GateKind::Or => x(0) | x(1),
                GateKind::Xor => x(0) ^ x(1),
            };
        }
        Ok(self.outputs.iter().map(|&o| val[o]).collect())
    }

    pub fn eval(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        let lanes: Vec<u64> = inputs.iter().map(|&b| b as u64).collect();
        Ok(self
            .eval_lanes(&lanes)?
            .into_iter()
            .map(|w| w & 1 == 1)
            .collect())
    }

    /// One gate per line: `<id> <KIND> <input ids...>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, g) in self.gates.iter().enumerate() {
            out.push_str(&format!("{id} {}", g.kind));
            for i in &g.inputs {
                out.push_str(&format!(" {i}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        let (mut inputs, mut outputs) = (Vec::new(), Vec::new());
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
            let mut fields = line.split_whitespace();
            let id: usize = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| bad("missing id"))?;
            if id != gates.len() {
                return Err(bad("ids must be consecutive from 0"));
            }
            let kind: GateKind = fields.next().ok_or_else(|| bad("missing kind"))?.parse()?;
            let ins = fields
                .map(|f| f.parse::<usize>().map_err(|_| bad("bad input id")))
                .collect::<Result<Vec<_>>>()?;
            if ins.len() != kind.arity() {
                return Err(bad("wrong number of inputs"));
            }
            if ins.iter().any(|&i| i >= id) {
                return Err(bad("inputs must refer to earlier gates"));
            }
            match kind {
                GateKind::In => inputs.push(id),
                GateKind::Out => outputs.push(id),
                _ => {}
            }
            gates.push(Gate { kind, inputs: ins });
        }
        Ok(Netlist {
            gates,
            inputs,
            outputs,
        })
    }
}

/// A wire during construction: a gate output or a folded constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Sig {
    Const(bool),
    Node(usize),
}

/// Builder with constant folding and structural hashing.
#[derive(Default)]
struct Builder {
    gates: Vec<Gate>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    seen: HashMap<(GateKind, Vec<usize>), usize>,
}

impl Builder {
    fn push(&mut self, kind: GateKind, mut ins: Vec<usize>) -> usize {
        if matches!(kind, GateKind::And | GateKind::Or | GateKind::Xor) {
            ins.sort_unstable();
        }
        if !matches!(kind, GateKind::In | GateKind::Out) {
            if let Some(&id) = self.seen.get(&(kind, ins.clone())) {
                return id;
            }
            self.seen.insert((kind, ins.clone()), self.gates.len());
        }
        self.gates.push(Gate { kind, inputs: ins });
        self.gates.len() - 1
    }

    fn input(&mut self) -> Sig {
        let id = self.push(GateKind::In, vec![]);
        self.inputs.push(id);
        Sig::Node(id)
    }

    fn not(&mut self, a: Sig) -> Sig {
        match a {
            Sig::Const(v) => Sig::Const(!v),
            Sig::Node(n) => Sig::Node(self.push(GateKind::Not, vec![n])),
        }
    }

    fn xor(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Sig::Const(x), Sig::Const(y)) => Sig::Const(x ^ y),
            (Sig::Const(false), s) | (s, Sig::Const(false)) => s,
            (Sig::Const(true), s) | (s, Sig::Const(true)) => self.not(s),
            (Sig::Node(x), Sig::Node(y)) if x == y => Sig::Const(false),
            (Sig::Node(x), Sig::Node(y)) => Sig::Node(self.push(GateKind::Xor, vec![x, y])),
        }
    }

    fn and(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Sig::Const(false), _) | (_, Sig::Const(false)) => Sig::Const(false),
            (Sig::Const(true), s) | (s, Sig::Const(true)) => s,
            (Sig::Node(x), Sig::Node(y)) if x == y => a,
            (Sig::Node(x), Sig::Node(y)) => Sig::Node(self.push(GateKind::And, vec![x, y])),
        }
    }

    fn or(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Sig::Const(true), _) | (_, Sig::Const(true)) => Sig::Const(true),
            (Sig::Const(false), s) | (s, Sig::Const(false)) => s,
            (Sig::Node(x), Sig::Node(y)) if x == y => a,
            (Sig::Node(x), Sig::Node(y)) => Sig::Node(self.push(GateKind::Or, vec![x, y])),
        }
    }

    /// `(x & y) | (x & z) | (y & z)`, with `maj(a, a, b) = a`.
    fn maj3(&mut self, x: Sig, y: Sig, z: Sig) -> Sig {
        if x == y || x == z {
            return x;
        }
        if y == z {
            return y;
        }
        let xy = self.and(x, y);
        let xz = self.and(x, z);
        let yz = self.and(y, z);
        let t = self.or(xy, xz);
        self.or(t, yz)
    }

    fn output(&mut self, s: Sig) {
        let n = match s {
            Sig::Node(n) => n,
            Sig::Const(v) => {
                // Materialize a constant from the first input.
                let i = self.inputs[0];
                let zero = self.push(GateKind::Xor, vec![i, i]);
                if v {
                    self.push(GateKind::Not, vec![zero])
                } else {
                    zero
                }
            }
        };
        let id = self.push(GateKind::Out, vec![n]);
        self.outputs.push(id);
    }

    fn finish(self) -> Netlist {
        Netlist {
            gates: self.gates,
            inputs: self.inputs,
            outputs: self.outputs,
        }
    }
}

/// Three-input majority from AND and OR gates.
pub fn maj3_netlist() -> Netlist {
    let mut b = Builder::default();
    let (x, y, z) = (b.input(), b.input(), b.input());
    let m = b.maj3(x, y, z);
    b.output(m);
    b.finish()
}

/// One feed-forward row of the decoding circuit for a mirrored TLV chain of
/// `len` cells.
///
/// Inputs are the row's `len - 1` syndrome bits followed by its `len`
/// accumulated correction bits; outputs are laid out the same way. Each
/// cell's flip is a majority of three XOR sums of nearby syndromes, and the
/// mirror edges are pure wiring.
pub fn row_netlist(len: usize) -> Result<Netlist> {
    if len < 2 || len % 2 == 1 {
        return Err(Error::InvalidLength {
            len,
            reason: "row circuit needs an even length of at least 2",
        });
    }
    let mut b = Builder::default();
    let s: Vec<Sig> = (0..len - 1).map(|_| b.input()).collect();
    let c: Vec<Sig> = (0..len).map(|_| b.input()).collect();
    // Bond between cells j and j+1, folded through the mirrors.
    let bond = |j: i64| -> Sig {
        let u = resolve_cell(j, len, BoundaryMode::Mirrored).expect("mirrored");
        let v = resolve_cell(j + 1, len, BoundaryMode::Mirrored).expect("mirrored");
        if u == v {
            Sig::Const(false)
        } else {
            s[u.min(v)]
        }
    };
    let mut delta = Vec::with_capacity(len);
    for j in 0..len as i64 {
        let (a, b1, b2, c1, c2) = match Parity::of_cell(j as usize) {
            Parity::Even => (bond(j - 1), bond(j), bond(j + 1), bond(j + 2), bond(j + 3)),
            Parity::Odd => (bond(j), bond(j - 1), bond(j - 2), bond(j - 3), bond(j - 4)),
        };
        let bb = b.xor(b1, b2);
        let t = b.xor(bb, c1);
        let cc = b.xor(t, c2);
        delta.push(b.maj3(a, bb, cc));
    }
    for j in 0..len - 1 {
        let t = b.xor(delta[j], delta[j + 1]);
        let out = b.xor(t, s[j]);
        b.output(out);
    }
    for j in 0..len {
        let out = b.xor(c[j], delta[j]);
        b.output(out);
    }
    Ok(b.finish())
}
