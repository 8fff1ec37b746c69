//! The register pipeline and its co-simulation with a noisy chain.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{ChainState, CorrectionMask, Syndrome};
use crate::ca::RuleSet;
use crate::decoders::{boundary, syndrome_delta_step};
use crate::error::{Error, Result};
use crate::noise_sim::fill_bernoulli;

use super::netlist::{row_netlist, Netlist};

/// Syndrome and accumulated correction held by one pipeline row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowRegister {
    pub syndrome: Syndrome,
    pub correction: CorrectionMask,
}

impl RowRegister {
    fn zeros(len: usize) -> Self {
        Self {
            syndrome: Syndrome::zeros(len - 1),
            correction: CorrectionMask::zeros(len),
        }
    }

    fn is_empty(&self) -> bool {
        self.syndrome.is_zero() && self.correction.is_zero()
    }
}

/// Registers of a depth-`D_L` decoding circuit for a chain of `L` cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitState {
    len: usize,
    depth: usize,
    syndrome_register: Syndrome,
    syndrome_memory: Syndrome,
    rows: Vec<RowRegister>,
    final_correction: CorrectionMask,
    final_syndrome: Syndrome,
}

impl CircuitState {
    /// All-zero registers for `L` cells and `D_L` rows.
    pub fn new(len: usize, depth: usize) -> Result<Self> {
        RuleSet::tlv_mirrored().check_length(len)?;
        if depth == 0 {
            return Err(Error::OutOfRange("circuit depth must be at least 1".into()));
        }
        Ok(Self {
            len,
            depth,
            syndrome_register: Syndrome::zeros(len - 1),
            syndrome_memory: Syndrome::zeros(len - 1),
            rows: vec![RowRegister::zeros(len); depth],
            final_correction: CorrectionMask::zeros(len),
            final_syndrome: Syndrome::zeros(len - 1),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.syndrome_register.is_zero()
            && self.syndrome_memory.is_zero()
            && self.final_correction.is_zero()
            && self.final_syndrome.is_zero()
            && self.rows.iter().all(RowRegister::is_empty)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rows(&self) -> &[RowRegister] {
        &self.rows
    }

    pub fn syndrome_register(&self) -> &Syndrome {
        &self.syndrome_register
    }

    pub fn syndrome_memory(&self) -> &Syndrome {
        &self.syndrome_memory
    }

    pub fn final_correction(&self) -> &CorrectionMask {
        &self.final_correction
    }

    /// Syndrome left in the bottom row when it was emitted.
    pub fn final_syndrome(&self) -> &Syndrome {
        &self.final_syndrome
    }
}

/// Fate of one noise batch after it has passed through the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransferClass {
    Clean,
    /// The batch was eroded to all-ones instead of zero.
    LogicalFlip,
    /// Syndromes were left after `D_L` rows.
    Residual,
}

/// What one time step did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    /// Syndrome fed to the first row, `register ^ memory ^ boundary(final)`.
    pub input_syndrome: Syndrome,
    pub applied: CorrectionMask,
    /// Class of the batch whose correction was applied, once the pipeline
    /// is full.
    pub transfer: Option<TransferClass>,
}

/// A decoding circuit coupled to a hidden chain state.
///
/// The circuit sees the chain only through its syndrome. The queue of
/// injected batches is bookkeeping for classifying each applied correction;
/// the circuit never reads it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoSimState {
    pub circuit: CircuitState,
    truth: ChainState,
    in_flight: VecDeque<ChainState>,
    time: u64,
    logical_flip_count: u64,
    residual_count: u64,
}

impl CoSimState {
    pub fn new(len: usize, depth: usize) -> Result<Self> {
        Self::with_truth(CircuitState::new(len, depth)?, ChainState::zeros(len))
    }

    pub fn with_truth(circuit: CircuitState, truth: ChainState) -> Result<Self> {
        if truth.len() != circuit.len {
            return Err(Error::LengthMismatch {
                expected: circuit.len,
                got: truth.len(),
            });
        }
        Ok(Self {
            circuit,
            truth,
            in_flight: VecDeque::new(),
            time: 0,
            logical_flip_count: 0,
            residual_count: 0,
        })
    }

    pub fn truth(&self) -> &ChainState {
        &self.truth
    }

    /// Time steps taken so far.
    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn logical_flip_count(&self) -> u64 {
        self.logical_flip_count
    }

    pub fn residual_count(&self) -> u64 {
        self.residual_count
    }
}

/// One row advance: the syndrome-delta step plus correction accumulation.
fn advance_row(row: &RowRegister, rules: &RuleSet) -> RowRegister {
    let step = syndrome_delta_step(&row.syndrome, rules).expect("validated circuit");
    RowRegister {
        syndrome: step.new_syndrome,
        correction: row.correction.xor(&step.delta),
    }
}

/// One time step taking the circuit from time `t` to `t + 1`.
///
/// `e_new` holds the errors that occurred since the last step. Substep 1
/// measures the syndrome and forms the first row's input; substep 2 moves
/// every row down by one level at once, the bottom row landing in the final
/// correction register; substep 3 applies the final correction to the
/// chain. A batch passed in at step `n` is applied at step `n + D_L`.
pub fn circuit_time_step(cosim: &mut CoSimState, e_new: &ChainState) -> Result<StepReport> {
    let rules = RuleSet::tlv_mirrored();
    let c = &mut cosim.circuit;
    if e_new.len() != c.len {
        return Err(Error::LengthMismatch {
            expected: c.len,
            got: e_new.len(),
        });
    }
    cosim.truth = cosim.truth.xor(e_new);
    c.syndrome_register = boundary(&cosim.truth);
    let input_syndrome = c
        .syndrome_register
        .xor(&c.syndrome_memory)
        .xor(&boundary(&c.final_correction.as_state()));

    let bottom = c.rows.pop().expect("depth >= 1");
    c.final_correction = bottom.correction;
    c.final_syndrome = bottom.syndrome;
    for row in c.rows.iter_mut() {
        *row = advance_row(row, &rules);
    }
    let first = RowRegister {
        syndrome: input_syndrome.clone(),
        correction: CorrectionMask::zeros(c.len),
    };
    c.rows.insert(0, advance_row(&first, &rules));
    c.syndrome_memory = c.syndrome_register.clone();

    let applied = c.final_correction.clone();
    cosim.truth = cosim.truth.corrected(&applied);
    cosim.time += 1;

    cosim.in_flight.push_back(e_new.clone());
    let transfer = (cosim.in_flight.len() > c.depth).then(|| {
        let batch = cosim.in_flight.pop_front().expect("non-empty");
        let rest = batch.corrected(&applied);
        if rest.is_zero() {
            TransferClass::Clean
        } else if rest.is_all_ones() {
            cosim.logical_flip_count += 1;
            TransferClass::LogicalFlip
        } else {
            cosim.residual_count += 1;
            TransferClass::Residual
        }
    });
    Ok(StepReport {
        input_syndrome,
        applied,
        transfer,
    })
}

/// Gate-level row of the circuit for one chain length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowCircuit {
    len: usize,
    netlist: Netlist,
}

impl RowCircuit {
    pub fn new(len: usize) -> Result<Self> {
        Ok(Self {
            len,
            netlist: row_netlist(len)?,
        })
    }

    pub fn netlist(&self) -> &Netlist {
        &self.netlist
    }
}

/// Advances one row by evaluating its gate netlist.
pub fn gate_level_row_step(row: &RowCircuit, input: &RowRegister) -> Result<RowRegister> {
    let len = row.len;
    if input.syndrome.len() + 1 != len || input.correction.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: input.correction.len(),
        });
    }
    let mut ins: Vec<bool> = input.syndrome.to_bools();
    ins.extend(input.correction.to_bools());
    let out = row.netlist.eval(&ins)?;
    Ok(RowRegister {
        syndrome: Syndrome::from_bools(&out[..len - 1]),
        correction: CorrectionMask::from_bools(&out[len - 1..]),
    })
}

/// Behavioral row advance, for comparison with [`gate_level_row_step`].
pub fn behavioral_row_step(input: &RowRegister) -> Result<RowRegister> {
    let step = syndrome_delta_step(&input.syndrome, &RuleSet::tlv_mirrored())?;
    if input.correction.len() != input.syndrome.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: input.syndrome.len() + 1,
            got: input.correction.len(),
        });
    }
    Ok(RowRegister {
        syndrome: step.new_syndrome,
        correction: input.correction.xor(&step.delta),
    })
}

/// Circuit depth as a function of chain length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DepthPolicy {
    Const(usize),
    /// `floor(L^kappa)`.
    Power(f64),
    /// `floor(c L)`.
    Linear(f64),
}

impl DepthPolicy {
    /// Depth for length `len`, at least 1.
    pub fn resolve(&self, len: usize) -> usize {
        let d = match *self {
            DepthPolicy::Const(d) => d,
            DepthPolicy::Power(k) => (len as f64).powf(k).floor() as usize,
            DepthPolicy::Linear(c) => (c * len as f64).floor() as usize,
        };
        d.max(1)
    }
}

impl fmt::Display for DepthPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepthPolicy::Const(d) => write!(f, "const:{d}"),
            DepthPolicy::Power(k) => write!(f, "pow:{k}"),
            DepthPolicy::Linear(c) => write!(f, "linear:{c}"),
        }
    }
}

impl FromStr for DepthPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "bad depth policy {s:?}; expected const:D, pow:k or linear[:c]"
            ))
        };
        let p = match s.split_once(':') {
            Some(("const", a)) => DepthPolicy::Const(a.parse().map_err(|_| bad())?),
            Some(("pow", a)) => DepthPolicy::Power(a.parse().map_err(|_| bad())?),
            Some(("linear", a)) => DepthPolicy::Linear(a.parse().map_err(|_| bad())?),
            None if s == "linear" => DepthPolicy::Linear(1.0),
            _ => return Err(bad()),
        };
        match p {
            DepthPolicy::Const(0) => Err(bad()),
            DepthPolicy::Power(k) | DepthPolicy::Linear(k) if !(k > 0.0) => Err(bad()),
            p => Ok(p),
        }
    }
}

/// Summary of one continuous-noise run of the circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitRunReport {
    pub len: usize,
    pub depth: usize,
    /// Noise batches injected.
    pub batches: u64,
    /// Index (from 1) of the first batch that was not corrected cleanly.
    pub first_failure: Option<u64>,
    pub failures: u64,
    pub flips: u64,
    pub residuals: u64,
}

impl CircuitRunReport {
    /// Fraction of batches not corrected cleanly.
    pub fn failure_rate(&self) -> f64 {
        if self.batches == 0 {
            0.0
        } else {
            self.failures as f64 / self.batches as f64
        }
    }
}

/// Runs the circuit against `horizon` batches of Bernoulli noise, then
/// drains the pipeline so every batch is classified. Stops at the first
/// failed batch unless `keep_going` is set.
pub fn run_circuit_sim<R: Rng + ?Sized>(
    len: usize,
    depth: usize,
    p0: f64,
    horizon: u64,
    keep_going: bool,
    rng: &mut R,
) -> Result<CircuitRunReport> {
    crate::analytics::check_prob(p0)?;
    if horizon == 0 {
        return Err(Error::OutOfRange("horizon must be at least 1".into()));
    }
    let mut cosim = CoSimState::new(len, depth)?;
    let mut e = ChainState::zeros(len);
    let zero = ChainState::zeros(len);
    let mut report = CircuitRunReport {
        len,
        depth,
        batches: 0,
        first_failure: None,
        failures: 0,
        flips: 0,
        residuals: 0,
    };
    let mut judged = 0u64;
    for t in 1..=horizon + depth as u64 {
        let batch = if t <= horizon {
            fill_bernoulli(&mut e.0, p0, rng);
            report.batches += 1;
            &e
        } else {
            &zero
        };
        let step = circuit_time_step(&mut cosim, batch)?;
        let Some(class) = step.transfer else { continue };
        judged += 1;
        if judged > horizon {
            break;
        }
        match class {
            TransferClass::Clean => continue,
            TransferClass::LogicalFlip => report.flips += 1,
            TransferClass::Residual => report.residuals += 1,
        }
        report.failures += 1;
        report.first_failure.get_or_insert(judged);
        if !keep_going {
            report.batches = judged;
            break;
        }
    }
    Ok(report)
}
