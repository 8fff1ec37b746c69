//! Feed-forward decoding circuit: the time evolution of the automaton laid
//! out in space as a stack of `D_L` register rows, so that every batch of
//! noise is decoded by its own pass through the stack.

mod circuit;
mod netlist;

pub use circuit::{
    behavioral_row_step, circuit_time_step, gate_level_row_step, run_circuit_sim, CircuitRunReport,
    CircuitState, CoSimState, DepthPolicy, RowCircuit, RowRegister, StepReport, TransferClass,
};
pub use netlist::{maj3_netlist, row_netlist, Gate, GateKind, Netlist};
