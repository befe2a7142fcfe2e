//! Gate targets, pulse envelopes, drive Hamiltonians and state fidelity.

mod drive;
mod fidelity;
mod gate;
mod pulse;

pub use drive::{drive_hamiltonian, frame_unitary, rotating_frame, DriveHamiltonian, RotatingHamiltonian};
pub use fidelity::{check_density, pure_state, state_fidelity, STATE_TOLERANCE};
pub use gate::{embed, rabi_population, rx, ry, rz, universal_gate, GateSpec};
pub use pulse::{drag_envelope, gaussian_envelope, DriveAxis, PulseSpec};
