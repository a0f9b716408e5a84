//! The weight spectral sequence of a simple normal crossing degeneration,
//! built from combinatorial strata data: eigenvalues of the residue,
//! characteristic cycles, the E1 page as a differential bigraded structure,
//! the E2 page and the checks performed on it.

mod analysis;
mod eigen;
mod page;
mod spec;

pub use analysis::{
    e2_page, hard_lefschetz_check, limit_hodge_numbers, local_invariant_cycle_report, E2Page,
    HardLefschetzReport, InvariantCycleDegree, InvariantCycleReport, LimitHodgeNumbers, PbhlOutcome, SpotIso,
};
pub use eigen::{characteristic_cycle, characteristic_cycle_alpha, eigenvalue_set, EigenvalueTable};
pub use page::{d1_assemble, e1_page, Cell, Differential, E1Page};
pub use spec::{Alpha, Degeneration, DegenerationSpec, GysinWeights, MapData, OperatorData, StratumData};
