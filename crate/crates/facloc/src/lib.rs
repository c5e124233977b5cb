//! Facility location solver suite.
//!
//! Three solvers over the same problem data:
//!
//! * [`master`] — exact LP-based branch-and-cut. The value function of the
//!   assignment subproblem is under-approximated by linear cuts whose
//!   coefficients are the reduced costs of cloned location variables fixed
//!   to the query point via their bounds.
//! * [`kernel`] — kernel search matheuristic: a sequence of restricted MILPs
//!   over a growing/shrinking subset of location variables, solved by the
//!   same branch-and-cut engine with a shared cut pool.
//! * [`oracle`] — brute-force enumeration and cut auditing, used by tests and
//!   the `check` CLI command.
//!
//! Supporting layers: [`instance`] (problem data, file formats, generator),
//! [`simplex`] (bounded-variable revised primal simplex with dual and
//! reduced-cost certificates), [`slave`] (subproblem construction, closed-form
//! uncapacitated path, cut assembly), [`events`] (structured solver logs),
//! [`report`] and [`bench`] (CLI output records).

pub mod bench;
pub mod events;
pub mod instance;
pub mod kernel;
pub mod master;
pub mod oracle;
pub mod report;
pub mod simplex;
pub mod slave;

pub use instance::{Instance, Variant};
pub use kernel::{kernel_search, KernelConfig};
pub use master::{solve, solve_root, MasterModel, SolveResult, SolveStatus, SolverConfig};
pub use oracle::{audit_cuts, brute_force};
pub use slave::{solve_slave, BendersCut, SlaveResult};
