//! Cost-minimal allocation of user demand to fog servers whose availability
//! is uncertain.
//!
//! Each user multicasts its indivisible demand to a set of at most `M`
//! servers. Sending one unit to server `s` costs `w_s` whether or not the
//! server is up; server `s` is up with probability `p_s`, independently of
//! the others, and accepts at most `D_s` units in total. User `u` needs its
//! demand served with probability at least `l_u` and may spend at most
//! `B_u`. The goal is the cheapest assignment meeting all of this.
//!
//! ```
//! use mfa::instance::{Instance, ServerSpec, UserSpec};
//! use mfa::solver::{solve_exact, ExactOptions, SolveStatus};
//!
//! let user = UserSpec { demand: 1, budget: 10.0, service_level: 0.6 };
//! let inst = Instance::new(
//!     vec![user.clone(), user],
//!     vec![
//!         ServerSpec { unit_cost: 1.0, capacity: 1, availability: 0.7 },
//!         ServerSpec { unit_cost: 5.0, capacity: 2, availability: 0.7 },
//!     ],
//!     2,
//! )?;
//! let result = solve_exact(&inst, &ExactOptions::default());
//! assert_eq!(result.status, SolveStatus::Optimal);
//! assert_eq!(result.objective, Some(6.0));
//! # Ok::<(), mfa::instance::InstanceError>(())
//! ```
//!
//! Modules:
//!
//! * [`instance`]: data model, JSON format, generators, 3-Partition encoding.
//! * [`model`]: objective, constraint checks, replica arithmetic.
//! * [`solver`]: exact branch-and-bound, greedy, brute force, lower bound.
//! * [`experiments`]: scenario sweeps, CSV output, trend checks.

pub mod experiments;
pub mod instance;
pub mod model;
pub mod solver;
