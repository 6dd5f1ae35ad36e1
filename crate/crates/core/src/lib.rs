//! A differential-game model of cost-reducing R&D in a differentiated-goods
//! oligopoly, solved under price or quantity competition and under open-loop,
//! memoryless closed-loop or feedback strategies.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: demand, cost and R&D technology families with analytic
//!   partials and sign-assumption validation,
//! * [`reactions`]: slope inversion between inverse and direct demand, and
//!   the equilibrium reaction derivatives to a rival's cost change,
//! * [`equilibrium`]: symmetric static price and output equilibria,
//! * [`steadystate`]: steady-state investment, costates, stationarity
//!   conditions per mode and joint `(k*, m*)` roots,
//! * [`dynamics`]: fixed-step integration of the cost-state dynamics,
//! * [`analysis`]: regime and mode comparisons plus parameter sweeps,
//! * [`scenario`]: TOML scenario files driving the above.

pub mod analysis;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod reactions;
pub mod root;
pub mod scenario;
pub mod steadystate;

pub use analysis::{compare_bertrand_cournot, compare_loops, sweep, ComparisonRow, SweepGrid, SweepTable, Verdict};
pub use dynamics::{convergence_report, integrate, trajectory_csv, ConvergenceReport, Policy, Trajectory};
pub use equilibrium::{bertrand_static, cournot_static, soc_k, SocEntry, StaticEquilibrium};
pub use error::{Error, Result};
pub use model::{
    validate_model, CostFamily, DemandFamily, MarketParams, ModelSpec, ProbeRegion, RnDTech,
    SymmetricPoint, ValidationReport,
};
pub use reactions::{
    price_reaction, quantity_reaction, slope_product_gap, DemandPartials, ReactionDerivatives,
    StrategicClass,
};
pub use scenario::Scenario;
pub use steadystate::{
    comparative_statics_n, costate, feedback_residual, joint_steady_state, k_given_m, solve_k_star,
    ComparativeStatics, Mode, Regime, SteadyState,
};
