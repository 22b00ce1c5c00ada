//! Optimization methods, their schedules, and run traces.

mod runners;
pub mod schedule;
mod trace;

pub use runners::{
    run_baseline_nsgd_mom, run_baseline_sgd, run_clip_nsgd_hess, run_dclip_nsgd_mvr, run_nsgd_hess, run_nsgd_mvr,
    run_sgd_mvr, Algorithm,
};
pub use schedule::{InitGradient, ProblemConstants, Schedule, ScheduleOrigin, ScheduleRule};
pub use trace::RunTrace;
