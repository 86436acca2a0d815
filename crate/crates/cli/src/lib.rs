//! Job runner for profinity-core: JSON jobs in, deterministic reports out.

pub mod batch;
pub mod job;
pub mod render;
pub mod report;
pub mod run;
pub mod selftest;

pub use job::{parse_job, Format, JobError, JobSpec};
pub use render::render_report;
pub use run::{run_job, Report};
