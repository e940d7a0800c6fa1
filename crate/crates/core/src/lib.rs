pub mod binpack;
pub mod cache;
pub mod feedback;
pub mod gpr;
pub mod ideation;
pub mod orchestrator;
pub mod stimuli;
pub mod trace;
