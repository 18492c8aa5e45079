pub mod classify;
pub mod covmap2;
pub mod error;
pub mod linalg;
pub mod multicopy;
pub mod norms;
pub mod operators;
pub mod twirl;
