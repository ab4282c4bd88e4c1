pub mod repro;
pub mod spacearg;
