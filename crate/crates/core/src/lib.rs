pub mod logic;
pub mod matching;
pub mod mil;
pub mod robot;
pub mod scoring;
pub mod session;
pub mod stats;
pub mod zoo;
