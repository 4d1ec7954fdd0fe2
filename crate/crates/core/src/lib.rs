pub mod catalog;
pub mod folding;
pub mod geometry;
pub mod pipeline;
pub mod poly;
pub mod rational;
pub mod verify;
