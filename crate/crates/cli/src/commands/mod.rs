pub mod analyze;
pub mod reproduce;
pub mod solve;
pub mod verify;
