pub mod conjugate;
pub mod slln;
pub mod tailbound;
pub mod tau;
pub mod verify;
