pub mod character;
pub mod error;
pub mod euler;
pub mod fermionic;
pub mod padic;
pub mod report;
pub mod verify;
pub mod zeta_char;
pub mod zeta_czp;

pub use error::{Error, Result};
