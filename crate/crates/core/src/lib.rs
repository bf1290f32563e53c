pub mod error;
pub mod gf;
pub mod prob;
pub mod channel;
pub mod code;
pub mod decode;
pub mod region;
pub mod sim;

pub use error::{Error, Result};
