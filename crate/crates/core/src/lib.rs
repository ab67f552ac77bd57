pub mod elimination;
pub mod error;
pub mod exactmat;
pub mod json;
pub mod monomial;
pub mod parabolic;
pub mod rings;
pub mod shears;
pub mod sl2;
pub mod verify;
pub mod zp;

pub use error::{Error, Result};
