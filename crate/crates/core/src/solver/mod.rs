//! Strategy synthesis for player Q.

pub mod families;
pub mod multi;
pub mod oracle;
pub mod two_unitary;

pub use families::*;
pub use multi::*;
pub use oracle::*;
pub use two_unitary::*;
