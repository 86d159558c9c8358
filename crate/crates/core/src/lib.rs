//! Homology, homology bases and width persistence of configuration spaces of
//! disks in a strip, computed from permutohedral cell complexes by discrete
//! Morse theory, with an independent Smith normal form oracle.

pub mod basis;
#[cfg(feature = "cli")]
pub mod cli;
pub mod chain;
pub mod combinat;
pub mod complexes;
pub mod error;
pub mod formula;
pub mod morse;
pub mod oracle;
pub mod order;
pub mod par;
pub mod persistence;
pub mod symbol;
pub mod unordered;
pub mod verify;

pub use chain::Chain;
pub use complexes::{ComplexKind, ComplexSpec, Ring};
pub use error::{Error, Result};
pub use order::{PCell, Weights};
pub use persistence::{Bar, Barcode, Mode};
pub use symbol::{Label, Symbol};
