//! Exact coefficient-field towers, univariate polynomials, bivariate jets,
//! root decomposition and Laurent residues: the arithmetic substrate for the
//! germ and blow-up machinery.

pub mod bipoly;
pub mod jet;
pub mod residue;
pub mod roots;
pub mod tower;
pub mod upoly;

pub use jet::{Jet2, Prec};
pub use residue::{laurent_residue, USeries};
pub use roots::{root_decompose, root_representatives, ProjPoint, RootClass};
pub use tower::{FieldElement, Tower};
pub use upoly::UniPoly;
