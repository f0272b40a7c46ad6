//! Rigidity of parametrized Euler products.
//!
//! For purely imaginary shifts `a = iq` the Euler product
//!
//! ```text
//! Z^{abc}(s) = prod_p (1 - (p^a + p^b) p^{-s} + p^{c - 2s})^{-1}
//! ```
//!
//! is meromorphic on the whole plane exactly when `c = a + b`, in which case it
//! equals `zeta(s - a) zeta(s - b)`. Otherwise it continues to `Re(s) > 0` and
//! no further. The same holds for the `n`-parameter family built by
//! [`family::build_chain`].
//!
//! The crate makes that dichotomy computable:
//!
//! * [`char_ring`] is exact arithmetic in the virtual character ring of `R`.
//! * [`family`] builds the Euler-factor templates and tests unitarity both
//!   algebraically and by sampling roots.
//! * [`witt`] peels a template into powers of `(1 - chi_mu T^m)`, the finite
//!   certificate behind the continuation.
//! * [`analytic`] evaluates `zeta`, truncated Euler products, the continued
//!   product, pole atlases and boundary scans.
//! * [`datum`] evaluates products over user-supplied norm lists.
//! * [`verify`] runs the acceptance checks end to end.

pub mod analytic;
pub mod char_ring;
pub mod datum;
mod error;
pub mod family;
pub mod roots;
pub mod verify;
pub mod witt;

pub use error::{Error, Result};

pub use analytic::{EvalConfig, PoleEntry, PoleKind, Region};
pub use char_ring::{CharParam, CharPolynomial, VirtualCharacter};
pub use datum::EulerDatum;
pub use family::{FamilySpec, UnitarityVerdict};
pub use witt::{RigidityReport, RigidityVerdict, TruncatedSeries, ZetaDecomposition};
