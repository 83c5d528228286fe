//! Unitary witnesses in a noncommutative Hecke algebra and the moment data
//! derived from them.
//!
//! Computations in this module run in the GNS picture of the canonical trace:
//! the algebra itself with inner product `⟨f, g⟩ = τ(g* f)` and orthonormal
//! basis `b_D = e_D / √R(D)`. Left multiplication there is a faithful
//! representation of dimension equal to the number of double cosets, which is
//! far smaller than `ℓ²(H\G)`. Certificate verification redoes the work
//! through `λ` on `ℓ²(H\G)`.

mod certificate;
mod decay;
mod search;
mod unitary;

pub use certificate::{root_of_unity_scan, verify_certificate, verify_certificate_with, Check, RootScan, Tolerances, VerifyReport, WitnessCertificate};
pub use decay::{decay_table, fejer_test_polynomial, haar_convergence_check, DecayRow, DecayTable, HaarReport, HaarRow};
pub use search::{search_witness, SearchConfig};
pub use unitary::{
    commutator, gns_matrix, hermitian_eigen, kronecker_trace_defect, moments, self_adjoint_from_params, spectral_data, unitary_from_selfadjoint, MomentTable, SpectralData,
    UnitaryElement,
};
