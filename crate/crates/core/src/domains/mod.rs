//! Polydiscs, the matrix ball `Omega_1[m, m]`, and the totally geodesic
//! embeddings of the ball and the polydisc into it.

mod embed;
mod omega1;
mod polydisc;

pub use embed::{verify_hereditary, Embedding, EmbeddingKind, HereditaryReport};
pub use omega1::{
    diagonal_gradient, diagonal_hessian, omega1_diastasis, omega1_diastasis_closed_form,
    omega1_distance, omega1_grad_diastasis, omega1_hessian_diastasis, omega1_metric,
    omega1_mobius, DomainMatrixPoint, Omega1Isometry, DEFECT_MARGIN, MAX_CONDITION,
};
pub use polydisc::{
    polydisc_diastasis, polydisc_distance, polydisc_grad_diastasis, polydisc_hessian_diastasis,
    polydisc_metric, PolydiscPoint,
};
