//! Exponential sums over norm spectra, major/minor arc geometry and the
//! Fejér-type kernels used to smooth them.

mod arcs;
mod domains;
mod kernels;
mod spectrum;

pub use arcs::{dirichlet_decompose, ArcPoint};
pub use domains::{
    nine_domain_report, nu, BoundaryExponents, DomainGeometry, DomainStats, NineDomainConfig,
    NineDomainReport,
};
pub use kernels::{kernel_s, kernel_s2, kernel_t, poisson_check, PoissonReport};
pub use spectrum::{
    density_lower_bound, equidistribution_ratio, eval_s, parseval, parseval_quadrature, Spectrum,
};
