use crate::error::Result;
use crate::forms::Reduction;
use crate::geometry::{build_mesh, DomainM, QuadratureMesh, QuadratureSettings};

/// A domain together with its quadrature mesh and reduction mode.
#[derive(Clone, Debug)]
pub struct Context {
    pub domain: DomainM,
    pub mesh: QuadratureMesh,
    pub reduction: Reduction,
}

impl Context {
    pub fn new(domain: DomainM, settings: QuadratureSettings) -> Result<Context> {
        let mesh = build_mesh(&domain, settings)?;
        Ok(Context { domain, mesh, reduction: Reduction::Ordered })
    }

    pub fn with_reduction(mut self, reduction: Reduction) -> Context {
        self.reduction = reduction;
        self
    }

    /// The same domain meshed with different settings.
    pub fn remeshed(&self, settings: QuadratureSettings) -> Result<Context> {
        Ok(Context { domain: self.domain.clone(), mesh: build_mesh(&self.domain, settings)?, reduction: self.reduction })
    }
}
