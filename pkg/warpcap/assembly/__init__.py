from .forms import AssembledSystem, assemble, energy, jacobian, quadrature_geometry, residual
