"""Numerical workbench for the open XXZ spin-1/2 chain.

The package builds the double-row transfer matrix of the spin-1/2 chain
with generic (non-diagonal) integrable boundaries, implements the gauged
creation/annihilation algebra of the modified algebraic Bethe ansatz, and
verifies the algebraic identities behind it as machine-checkable operator
statements at small chain length.

Layering, bottom up:

``scalars``   elementary weights, structural two-point functions, boundary
              scalars and the dynamical-coefficient family.
``lattice``   dense labeled operators and the six-vertex R-matrix.
``params``    model, boundary and gauge-frame parameter containers.
``boundary``  boundary matrices, reflection equations, quantum determinants.
``transfer``  double-row monodromy, operator family, transfer matrix,
              Hamiltonian, static exchange relations.
``gauge``     gauge vectors, the dynamical operator family, decompositions,
              string operators and their exchange identities.
``maba``      reference states, string states, off-shell actions, the
              closed-form leftover conjectures, nilpotency, triangular and
              constrained boundary reductions.
``solver``    Bethe-equation residuals, Newton with spectrum cross-checks,
              multi-start sweeps and boundary-deformation continuation.
``cli``       the ``openxxz`` command: verify / spectrum / solve.
"""

from .errors import (AmbiguousMatch, ConfigError, Diverged, OpenXXZError,
                     PathCollision, SingularJacobian, SingularPoint,
                     StepUnderflow, StuckAtSingularLocus)
from .params import (BoundaryParams, GaugeFrame, ModelParams, sample_boundary,
                     sample_frame, sample_model)
from .transfer import Chain
from .gauge import GaugedChain
from .maba import (BetheSystem, RootSet, engineer_constrained_boundary,
                   sample_point, sample_roots, triangular_limit_suite)
from .solver import BetheSolver, SolveReport, homotopy_solve

__version__ = "0.1.0"

__all__ = [
    "AmbiguousMatch", "BetheSolver", "BetheSystem", "BoundaryParams",
    "Chain", "ConfigError", "Diverged", "GaugeFrame", "GaugedChain",
    "ModelParams", "OpenXXZError", "PathCollision", "RootSet",
    "SingularJacobian", "SingularPoint", "SolveReport", "StepUnderflow",
    "StuckAtSingularLocus", "engineer_constrained_boundary", "homotopy_solve",
    "sample_boundary", "sample_frame", "sample_model", "sample_point",
    "sample_roots", "triangular_limit_suite", "__version__",
]
