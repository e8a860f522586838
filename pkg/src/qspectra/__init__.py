"""Spectra of right-linear operators on quaternionic Hilbert spaces.

Two notions of spectrum for a quaternionic matrix T, computed and
cross-validated: the right spectrum, defined through real-linear
invertibility of x -> x*lam - T*x, and the spectrum of the right-linear
quadratic operator T^2 - 2*Re(lam)*T + |lam|^2 I.  Both are circular sets
and coincide sphere for sphere; the library treats that agreement as a
testable contract and reports everything in similarity spheres.
"""

from .quat import (
    Quaternion,
    SimilaritySphere,
    UnitQuaternion,
    conj,
    conjugate_by,
    im,
    mul,
    norm,
    re,
    sample_sphere,
    similarity_class,
    uniform_unit_quaternion,
)
from .qmat import (
    ComplexAdjoint,
    QMatrix,
    RealOp,
    adjoint,
    build_Delta,
    build_T_lambda,
    complex_adjoint,
    load_qmatrix,
    matvec,
    random_qmatrix,
    real_embed,
    right_mult_embed,
    save_qmatrix,
)
from .numerics import (
    EigenResult,
    EigensolverError,
    NonConvergenceError,
    NumericsError,
    SingularEstimate,
    StructuralIntegrityError,
    eig_dense,
    sigma_max,
    sigma_min,
)
from .spectral import (
    BallCheck,
    CircularityCheck,
    MembershipVerdict,
    ScanGrid,
    SpectrumMismatch,
    SpectrumReport,
    SphereEntry,
    classify_parts_finite,
    right_spectrum,
    right_spectrum_member,
    s_spectrum,
    slice_scan,
    verify_ball_containment,
    verify_circularity,
    verify_factorization,
    verify_slide_identity,
)
from .gallery import (
    OperatorSpec,
    TrendReport,
    eigenwitness_backward_shift,
    materialize,
    trend,
)

__version__ = "0.1.0"
