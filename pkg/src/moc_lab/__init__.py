"""moc-lab: numerical experiments on the determinant conjecture for sums of
normal matrices.

The toolkit builds normal dilations, enumerates sigma-points, and verifies
with explicit convex-combination certificates that determinants of sums
land in the sigma-point hull, covering the dilation theorem, direct-sum
composition, and the classical hermitian-pair results used as oracles.
"""

from .convex import (
    HullMembership,
    hull2d,
    membership2d,
    membership_lp,
    poly_coefficients,
    validate_certificate,
)
from .errors import (
    CapacityError,
    CertificateError,
    ClassificationError,
    ConvergenceError,
    DimensionError,
    MocLabError,
    ParseError,
)
from .matrices import (
    MatrixClassReport,
    block_mixer,
    classify,
    conj_add_scalar,
    determinant,
    dilate,
    direct_sum,
    load_matrix,
    matrix_from_json,
    matrix_to_json,
    save_matrix,
)
from .sigma import (
    DEFAULT_CAP,
    SigmaPointSet,
    compose_theta,
    enumerate_permutations,
    permutation_table,
    scale_guard,
    sigma_points,
)
from .spectra import (
    Spectrum,
    derive_seed,
    eig_hermitian,
    eig_normal,
    haar_unitary,
    match_multisets,
)
from .verify import (
    DeltaSample,
    DirectSumReport,
    DruryReport,
    FiedlerReport,
    MocReport,
    SimilarityReport,
    Theorem1Report,
    verify_direct_sum,
    verify_drury,
    verify_fiedler,
    verify_moc,
    verify_similarity_invariance,
    verify_theorem1,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CertificateError",
    "ClassificationError",
    "ConvergenceError",
    "DEFAULT_CAP",
    "DeltaSample",
    "DimensionError",
    "DirectSumReport",
    "DruryReport",
    "FiedlerReport",
    "HullMembership",
    "MatrixClassReport",
    "MocLabError",
    "MocReport",
    "ParseError",
    "SigmaPointSet",
    "SimilarityReport",
    "Spectrum",
    "Theorem1Report",
    "block_mixer",
    "classify",
    "compose_theta",
    "conj_add_scalar",
    "derive_seed",
    "determinant",
    "dilate",
    "direct_sum",
    "eig_hermitian",
    "eig_normal",
    "enumerate_permutations",
    "haar_unitary",
    "hull2d",
    "load_matrix",
    "match_multisets",
    "matrix_from_json",
    "matrix_to_json",
    "membership2d",
    "membership_lp",
    "permutation_table",
    "poly_coefficients",
    "save_matrix",
    "scale_guard",
    "sigma_points",
    "validate_certificate",
    "verify_direct_sum",
    "verify_drury",
    "verify_fiedler",
    "verify_moc",
    "verify_similarity_invariance",
    "verify_theorem1",
]
