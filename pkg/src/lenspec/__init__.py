"""Length-spectrum comparison toolkit for free group actions.

Stable translation lengths, windowed dilations between marked length
spectra, joint stable lengths of finite subsets, joint spectral radii,
and executable checks of the comparison inequalities relating them, on
concrete models: weighted trees, word metrics, Mobius actions on the
hyperbolic plane and 3-space, and singular-value pseudo-metrics of
linear representations.
"""

from .actions import (
    ActionModel,
    AnosovCertificate,
    LengthBracket,
    anosov_certificate,
    displacement,
    exact_div,
    stable_length_bracket,
)
from .bounds import (
    HOLDS,
    HYPOTHESIS_FAILED,
    INCONCLUSIVE,
    VIOLATED,
    ClassTable,
    CoverReport,
    DeltaReport,
    DilationReport,
    SandwichReport,
    VerifierConfig,
    WindowSup,
    cobounded_dilation_report,
    dilation_window,
    displacement_ball,
    displacement_sandwich_report,
    joint_vs_dilation_report,
    metric_distance_report,
    pointwise_cover_report,
    ratio_envelope_report,
    spectral_dilation_report,
    window_comparison_bound,
    word_metric_dilation_report,
)
from .errors import InputError, NumericError, ResourceCapError, SearchExhaustedError
from .jsl import (
    BfCheck,
    BochiBound,
    BochiConstants,
    JointLengthProfile,
    JsrProfile,
    SubsetS,
    bf_lower_check,
    bf_minimal_K,
    bf_upper,
    bochi_rhs,
    joint_stable_length,
    joint_stable_profile,
    jsr_bracket,
    jsr_profile,
    tree_joint_profile,
)
from .spaces import (
    LinearRepModel,
    MatrixActionModel,
    MobiusModel,
    SchottkyAction,
    SchottkyBuilder,
    TreeModel,
    WordMetricModel,
    build_schottky,
)
from .words import (
    ConjClass,
    GeneratingSet,
    Word,
    cyclic_reduce,
    enumerate_ball,
    enumerate_conj_classes,
    free_reduce,
    iter_class_reps,
    word_length,
)

__version__ = "0.1.0"

__all__ = [
    "ActionModel",
    "AnosovCertificate",
    "BfCheck",
    "BochiBound",
    "BochiConstants",
    "ClassTable",
    "ConjClass",
    "CoverReport",
    "DeltaReport",
    "DilationReport",
    "GeneratingSet",
    "HOLDS",
    "HYPOTHESIS_FAILED",
    "INCONCLUSIVE",
    "InputError",
    "JointLengthProfile",
    "JsrProfile",
    "LengthBracket",
    "LinearRepModel",
    "MatrixActionModel",
    "MobiusModel",
    "NumericError",
    "ResourceCapError",
    "SandwichReport",
    "SchottkyAction",
    "SchottkyBuilder",
    "SearchExhaustedError",
    "SubsetS",
    "TreeModel",
    "VIOLATED",
    "VerifierConfig",
    "Word",
    "WordMetricModel",
    "WindowSup",
    "anosov_certificate",
    "bf_lower_check",
    "bf_minimal_K",
    "bf_upper",
    "bochi_rhs",
    "build_schottky",
    "cobounded_dilation_report",
    "cyclic_reduce",
    "dilation_window",
    "displacement",
    "displacement_ball",
    "displacement_sandwich_report",
    "enumerate_ball",
    "enumerate_conj_classes",
    "exact_div",
    "free_reduce",
    "iter_class_reps",
    "joint_stable_length",
    "joint_stable_profile",
    "joint_vs_dilation_report",
    "jsr_bracket",
    "jsr_profile",
    "metric_distance_report",
    "pointwise_cover_report",
    "ratio_envelope_report",
    "spectral_dilation_report",
    "stable_length_bracket",
    "tree_joint_profile",
    "window_comparison_bound",
    "word_length",
    "word_metric_dilation_report",
    "__version__",
]
