"""Multiclass calibration: exact measures, kernel auditors and recalibration."""

from .audit import (
    LearnerOutput,
    Witness,
    audit_low_degree,
    audit_projected_smooth,
    audit_sigmoid,
    auditor_from_learner,
    kernel_audit,
    kernel_weak_learn,
    learner_from_auditor,
    lift_halfspace,
    residual_sample,
)
from .data import EmpiricalDistribution, aggregate
from .kernels import DualRkhsFunction, MultinomialKernel, VectorDualFunction, kernel_eval
from .lowerbound import (
    birthday_experiment,
    build_hard_family,
    sample_calibrated_on_v,
    sample_dw,
)
from .measures import (
    CalibrationReport,
    classwise_ce,
    confidence_ce,
    decision_ce_bruteforce,
    ece_canonical,
    fsce_exact,
    psce_oracle,
    smooth_ce_scalar,
    ssce_m,
    subset_smooth_ce,
    toplabel_ce,
)
from .polyapprox import jackson_approx, tanh_approx
from .recalibration import recalibrate, squared_loss
from .simplex import greedy_packing, lift, make_simplex, project_to_simplex
from .synth import Prior, gen_calibrated, gen_sigmoid_violation, gen_subset_violation

__version__ = "0.1.0"
