from .algebra import AlgebraMatrix, DivisionAlgebra, HermitianPD
from .distributions import (
    KotzRieszParams,
    RieszParams,
    SigmaFactorConvention,
    Variant,
    log_density_kr,
    log_density_riesz,
)
from .jack import hyper_0F1, jack_C
from .moments import MomentSpec, riesz_moment_ctau, riesz_moment_qtau
from .samplers import RngStream, sample_kr, sample_riesz, sample_stiefel
from .special import Partition, gen_pochhammer, log_mv_gamma_weighted, q_kappa

__all__ = (
    "AlgebraMatrix",
    "DivisionAlgebra",
    "HermitianPD",
    "KotzRieszParams",
    "MomentSpec",
    "Partition",
    "RieszParams",
    "RngStream",
    "SigmaFactorConvention",
    "Variant",
    "gen_pochhammer",
    "hyper_0F1",
    "jack_C",
    "log_density_kr",
    "log_density_riesz",
    "log_mv_gamma_weighted",
    "q_kappa",
    "riesz_moment_ctau",
    "riesz_moment_qtau",
    "sample_kr",
    "sample_riesz",
    "sample_stiefel",
)
