"""Exact simulation of boson sampling with coherent-state superposition inputs.

Each input mode carries a finite superposition of coherent states; the
register passes through a passive linear-optics unitary and is measured by
photon-number-resolving detectors.
"""
__version__ = "0.1.0"

from catsampler._backend import BACKEND
from catsampler.amplitudes import (
    fock_gamma_S,
    gamma_S,
    gamma_S_batch,
    gamma_S_product,
    gamma_S_tensor,
)
from catsampler.experiments import (
    bound_check,
    fock_reduction_check,
    hardness_bound,
    hom_check,
)
from catsampler.optics_core import (
    UnitaryMatrix,
    beamsplitter,
    compose,
    hadamard2,
    haar_random_unitary,
    permanent,
    permanent_naive,
    phase_shifter,
    validate_unitary,
)
from catsampler.propagation import expand_register, propagate_coherent, propagate_register
from catsampler.sampler import (
    CutoffPolicy,
    auto_cutoff,
    build_distribution,
    draw_samples,
    enumerate_signatures,
    total_variation,
)
from catsampler.states import (
    CatSpec,
    coherent,
    coherent_overlap,
    even_cat,
    fock_amplitude,
    make_cat,
    make_register,
    odd_cat,
    photon_number_dist,
    vacuum,
)
