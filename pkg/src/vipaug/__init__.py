"""Frequency-domain image augmentation toolkit.

Augments images by perturbing their phase spectra according to how
much structure each phase coordinate carries: coordinates holding the
largest amplitude in their local filter window (vital phases) receive
weak variation, the rest receive strong variation or outright
substitution with the phases of classless pool images, and amplitudes
can be swapped wholesale with a partner image.
"""

from .analyzer import (
    CorruptionErrorTable,
    compute_mce,
    count_phase_fluctuations,
    load_error_table,
    phase_ablation_reconstruct,
)
from .augment import (
    AugmentConfig,
    ConfigError,
    PipelineTrace,
    PixelOp,
    PIXEL_OP_RANGES,
    apply_pixel_op,
    apr_sp,
    low_freq_retain_mask,
    pixel_stage_t,
    vipaug,
    vipaug_f,
    vipaug_g,
    vipaug_traced,
)
from .images import center_crop_resize, load_image, save_image
from .pool import (
    FractalPool,
    PoolEntry,
    build_pool,
    load_pool_cache,
    sample_entry,
    sample_phase,
    save_pool_cache,
)
from .rng import RngStream
from .spectrum import (
    DC_CENTERED,
    NATURAL,
    ComplexSpectrum,
    PolarSpectrum,
    dft2_per_channel,
    dft3,
    from_polar,
    idft2_per_channel,
    idft3,
    shift_dc_center,
    to_polar,
    wrap_phase,
)
from .vitality import RankMask, VitalMask, detect_vital, invert_mask, rank_mask

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "ComplexSpectrum",
    "ConfigError",
    "CorruptionErrorTable",
    "DC_CENTERED",
    "FractalPool",
    "NATURAL",
    "PIXEL_OP_RANGES",
    "PipelineTrace",
    "PixelOp",
    "PolarSpectrum",
    "PoolEntry",
    "RankMask",
    "RngStream",
    "VitalMask",
    "apply_pixel_op",
    "apr_sp",
    "build_pool",
    "center_crop_resize",
    "compute_mce",
    "count_phase_fluctuations",
    "detect_vital",
    "dft2_per_channel",
    "dft3",
    "from_polar",
    "idft2_per_channel",
    "idft3",
    "invert_mask",
    "load_error_table",
    "load_image",
    "load_pool_cache",
    "low_freq_retain_mask",
    "phase_ablation_reconstruct",
    "pixel_stage_t",
    "rank_mask",
    "sample_entry",
    "sample_phase",
    "save_image",
    "save_pool_cache",
    "shift_dc_center",
    "to_polar",
    "vipaug",
    "vipaug_f",
    "vipaug_g",
    "vipaug_traced",
    "wrap_phase",
]
