"""Link-level simulation toolkit for low-resolution quantized MIMO uplinks."""

from .quantization import (
    DegenerateLevels,
    QuantizerSpec,
    agc_scale,
    distortion_factor,
    distortion_for_bits,
    make_edge_level_quantizer,
    make_uniform_quantizer,
    optimal_step,
    quantize_complex_vector,
    quantize_real,
    receiver_quantizer,
)
from .hermite import (
    HermiteExpansion,
    cqq_closed_form,
    hermite_coefficient,
    hermite_expansion,
    lambda_closed_form,
    sohe_distortion,
    sohe_predict,
)
from .linear_models import (
    ModelCovariances,
    aqnm_covariances,
    bussgang_covariances,
    c_rr,
    generalized_lambda_matrix,
)
from .comms import (
    Constellation,
    LinkScenario,
    hard_decide,
    make_constellation,
    noise_variance_from_ebn0,
    rayleigh_channel,
    transmit,
)
from .equalizers import (
    EqualizerMatrix,
    elmmse,
    equalize,
    lmmse_aqnm,
    lmmse_bussgang_1bit,
    lmmse_modified,
    lmmse_sohe,
    model_transform_theta,
    zf,
)
from .channel_estimation import (
    PilotBlock,
    dft_pilots,
    empirical_rate,
    estimate_channel,
    sum_spectral_efficiency,
    training_observation,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    MetricRecord,
    collision_probability,
    empirical_collision,
    read_csv,
    run_ber,
    run_collision,
    run_experiment,
    run_mse,
    run_se,
    write_csv,
)

__version__ = "0.1.0"
