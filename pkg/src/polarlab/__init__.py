"""CRC-polar concatenated codes: construction, encoding, channel
simulation, list decoding, CRC-aided sphere decoding, hybrid decoding,
and Monte-Carlo BLER/complexity sweeps."""

from .capacity import CapacityPoint, biawgn_c_v, na_rate, na_required_snr, q_function, q_inverse
from .channel import (
    NoiseModel,
    ReceivedVector,
    channel_llr,
    modulate,
    sigma_to_snr_db,
    snr_db_to_sigma,
    transmit,
    trial_rng,
)
from .codes import (
    CapacityExceededError,
    CodeSpec,
    SpectrumResult,
    bit_reversal,
    build_generator,
    distance_spectrum,
    encode,
    encode_message,
    polar_transform,
)
from .construction import ReliabilityProfile, ga_construct, ga_profile
from .crc import (
    CRC_REGISTRY,
    RegistryEntry,
    crc_check,
    crc_encode,
    parse_poly,
    recalc_crc,
    registry_lookup,
)
from .harness import (
    SimRecord,
    SweepConfig,
    TrialTrace,
    account_avn,
    read_records,
    run_sweep,
    write_records,
)
from .scl import AdaptiveResult, ListResult, adscl_decode, ca_scl_decode, sc_decode, scl_decode
from .sphere import (
    CaHdResult,
    ConstraintError,
    ConstraintSystem,
    SphereResult,
    build_constraints,
    ca_hd,
    ca_sd,
    initial_radius,
)

__version__ = "0.1.0"
