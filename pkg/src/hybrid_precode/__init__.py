"""Frequency-selective hybrid analog/digital precoding for mmWave MIMO-OFDM."""

from .channel import (ChannelConfig, ChannelRealization, PathSet, freq_response, generate_channel,
                      sample_paths, ula_response)
from .codebook import Codebook, beamsteering_codebook, quantize_phases
from .errors import ConfigInvalid, EmptyResults, RankDeficient, ShapeMismatch, TooLarge
from .precoding import (Algorithm, AlgorithmResult, HybridPrecoder, SpectrumSummary, approx_gs_hp,
                        approx_gs_select, dg_hp, exhaustive_hp, gs_hp, inv_sqrt_gram,
                        mutual_information, optimal_baseband, orth_complement_projector,
                        projector_mi, spectrum_summary, svd_bound)

__version__ = "0.1.0"
