"""Wideband clustered geometric channel for a ULA-to-ULA mmWave link.

Each realization is a stack of K per-subcarrier matrices ``h[k]`` of shape
``(n_ms, n_bs)``. Rays are grouped in clusters with uniformly drawn centers
and Laplacian angular offsets; each ray carries a complex gain and a delay
bounded by the cyclic prefix, so the frequency response at subcarrier ``k``
is a sum of rank-1 terms with a linear phase ramp.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigInvalid


@dataclass(frozen=True)
class ChannelConfig:
    n_bs: int = 32
    n_ms: int = 16
    k_subcarriers: int = 512
    cp_length: int = 128
    n_clusters: int = 6
    rays_per_cluster: int = 5
    angle_spread_deg: float = 10.0
    """Laplacian scale parameter of the per-ray angle offsets, in degrees."""
    sample_period: float = 1.0

    def __post_init__(self):
        counts = (self.n_bs, self.n_ms, self.k_subcarriers, self.cp_length,
                  self.n_clusters, self.rays_per_cluster)
        if any(int(c) != c or c < 1 for c in counts):
            raise ConfigInvalid(f"channel counts must be positive integers: {self}")
        if not self.cp_length < self.k_subcarriers:
            raise ConfigInvalid("cp_length must be smaller than k_subcarriers")
        if not self.angle_spread_deg > 0:
            raise ConfigInvalid("angle_spread_deg must be positive")
        if not self.sample_period > 0:
            raise ConfigInvalid("sample_period must be positive")

    @property
    def n_rays(self) -> int:
        return self.n_clusters * self.rays_per_cluster


@dataclass(frozen=True)
class PathSet:
    """Per-ray parameters, arrays of shape ``(n_clusters, rays_per_cluster)``."""

    gain: np.ndarray
    delay: np.ndarray
    aod: np.ndarray
    aoa: np.ndarray

    @property
    def n_rays(self) -> int:
        return self.gain.size


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray
    source: PathSet | None
    config: ChannelConfig

    @property
    def k_subcarriers(self) -> int:
        return self.h.shape[0]

    @property
    def n_ms(self) -> int:
        return self.h.shape[1]

    @property
    def n_bs(self) -> int:
        return self.h.shape[2]


def ula_response(angle: float, n: int) -> np.ndarray:
    """Half-wavelength ULA response with unit-modulus entries ``exp(j*pi*m*sin(angle))``."""
    m = np.arange(n)
    return np.exp(1j * np.pi * m * np.sin(angle))


def sample_paths(config: ChannelConfig, rng: np.random.Generator) -> PathSet:
    shape = (config.n_clusters, config.rays_per_cluster)
    scale = np.deg2rad(config.angle_spread_deg)

    aoa_center = rng.uniform(0.0, 2 * np.pi, size=config.n_clusters)
    aod_center = rng.uniform(0.0, 2 * np.pi, size=config.n_clusters)
    aoa = aoa_center[:, None] + rng.laplace(0.0, scale, size=shape)
    aod = aod_center[:, None] + rng.laplace(0.0, scale, size=shape)

    gain = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    delay = rng.uniform(0.0, config.cp_length * config.sample_period, size=shape)
    return PathSet(gain=gain, delay=delay, aod=aod, aoa=aoa)


def freq_response(paths: PathSet, config: ChannelConfig) -> ChannelRealization:
    """Per-subcarrier channel matrices for a given set of rays.

    The array responses enter with unit norm (``ula_response / sqrt(n)``) and
    the sum is scaled by ``sqrt(n_bs * n_ms / n_rays)``, which gives
    ``E ||h[k]||_F^2 = n_bs * n_ms``.
    """
    n_bs, n_ms, K = config.n_bs, config.n_ms, config.k_subcarriers
    gain = paths.gain.ravel()
    delay = paths.delay.ravel()
    n_rays = gain.size

    a_ms = np.stack([ula_response(t, n_ms) for t in paths.aoa.ravel()], axis=1) / np.sqrt(n_ms)
    a_bs = np.stack([ula_response(p, n_bs) for p in paths.aod.ravel()], axis=1) / np.sqrt(n_bs)

    k = np.arange(K)
    ramp = np.exp(-2j * np.pi * np.outer(k, delay) / (K * config.sample_period))  # (K, rays)
    gamma = np.sqrt(n_bs * n_ms / n_rays)
    weights = gamma * ramp * gain  # (K, rays)
    h = np.einsum("kr,mr,nr->kmn", weights, a_ms, a_bs.conj())
    h.setflags(write=False)
    return ChannelRealization(h=h, source=paths, config=config)


def generate_channel(config: ChannelConfig, rng: np.random.Generator | int) -> ChannelRealization:
    rng = np.random.default_rng(rng)
    return freq_response(sample_paths(config, rng), config)


def as_channel_stack(h) -> np.ndarray:
    """Accept a realization or a raw ``(K, n_ms, n_bs)`` array."""
    if isinstance(h, ChannelRealization):
        return h.h
    h = np.asarray(h, dtype=complex)
    if h.ndim == 2:
        h = h[None]
    return h


def realization_to_json(real: ChannelRealization) -> str:
    """Debug dump: each ``h[k]`` flattened row-major as interleaved re/im pairs."""
    flat = real.h.reshape(real.k_subcarriers, -1)
    inter = np.stack([flat.real, flat.imag], axis=-1).reshape(real.k_subcarriers, -1)
    doc = {
        "shape": list(real.h.shape),
        "config": asdict(real.config),
        "h": inter.tolist(),
    }
    if real.source is not None:
        p = real.source
        doc["paths"] = {
            "gain": np.stack([p.gain.real, p.gain.imag], axis=-1).tolist(),
            "delay": p.delay.tolist(),
            "aod": p.aod.tolist(),
            "aoa": p.aoa.tolist(),
        }
    return json.dumps(doc)


def realization_from_json(text: str) -> ChannelRealization:
    doc = json.loads(text)
    K, n_ms, n_bs = doc["shape"]
    inter = np.asarray(doc["h"], dtype=float).reshape(K, n_ms * n_bs, 2)
    h = (inter[..., 0] + 1j * inter[..., 1]).reshape(K, n_ms, n_bs)
    h.setflags(write=False)
    paths = None
    if "paths" in doc:
        p = doc["paths"]
        g = np.asarray(p["gain"], dtype=float)
        paths = PathSet(gain=g[..., 0] + 1j * g[..., 1], delay=np.asarray(p["delay"]),
                        aod=np.asarray(p["aod"]), aoa=np.asarray(p["aoa"]))
    return ChannelRealization(h=h, source=paths, config=ChannelConfig(**doc["config"]))
