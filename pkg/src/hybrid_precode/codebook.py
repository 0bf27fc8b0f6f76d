"""Quantized beamsteering codebooks for the RF precoder."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Codebook:
    words: np.ndarray
    """``(n_antennas, n_cb)`` complex, one unit-modulus codeword per column."""
    steering_angles: np.ndarray

    @property
    def n_antennas(self) -> int:
        return self.words.shape[0]

    @property
    def size(self) -> int:
        return self.words.shape[1]

    def scaled(self, phase: complex) -> "Codebook":
        """Same codebook with every codeword multiplied by a common scalar."""
        words = self.words * phase
        words.setflags(write=False)
        return Codebook(words=words, steering_angles=self.steering_angles)


def beamsteering_codebook(n_antennas: int, n_cb: int) -> Codebook:
    """Steering vectors on a uniform spatial-frequency grid ``2*pi*n/n_cb``.

    Entry ``m`` of codeword ``n`` is ``exp(j*m*2*pi*n/n_cb)``. With
    ``n_cb == n_antennas`` this is the unnormalized DFT matrix.
    """
    if n_antennas < 1 or n_cb < 1:
        raise ValueError("n_antennas and n_cb must be positive")
    m = np.arange(n_antennas)[:, None]
    n = np.arange(n_cb)[None, :]
    # integer product mod n_cb keeps the phases exact on the grid
    words = np.exp(2j * np.pi * ((m * n) % n_cb) / n_cb)
    words.setflags(write=False)

    omega = 2 * np.pi * np.arange(n_cb) / n_cb
    omega = np.where(omega > np.pi, omega - 2 * np.pi, omega)
    angles = np.arcsin(omega / np.pi)
    return Codebook(words=words, steering_angles=angles)


def quantize_phases(v, bits: int) -> np.ndarray:
    """Snap every entry to the nearest point of a ``2**bits`` uniform phase grid.

    Ties round toward the lower grid index.
    """
    v = np.asarray(v, dtype=complex)
    if bits < 1:
        raise ValueError("bits must be >= 1")
    if np.any(v == 0):
        raise ValueError("cannot quantize the phase of a zero entry")
    levels = 2 ** bits
    step = 2 * np.pi / levels
    phase = np.mod(np.angle(v), 2 * np.pi)
    idx = np.ceil(phase / step - 0.5).astype(np.int64) % levels
    return np.exp(1j * step * idx)


def write_codebook_csv(cb: Codebook, path) -> None:
    """One row per antenna, one column per codeword, cells formatted ``re,im``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in cb.words:
            writer.writerow([f"{float(z.real)!r},{float(z.imag)!r}" for z in row])


def read_codebook_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=complex)
    for i, row in enumerate(rows):
        for j, cell in enumerate(row):
            re, im = cell.split(",")
            out[i, j] = complex(float(re), float(im))
    return out
