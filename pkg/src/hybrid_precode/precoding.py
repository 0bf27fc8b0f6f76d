"""Hybrid precoder design for frequency-selective MIMO-OFDM.

The RF precoder ``f_rf`` (``n_bs x n_rf``) is shared by all subcarriers and
built from codebook columns; the baseband precoders ``baseband[k]``
(``n_rf x n_s``) are per subcarrier. Given ``f_rf`` the best baseband is
known in closed form (:func:`optimal_baseband`), so every design algorithm
here reduces to choosing codebook columns:

* :func:`exhaustive_hp` -- all ``n_rf``-subsets of distinct codewords.
* :func:`dg_hp` -- greedy, scoring each candidate by the projected-channel
  mutual information.
* :func:`gs_hp` -- the same greedy search with the candidate orthogonalized
  against the selected columns first; it picks the same columns as
  :func:`dg_hp`.
* :func:`approx_gs_hp` -- SNR-free greedy selection by maximum projection on
  the dominant right singular subspaces of all subcarriers.
* :func:`svd_bound` -- unconstrained fully digital reference.

Channel arguments accept a :class:`~hybrid_precode.channel.ChannelRealization`
or a ``(K, n_ms, n_bs)`` array.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import as_channel_stack
from .codebook import Codebook
from .errors import RankDeficient, ShapeMismatch, TooLarge

RANK_TOL = 1e-10
TIE_RTOL = 1e-12
EXHAUSTIVE_LIMIT = 10**6


class Algorithm(str, enum.Enum):
    EXHAUSTIVE = "exhaustive_hp"
    DGHP = "dg_hp"
    GSHP = "gs_hp"
    APPROX_GSHP = "approx_gs_hp"
    SVD_BOUND = "svd_bound"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class HybridPrecoder:
    rf_indices: tuple[int, ...]
    f_rf: np.ndarray
    baseband: np.ndarray
    """``(K, n_rf, n_s)`` stack of per-subcarrier baseband matrices."""

    def effective(self) -> np.ndarray:
        """``f_rf @ baseband[k]`` for every ``k``, shape ``(K, n_bs, n_s)``."""
        return self.f_rf @ self.baseband

    def semi_unitarity_error(self) -> float:
        """Largest ``||E[k]^* E[k] - I||_F`` over subcarriers."""
        eff = self.effective()
        gram = eff.conj().swapaxes(-1, -2) @ eff
        eye = np.eye(gram.shape[-1])
        return float(np.max(np.linalg.norm(gram - eye, axis=(-2, -1))))


@dataclass
class AlgorithmResult:
    algorithm: Algorithm
    precoder: HybridPrecoder | None
    mi_trace: np.ndarray
    rate: float
    metadata: dict = field(default_factory=dict)

    @property
    def rf_indices(self) -> tuple[int, ...]:
        return () if self.precoder is None else self.precoder.rf_indices


@dataclass(frozen=True)
class SpectrumSummary:
    sigma: np.ndarray
    """``(K, n_s, n_s)`` real diagonal blocks of the top singular values."""
    v: np.ndarray
    """``(K, n_bs, n_s)`` matching right singular vectors."""


# --------------------------------------------------------------------------
# linear-algebra building blocks


def inv_sqrt_gram(f_rf) -> np.ndarray:
    """Hermitian inverse square root of ``f_rf^* f_rf``."""
    f_rf = np.asarray(f_rf, dtype=complex)
    gram = f_rf.conj().T @ f_rf
    w, u = np.linalg.eigh(gram)
    if w.size == 0:
        return np.zeros((0, 0), dtype=complex)
    if not w[0] > RANK_TOL * w[-1] or not w[-1] > 0:
        raise RankDeficient(f"Gram eigenvalue ratio {w[0] / w[-1] if w[-1] else 0:.3g} below {RANK_TOL}")
    return (u / np.sqrt(w)) @ u.conj().T


def _orthonormal_basis(f_rf: np.ndarray) -> np.ndarray:
    # f_rf (f_rf^* f_rf)^{-1/2} is semi-unitary with the same column space
    return f_rf @ inv_sqrt_gram(f_rf)


def orth_complement_projector(f_rf, n_bs: int | None = None) -> np.ndarray:
    """``I - F (F^* F)^{-1} F^*``; the identity when ``f_rf`` has no columns."""
    f_rf = np.asarray(f_rf, dtype=complex)
    if n_bs is None:
        n_bs = f_rf.shape[0]
    if f_rf.ndim < 2 or f_rf.shape[1] == 0:
        return np.eye(n_bs, dtype=complex)
    q = _orthonormal_basis(f_rf)
    return np.eye(f_rf.shape[0], dtype=complex) - q @ q.conj().T


def _check_shapes(hs: np.ndarray, f_rf: np.ndarray):
    if f_rf.ndim != 2 or hs.ndim != 3 or hs.shape[2] != f_rf.shape[0]:
        raise ShapeMismatch(f"channel {hs.shape} incompatible with RF precoder {f_rf.shape}")


def optimal_baseband(f_rf, h, n_s: int) -> np.ndarray:
    """Mutual-information-optimal baseband precoders for a fixed RF precoder.

    Returns ``(F^*F)^{-1/2} Vbar[k][:, :n_s]`` where ``Vbar[k]`` holds the right
    singular vectors of ``h[k] F (F^*F)^{-1/2}``. The left unitary factor of
    ``h[k]``'s SVD does not change right singular vectors, so the SVD is taken
    of that product directly.
    """
    hs = as_channel_stack(h)
    f_rf = np.asarray(f_rf, dtype=complex)
    _check_shapes(hs, f_rf)
    n_rf = f_rf.shape[1]
    if not 1 <= n_s <= n_rf:
        raise ShapeMismatch(f"n_s={n_s} must lie in [1, {n_rf}]")
    m = inv_sqrt_gram(f_rf)
    b = hs @ (f_rf @ m)
    _, _, vh = np.linalg.svd(b, full_matrices=True)
    vbar = vh.conj().swapaxes(-1, -2)[:, :, :n_s]
    return m @ vbar


def mutual_information(h, f_rf, baseband, rho: float, n_s: int) -> float:
    """Average over subcarriers of ``log2 det(I + rho/n_s H F_RF F F^* F_RF^* H^*)``."""
    hs = as_channel_stack(h)
    f_rf = np.asarray(f_rf, dtype=complex)
    baseband = np.asarray(baseband, dtype=complex)
    _check_shapes(hs, f_rf)
    if baseband.ndim == 2:
        baseband = np.broadcast_to(baseband, (hs.shape[0],) + baseband.shape)
    if baseband.shape[0] != hs.shape[0] or baseband.shape[1] != f_rf.shape[1]:
        raise ShapeMismatch(f"baseband {baseband.shape} incompatible with RF precoder {f_rf.shape}")
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    a = hs @ f_rf @ baseband
    cov = np.eye(hs.shape[1]) + (rho / n_s) * (a @ a.conj().swapaxes(-1, -2))
    sign, logdet = np.linalg.slogdet(cov)
    return float(np.mean(logdet.real) / np.log(2))


def _projected_sq_singular(hs: np.ndarray, f_rf: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of ``h[k] P h[k]^*`` (nonzero part), shape ``(K, r)``."""
    q = _orthonormal_basis(f_rf)
    s = np.linalg.svd(hs @ q, compute_uv=False)
    return s**2


def _log_sum(lams: np.ndarray, n_streams: int, scale: float) -> float:
    lams = lams[..., :n_streams]
    return float(np.sum(np.log2(1.0 + scale * np.maximum(lams, 0.0))) / lams.shape[0])


def projector_mi(h, f_rf, rho: float, n_streams: int, power_split: int | None = None) -> float:
    """Mutual information with ``f_rf`` replaced by the projector onto its span.

    ``(1/K) sum_k sum_{l<=n_streams} log2(1 + rho/power_split * lambda_l)`` with
    ``lambda_l`` the descending eigenvalues of ``h[k] P h[k]^*``.
    ``power_split`` defaults to ``n_streams``.
    """
    hs = as_channel_stack(h)
    f_rf = np.asarray(f_rf, dtype=complex)
    if f_rf.ndim == 1:
        f_rf = f_rf[:, None]
    _check_shapes(hs, f_rf)
    if n_streams > f_rf.shape[1]:
        raise ShapeMismatch("n_streams exceeds the number of RF columns")
    split = n_streams if power_split is None else power_split
    return _log_sum(_projected_sq_singular(hs, f_rf), n_streams, rho / split)


def spectrum_summary(h, n_s: int) -> SpectrumSummary:
    hs = as_channel_stack(h)
    _, s, vh = np.linalg.svd(hs, full_matrices=False)
    if n_s > s.shape[1]:
        raise ShapeMismatch(f"n_s={n_s} exceeds channel rank bound {s.shape[1]}")
    sig = s[:, :n_s]
    sigma = np.zeros(sig.shape + (n_s,))
    idx = np.arange(n_s)
    sigma[:, idx, idx] = sig
    v = vh[:, :n_s, :].conj().swapaxes(-1, -2)
    return SpectrumSummary(sigma=sigma, v=v)


def _argmax_lowest(scores: np.ndarray) -> int:
    """Index of the maximum; near-ties within ``TIE_RTOL`` go to the lowest index."""
    best = np.max(scores)
    thresh = best - TIE_RTOL * max(abs(best), 1.0)
    return int(np.flatnonzero(scores >= thresh)[0])


def _finish(algorithm, hs, cb, indices, rho, n_s, trace, metadata) -> AlgorithmResult:
    f_rf = cb.words[:, list(indices)]
    bb = optimal_baseband(f_rf, hs, n_s)
    rate = mutual_information(hs, f_rf, bb, rho, n_s)
    precoder = HybridPrecoder(rf_indices=tuple(int(i) for i in indices), f_rf=f_rf, baseband=bb)
    return AlgorithmResult(algorithm, precoder, np.asarray(trace, dtype=float), rate, metadata)


def _check_greedy(cb: Codebook, hs: np.ndarray, n_rf: int, n_s: int):
    if cb.n_antennas != hs.shape[2]:
        raise ShapeMismatch(f"codebook has {cb.n_antennas} antennas, channel has {hs.shape[2]}")
    if not 1 <= n_rf <= cb.size:
        raise ValueError(f"n_rf={n_rf} must lie in [1, {cb.size}]")
    if not 1 <= n_s <= n_rf:
        raise ValueError(f"n_s={n_s} must lie in [1, {n_rf}]")


# --------------------------------------------------------------------------
# design algorithms


def dg_hp(h, cb: Codebook, n_rf: int, rho: float, n_s: int | None = None) -> AlgorithmResult:
    """Direct greedy selection.

    At iteration ``i`` every unselected codeword ``f_n`` is scored by
    :func:`projector_mi` of ``[F^(i-1), f_n]`` over ``i`` streams with a fixed
    ``rho / n_rf`` per stream, and the best one is appended. ``mi_trace[i-1]``
    is the winning score; the reported rate uses ``n_s`` streams.
    """
    hs = as_channel_stack(h)
    n_s = n_rf if n_s is None else n_s
    _check_greedy(cb, hs, n_rf, n_s)
    selected: list[int] = []
    trace = []
    for i in range(1, n_rf + 1):
        scores = np.full(cb.size, -np.inf)
        for n in range(cb.size):
            if n in selected:
                continue
            try:
                scores[n] = projector_mi(hs, cb.words[:, selected + [n]], rho, i, power_split=n_rf)
            except RankDeficient:
                continue
        best = _argmax_lowest(scores)
        selected.append(best)
        trace.append(scores[best])
    return _finish(Algorithm.DGHP, hs, cb, selected, rho, n_s, trace,
                   {"score_snr_per_stream": f"rho/{n_rf}"})


def _gs_scores_full(hs, q_prev, units, rho, i, n_rf):
    # eigenvalues of T + (h u)(h u)^*, T = h Q Q^* h^*, for a chunk of candidates
    a = hs @ q_prev                                       # (K, n_ms, i-1)
    t = a @ a.conj().swapaxes(-1, -2)                     # (K, n_ms, n_ms)
    g = np.einsum("kmb,bc->ckm", hs, units)               # (C, K, n_ms)
    m = t[None] + g[..., :, None] * g[..., None, :].conj()
    lams = np.linalg.eigvalsh(m)[..., ::-1][..., :i]      # (C, K, i)
    return np.sum(np.log2(1.0 + (rho / n_rf) * np.maximum(lams, 0.0)), axis=(-1, -2)) / hs.shape[0]


def _gs_scores_bordered(hs, q_prev, units, rho, i, n_rf):
    # Same eigenvalues from the previous iteration's eigenpairs: with
    # A = h Q and A^*A = W D W^*, the nonzero spectrum of T + g g^* is that of
    # the arrowhead matrix [[D, W^*A^*g], [g^*AW, |g|^2]].
    K = hs.shape[0]
    a = hs @ q_prev
    g = np.einsum("kmb,bc->ckm", hs, units)               # (C, K, n_ms)
    if i == 1:
        lams = np.sum(np.abs(g) ** 2, axis=-1)[..., None]
        return np.sum(np.log2(1.0 + (rho / n_rf) * lams), axis=(-1, -2)) / K
    d, w = np.linalg.eigh(a.conj().swapaxes(-1, -2) @ a)  # (K, i-1), (K, i-1, i-1)
    c = np.einsum("kji,kmj,ckm->cki", w.conj(), a.conj(), g)
    arrow = np.zeros((units.shape[1], K, i, i), dtype=complex)
    idx = np.arange(i - 1)
    arrow[..., idx, idx] = d[None]
    arrow[..., :-1, -1] = c
    arrow[..., -1, :-1] = c.conj()
    arrow[..., -1, -1] = np.sum(np.abs(g) ** 2, axis=-1)
    lams = np.linalg.eigvalsh(arrow)[..., ::-1][..., : min(i, hs.shape[1])]
    return np.sum(np.log2(1.0 + (rho / n_rf) * np.maximum(lams, 0.0)), axis=(-1, -2)) / K


def gs_hp(h, cb: Codebook, n_rf: int, rho: float, n_s: int | None = None, *,
          fast_eig: bool = False, chunk: int = 16) -> AlgorithmResult:
    """Greedy selection with Gram-Schmidt orthogonalized candidates.

    Each candidate is projected onto the orthogonal complement of the span of
    the selected codewords and normalized; its score is the log-sum over the
    top ``i`` eigenvalues of ``T + h u u^* h^*`` where ``T`` is the previous
    projected-channel Gram matrix. The stored precoder keeps the original
    codewords. ``fast_eig`` computes the same eigenvalues from the previous
    iteration's eigenpairs instead of a full ``n_ms x n_ms`` decomposition.
    """
    hs = as_channel_stack(h)
    n_s = n_rf if n_s is None else n_s
    _check_greedy(cb, hs, n_rf, n_s)
    n_bs = hs.shape[2]
    score_fn = _gs_scores_bordered if fast_eig else _gs_scores_full

    selected: list[int] = []
    trace = []
    q_prev = np.zeros((n_bs, 0), dtype=complex)
    for i in range(1, n_rf + 1):
        f_sel = cb.words[:, selected]
        p_perp = orth_complement_projector(f_sel, n_bs)
        proj = p_perp @ cb.words
        norms = np.linalg.norm(proj, axis=0)
        valid = norms > np.sqrt(RANK_TOL) * np.linalg.norm(cb.words, axis=0)
        valid[selected] = False
        units = np.where(valid, proj / np.where(valid, norms, 1.0), 0.0)

        scores = np.full(cb.size, -np.inf)
        cand = np.flatnonzero(valid)
        for start in range(0, cand.size, chunk):
            sl = cand[start:start + chunk]
            scores[sl] = score_fn(hs, q_prev, units[:, sl], rho, i, n_rf)
        best = _argmax_lowest(scores)
        selected.append(best)
        trace.append(scores[best])
        q_prev = np.hstack([q_prev, units[:, best:best + 1]])
    return _finish(Algorithm.GSHP, hs, cb, selected, rho, n_s, trace,
                   {"score_snr_per_stream": f"rho/{n_rf}", "fast_eig": fast_eig})


def approx_gs_select(h, cb: Codebook, n_rf: int, n_s: int) -> tuple[list[int], list[float]]:
    """SNR-free RF selection by maximum projection.

    Stacks ``sigma[k] @ v[k]^*`` over subcarriers into ``pi`` (``K*n_s x n_bs``),
    then repeatedly picks the codeword with the largest ``||pi @ f_n||`` and
    projects the chosen direction out of ``pi``. Returns indices and the
    squared winning norms.
    """
    hs = as_channel_stack(h)
    _check_greedy(cb, hs, n_rf, n_s)
    spec = spectrum_summary(hs, n_s)
    pi = (spec.sigma @ spec.v.conj().swapaxes(-1, -2)).reshape(-1, hs.shape[2])
    selected: list[int] = []
    scores_out = []
    for _ in range(n_rf):
        psi = pi @ cb.words
        score = np.sum(np.abs(psi) ** 2, axis=0)
        score[selected] = -np.inf
        best = _argmax_lowest(score)
        selected.append(best)
        scores_out.append(float(score[best]))
        pi = pi @ orth_complement_projector(cb.words[:, selected])
    return selected, scores_out


def approx_gs_hp(h, cb: Codebook, n_rf: int, n_s: int, rho: float = 1.0,
                 selection: list[int] | None = None) -> AlgorithmResult:
    """Approximate Gram-Schmidt hybrid precoding.

    RF columns come from :func:`approx_gs_select`, which does not depend on
    ``rho``; pass ``selection`` to reuse one across SNR points. ``rho`` only
    affects the reported rate.
    """
    hs = as_channel_stack(h)
    scores = None
    if selection is None:
        selection, scores = approx_gs_select(hs, cb, n_rf, n_s)
    meta = {"selection_scores": scores} if scores is not None else {}
    return _finish(Algorithm.APPROX_GSHP, hs, cb, selection, rho, n_s, [], meta)


def exhaustive_hp(h, cb: Codebook, n_rf: int, rho: float, n_s: int,
                  limit: int = EXHAUSTIVE_LIMIT) -> AlgorithmResult:
    """Best rate over every set of ``n_rf`` distinct codewords.

    Each set is evaluated with its optimal baseband. Rank-deficient sets are
    skipped. Ties keep the lexicographically first combination.
    """
    hs = as_channel_stack(h)
    _check_greedy(cb, hs, n_rf, n_s)
    n_sets = math.comb(cb.size, n_rf)
    if n_sets > limit:
        raise TooLarge(f"C({cb.size}, {n_rf}) = {n_sets} exceeds limit {limit}")
    best_rate, best_combo = -np.inf, None
    for combo in itertools.combinations(range(cb.size), n_rf):
        f_rf = cb.words[:, combo]
        try:
            bb = optimal_baseband(f_rf, hs, n_s)
        except RankDeficient:
            continue
        rate = mutual_information(hs, f_rf, bb, rho, n_s)
        if best_combo is None or rate > best_rate + TIE_RTOL * max(abs(best_rate), 1.0):
            best_rate, best_combo = rate, combo
    if best_combo is None:
        raise RankDeficient("every candidate RF set is rank deficient")
    return _finish(Algorithm.EXHAUSTIVE, hs, cb, best_combo, rho, n_s, [],
                   {"n_sets": n_sets})


def svd_bound(h, rho: float, n_s: int) -> AlgorithmResult:
    """Fully digital precoding along the top ``n_s`` right singular vectors, equal power."""
    hs = as_channel_stack(h)
    s = np.linalg.svd(hs, compute_uv=False)
    if n_s > s.shape[1]:
        raise ShapeMismatch(f"n_s={n_s} exceeds min(n_ms, n_bs)={s.shape[1]}")
    rate = _log_sum(s**2, n_s, rho / n_s)
    return AlgorithmResult(Algorithm.SVD_BOUND, None, np.zeros(0), rate)


def evaluate(result: AlgorithmResult, h, rho: float, n_s: int) -> float:
    """Recompute the rate of a stored precoder."""
    if result.precoder is None:
        return svd_bound(h, rho, n_s).rate
    p = result.precoder
    return mutual_information(h, p.f_rf, p.baseband, rho, n_s)
