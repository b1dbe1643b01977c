"""Closed-form output signatures for three-qubit chains.

Each scenario returns ``(rho, sigma)``: the excited population factor and
the coherence factor of the output qubit (qubit 3).  Printed fidelity
formulas are kept separately as ``*_fidelity_printed`` so they can be
checked against the signature route ``1/2 + (rho + 4|sigma|)/6``.
Functions accept scalar or array ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class XYParams:
    x: float
    y: float


@dataclass(frozen=True)
class OutputSignature:
    """Output-qubit signature: population factor rho and coherence factor sigma."""

    rho: float
    sigma: complex

    def __iter__(self):
        yield self.rho
        yield self.sigma


def xy_params(xi: float, gamma: float) -> XYParams:
    if not gamma > 0:
        raise DomainError("x and y are defined for a strictly positive rate only")
    r2 = (xi / gamma) ** 2
    root = np.sqrt(81.0 + 112.0 * r2 + 64.0 * r2 * r2)
    # x*y = 8r; take the square root on whichever branch does not cancel
    r = abs(xi / gamma)
    d = 9.0 - 8.0 * r2
    if d >= 0:
        x = np.sqrt((d + root) / 2.0)
        y = 8.0 * r / x
    else:
        y = np.sqrt((root - d) / 2.0)
        x = 8.0 * r / y
    return XYParams(float(x), float(y))


def _damped_cosh(z, damping):
    """exp(-damping) * cosh(z) without overflow for large Re z."""
    return 0.5 * (np.exp(z - damping) + np.exp(-z - damping))


def _damped_sinh(z, damping):
    return 0.5 * (np.exp(z - damping) - np.exp(-z - damping))


def _check_rate(gamma):
    if not gamma > 0:
        raise DomainError("open/chained closed forms need gamma > 0; use the dynamics engine")


def open_chained_rho(t, xi, gamma):
    """Population factor of the open chained chain, as printed (x, y form)."""
    _check_rate(gamma)
    p = xy_params(xi, gamma)
    x, y = p.x, p.y
    t = np.asarray(t, dtype=float)
    gt = gamma * t
    s = x * x + y * y
    hx, hy = gt * x / 2, gt * y / 2
    ch_h = _damped_cosh(hx, 5 * gt / 2)
    sh_h = _damped_sinh(hx, 5 * gt / 2)
    ch_f = _damped_cosh(gt * x, 3 * gt)
    sh_f = _damped_sinh(gt * x, 3 * gt)
    e3 = np.exp(-3 * gt)
    middle = -2 * (ch_h * np.cos(hy) + (y * ch_h * np.sin(hy) + x * np.cos(hy) * sh_h) / s)
    last = 0.5 * (
        e3 * np.cos(gt * y)
        + ch_f
        + (2 * y * e3 * np.sin(gt * y) + 2 * x * sh_f - e3 * np.cos(gt * y) + ch_f) / s
    )
    return 0.25 * (np.exp(-2 * gt) + middle + last)


def open_chained_sigma(t, xi, gamma):
    _check_rate(gamma)
    p = xy_params(xi, gamma)
    w = p.x + 1j * p.y
    t = np.asarray(t, dtype=float)
    gt = gamma * t
    z = gt * w / 2
    # cosh(z) [1 + tanh(z)/w] = cosh(z) + sinh(z)/w
    return -np.exp(-gt) / 4 + (_damped_cosh(z, 1.5 * gt) + _damped_sinh(z, 1.5 * gt) / w) / 4


def open_chained_signature(t, xi, gamma) -> OutputSignature:
    return OutputSignature(open_chained_rho(t, xi, gamma), open_chained_sigma(t, xi, gamma))


def open_chained_fidelity_printed(t, xi, gamma):
    """Printed closed form of the optimal average fidelity (open, chained)."""
    _check_rate(gamma)
    p = xy_params(xi, gamma)
    x, y = p.x, p.y
    t = np.asarray(t, dtype=float)
    gt = gamma * t
    hx, hy = gt * x / 2, gt * y / 2
    e3 = np.exp(-3 * gt)
    inner = (
        np.exp(-2 * gt)
        + 0.5 * (e3 * np.cos(gt * y) + _damped_cosh(gt * x, 3 * gt))
        - 2 * _damped_cosh(hx, 5 * gt / 2) * np.cos(hy)
        + (
            0.5 * (_damped_cosh(gt * x, 3 * gt) - e3 * np.cos(gt * y))
            + x * _damped_sinh(hx, 3 * gt)
            + y * e3 * np.sin(hy)
            - 2 * (x * _damped_sinh(hx, 5 * gt / 2) * np.cos(hy) + y * _damped_cosh(hx, 5 * gt / 2) * np.sin(hy))
        )
        / (x * x + y * y)
    )
    return 0.5 + (np.sqrt(np.maximum(inner, 0.0)) + 1) ** 2 / 24 - 1 / 24


def open_local_signature(t, xi, gamma) -> OutputSignature:
    t = np.asarray(t, dtype=float)
    s2 = np.sin(xi * t / SQRT2) ** 2
    return OutputSignature(np.exp(-2 * gamma * t) * s2 * s2, -0.5 * np.exp(-gamma * t) * s2)


def open_local_fidelity(t, xi, gamma):
    t = np.asarray(t, dtype=float)
    s2 = np.sin(xi * t / SQRT2) ** 2
    d = np.exp(-gamma * t)
    return 0.5 + d / 3 * s2 * (1 + d / 2 * s2)


def closed_chained_rho(t, xi, gamma):
    t = np.asarray(t, dtype=float)
    gt = gamma * t
    return np.exp(-2 * gt) / 9 * (1 + np.exp(-6 * gt) - 2 * np.exp(-3 * gt) * np.cos(3 * xi * t))


def closed_chained_sigma(t, xi, gamma):
    """Coherence factor from the ring eigendecomposition.

    The printed phase factor is not dimensionally consistent; this form
    reproduces the printed population exactly via rho = 4|sigma|^2.
    """
    t = np.asarray(t, dtype=float)
    return np.exp((1j * xi - gamma) * t) / 6 * (np.exp(-3 * t * (1j * xi + gamma)) - 1)


def closed_chained_sigma_printed(t, xi, gamma):
    t = np.asarray(t, dtype=float)
    return np.exp(2 * gamma * t * (1j * xi - gamma)) / 6 * (np.exp(-6 * gamma * t * (1j * xi + gamma)) - 1)


def closed_chained_signature(t, xi, gamma) -> OutputSignature:
    return OutputSignature(closed_chained_rho(t, xi, gamma), closed_chained_sigma(t, xi, gamma))


def closed_chained_fidelity(t, xi, gamma):
    rho, sigma = closed_chained_signature(t, xi, gamma)
    return 0.5 + (rho + 4 * np.abs(sigma)) / 6


def closed_chained_fidelity_printed(t, xi, gamma):
    t = np.asarray(t, dtype=float)
    gt = gamma * t
    arg = np.exp(-2 * gt) + np.exp(-8 * gt) - 2 * np.exp(-5 * gt) * np.cos(3 * t * xi)
    return (np.sqrt(np.maximum(arg, 0.0)) / 3 + 1) ** 2 / 54 - 1 / 54 + 0.5


def closed_local_signature(t, xi, gamma) -> OutputSignature:
    t = np.asarray(t, dtype=float)
    s = np.sin(1.5 * t * xi)
    rho = 4 / 9 * np.exp(-2 * gamma * t) * s * s
    sigma = -1j / 3 * np.exp(-gamma * t - 0.5j * t * xi) * s
    return OutputSignature(rho, sigma)


def closed_local_fidelity(t, xi, gamma):
    rho, sigma = closed_local_signature(t, xi, gamma)
    return 0.5 + (rho + 4 * np.abs(sigma)) / 6


def closed_local_fidelity_printed(t, xi, gamma):
    t = np.asarray(t, dtype=float)
    s = np.sin(1.5 * t * xi)
    brace = (
        0.5
        - 2 / 3 * s * s
        - (5 + 4 * np.cos(3 * t * xi)) / 18
        - 2 / 3 * np.exp(gamma * t) * np.abs(s)
    )
    return 0.5 - np.exp(-2 * gamma * t) / 3 * brace


def open_chained_fidelity(t, xi, gamma):
    rho, sigma = open_chained_signature(t, xi, gamma)
    return 0.5 + (rho + 4 * np.abs(sigma)) / 6


SIGNATURES = {
    "open-chained": open_chained_signature,
    "open-local": open_local_signature,
    "closed-chained": closed_chained_signature,
    "closed-local": closed_local_signature,
}

PRINTED_FIDELITY = {
    "open-chained": open_chained_fidelity_printed,
    "open-local": open_local_fidelity,
    "closed-chained": closed_chained_fidelity_printed,
    "closed-local": closed_local_fidelity_printed,
}


def signature(variant: str, t, xi: float, gamma: float) -> OutputSignature:
    return SIGNATURES[variant](t, xi, gamma)


def pipeline_fidelity(variant: str, t, xi: float, gamma: float):
    rho, sigma = signature(variant, t, xi, gamma)
    return 0.5 + (rho + 4 * np.abs(sigma)) / 6


def printed_fidelity(variant: str, t, xi: float, gamma: float):
    return PRINTED_FIDELITY[variant](t, xi, gamma)
