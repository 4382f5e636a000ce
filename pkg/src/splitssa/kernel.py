"""The square-wave switching kernel that drives the split-step method.

``sigma(t) = 1 - 2 * (floor(t / (h/2)) mod 2)`` is a right-continuous
square wave of period ``h``: +1 on the first half-step, -1 on the second.
A split-step simulator modulates one channel group by ``(1 + sigma)`` and
the other by ``(1 - sigma)``, so at any instant exactly one group runs at
twice its base intensity and the other is switched off.

Evaluating the wave with a phase shift of ``h/4`` turns the first-order
(Lie) splitting into the symmetrized (Strang) variant; that phase shift is
the *only* difference between the two methods here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["KernelSpec", "SplitSchedule", "kernel_value", "kernel_integral", "switch_schedule"]


@dataclass(frozen=True)
class KernelSpec:
    """Split-step length ``h`` and kernel phase (0 for Lie, ``h/4`` for Strang)."""

    h: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if not (self.h > 0 and np.isfinite(self.h)):
            raise ValueError(f"split-step h must be positive and finite, got {self.h}")
        if self.phase not in (0.0, self.h * 0.25):
            raise ValueError(f"phase must be 0 or h/4, got {self.phase} for h={self.h}")

    @classmethod
    def lie(cls, h: float) -> "KernelSpec":
        return cls(h=h, phase=0.0)

    @classmethod
    def strang(cls, h: float) -> "KernelSpec":
        return cls(h=h, phase=h * 0.25)

    @property
    def method(self) -> str:
        return "lie" if self.phase == 0.0 else "strang"

    @property
    def half_step(self) -> float:
        return self.h * 0.5


def kernel_value(spec: KernelSpec, t: float) -> int:
    """The kernel value at time ``t`` (right-continuous, +1 or -1)."""
    if t < 0:
        raise ValueError(f"kernel_value requires t >= 0, got {t}")
    return 1 - 2 * (int(np.floor((t + spec.phase) / spec.half_step)) % 2)


def _primitive(h: float, u: float) -> float:
    # Integral of the phase-0 wave over [0, u]: a triangle wave with
    # period h, peaking at h/2.
    v = u % h
    return v if v <= 0.5 * h else h - v


def kernel_integral(spec: KernelSpec, t: float) -> float:
    """Exact integral of the (phase-shifted) kernel over ``[0, t]``.

    Bounded by ``h/2`` in absolute value for either phase, and exactly zero
    at multiples of ``h`` when the phase is zero.
    """
    if t < 0:
        raise ValueError(f"kernel_integral requires t >= 0, got {t}")
    return _primitive(spec.h, t + spec.phase) - _primitive(spec.h, spec.phase)


@dataclass(frozen=True)
class SplitSchedule:
    """Deterministic switch times of the kernel inside ``(0, t_end)``.

    Between consecutive switch times the kernel is constant; switching
    events change channel intensities but never the state.
    """

    switch_times: np.ndarray
    t_end: float


def switch_schedule(spec: KernelSpec, t_end: float) -> SplitSchedule:
    """All kernel switch times ``m * h/2 - phase`` falling inside ``(0, t_end)``."""
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    half = spec.half_step
    m_first = 1
    # With a Strang phase the first flip lands at h/4 (m = 1 still).
    times = []
    m = m_first
    while True:
        s = m * half - spec.phase
        if s >= t_end:
            break
        if s > 0:
            times.append(s)
        m += 1
    return SplitSchedule(switch_times=np.array(times), t_end=float(t_end))
