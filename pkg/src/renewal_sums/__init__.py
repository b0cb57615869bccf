"""Exact normalized triangle sums, certified series and renewal Monte Carlo."""

from __future__ import annotations

from ._rational import DomainError
from .convergence import GapRecord, RateReport, eulerian_gap_table, gap_record, rate_check
from .polys import beta_moment, bernstein, h_bernstein, irwin_hall_density
from .renewal import (
    Bernoulli,
    BetaMixedBernoulli,
    InterarrivalSpec,
    RenewalEstimate,
    ShiftPlusOne,
    Uniform,
    UniformSum,
    simulate_contrast_sum,
    simulate_count,
    theoretical_blackwell_limit,
)
from .series import SeriesResult, ToleranceError
from .sums import (
    Family,
    alternating_sum,
    closed_form,
    column_sum,
    contrast_sum,
    diagonal_sum,
    hbernstein_alternating_limitk,
    hbernstein_diagonal_limit,
)
from .triangles import EULERIAN, PASCAL, Triangle, parity_bitmap, short_diagonal_unnormalized

__version__ = "0.1.0"
