"""
Weighted Duistermaat-Heckman measure of a toric filtration: the pushforward
of v dy on P under f, sampled on the lattice (1/m) Z^n.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from config.settings import FLOAT_TOLERANCE
from filtration.volumes import evaluate_on_lattice, lattice_chunks
from geometry.polytope import Polytope
from quadrature.polynomial import Weight
from stability.pl_functions import PLConvexFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DHMeasureHistogram:
    bin_edges: np.ndarray
    masses: np.ndarray
    total: float
    m: int = 0

    @property
    def centers(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2

    @property
    def first_moment(self) -> float:
        return float(np.sum(self.centers * self.masses))

    def to_records(self) -> List[Dict]:
        return [{"left": float(a), "right": float(b), "mass": float(x)}
                for a, b, x in zip(self.bin_edges[:-1], self.bin_edges[1:], self.masses)]


def dh_histogram(f: PLConvexFunction, v: Weight, P: Polytope, bins: int, m: int) -> DHMeasureHistogram:
    """
    Histogram of f(eta/m) weighted by v(eta/m) / m^n over eta in mP cap Z^n.

    A function constant on the samples gives a single bin of zero width; an mP
    without lattice points gives an empty histogram of total mass 0.

    Raises:
        LatticeTooLarge
    """
    if bins < 1:
        raise ValueError("bins must be at least 1")
    values, weights = [], []
    for points in lattice_chunks(P, m):
        y = points / m
        values.append(evaluate_on_lattice(f, points, m))
        weights.append(v.evaluate_many(y) / m ** P.dim)
    values = np.concatenate(values) if values else np.empty(0)
    weights = np.concatenate(weights) if weights else np.empty(0)
    if values.size == 0:
        logger.warning(f"{m}P contains no lattice points; returning an empty histogram")
        return DHMeasureHistogram(bin_edges=np.empty(0), masses=np.empty(0), total=0.0, m=m)
    low, high = float(values.min()), float(values.max())
    if high - low <= FLOAT_TOLERANCE:
        edges = np.asarray([low, high])
        masses = np.asarray([weights.sum()])
    else:
        masses, edges = np.histogram(values, bins=bins, range=(low, high), weights=weights)
    histogram = DHMeasureHistogram(bin_edges=edges, masses=masses, total=float(masses.sum()), m=m)
    logger.debug(f"DH histogram: {len(values)} lattice points, total mass {histogram.total}")
    return histogram
