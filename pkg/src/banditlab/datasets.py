"""Build stochastic instances from ratings dumps and inhibition tables.

Two loaders: a movie-ratings CSV (one Gaussian arm per sufficiently-rated
movie, centered at its empirical mean rating) and a kinase-inhibition CSV
(one unit-variance log-domain arm per inhibitor tested against a chosen
kinase). Both are deterministic functions of the file bytes and the
parameters.
"""

from __future__ import annotations

import csv
import logging
import math

from .core import Gaussian, LogDomainGaussian, StochasticInstance, gap_profile
from .errors import EmptySelection, ParseError, UnknownKinase

logger = logging.getLogger(__name__)

MOVIELENS_HEADER = ["userId", "movieId", "rating", "timestamp"]


def load_movielens(
    ratings_csv_path: str, min_ratings: int, variance: float = 1.0
) -> StochasticInstance:
    """One Gaussian arm per movie with at least ``min_ratings`` ratings.

    Arm means are the empirical mean ratings; the variance defaults to 1.
    Arms are ordered by movie id and labeled with it.
    """
    counts: dict[int, int] = {}
    sums: dict[int, float] = {}
    with open(ratings_csv_path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != MOVIELENS_HEADER:
            raise ParseError(
                f"expected header {','.join(MOVIELENS_HEADER)}, got {header}",
                line=1,
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, got {len(row)}", line=lineno)
            try:
                movie = int(row[1])
                rating = float(row[2])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            if not math.isfinite(rating):
                raise ParseError(f"non-finite rating {row[2]}", line=lineno)
            counts[movie] = counts.get(movie, 0) + 1
            sums[movie] = sums.get(movie, 0.0) + rating
    kept = sorted(m for m, c in counts.items() if c >= min_ratings)
    if not kept:
        raise EmptySelection(
            f"no movie has at least {min_ratings} ratings"
        )
    arms = tuple(Gaussian(sums[m] / counts[m], variance) for m in kept)
    instance = StochasticInstance(
        arms,
        label=f"movielens:min_ratings={min_ratings}",
        arm_labels=tuple(str(m) for m in kept),
    )
    gap_profile(instance)  # reject a tied top mean
    return instance


def load_pkis2(
    table_csv_path: str, kinase_name: str, raw_scale: float = 100.0
) -> StochasticInstance:
    """One log-domain Gaussian arm per inhibitor tested against a kinase.

    Raw inhibition values are normalized by ``raw_scale``; the percent
    control is one minus the normalized value, and each retained arm is
    centered at its natural log. Entries with percent control at or below
    zero have no log and are dropped (count logged).
    """
    with open(table_csv_path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise ParseError("expected a header row with kinase names", line=1)
        kinases = [h.strip() for h in header[1:]]
        if kinase_name not in kinases:
            raise UnknownKinase(
                f"kinase {kinase_name!r} not found among {len(kinases)} columns"
            )
        col = kinases.index(kinase_name) + 1
        names: list[str] = []
        log_means: list[float] = []
        dropped = 0
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) <= col:
                raise ParseError(
                    f"expected at least {col + 1} fields, got {len(row)}",
                    line=lineno,
                )
            try:
                raw = float(row[col])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            control = 1.0 - raw / raw_scale
            if control <= 0.0:
                dropped += 1
                continue
            names.append(row[0])
            log_means.append(math.log(control))
    if dropped:
        logger.info(
            "dropped %d inhibitors with nonpositive percent control", dropped
        )
    if not names:
        raise EmptySelection(f"no usable entries for kinase {kinase_name!r}")
    instance = StochasticInstance(
        tuple(LogDomainGaussian(m) for m in log_means),
        label=f"pkis2:kinase={kinase_name}",
        arm_labels=tuple(names),
    )
    gap_profile(instance)  # reject a tied top mean
    return instance
