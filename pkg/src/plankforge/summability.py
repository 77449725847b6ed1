"""Row-stochastic weight matrices with finite rows and their sequence transforms.

A weight matrix holds, for each row n, a finite set of 1-based column
indices m with nonnegative weights that should sum to 1.  Applying row n
to a scalar sequence produces the weighted average of the sequence over
the row support.  Whether those averages tend to 0 is undecidable from a
finite prefix, so the trend diagnostic only reports the raw values plus a
fixed heuristic decision; callers are free to apply their own criterion.

Sums over a row are always accumulated in increasing column order
(naive summation) so that reported values are reproducible bit for bit.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InsufficientDataError,
    InvalidInputError,
    PreconditionError,
    SupportRangeError,
)

_HEADER_RE = re.compile(r"^rows=(\d+)\s+tol=(\S+)\s*$")


def ordered_sum(values: np.ndarray) -> float:
    """Sum in increasing index order (no pairwise reordering)."""
    if values.size == 0:
        return 0.0
    return float(np.cumsum(values)[-1])


@dataclass(frozen=True)
class ScalarSequence:
    """A finite prefix a_1..a_N of a real sequence."""

    values: np.ndarray
    horizon: int = 0

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidInputError("scalar sequence must be a nonempty 1-d array")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        n = int(self.horizon) if self.horizon else arr.size
        if n != arr.size:
            raise InvalidInputError(
                f"declared horizon {n} does not match {arr.size} stored values"
            )
        object.__setattr__(self, "horizon", n)

    @classmethod
    def from_function(cls, fn, horizon: int) -> "ScalarSequence":
        return cls(np.array([fn(n) for n in range(1, horizon + 1)]))

    def __getitem__(self, m: int) -> float:
        """1-based element access."""
        if not 1 <= m <= self.horizon:
            raise InvalidInputError(f"index {m} outside 1..{self.horizon}")
        return float(self.values[m - 1])


class WeightMatrix:
    """Finite-row weight matrix, 1-based rows and columns.

    Two internal layouts share one interface.  Explicit rows store a
    (columns, weights) array pair per row.  Sliced rows describe each row
    as a contiguous slice of one shared base array times a per-row scale;
    the parametric weight families use this layout so that large
    triangular matrices never materialize all rows at once.  ``row(n)``
    materializes a single row on demand in both layouts.

    ``tol`` records the row-sum tolerance the matrix claims to satisfy;
    it is written to the text header and checked by ``validate_weights``.
    """

    def __init__(self, rows, tol: float = 1e-12):
        cols_list = []
        weights_list = []
        for r in rows:
            if isinstance(r, dict):
                items = sorted(r.items())
                cols = np.array([m for m, _ in items], dtype=np.int64)
                weights = np.array([w for _, w in items], dtype=np.float64)
            else:
                cols, weights = r
                cols = np.asarray(cols, dtype=np.int64)
                weights = np.asarray(weights, dtype=np.float64).copy()
            if cols.shape != weights.shape or cols.ndim != 1:
                raise InvalidInputError("row columns and weights must align")
            if cols.size and (np.any(np.diff(cols) <= 0) or cols[0] < 1):
                raise InvalidInputError("row columns must be ascending and >= 1")
            weights.flags.writeable = False
            cols.flags.writeable = False
            cols_list.append(cols)
            weights_list.append(weights)
        self._cols = cols_list
        self._weights = weights_list
        self._base = None
        self._starts = None
        self._stops = None
        self._scales = None
        self.tol = float(tol)

    @classmethod
    def from_scaled_slices(cls, base, starts, stops, scales, tol: float = 1e-12):
        """Rows ``n`` with support ``starts[n-1] .. stops[n-1]-1`` (1-based)
        and weights ``base[m-1] * scales[n-1]``."""
        self = cls.__new__(cls)
        base = np.asarray(base, dtype=np.float64).copy()
        starts = np.asarray(starts, dtype=np.int64).copy()
        stops = np.asarray(stops, dtype=np.int64).copy()
        scales = np.asarray(scales, dtype=np.float64).copy()
        if not (starts.shape == stops.shape == scales.shape) or starts.ndim != 1:
            raise InvalidInputError("slice descriptors must align")
        if np.any(starts < 1) or np.any(stops < starts) or np.any(stops - 1 > base.size):
            raise InvalidInputError("slice bounds outside the base array")
        for a in (base, starts, stops, scales):
            a.flags.writeable = False
        self._base = base
        self._starts = starts
        self._stops = stops
        self._scales = scales
        self._cols = None
        self._weights = None
        self.tol = float(tol)
        return self

    # -- row access -----------------------------------------------------

    @property
    def n_rows(self) -> int:
        if self._cols is not None:
            return len(self._cols)
        return self._starts.size

    def _check_row(self, n: int) -> None:
        if not 1 <= n <= self.n_rows:
            raise InvalidInputError(f"row {n} outside 1..{self.n_rows}")

    def row(self, n: int):
        """(columns, weights) for row ``n``; both 1-d arrays, columns ascending."""
        self._check_row(n)
        if self._cols is not None:
            return self._cols[n - 1], self._weights[n - 1]
        lo, hi = int(self._starts[n - 1]), int(self._stops[n - 1])
        cols = np.arange(lo, hi, dtype=np.int64)
        return cols, self._base[lo - 1 : hi - 1] * self._scales[n - 1]

    def row_dict(self, n: int) -> dict:
        cols, weights = self.row(n)
        return {int(m): float(w) for m, w in zip(cols, weights)}

    def support(self, n: int):
        """(min column, max column) of row ``n``; (0, 0) for an empty row."""
        self._check_row(n)
        if self._cols is not None:
            cols = self._cols[n - 1]
            if cols.size == 0:
                return 0, 0
            return int(cols[0]), int(cols[-1])
        lo, hi = int(self._starts[n - 1]), int(self._stops[n - 1])
        if hi == lo:
            return 0, 0
        return lo, hi - 1

    @property
    def max_column(self) -> int:
        hi = 0
        for n in range(1, self.n_rows + 1):
            hi = max(hi, self.support(n)[1])
        return hi

    # -- serialization --------------------------------------------------

    def to_text(self) -> str:
        """Line format: header ``rows=<n> tol=<t>``, then one row per line
        of space-separated ``m:weight`` entries in ascending m."""
        buf = io.StringIO()
        buf.write(f"rows={self.n_rows} tol={format(self.tol, '.17g')}\n")
        for n in range(1, self.n_rows + 1):
            cols, weights = self.row(n)
            buf.write(
                " ".join(f"{int(m)}:{format(w, '.17g')}" for m, w in zip(cols, weights))
            )
            buf.write("\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "WeightMatrix":
        lines = text.splitlines()
        if not lines:
            raise InvalidInputError("empty weight-matrix text")
        m = _HEADER_RE.match(lines[0])
        if not m:
            raise InvalidInputError("missing 'rows=<n> tol=<t>' header")
        declared, tol = int(m.group(1)), float(m.group(2))
        body = [ln for ln in lines[1:] if ln.strip() != ""]
        if len(body) != declared:
            raise InvalidInputError(
                f"header declares {declared} rows, found {len(body)}"
            )
        rows = []
        for ln in body:
            entries = {}
            for tok in ln.split():
                col_s, _, w_s = tok.partition(":")
                try:
                    entries[int(col_s)] = float(w_s)
                except ValueError as exc:
                    raise InvalidInputError(f"bad entry {tok!r}") from exc
            rows.append(entries)
        return cls(rows, tol=tol)

    def to_json_obj(self) -> list:
        """Array of rows, each an array of [column, weight] pairs."""
        out = []
        for n in range(1, self.n_rows + 1):
            cols, weights = self.row(n)
            out.append([[int(m), float(w)] for m, w in zip(cols, weights)])
        return out

    @classmethod
    def from_json_obj(cls, data, tol: float = 1e-12) -> "WeightMatrix":
        rows = [{int(m): float(w) for m, w in row} for row in data]
        return cls(rows, tol=tol)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    """Outcome of the three weight-matrix invariant checks."""

    passed: bool
    n_rows: int
    row_tol: float
    column_null_threshold: float
    max_row_sum_error: float
    worst_row: int
    late_rows_start: int
    late_column_max: float
    row_sum_violations: list = field(default_factory=list)  # (row, |sum - 1|)
    negative_entries: list = field(default_factory=list)  # (row, column)
    column_violations: list = field(default_factory=list)  # (row, column)

    def to_json_obj(self) -> dict:
        return {
            "passed": self.passed,
            "n_rows": self.n_rows,
            "row_tol": self.row_tol,
            "column_null_threshold": self.column_null_threshold,
            "max_row_sum_error": self.max_row_sum_error,
            "worst_row": self.worst_row,
            "late_rows_start": self.late_rows_start,
            "late_column_max": self.late_column_max,
            "row_sum_violations": [[n, e] for n, e in self.row_sum_violations],
            "negative_entries": [[n, m] for n, m in self.negative_entries],
            "column_violations": [[n, m] for n, m in self.column_violations],
        }


def late_rows_start(n_rows: int) -> int:
    """First row of the trailing quarter used by the column-null check."""
    return n_rows - max(1, n_rows // 4) + 1


def validate_weights(
    matrix: WeightMatrix, row_tol: float, column_null_threshold: float
) -> ValidationReport:
    """Check nonnegativity, row sums within ``row_tol`` of 1, and the
    column-null surrogate: no single weight in the trailing quarter of the
    stored rows may reach ``column_null_threshold``.

    A finite prefix cannot certify that the columns really tend to 0; the
    trailing-quarter check is the stored-row surrogate, and parametric
    families should supply an analytic certificate instead.
    """
    n_rows = matrix.n_rows
    if n_rows == 0:
        raise InvalidInputError("cannot validate an empty weight matrix")
    late_start = late_rows_start(n_rows)
    max_err = 0.0
    worst_row = 1
    late_max = 0.0
    row_viol = []
    neg = []
    col_viol = []
    for n in range(1, n_rows + 1):
        cols, weights = matrix.row(n)
        if weights.size and float(weights.min()) < 0.0:
            for m in cols[weights < 0.0]:
                neg.append((n, int(m)))
        err = abs(ordered_sum(weights) - 1.0)
        if err > max_err:
            max_err = err
            worst_row = n
        if err > row_tol:
            row_viol.append((n, err))
        if n >= late_start and weights.size:
            peak = float(weights.max())
            late_max = max(late_max, peak)
            if peak >= column_null_threshold:
                for m in cols[weights >= column_null_threshold]:
                    col_viol.append((n, int(m)))
    passed = not row_viol and not neg and not col_viol
    return ValidationReport(
        passed=passed,
        n_rows=n_rows,
        row_tol=float(row_tol),
        column_null_threshold=float(column_null_threshold),
        max_row_sum_error=max_err,
        worst_row=worst_row,
        late_rows_start=late_start,
        late_column_max=late_max,
        row_sum_violations=row_viol,
        negative_entries=neg,
        column_violations=col_viol,
    )


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def _row_values(matrix: WeightMatrix, seq: ScalarSequence, n: int):
    cols, weights = matrix.row(n)
    if cols.size and int(cols[-1]) > seq.horizon:
        bad = int(cols[cols > seq.horizon][0])
        raise SupportRangeError(n, bad, seq.horizon)
    return weights, seq.values[cols - 1], cols

def transform_value(matrix: WeightMatrix, seq: ScalarSequence, n: int) -> float:
    """Weighted average of ``seq`` over the support of row ``n``."""
    weights, vals, _ = _row_values(matrix, seq, n)
    return ordered_sum(weights * vals)


def transform_values(matrix: WeightMatrix, seq: ScalarSequence) -> np.ndarray:
    """Transform at every stored row, in row order."""
    return np.array(
        [transform_value(matrix, seq, n) for n in range(1, matrix.n_rows + 1)]
    )


def min_on_support(matrix: WeightMatrix, seq: ScalarSequence, n: int):
    """Smallest sequence value over the support of row ``n`` (ties break to
    the smallest column).  A weighted average dominates its minimum, so
    the returned value is <= ``transform_value`` for nonnegative input."""
    weights, vals, cols = _row_values(matrix, seq, n)
    if cols.size == 0:
        raise InvalidInputError(f"row {n} has empty support")
    if float(vals.min()) < 0.0:
        raise PreconditionError(f"negative sequence value on the support of row {n}")
    i = int(np.argmin(vals))
    return int(cols[i]), float(vals[i])


@dataclass
class TrendReport:
    """Transform values at all rows plus a fixed decay heuristic.

    ``decision`` is "decaying" iff the last value is below the value at
    the mid-horizon row and below ``threshold``; ``halved`` additionally
    records whether the last value is below half the mid value.  Limits
    are undecidable from a prefix, so this is a report, not a claim.
    """

    values: np.ndarray
    decision: str
    last_value: float
    mid_row: int
    mid_value: float
    threshold: float
    halved: bool

    @property
    def decaying(self) -> bool:
        return self.decision == "decaying"

    def to_json_obj(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "decision": self.decision,
            "last_value": self.last_value,
            "mid_row": self.mid_row,
            "mid_value": self.mid_value,
            "threshold": self.threshold,
            "halved": self.halved,
        }


def transform_trend(
    matrix: WeightMatrix, seq: ScalarSequence, threshold: float = 0.5
) -> TrendReport:
    """Evaluate the transform at every row and apply the decay heuristic."""
    if matrix.n_rows < 4:
        raise InsufficientDataError("trend diagnostic needs at least 4 rows")
    values = transform_values(matrix, seq)
    mid_row = max(1, matrix.n_rows // 2)
    mid = float(values[mid_row - 1])
    last = float(values[-1])
    decaying = last < mid and last < threshold
    return TrendReport(
        values=values,
        decision="decaying" if decaying else "not-decaying",
        last_value=last,
        mid_row=mid_row,
        mid_value=mid,
        threshold=float(threshold),
        halved=last < 0.5 * mid,
    )
