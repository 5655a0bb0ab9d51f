"""Reading distribution specs, sample tables and p grids."""

import csv
import io
import json
import math
import re

import numpy as np

from .distributions import FAMILIES, DistributionSpec, make_distribution, moment_domain
from .errors import InputError, InvalidP, InvalidParams

_TOP_KEYS = {"family", "params", "grid", "interpolation"}
_GRID_KEYS = {"x", "f"}


def parse_spec_text(text, source="<spec>"):
    """Validate spec JSON text and return a :class:`DistributionSpec`.

    Accepted shapes::

        {"family": "gamma", "params": {"alpha": 2, "lambda": 1}}
        {"family": "custom", "grid": {"x": [...], "f": [...]}}

    Custom specs may add ``"interpolation": "pchip" | "linear"``.  Unknown
    keys are rejected by name.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidParams(f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                            f"{exc.msg}") from None
    if not isinstance(obj, dict):
        raise InvalidParams(f"{source}: top level must be a JSON object")
    extra = sorted(set(obj) - _TOP_KEYS)
    if extra:
        raise InvalidParams(f"{source}: unknown field {extra[0]!r}")
    fam = obj.get("family")
    if fam not in FAMILIES:
        raise InvalidParams(f"{source}: key 'family' must be one of {list(FAMILIES)}, got {fam!r}")
    if fam == "custom":
        if "params" in obj:
            raise InvalidParams(f"{source}: unknown field 'params' for a custom density")
        grid = obj.get("grid")
        if not isinstance(grid, dict):
            raise InvalidParams(f"{source}: key 'grid' must be an object with 'x' and 'f'")
        bad = sorted(set(grid) - _GRID_KEYS)
        if bad:
            raise InvalidParams(f"{source}: unknown field 'grid.{bad[0]}'")
        for k in ("x", "f"):
            v = grid.get(k)
            if not isinstance(v, list) or not all(_is_number(t) for t in v):
                raise InvalidParams(f"{source}: key 'grid.{k}' must be a list of numbers")
        return DistributionSpec("custom", {}, tuple(map(float, grid["x"])),
                                tuple(map(float, grid["f"])),
                                obj.get("interpolation", "pchip"))
    for k in ("grid", "interpolation"):
        if k in obj:
            raise InvalidParams(f"{source}: unknown field {k!r} for family {fam!r}")
    params = obj.get("params")
    if not isinstance(params, dict):
        raise InvalidParams(f"{source}: key 'params' must be an object")
    for k, v in params.items():
        if not _is_number(v):
            raise InvalidParams(f"{source}: key 'params.{k}' must be a number")
    return DistributionSpec(fam, dict(params))


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def parse_spec(path, stdin=None):
    """Read a spec from ``path`` (``"-"`` reads ``stdin``)."""
    if path == "-":
        import sys
        text = (stdin or sys.stdin).read()
        return parse_spec_text(text, "<stdin>")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read spec {path}: {exc.strerror}") from None
    return parse_spec_text(text, str(path))


def load_distribution(path, stdin=None):
    return make_distribution(parse_spec(path, stdin))


def load_samples(path):
    """Sample CSV: one point per row, numeric columns, optional header."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise InputError(f"cannot read samples {path}: {exc.strerror}") from None
    if rows and not _numeric_row(rows[0]):
        rows = rows[1:]
    if not rows:
        raise InputError(f"{path}: no sample rows")
    width = len(rows[0])
    for i, r in enumerate(rows, 1):
        if len(r) != width or not _numeric_row(r):
            raise InputError(f"{path}: row {i} is not {width} numbers")
    return np.array([[float(v) for v in r] for r in rows])


def _numeric_row(r):
    try:
        [float(v) for v in r]
        return True
    except ValueError:
        return False


_GRID_RE = re.compile(r"^(geometric|linear):([^.][^:]*?)\.\.([^:]+):(\d+)$")


def parse_grid(text):
    """``geometric:a..b:n``, ``linear:a..b:n`` or a comma-separated list."""
    text = text.strip()
    m = _GRID_RE.match(text)
    try:
        if m:
            kind, a, b, n = m.group(1), float(m.group(2)), float(m.group(3)), int(m.group(4))
            if n < 1 or not (0 < a and (a < b or (a == b and n == 1))):
                raise InvalidP(f"bad grid range in {text!r}")
            if n == 1:
                return [a]
            fn = np.geomspace if kind == "geometric" else np.linspace
            return [float(v) for v in fn(a, b, n)]
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidP(f"cannot parse grid {text!r}") from None
    if not vals or any(not (math.isfinite(v) and v > 0) for v in vals):
        raise InvalidP(f"grid values must be positive numbers: {text!r}")
    return vals


GRID_POINTS = 16
GRID_MARGIN = 1e-3
GRID_CAP = 8.0


def default_grid(dist, full_domain=False):
    """Geometric 16-point grid over the admissible domain.

    Open ends get a ``1e-3`` margin; an infinite upper end is capped at 8.
    """
    dom = moment_domain(dist)
    lo = GRID_MARGIN if full_domain else dom.lower
    hi = GRID_CAP if math.isinf(dom.upper) else dom.upper - GRID_MARGIN
    return [float(v) for v in np.geomspace(lo, hi, GRID_POINTS)]


def to_json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()
