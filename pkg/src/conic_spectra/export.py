"""CSV / JSON serialization of results.

CSV: header row, comma separated, ``%.17g`` numbers, LF line endings.
JSON: Python's shortest round-trip float repr; rationals as ``"p/q"``.
Files are written atomically so a failed run leaves nothing behind.
"""

from __future__ import annotations

import io
import json
import math
import os
import tempfile
from fractions import Fraction

import numpy as np

from .classical import Trajectory
from .ladder import LadderState, Multiplet
from .spectrum import format_rational


def _num(x) -> str:
    return "%.17g" % float(x)


def to_csv(columns: dict[str, np.ndarray]) -> str:
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    n = len(cols[0]) if cols else 0
    if any(len(c) != n for c in cols):
        raise ValueError("CSV columns must have equal length")
    buf = io.StringIO(newline="")
    buf.write(",".join(names) + "\n")
    for i in range(n):
        buf.write(",".join(_num(c[i]) for c in cols) + "\n")
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if math.isfinite(v) else None
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):  # enums
        return x.value
    return x


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def write_text(text: str, path: str | None, stream=None) -> None:
    """Write ``text`` to ``path`` atomically, or to ``stream`` when no path."""
    if path is None or path == "-":
        (stream if stream is not None else _stdout()).write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _stdout():
    import sys
    return sys.stdout


# ---------------------------------------------------------------- records

def trajectory_columns(traj: Trajectory) -> dict[str, np.ndarray]:
    x, y = traj.xy
    return {"t": traj.t, "r": traj.r, "p_r": traj.p_r, "phi_unwrapped": traj.phi,
            "x": x, "y": y, "E": traj.monitors["E"], "L": traj.monitors["L"],
            "R_x": traj.monitors["R_x"], "R_y": traj.monitors["R_y"]}


def angular_number(m) -> int | str | float:
    """Integers stay integers, other rationals become ``"p/q"``."""
    if isinstance(m, Fraction):
        return m.numerator if m.denominator == 1 else format_rational(m)
    return m


def ladder_state_record(st: LadderState) -> dict:
    return {
        "n_r": st.n_r,
        "m_eff": angular_number(st.m_exact) if st.m_exact is not None else st.m_eff,
        "branch": st.branch,
        "physical": st.physical,
        "periodic": st.periodic,
        "classification": st.classification,
        "overlap_with_closed_form": st.overlap,
        "grid_check": st.grid_check,
    }


def multiplet_record(mp: Multiplet) -> dict:
    return {
        "S": mp.S,
        "members": [ladder_state_record(m) for m in mp.members],
        "physical_count": mp.physical_count,
        "terminated": mp.terminated,
        "truncated": mp.truncated,
        "stop_reason": mp.stop_reason,
    }
