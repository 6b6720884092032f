"""Snapshot files and CSV output.

A snapshot is a pair of files sharing a stem:

``<stem>.hdr``
    UTF-8 text, one ``key = value`` per line.  Required keys are
    ``format`` (``dlrbgk-snapshot``), ``version`` (``1``), ``dtype``
    (``<f8``, little-endian float64), ``time``, ``step``, the spatial grid
    ``nx ny ax bx ay by`` and ``arrays``, a ``;``-separated list of
    ``name:d0xd1x...`` entries.  Low-rank snapshots also carry the velocity
    grid ``nv av bv centered_v`` and ``rank``.  Other keys are informational.
``<stem>.bin``
    The arrays listed in ``arrays``, in that order, each written in C order
    with no padding or separators.

Moment snapshots always contain ``rho`` (``nx x ny``) and ``u``
(``2 x nx x ny``); low-rank snapshots add ``X`` (``r x nx x ny``), ``S``
(``r x r``) and ``V`` (``r x nv x nv``) so that ``g = sum_ij X_i S_ij V_j``
can be rebuilt.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, GridMismatchError
from .grids import SpatialGrid, VelocityGrid
from .lowrank import LowRankState
from .maxwell import MomentState

FORMAT = "dlrbgk-snapshot"
VERSION = 1
DTYPE = np.dtype("<f8")


@dataclass
class Snapshot:
    time: float
    step: int
    xgrid: SpatialGrid
    arrays: dict
    vgrid: VelocityGrid | None = None
    meta: dict = field(default_factory=dict)

    @property
    def rho(self):
        return self.arrays["rho"]

    @property
    def u(self):
        return self.arrays["u"]

    @property
    def momentum(self):
        return self.rho * self.u

    @property
    def has_lowrank(self):
        return all(k in self.arrays for k in ("X", "S", "V")) and self.vgrid is not None

    def moments(self) -> MomentState:
        return MomentState(self.rho, self.u)

    def lowrank(self) -> LowRankState:
        if not self.has_lowrank:
            raise ConfigError("snapshot holds no low-rank factors")
        a = self.arrays
        return LowRankState(a["X"], a["S"], a["V"], self.xgrid, self.vgrid)


def _stem(path) -> Path:
    p = Path(path)
    return p.with_suffix("") if p.suffix in (".hdr", ".bin") else p


def write_snapshot(path, time, step, mom: MomentState, xgrid: SpatialGrid, state: LowRankState | None = None,
                   meta=None) -> Path:
    stem = _stem(path)
    stem.parent.mkdir(parents=True, exist_ok=True)
    arrays = {"rho": mom.rho, "u": mom.u}
    header = {
        "format": FORMAT,
        "version": VERSION,
        "dtype": DTYPE.str,
        "time": repr(float(time)),
        "step": int(step),
        "nx": xgrid.nx, "ny": xgrid.ny,
        "ax": repr(xgrid.ax), "bx": repr(xgrid.bx), "ay": repr(xgrid.ay), "by": repr(xgrid.by),
    }
    if state is not None:
        vg = state.vgrid
        arrays.update(X=state.X, S=state.S, V=state.V)
        header.update(nv=vg.nv, av=repr(vg.av), bv=repr(vg.bv), centered_v=int(vg.centered), rank=state.rank)
    header["arrays"] = ";".join(f"{k}:{'x'.join(map(str, np.shape(v)))}" for k, v in arrays.items())
    for k, v in (meta or {}).items():
        header.setdefault(k, v)
    with open(stem.with_suffix(".bin"), "wb") as fh:
        for v in arrays.values():
            fh.write(np.ascontiguousarray(v, dtype=DTYPE).tobytes())
    stem.with_suffix(".hdr").write_text("".join(f"{k} = {v}\n" for k, v in header.items()))
    return stem


def _parse_header(text):
    out = {}
    for line in text.splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def read_snapshot(path) -> Snapshot:
    stem = _stem(path)
    hdr_path, bin_path = stem.with_suffix(".hdr"), stem.with_suffix(".bin")
    if not hdr_path.is_file() or not bin_path.is_file():
        raise ConfigError(f"snapshot {stem} needs both .hdr and .bin files")
    h = _parse_header(hdr_path.read_text())
    if h.get("format") != FORMAT:
        raise ConfigError(f"{hdr_path} is not a {FORMAT} header")
    try:
        dtype = np.dtype(h.get("dtype", DTYPE.str))
        xgrid = SpatialGrid(int(h["nx"]), int(h["ny"]), float(h["ax"]), float(h["bx"]), float(h["ay"]), float(h["by"]))
        vgrid = None
        if "nv" in h:
            vgrid = VelocityGrid(int(h["nv"]), float(h["av"]), float(h["bv"]), bool(int(h.get("centered_v", 1))))
        layout = []
        for item in h["arrays"].split(";"):
            name, shape = item.split(":")
            layout.append((name, tuple(int(s) for s in shape.split("x"))))
        time, step = float(h["time"]), int(h["step"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"malformed snapshot header {hdr_path}: {exc}") from None
    raw = np.fromfile(bin_path, dtype=dtype)
    need = sum(int(np.prod(s)) for _, s in layout)
    if raw.size != need:
        raise ConfigError(f"{bin_path} holds {raw.size} values, header expects {need}")
    arrays, pos = {}, 0
    for name, shape in layout:
        n = int(np.prod(shape))
        arrays[name] = raw[pos : pos + n].reshape(shape).astype(float)
        pos += n
    return Snapshot(time, step, xgrid, arrays, vgrid, h)


def restrict_to(fine: Snapshot, coarse: SpatialGrid):
    """Inject ``rho`` and ``u`` of ``fine`` onto the nodes of ``coarse`` (integer refinement only)."""
    fg = fine.xgrid
    if (fg.ax, fg.bx, fg.ay, fg.by) != (coarse.ax, coarse.bx, coarse.ay, coarse.by):
        raise GridMismatchError("snapshots cover different spatial domains")
    if fg.nx % coarse.nx or fg.ny % coarse.ny:
        raise GridMismatchError(f"grid {fg.nx}x{fg.ny} is not an integer refinement of {coarse.nx}x{coarse.ny}")
    sx, sy = fg.nx // coarse.nx, fg.ny // coarse.ny
    return fine.rho[::sx, ::sy], fine.u[:, ::sx, ::sy]


def moment_differences(a: Snapshot, b: Snapshot):
    """Max-norm differences of ``rho`` and ``rho u``; the finer snapshot is injected onto the coarser grid."""
    if a.xgrid.nx * a.xgrid.ny < b.xgrid.nx * b.xgrid.ny:
        a, b = b, a
    rho_b, u_b = b.rho, b.u
    rho_a, u_a = restrict_to(a, b.xgrid)
    d_rho = float(np.max(np.abs(rho_a - rho_b)))
    d_mom = float(np.max(np.abs(rho_a * u_a - rho_b * u_b)))
    return {"rho": d_rho, "momentum": d_mom, "moment_error": max(d_rho, d_mom)}


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


class CsvLog:
    """Append-as-you-go CSV writer with a fixed header."""

    def __init__(self, path, header):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.header = list(header)
        self._fh = open(self.path, "w", newline="")
        self._w = csv.writer(self._fh)
        self._w.writerow(self.header)

    def write(self, row: dict):
        self._w.writerow(["" if row.get(k) is None else _fmt(row[k]) for k in self.header])
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
