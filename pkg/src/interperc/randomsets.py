"""Seeded realizations of stationary random closed subsets of a vertical line.

Four models are supported: a homogeneous Poisson point process, a scaled
shifted periodic pattern, a two-sided stationary renewal process with a
Weibull(2) interarrival law, and the complement of a Boolean arc union.

A realization is a windowed view of a conceptually infinite set.  Content is
a pure function of (model, stream, window): re-realizing with a larger window
reproduces the original window's content bit for bit, so windows can be grown
lazily.  Point models store sorted point values plus structural point ids;
interval models store the open gaps of the window ("free intervals") and the
set is everything in between.
"""

from __future__ import annotations

import hashlib
import math
import struct
import threading
from dataclasses import dataclass
from typing import IO, NamedTuple, Optional, Union

import numpy as np

_MASK64 = (1 << 64) - 1

#: Renewal interarrivals are drawn in fixed-size chunks so that replaying a
#: stream with a larger window reproduces the same leading draws.
_RENEWAL_CHUNK = 64

#: Default cap on automatic window growth: width may reach 2**10 times the
#: width of the first realization before nearest()/max_void_radius() give up.
DEFAULT_MAX_DOUBLINGS = 10


class ExtensionBudgetError(RuntimeError):
    """Raised when automatic window growth exceeds its doubling budget."""


# ---------------------------------------------------------------------------
# streams


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by (seed, stream_id).

    The two 64-bit fields form the 128-bit key of a counter-based Philox
    generator, so distinct (seed, stream_id) pairs select independent
    sequences that are identical across runs and platforms.  Substreams are
    derived by hashing the parent id together with a tag path (blake2b,
    64-bit digest); this is the only splitting rule used in the package.
    """

    seed: int
    stream_id: int = 0

    def _key(self) -> int:
        return ((self.seed & _MASK64) << 64) | (self.stream_id & _MASK64)

    def generator(self) -> np.random.Generator:
        """Fresh generator for this stream; safe for the caller to keep."""
        return np.random.Generator(np.random.Philox(key=self._key()))

    def child(self, *tags: Union[int, str]) -> "RngStream":
        """Derive a substream from a tag path of ints and short strings."""
        h = hashlib.blake2b(digest_size=8)
        h.update(struct.pack("<Q", self.stream_id & _MASK64))
        for t in tags:
            if isinstance(t, str):
                b = t.encode()
                h.update(b"s")
                h.update(struct.pack("<I", len(b)))
                h.update(b)
            else:
                h.update(b"i")
                h.update(struct.pack("<q", int(t)))
        return RngStream(self.seed, int.from_bytes(h.digest(), "little"))


_tls = threading.local()


def _borrow_generator(stream: RngStream) -> np.random.Generator:
    # Thread-local Philox re-keyed in place; bit-identical to a fresh
    # Philox(key) but ~3x cheaper to set up.  Borrow only: the generator is
    # invalidated by the next call on the same thread.
    pair = getattr(_tls, "gen", None)
    if pair is None:
        bg = np.random.Philox(key=0)
        pair = (bg, np.random.Generator(bg))
        _tls.gen = pair
    bg, gen = pair
    key = stream._key()
    st = bg.state
    st["state"]["counter"][:] = 0
    st["state"]["key"][0] = key & _MASK64
    st["state"]["key"][1] = (key >> 64) & _MASK64
    st["buffer_pos"] = 4
    st["has_uint32"] = 0
    st["uinteger"] = 0
    bg.state = st
    return gen


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class Poisson:
    """Homogeneous Poisson point process with the given intensity."""

    intensity: float
    x: float = 0.0


@dataclass(frozen=True)
class Periodic:
    """scale * (base + Z + shift): a scaled, shifted periodic pattern.

    The base is either a finite tuple of points (base_points) or a closed
    interval (base_interval).  If shift is None a uniform shift in [0, 1) is
    drawn once per line from the stream; a fixed shift makes the line
    deterministic.  scale may be negative but not zero.
    """

    scale: float
    base_points: tuple = (0.0,)
    base_interval: Optional[tuple] = None
    shift: Optional[float] = None
    x: float = 0.0


@dataclass(frozen=True)
class RenewalWeibull:
    """Two-sided stationary renewal process.

    Interarrival times T satisfy P[T <= t] = 1 - exp(-2**(level-2) * t*t).
    The interval straddling the origin is drawn length-biased with a uniform
    origin position, which is what makes the process stationary.
    """

    level: int
    x: float = 0.0


@dataclass(frozen=True)
class BooleanComplement:
    """Complement of the union of open arcs (0, arc_length) + P for a
    unit-intensity Poisson process P.  Realizations are interval-kind:
    the stored free intervals are the arcs' merged union."""

    arc_length: float
    x: float = 0.0


LineModel = Union[Poisson, Periodic, RenewalWeibull, BooleanComplement]


def _validate_model(model: LineModel) -> None:
    if isinstance(model, Poisson):
        if not (math.isfinite(model.intensity) and model.intensity > 0):
            raise ValueError(f"poisson intensity must be finite and positive, got {model.intensity}")
    elif isinstance(model, Periodic):
        if not (math.isfinite(model.scale) and model.scale != 0.0):
            raise ValueError(f"periodic scale must be finite and nonzero, got {model.scale}")
        if model.base_interval is not None:
            a, b = model.base_interval
            if not (math.isfinite(a) and math.isfinite(b) and a <= b):
                raise ValueError(f"bad base interval {model.base_interval}")
        else:
            if len(model.base_points) == 0:
                raise ValueError("periodic base needs at least one point")
            if not all(math.isfinite(c) for c in model.base_points):
                raise ValueError("periodic base points must be finite")
        if model.shift is not None and not math.isfinite(model.shift):
            raise ValueError("periodic shift must be finite")
    elif isinstance(model, RenewalWeibull):
        if not isinstance(model.level, int):
            raise ValueError("renewal level must be an integer")
    elif isinstance(model, BooleanComplement):
        if not (math.isfinite(model.arc_length) and 0.0 < model.arc_length < 1.0):
            raise ValueError(f"arc length must lie in (0, 1), got {model.arc_length}")
    else:
        raise TypeError(f"not a line model: {model!r}")
    if not math.isfinite(model.x):
        raise ValueError("line abscissa must be finite")


# ---------------------------------------------------------------------------
# realized sets

_EMPTY_F = np.empty(0, dtype=np.float64)
_EMPTY_I = np.empty(0, dtype=np.int64)


class RealizedSet:
    """One line's set materialized on a closed window [lo, hi].

    Treat instances as immutable; extend() returns a new value.  kind is
    "points" (sorted values plus structural ids) or "complement" (sorted
    disjoint open holes; the set is the window minus the holes).
    """

    __slots__ = ("model", "stream", "window", "values", "_ida", "_idb",
                 "_tag", "hole_lo", "hole_hi", "initial_width")

    def __init__(self, model, stream, window, values=None, ida=None, idb=None,
                 tag="", hole_lo=None, hole_hi=None, initial_width=None):
        self.model = model
        self.stream = stream
        self.window = window
        self.values = values
        self._ida = ida
        self._idb = idb
        self._tag = tag
        self.hole_lo = hole_lo
        self.hole_hi = hole_hi
        self.initial_width = (window[1] - window[0]) if initial_width is None else initial_width

    @property
    def kind(self) -> str:
        return "points" if self.values is not None else "complement"

    def __len__(self) -> int:
        return len(self.values) if self.values is not None else 0

    def point_id(self, i: int) -> tuple:
        """Structural identity of the i-th stored point; stable under extend()."""
        return (self._tag, int(self._ida[i]), int(self._idb[i]))

    def contains_value(self, v: float) -> bool:
        """Exact membership of a float value in the set (bit comparison)."""
        if self.values is not None:
            i = np.searchsorted(self.values, v)
            return i < len(self.values) and self.values[i] == v
        lo, hi = self.window
        if not (lo <= v <= hi):
            return False
        j = int(np.searchsorted(self.hole_lo, v, side="right")) - 1
        return not (j >= 0 and self.hole_lo[j] < v < self.hole_hi[j])

    def contains_id(self, pid: tuple) -> bool:
        """Membership by identity: the id must name a current element."""
        tag, a, b = pid
        if tag == "val":
            return self.contains_value(np.uint64(a).view(np.float64).item())
        if self.values is None or tag != self._tag:
            return False
        hit = np.nonzero((self._ida == a) & (self._idb == b))[0]
        return hit.size == 1

    def id_value(self, pid: tuple) -> float:
        """Float value an id refers to; raises KeyError for foreign ids."""
        tag, a, b = pid
        if tag == "val":
            v = np.uint64(a).view(np.float64).item()
            if not self.contains_value(v):
                raise KeyError(f"id {pid} not in set")
            return v
        if self.values is None or tag != self._tag:
            raise KeyError(f"id {pid} not in set")
        hit = np.nonzero((self._ida == a) & (self._idb == b))[0]
        if hit.size != 1:
            raise KeyError(f"id {pid} not in set")
        return float(self.values[hit[0]])


def _value_id(v: float) -> tuple:
    return ("val", int(np.float64(v).view(np.uint64)), 0)


class NearestPoint(NamedTuple):
    distance: float
    value: float
    point_id: tuple


class VoidRadius(NamedTuple):
    radius: float
    center: float


# ---------------------------------------------------------------------------
# realization internals


def _poisson_block_width(intensity: float) -> float:
    # Power of two targeting ~32 points per block; block boundaries are a
    # function of the model alone so windowed content is extension-stable.
    e = round(math.log2(32.0 / intensity))
    return 2.0 ** min(max(e, -40), 40)


def _poisson_arrays(intensity, stream, lo, hi):
    bw = _poisson_block_width(intensity)
    klo = math.floor(lo / bw)
    khi = math.floor(hi / bw)
    per_block = intensity * bw
    vals, blocks, ranks = [], [], []
    for k in range(klo, khi + 1):
        g = _borrow_generator(stream.child("block", k))
        n = int(g.poisson(per_block))
        if n == 0:
            continue
        xs = np.sort(g.random(n)) * bw + k * bw
        rk = np.arange(n, dtype=np.int64)
        if k == klo or k == khi:
            m = (xs >= lo) & (xs <= hi)
            xs, rk = xs[m], rk[m]
            if xs.size == 0:
                continue
        vals.append(xs)
        blocks.append(np.full(xs.size, k, dtype=np.int64))
        ranks.append(rk)
    if not vals:
        return _EMPTY_F, _EMPTY_I, _EMPTY_I
    return np.concatenate(vals), np.concatenate(blocks), np.concatenate(ranks)


def _realize_poisson(model, stream, window, initial_width):
    vals, blocks, ranks = _poisson_arrays(model.intensity, stream, *window)
    return RealizedSet(model, stream, window, vals, blocks, ranks, "pb",
                       initial_width=initial_width)


def _renewal_walk(gen, start, sign, bound, scale):
    # Points start, start + s*T1, start + s*(T1+T2), ... until passing bound.
    # Fixed-size chunks keep replays with different bounds bit-identical.
    out = [np.array([start])]
    pos = start
    while (pos <= bound) if sign > 0 else (pos >= bound):
        steps = np.sqrt(gen.standard_exponential(_RENEWAL_CHUNK)) * scale
        pts = pos + sign * np.cumsum(steps)
        out.append(pts)
        pos = pts[-1]
    return np.concatenate(out)


def _realize_renewal(model, stream, window, initial_width):
    lo, hi = window
    c = 2.0 ** (model.level - 2)
    scale = 1.0 / math.sqrt(c)
    g = _borrow_generator(stream.child("main"))
    # Straddling interval: length-biased (density ~ t * f(t)), origin uniform.
    length = math.sqrt(g.gamma(1.5)) * scale
    u = g.random()
    left0 = -u * length
    right0 = left0 + length
    rights = _renewal_walk(g, right0, +1, hi, scale)
    gl = _borrow_generator(stream.child("back"))
    lefts = _renewal_walk(gl, left0, -1, lo, scale)

    r_idx = np.arange(rights.size, dtype=np.int64)
    l_idx = np.arange(lefts.size, dtype=np.int64)
    rm = (rights >= lo) & (rights <= hi)
    lm = (lefts >= lo) & (lefts <= hi)
    vals = np.concatenate([lefts[lm][::-1], rights[rm]])
    sides = np.concatenate([np.zeros(lm.sum(), dtype=np.int64),
                            np.ones(rm.sum(), dtype=np.int64)])
    idx = np.concatenate([l_idx[lm][::-1], r_idx[rm]])
    return RealizedSet(model, stream, window, vals, sides, idx, "rn",
                       initial_width=initial_width)


def _periodic_shift(model, stream):
    if model.shift is not None:
        return float(model.shift)
    return float(_borrow_generator(stream.child("shift")).random())


def _realize_periodic_points(model, stream, window, initial_width):
    lo, hi = window
    shift = _periodic_shift(model, stream)
    s = model.scale
    vals, base_idx, lattice = [], [], []
    for i, c in enumerate(model.base_points):
        a = lo / s - c - shift
        b = hi / s - c - shift
        if a > b:
            a, b = b, a
        ks = np.arange(math.floor(a) - 1, math.ceil(b) + 2, dtype=np.int64)
        pts = s * (c + shift + ks.astype(np.float64))
        m = (pts >= lo) & (pts <= hi)
        vals.append(pts[m])
        base_idx.append(np.full(int(m.sum()), i, dtype=np.int64))
        lattice.append(ks[m])
    v = np.concatenate(vals) if vals else _EMPTY_F
    ia = np.concatenate(base_idx) if base_idx else _EMPTY_I
    ib = np.concatenate(lattice) if lattice else _EMPTY_I
    order = np.argsort(v, kind="stable")
    return RealizedSet(model, stream, window, v[order], ia[order], ib[order],
                       "pg", initial_width=initial_width)


def _realize_periodic_interval(model, stream, window, initial_width):
    lo, hi = window
    shift = _periodic_shift(model, stream)
    s = model.scale
    a, b = model.base_interval
    if b - a >= 1.0:
        # consecutive copies overlap: the set is the whole line
        holes_lo = _EMPTY_F
        holes_hi = _EMPTY_F
    else:
        # gap between copy k and copy k+1: scale*(b+k+shift, a+k+1+shift)
        u0 = min(lo, hi) / abs(s)
        u1 = max(lo, hi) / abs(s)
        kr = np.arange(math.floor(u0 - abs(b) - abs(a) - abs(shift)) - 3,
                       math.ceil(u1 + abs(b) + abs(a) + abs(shift)) + 4,
                       dtype=np.float64)
        e0 = s * (b + kr + shift)
        e1 = s * (a + kr + 1.0 + shift)
        hlo = np.minimum(e0, e1)
        hhi = np.maximum(e0, e1)
        m = (hhi > lo) & (hlo < hi)
        order = np.argsort(hlo[m])
        holes_lo = hlo[m][order]
        holes_hi = hhi[m][order]
    return RealizedSet(model, stream, window, None, None, None, "",
                       hole_lo=holes_lo, hole_hi=holes_hi,
                       initial_width=initial_width)


def _realize_boolean(model, stream, window, initial_width):
    lo, hi = window
    ell = model.arc_length
    # Any arc whose open interval meets the window starts in [lo - ell, hi].
    pts, _, _ = _poisson_arrays(1.0, stream, lo - ell, hi)
    starts, ends = [], []
    cur_s = cur_e = None
    for p in pts:
        if cur_s is None:
            cur_s, cur_e = p, p + ell
        elif p < cur_e:          # strict: touching arcs leave a set point
            cur_e = p + ell
        else:
            starts.append(cur_s)
            ends.append(cur_e)
            cur_s, cur_e = p, p + ell
    if cur_s is not None:
        starts.append(cur_s)
        ends.append(cur_e)
    hlo = np.asarray(starts, dtype=np.float64)
    hhi = np.asarray(ends, dtype=np.float64)
    m = (hhi > lo) & (hlo < hi)
    return RealizedSet(model, stream, window, None, None, None, "",
                       hole_lo=hlo[m], hole_hi=hhi[m],
                       initial_width=initial_width)


def realize(model: LineModel, stream: RngStream, window: tuple,
            _initial_width: Optional[float] = None) -> RealizedSet:
    """Materialize the model's set on the closed window [lo, hi].

    Content is a pure function of (model, stream, window) and agrees with
    any realization of the same (model, stream) on overlapping windows.
    """
    _validate_model(model)
    lo, hi = float(window[0]), float(window[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"window must be a finite nonempty interval, got {window}")
    window = (lo, hi)
    if isinstance(model, Poisson):
        return _realize_poisson(model, stream, window, _initial_width)
    if isinstance(model, RenewalWeibull):
        return _realize_renewal(model, stream, window, _initial_width)
    if isinstance(model, Periodic):
        if model.base_interval is not None:
            return _realize_periodic_interval(model, stream, window, _initial_width)
        return _realize_periodic_points(model, stream, window, _initial_width)
    return _realize_boolean(model, stream, window, _initial_width)


def from_points(points, window) -> RealizedSet:
    """Explicit point set for tests and hand examples.  Not extendable."""
    vals = np.sort(np.asarray(points, dtype=np.float64))
    idx = np.arange(vals.size, dtype=np.int64)
    return RealizedSet(None, None, (float(window[0]), float(window[1])),
                       vals, idx, np.zeros(vals.size, dtype=np.int64), "ex")


def extend(rs: RealizedSet, new_window: tuple, stream: Optional[RngStream] = None) -> RealizedSet:
    """Re-realize on a superset window; old content is reproduced exactly."""
    lo, hi = float(new_window[0]), float(new_window[1])
    w0, w1 = rs.window
    if lo > w0 or hi < w1:
        raise ValueError(f"extend window {new_window} does not contain {rs.window}")
    if rs.model is None:
        raise ValueError("explicit point sets cannot be extended")
    if rs.stream is None:
        raise ValueError("derived sets (e.g. thinned) cannot be extended")
    return realize(rs.model, stream or rs.stream, (lo, hi),
                   _initial_width=rs.initial_width)


def ensure_window(rs: RealizedSet, lo: float, hi: float) -> RealizedSet:
    """extend() convenience: grow rs just enough to cover [lo, hi]."""
    w0, w1 = rs.window
    if lo >= w0 and hi <= w1:
        return rs
    return extend(rs, (min(lo, w0), max(hi, w1)))


def _grow(rs, need_lo, need_hi, max_doublings, what):
    w0, w1 = rs.window
    width = w1 - w0
    cap = rs.initial_width * 2.0 ** max_doublings
    new_lo, new_hi = w0, w1
    if need_lo:
        new_lo = w0 - width
    if need_hi:
        new_hi = w1 + width
    if new_hi - new_lo > cap:
        raise ExtensionBudgetError(
            f"{what}: window grew to width {new_hi - new_lo:g} (cap {cap:g}, "
            f"initial {rs.initial_width:g}) without an answer")
    return extend(rs, (new_lo, new_hi))


def nearest(rs: RealizedSet, z: float, direction: str = "both",
            max_doublings: int = DEFAULT_MAX_DOUBLINGS) -> NearestPoint:
    """Nearest set point to z: first at-or-above ("up"), at-or-below
    ("down"), or closest of the two ("both", ties broken upward).

    The window is grown geometrically (internally; rs itself is unchanged)
    until the query is answerable, up to the doubling cap.
    """
    if direction not in ("up", "down", "both"):
        raise ValueError(f"bad direction {direction!r}")
    z = float(z)
    cur = rs
    while True:
        lo, hi = cur.window
        if z < lo or z > hi:
            cur = _grow(cur, z < lo, z > hi, max_doublings, "nearest")
            continue
        if cur.values is not None:
            ans = _nearest_points(cur, z, direction)
        else:
            ans = _nearest_complement(cur, z, direction)
        if ans is not None:
            return ans
        need_lo = direction in ("down", "both")
        need_hi = direction in ("up", "both")
        cur = _grow(cur, need_lo, need_hi, max_doublings, "nearest")


def _nearest_points(rs, z, direction):
    vals = rs.values
    lo, hi = rs.window
    n = len(vals)
    i_up = int(np.searchsorted(vals, z, side="left"))
    i_dn = int(np.searchsorted(vals, z, side="right")) - 1
    up = (float(vals[i_up]) - z, i_up) if i_up < n else None
    dn = (z - float(vals[i_dn]), i_dn) if i_dn >= 0 else None
    if direction == "up":
        if up is None:
            return None
        return NearestPoint(up[0], float(vals[up[1]]), rs.point_id(up[1]))
    if direction == "down":
        if dn is None:
            return None
        return NearestPoint(dn[0], float(vals[dn[1]]), rs.point_id(dn[1]))
    # both: a found side is conclusive if no unseen point beyond the window
    # on the missing side could be closer
    if up is not None and dn is not None:
        d, i = (dn if dn[0] < up[0] else up)   # tie -> up
        return NearestPoint(d, float(vals[i]), rs.point_id(i))
    if up is not None and up[0] <= z - lo:
        return NearestPoint(up[0], float(vals[up[1]]), rs.point_id(up[1]))
    if dn is not None and dn[0] < hi - z:
        return NearestPoint(dn[0], float(vals[dn[1]]), rs.point_id(dn[1]))
    return None


def _nearest_complement(rs, z, direction):
    lo, hi = rs.window
    j = int(np.searchsorted(rs.hole_lo, z, side="right")) - 1
    if not (j >= 0 and rs.hole_lo[j] < z < rs.hole_hi[j]):
        return NearestPoint(0.0, z, _value_id(z))
    a = float(rs.hole_lo[j])
    b = float(rs.hole_hi[j])
    # hole endpoints are genuine set points only while inside the window
    up = (b - z, b) if b <= hi else None
    dn = (z - a, a) if a >= lo else None
    if direction == "up":
        pick = up
    elif direction == "down":
        pick = dn
    else:
        if up is not None and dn is not None:
            pick = dn if dn[0] < up[0] else up
        elif up is not None and up[0] <= z - lo:
            pick = up
        elif dn is not None and dn[0] < hi - z:
            pick = dn
        else:
            pick = None
    if pick is None:
        return None
    return NearestPoint(pick[0], pick[1], _value_id(pick[1]))


def max_void_radius(rs: RealizedSet, interval: tuple,
                    max_doublings: int = DEFAULT_MAX_DOUBLINGS) -> VoidRadius:
    """Largest distance-to-set over centers in the closed interval, exact.

    Computed from the sorted gap (or hole) list: each gap's best center is
    its midpoint clamped into the interval.  Returns (radius, center); a
    radius of 0 means the set covers the whole interval (center = left end).
    """
    a, b = float(interval[0]), float(interval[1])
    if not (a <= b):
        raise ValueError(f"bad interval {interval}")
    cur = rs
    while True:
        lo, hi = cur.window
        if lo > a or hi < b:
            cur = _grow(cur, lo > a, hi < b, max_doublings, "max_void_radius")
            continue
        if cur.values is not None:
            vals = cur.values
            # need a bracketing point on each side of [a, b]
            if vals.size == 0 or vals[0] > a or vals[-1] < b:
                cur = _grow(cur, vals.size == 0 or vals[0] > a,
                            vals.size == 0 or vals[-1] < b,
                            max_doublings, "max_void_radius")
                continue
            i0 = int(np.searchsorted(vals, a, side="right")) - 1
            i1 = int(np.searchsorted(vals, b, side="left"))
            seg = vals[i0:i1 + 1]
            left = seg[:-1]
            right = seg[1:]
        else:
            keep = (cur.hole_hi > a) & (cur.hole_lo < b)
            left = cur.hole_lo[keep]
            right = cur.hole_hi[keep]
            if left.size and (left[0] < lo or right[-1] > hi):
                cur = _grow(cur, left[0] < lo, right[-1] > hi,
                            max_doublings, "max_void_radius")
                continue
            if left.size == 0:
                return VoidRadius(0.0, a)
        centers = np.clip((left + right) / 2.0, a, b)
        radii = np.minimum(centers - left, right - centers)
        i = int(np.argmax(radii))
        return VoidRadius(float(radii[i]), float(centers[i]))


def intersects_interval(rs: RealizedSet, lo: float, hi: float) -> bool:
    """Whether the set meets the half-open interval [lo, hi).

    The set's window must cover [lo, hi]; callers extend first.
    """
    w0, w1 = rs.window
    if lo < w0 or hi > w1:
        raise ValueError(f"interval [{lo}, {hi}) outside realized window {rs.window}")
    if rs.values is not None:
        i0 = int(np.searchsorted(rs.values, lo, side="left"))
        i1 = int(np.searchsorted(rs.values, hi, side="left"))
        return i1 > i0
    j = int(np.searchsorted(rs.hole_lo, lo, side="right")) - 1
    covered = j >= 0 and rs.hole_lo[j] < lo and rs.hole_hi[j] >= hi
    return not covered


def thin(rs: RealizedSet, keep_probability: float, stream: RngStream) -> RealizedSet:
    """Independent thinning of a point realization.

    Keeps each point with the given probability; point ids survive, so the
    result is a subset by identity.  Thinning a Poisson(lam) realization
    yields a Poisson(lam * p) law.  The result is not extendable.
    """
    if rs.values is None:
        raise ValueError("thinning needs a point-kind set")
    if not (0.0 <= keep_probability <= 1.0):
        raise ValueError("keep probability must lie in [0, 1]")
    g = _borrow_generator(stream.child("thin"))
    keep = g.random(len(rs.values)) < keep_probability
    model = rs.model
    if isinstance(model, Poisson):
        model = Poisson(model.intensity * keep_probability, model.x)
    return RealizedSet(model, None, rs.window, rs.values[keep],
                       rs._ida[keep], rs._idb[keep], rs._tag,
                       initial_width=rs.initial_width)


# ---------------------------------------------------------------------------
# serialization


def model_label(model: Optional[LineModel]) -> str:
    if model is None:
        return "explicit"
    if isinstance(model, Poisson):
        return f"poisson(intensity={model.intensity:.17g},x={model.x:.17g})"
    if isinstance(model, Periodic):
        if model.base_interval is not None:
            base = "interval:" + ",".join(f"{v:.17g}" for v in model.base_interval)
        else:
            base = "points:" + ",".join(f"{v:.17g}" for v in model.base_points)
        sh = "random" if model.shift is None else f"{model.shift:.17g}"
        return f"periodic(scale={model.scale:.17g},base={base},shift={sh},x={model.x:.17g})"
    if isinstance(model, RenewalWeibull):
        return f"renewal_weibull(level={model.level},x={model.x:.17g})"
    return f"boolean_complement(arc_length={model.arc_length:.17g},x={model.x:.17g})"


def write_csv(rs: RealizedSet, out: IO[str]) -> None:
    """Serialize a realization.

    Header: "# model=<label>;seed=<s>;stream=<id>;window=<lo>,<hi>".
    Then one point value per line (point kind) or one "lo,hi" free-interval
    pair per line (complement kind), all at 17 significant digits.
    """
    seed = rs.stream.seed if rs.stream is not None else "none"
    sid = rs.stream.stream_id if rs.stream is not None else "none"
    lo, hi = rs.window
    out.write(f"# model={model_label(rs.model)};seed={seed};stream={sid};"
              f"window={lo:.17g},{hi:.17g}\n")
    if rs.values is not None:
        for v in rs.values:
            out.write(f"{v:.17g}\n")
    else:
        for a, b in zip(rs.hole_lo, rs.hole_hi):
            out.write(f"{a:.17g},{b:.17g}\n")
