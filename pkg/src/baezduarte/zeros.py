"""Nontrivial-zero ordinates and the persistent cache of derived values.

A zeros file is UTF-8 text, one decimal ordinate per line in strictly
increasing order, with optional ``#`` comment lines.  The package bundles
the first 2000 ordinates at 15 digits; they are refined to working
precision on first use by Newton iteration on zeta.

The value cache is a human-readable TSV, one record per line::

    kind<TAB>key<TAB>precision_digits<TAB>value[<TAB>value2]

with complex values split across two fields.  Its directory comes from an
explicit argument, the ``CK_CACHE_DIR`` environment variable, or the
default ``./.ck-cache``.
"""

from __future__ import annotations

import logging
import os
import threading
from dataclasses import dataclass
from importlib import resources

import mpmath as mp

from .errors import NonConvergenceError, ZerosFormatError
from .mpkernel import PrecisionContext, _ctx
from .zetakernel import zeta_complex, zeta_prime

__all__ = [
    "ZeroEntry",
    "ZeroTable",
    "load_zeros",
    "bundled_zeros",
    "refine_zero",
    "ValueCache",
    "get_or_compute",
]

logger = logging.getLogger(__name__)

BUNDLED_RESOURCE = "zeros2000.txt"


@dataclass(frozen=True)
class ZeroEntry:
    index: int          # 1-based, ordered by increasing ordinate
    gamma: mp.mpf       # ordinate of the zero 1/2 + i*gamma
    digits: int         # significant digits carried by `text`
    refined: bool = False
    text: str = ""      # decimal string as read; preserved for round trips


def _significant_digits(text: str) -> int:
    ds = [c for c in text.split("e")[0].split("E")[0] if c.isdigit()]
    while ds and ds[0] == "0":
        ds.pop(0)
    return len(ds)


class ZeroTable:
    """Ordered, validated ordinates gamma_i of zeros on the critical line."""

    def __init__(self, entries):
        entries = tuple(entries)
        if not entries:
            raise ZerosFormatError("zero table is empty")
        prev = mp.mpf(0)
        for pos, e in enumerate(entries):
            if e.index != pos + 1:
                raise ZerosFormatError("zero indices must be contiguous from 1")
            if not e.gamma > prev:
                raise ZerosFormatError(
                    "ordinates must be positive and strictly increasing "
                    "(entry %d)" % (e.index,))
            prev = e.gamma
        if entries[0].index == 1 and abs(entries[0].gamma - mp.mpf("14.1347")) > mp.mpf("1e-3"):
            raise ZerosFormatError(
                "first ordinate %s is not the first zeta zero" % (entries[0].gamma,))
        self.entries = entries
        self._refined: dict[int, list] = {}
        self._residues: dict = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def gamma(self, index: int) -> mp.mpf:
        """Ordinate of the zero with the given 1-based index."""
        return self.entries[index - 1].gamma

    def find_index(self, gamma) -> int:
        """Index of the tabulated zero nearest to `gamma`.

        Rejects ordinates that are not within a quarter of the local zero
        spacing, which would mean the caller's value belongs to no entry.
        """
        gamma = mp.mpf(gamma)
        best = min(self.entries, key=lambda e: abs(e.gamma - gamma))
        i = best.index
        lo = self.entries[i - 2].gamma if i >= 2 else mp.mpf(0)
        hi = self.entries[i].gamma if i < len(self.entries) else best.gamma + 10
        gap = min(best.gamma - lo, hi - best.gamma)
        if abs(best.gamma - gamma) > gap / 4:
            raise ValueError("ordinate %s matches no tabulated zero" % (gamma,))
        return i

    def ensure_refined(self, count: int, ctx: PrecisionContext):
        """First `count` ordinates refined to context precision (cached)."""
        if count > len(self.entries):
            raise ValueError("table holds %d zeros, %d requested"
                             % (len(self.entries), count))
        bits = ctx.precision_bits
        with self._lock:
            got = self._refined.setdefault(bits, [])
            while len(got) < count:
                g0 = self.entries[len(got)].gamma
                g, off = refine_zero(g0, ctx)
                if off:
                    logger.warning("zero %d refined off the critical line", len(got) + 1)
                got.append(g)
            return tuple(got[:count])

    def refine(self, count: int | None = None, ctx: PrecisionContext | None = None) -> "ZeroTable":
        """A new table whose first `count` entries are refined copies."""
        ctx = _ctx(ctx)
        count = len(self.entries) if count is None else count
        refined = self.ensure_refined(count, ctx)
        out = []
        for e in self.entries:
            if e.index <= count:
                g = refined[e.index - 1]
                txt = mp.nstr(g, ctx.decimal_digits)
                out.append(ZeroEntry(e.index, g, ctx.decimal_digits, True, txt))
            else:
                out.append(e)
        return ZeroTable(out)

    def dump(self, path) -> None:
        """Write back in the zeros file format, preserving entry text."""
        with open(path, "w", encoding="utf-8") as f:
            for e in self.entries:
                f.write((e.text or mp.nstr(e.gamma, e.digits)) + "\n")


def _parse_zero_lines(lines, source: str) -> ZeroTable:
    entries = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        digits = _significant_digits(line)
        if digits == 0:
            raise ZerosFormatError("%s:%d: not a decimal ordinate: %r"
                                   % (source, lineno, line))
        try:
            with mp.workprec(int(digits * 3.33) + 16):
                g = mp.mpf(line)
        except ValueError as exc:
            raise ZerosFormatError("%s:%d: not a decimal ordinate: %r"
                                   % (source, lineno, line)) from exc
        entries.append(ZeroEntry(len(entries) + 1, g, digits, False, line))
    if not entries:
        raise ZerosFormatError("%s: no ordinates found" % (source,))
    return ZeroTable(entries)


def load_zeros(path) -> ZeroTable:
    """Load and validate a zeros file; digits are inferred per line."""
    with open(path, "r", encoding="utf-8") as f:
        return _parse_zero_lines(f, str(path))


_BUNDLED: ZeroTable | None = None
_BUNDLED_LOCK = threading.Lock()


def bundled_zeros() -> ZeroTable:
    """The zero table shipped with the package (first 2000 ordinates)."""
    global _BUNDLED
    if _BUNDLED is None:
        with _BUNDLED_LOCK:
            if _BUNDLED is None:
                text = resources.files("baezduarte").joinpath(
                    "data/" + BUNDLED_RESOURCE).read_text(encoding="utf-8")
                _BUNDLED = _parse_zero_lines(text.splitlines(), BUNDLED_RESOURCE)
    return _BUNDLED


def refine_zero(gamma0, ctx: PrecisionContext | None = None):
    """Newton-refine a coarse ordinate; returns (gamma, off_line_flag).

    Iterates s <- s - zeta(s)/zeta'(s) from 1/2 + i*gamma0 until
    |zeta(s)| < series_eps.  The flag is set when the converged point sits
    further than 10*series_eps off the critical line; it is diagnostic
    only.  Raises :class:`NonConvergenceError` after 50 iterations, which
    also covers seeds that sit between zeros and never settle.
    """
    ctx = _ctx(ctx)
    with ctx.workprec():
        s = mp.mpc(mp.mpf(1) / 2, mp.mpf(gamma0))
        for _ in range(50):
            z = zeta_complex(s, ctx)
            if abs(z) < ctx.series_eps:
                off = abs(mp.re(s) - mp.mpf(1) / 2) > 10 * ctx.series_eps
                return +mp.im(s), bool(off)
            zp = zeta_prime(s, ctx)
            if zp == 0:
                raise NonConvergenceError("zeta' vanished during refinement")
            s = s - z / zp
    raise NonConvergenceError("no zero located near gamma0=%s" % (gamma0,))


# ---------------------------------------------------------------------------
# Persistent value cache


class ValueCache:
    """File-backed cache of expensive derived values.

    Hits require at least the requested precision; lower-precision entries
    are recomputed and overwritten (last writer wins).  Records append to
    the TSV; the in-memory view keeps the highest-precision copy per key.
    """

    def __init__(self, directory=None, filename: str = "cache.tsv"):
        if directory is None:
            directory = os.environ.get("CK_CACHE_DIR", ".ck-cache")
        self.directory = str(directory)
        self.path = os.path.join(self.directory, filename)
        self._data: dict = {}
        self._loaded = False
        self._lock = threading.Lock()

    def _load(self) -> None:
        if self._loaded:
            return
        self._loaded = True
        if not os.path.exists(self.path):
            return
        with open(self.path, "r", encoding="utf-8") as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) < 4:
                    logger.warning("%s:%d: short cache record ignored",
                                   self.path, lineno)
                    continue
                kind, key, digits_s = parts[0], parts[1], parts[2]
                try:
                    digits = int(digits_s)
                    values = tuple(parts[3:])
                    for v in values:
                        mp.mpf(v)
                except ValueError:
                    logger.warning("%s:%d: corrupt cache record ignored",
                                   self.path, lineno)
                    continue
                cur = self._data.get((kind, key))
                if cur is None or cur[0] <= digits:
                    self._data[(kind, key)] = (digits, values)

    def lookup(self, kind: str, key, digits: int):
        """Stored decimal strings for (kind, key) at >= `digits`, or None."""
        with self._lock:
            self._load()
            hit = self._data.get((kind, str(key)))
        if hit is None or hit[0] < digits:
            return None
        return hit[1]

    def store(self, kind: str, key, digits: int, values) -> None:
        values = tuple(str(v) for v in values)
        record = "\t".join([kind, str(key), str(digits), *values])
        with self._lock:
            self._load()
            cur = self._data.get((kind, str(key)))
            if cur is not None and cur[0] > digits:
                return
            self._data[(kind, str(key))] = (digits, values)
            os.makedirs(self.directory, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(record + "\n")

    def get_or_compute(self, kind: str, key, ctx: PrecisionContext, compute_fn):
        """Context-precision convenience wrapper around :func:`get_or_compute`."""
        return get_or_compute(self, (kind, key, ctx.decimal_digits), compute_fn)


def get_or_compute(cache: ValueCache, key, compute_fn):
    """Cached evaluation; `key` is (kind, subkey, precision_digits).

    On a hit at sufficient precision the stored decimal strings are parsed
    (and thereby rounded) at the requested precision.  On a miss the value
    is computed, persisted, and returned; real values store one field,
    complex values two.
    """
    kind, subkey, digits = key
    bits = int(digits * 3.3219280948873626) + 4
    hit = cache.lookup(kind, subkey, digits)
    if hit is not None:
        with mp.workprec(bits):
            if len(hit) == 1:
                return +mp.mpf(hit[0])
            return mp.mpc(mp.mpf(hit[0]), mp.mpf(hit[1]))
    v = compute_fn()
    v = mp.mpmathify(v)
    if isinstance(v, mp.mpc) and v.imag == 0:
        v = v.real
    if isinstance(v, mp.mpc):
        fields = (mp.nstr(v.real, digits + 3), mp.nstr(v.imag, digits + 3))
    else:
        fields = (mp.nstr(v, digits + 3),)
    cache.store(kind, subkey, digits, fields)
    return v
