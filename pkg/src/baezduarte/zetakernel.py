"""Riemann zeta machinery: exact even-argument values, high-precision
zeta(2j+2)-1 tables, complex-argument zeta and zeta' by Euler-Maclaurin
summation, and the residues of 1/zeta at the trivial zeros.

The Euler-Maclaurin evaluator is written here rather than delegated so that
the closed-form Bernoulli route (:func:`zeta_even`) and the summation route
(:func:`zeta_complex`) stay independent of each other; the pair acts as a
cross-check throughout the test suite.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb

import mpmath as mp

from .errors import NonConvergenceError, PoleError
from .mpkernel import PrecisionContext, _ctx

__all__ = [
    "BernoulliCache",
    "bernoulli",
    "zeta_even",
    "ZetaEvenTable",
    "zeta_even_minus_one_table",
    "zeta_complex",
    "zeta_prime",
    "zeta_sm1",
    "trivial_residue",
    "zeta_odd",
]


# ---------------------------------------------------------------------------
# Bernoulli numbers, exact


class BernoulliCache:
    """Append-only cache of even-index Bernoulli numbers as exact rationals.

    Built from the binomial recurrence sum_{r<n} C(n+1, r) B_r = -C(n+1, n) B_n
    restricted to even indices (odd B_r vanish for r >= 3; the single B_1 term
    enters with the B_1 = -1/2 convention).
    """

    def __init__(self):
        self._even = [Fraction(1)]  # B_0
        self._lock = threading.Lock()

    def get(self, n: int) -> Fraction:
        if n < 0 or n % 2:
            raise ValueError("even index required, got %r" % (n,))
        m = n // 2
        if m >= len(self._even):
            with self._lock:
                self._extend(m)
        return self._even[m]

    def _extend(self, m_target: int) -> None:
        ev = self._even
        for m in range(len(ev), m_target + 1):
            n = 2 * m
            s = Fraction(n + 1, 1) * Fraction(-1, 2)  # B_1 term
            for j in range(m):
                s += comb(n + 1, 2 * j) * ev[j]
            ev.append(-s / (n + 1))

    def known(self) -> int:
        """Largest even index currently cached."""
        return 2 * (len(self._even) - 1)


_BERNOULLI = BernoulliCache()


def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n for even n (and the conventional B_0, B_1).

    Odd n >= 3 are rejected rather than returning zero: those vanish
    identically and a request for one signals an indexing bug upstream.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 1:
        return Fraction(-1, 2)
    if n % 2:
        raise ValueError("Bernoulli numbers of odd index >= 3 vanish; not served")
    return _BERNOULLI.get(n)


def zeta_even(n: int, ctx: PrecisionContext | None = None):
    """zeta(n) for even n >= 2 via the Bernoulli closed form
    (-1)^(n/2+1) B_n (2 pi)^n / (2 n!)."""
    ctx = _ctx(ctx)
    if n < 2 or n % 2:
        raise ValueError("even n >= 2 required")
    b = bernoulli(n)
    with ctx.workprec():
        v = (-1) ** (n // 2 + 1) * mp.mpf(b.numerator) / b.denominator \
            * (2 * mp.pi) ** n / (2 * mp.factorial(n))
    with ctx.workprec(0):
        return +v


# ---------------------------------------------------------------------------
# Euler-Maclaurin core


def _em_zeta(s, bits: int, minus_one=False, derivative=False, pole_scaled=False):
    """Euler-Maclaurin evaluation at relative tolerance ~2^-bits.

    minus_one drops the m=1 term so zeta(s)-1 comes out with full relative
    precision even when it is ~2^-s.  pole_scaled returns (s-1)*zeta(s),
    which is regular at s=1.  derivative returns zeta'(s).
    """
    s = mp.mpmathify(s)
    if s == 1 and not pole_scaled:
        raise PoleError("zeta pole at s=1")
    if pole_scaled and (minus_one or derivative):
        raise ValueError("pole_scaled cannot combine with other modes")
    last_exc = None
    for attempt in range(4):
        try:
            return _em_zeta_once(s, bits, 2 ** attempt, minus_one, derivative,
                                 pole_scaled)
        except NonConvergenceError as exc:
            last_exc = exc
    raise last_exc


def _em_zeta_once(s, bits, n_scale, minus_one, derivative, pole_scaled):
    sigma = mp.re(s)
    is_real = mp.im(s) == 0
    if is_real:
        s = mp.mpf(s)
    N = n_scale * (max(20, int(0.35 * bits + 0.8 * abs(mp.im(s)))) + 1)
    guard = 24 + int(mp.log(N, 2))
    if sigma < 1:
        # direct-sum terms grow to ~N^(1-sigma); that cancels back out
        guard += int((1 - sigma) * mp.log(N, 2)) + 8
    with mp.workprec(bits + guard):
        eps = mp.mpf(2) ** -(bits + 4)
        tiny = mp.mpf(2) ** -(bits + guard - 8)
        start = 2 if minus_one else 1
        tot = mp.mpf(0)
        dtot = mp.mpf(0)
        m = start
        while m < N:
            p = mp.power(m, -s)
            tot += p
            if derivative:
                dtot -= mp.log(m) * p
            if is_real and sigma > 1 and m > start and p < eps * tot:
                N = m + 1
                break
            m += 1
        lnN = mp.log(N)
        Ns = mp.power(N, -s)
        mult = (s - 1) if pole_scaled else mp.mpf(1)
        if pole_scaled:
            tot = mult * (tot + Ns / 2) + N * Ns
        else:
            tot += N * Ns / (s - 1) + Ns / 2
            if derivative:
                dtot += N * Ns * (-lnN / (s - 1) - 1 / (s - 1) ** 2) - lnN * Ns / 2
        # Correction terms B_{2j}/(2j)! (s)_{2j-1} N^{-s-2j+1}; the remainder
        # after j terms is bounded by |s+2j+1|/(Re s + 2j + 1) times the next
        # term once Re s + 2j + 1 > 1.
        P = s
        dP = mp.mpf(1)
        Npow = Ns / N
        prev_mag = mp.inf
        j = 1
        j_max = bits + 256
        while True:
            coef = mp.bernoulli(2 * j) / mp.factorial(2 * j)
            term = mult * coef * P * Npow
            tot += term
            if derivative:
                dterm = coef * (dP - P * lnN) * Npow
                dtot += dterm
            sig = sigma + 2 * j + 1
            if sig > 1:
                fac = abs(s + 2 * j + 1) / sig
                ok_v = term == 0 or abs(term) * fac <= eps * max(abs(tot), tiny)
                ok_d = (not derivative) or dterm == 0 \
                    or abs(dterm) * fac <= eps * max(abs(dtot), tiny)
                if ok_v and ok_d:
                    break
                mag = max(abs(term), abs(dterm) if derivative else 0)
                if j > 3 and mag > 4 * prev_mag:
                    raise NonConvergenceError(
                        "Euler-Maclaurin corrections diverge at s=%s, N=%s" % (s, N))
                prev_mag = mag
            if j >= j_max:
                raise NonConvergenceError("correction budget exhausted at s=%s" % (s,))
            F = (s + 2 * j - 1) * (s + 2 * j)
            dP = dP * F + P * (2 * s + 4 * j - 1)
            P = P * F
            Npow = Npow / (N * N)
            j += 1
        return dtot if derivative else tot


def zeta_complex(s, ctx: PrecisionContext | None = None):
    """zeta(s) for any s != 1, truncation error below the context tolerance."""
    ctx = _ctx(ctx)
    v = _em_zeta(s, ctx.precision_bits)
    with ctx.workprec(0):
        return +v


def zeta_prime(s, ctx: PrecisionContext | None = None):
    """zeta'(s) by term-by-term differentiation of the same summation."""
    ctx = _ctx(ctx)
    v = _em_zeta(s, ctx.precision_bits, derivative=True)
    with ctx.workprec(0):
        return +v


def zeta_sm1(s, ctx: PrecisionContext | None = None):
    """(s-1)*zeta(s), evaluated in a form that is regular at s=1."""
    ctx = _ctx(ctx)
    v = _em_zeta(s, ctx.precision_bits, pole_scaled=True)
    with ctx.workprec(0):
        return +v


# ---------------------------------------------------------------------------
# zeta(2j+2)-1 table


class ZetaEvenTable:
    """Values zeta(2j+2)-1 for j = 0..j_max at a fixed bit precision.

    Entries hold full *relative* precision (the subtraction never happens in
    floating point; the defining sum simply starts at m=2), so reciprocals
    1/zeta(2j+2) = 1/(1+t_j) inherit the full digit budget even deep in the
    tail where t_j ~ 4^-j.
    """

    def __init__(self, values, bits: int):
        self._values = tuple(values)
        self.bits = int(bits)
        self._inv = None
        self._lock = threading.Lock()

    @property
    def j_max(self) -> int:
        return len(self._values) - 1

    @property
    def digits(self) -> int:
        return int(self.bits * 0.3010299956639812)

    def minus_one(self, j: int):
        """t_j = zeta(2j+2) - 1."""
        return self._values[j]

    def zeta(self, j: int):
        with mp.workprec(self.bits):
            return 1 + self._values[j]

    def inv_zeta(self, j: int):
        """1/zeta(2j+2) at table precision."""
        if self._inv is None:
            with self._lock:
                if self._inv is None:
                    with mp.workprec(self.bits):
                        self._inv = tuple(1 / (1 + t) for t in self._values)
        return self._inv[j]

    def __len__(self):
        return len(self._values)


def zeta_even_minus_one_table(j_max: int, ctx: PrecisionContext | None = None,
                              cache=None) -> ZetaEvenTable:
    """Build the zeta(2j+2)-1 table for j = 0..j_max at context precision.

    An optional value cache (see :mod:`baezduarte.zeros`) is consulted per
    entry under the kind ``zeta_even_minus_one``.
    """
    ctx = _ctx(ctx)
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    bits = ctx.precision_bits
    values = []
    for j in range(j_max + 1):
        if cache is not None:
            v = cache.get_or_compute(
                "zeta_even_minus_one", j, ctx,
                lambda j=j: _em_zeta(2 * j + 2, bits, minus_one=True))
        else:
            v = _em_zeta(2 * j + 2, bits, minus_one=True)
        with mp.workprec(bits):
            values.append(+v)
    return ZetaEvenTable(values, bits)


_SHARED_TABLE: ZetaEvenTable | None = None
_SHARED_TABLE_LOCK = threading.Lock()


def shared_minus_one_table(j_max: int, bits: int) -> ZetaEvenTable:
    """Process-wide table, grown monotonically in both extent and precision.

    Callers needing fewer digits than the stored entries simply round; the
    table is rebuilt only when either dimension grows.
    """
    global _SHARED_TABLE
    with _SHARED_TABLE_LOCK:
        t = _SHARED_TABLE
        if t is None or t.bits < bits or t.j_max < j_max:
            bits = max(bits, t.bits if t else 0)
            j_max = max(j_max, t.j_max if t else 0)
            values = [_em_zeta(2 * j + 2, bits, minus_one=True)
                      for j in range(j_max + 1)]
            with mp.workprec(bits):
                values = [+v for v in values]
            t = ZetaEvenTable(values, bits)
            _SHARED_TABLE = t
        return t


# ---------------------------------------------------------------------------
# Trivial-zero residues and odd-argument values


def trivial_residue(n: int, ctx: PrecisionContext | None = None):
    """Residue of 1/zeta at s = -2n:  2 (-1)^n (2 pi)^(2n) / ((2n)! zeta(2n+1)).

    Equals 1/zeta'(-2n); the test suite checks that identity against the
    differentiated summation route.
    """
    ctx = _ctx(ctx)
    if n < 1:
        raise ValueError("n must be >= 1")
    with ctx.workprec():
        z = zeta_complex(2 * n + 1, ctx)
        v = 2 * (-1) ** n * (2 * mp.pi) ** (2 * n) / (mp.factorial(2 * n) * z)
    with ctx.workprec(0):
        return +v


_ODD_CACHE: dict = {}
_ODD_LOCK = threading.Lock()


def zeta_odd(m: int, ctx: PrecisionContext | None = None, cache=None):
    """zeta(2m-1) for m >= 2, memoized per (m, precision).

    These are the only zeta values the trend series consumes; they are worth
    caching because every k in a scan reuses the same handful.
    """
    ctx = _ctx(ctx)
    if m < 2:
        raise ValueError("m must be >= 2")
    key = (m, ctx.precision_bits)
    v = _ODD_CACHE.get(key)
    if v is None:
        if cache is not None:
            v = cache.get_or_compute(
                "zeta_odd", 2 * m - 1, ctx,
                lambda: zeta_complex(2 * m - 1, ctx))
        else:
            v = zeta_complex(2 * m - 1, ctx)
        with _ODD_LOCK:
            _ODD_CACHE[key] = v
    return v
