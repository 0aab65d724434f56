"""Arbitrary-precision arithmetic contract and shared special functions.

Scalars are mpmath ``mpf``/``mpc`` values (aliased :data:`BigReal` and
:data:`BigComplex`).  Every operation takes a :class:`PrecisionContext`
fixing the working precision in bits and the relative tolerance used by
adaptive series elsewhere in the package.  Quantities whose magnitude can
fall far below anything sensible to exponentiate (harmonic amplitudes at
very large k, amplitude bounds at astronomically high zeros) travel as
:class:`LogScaled` magnitude/phase pairs instead.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import mpmath as mp

from .errors import PoleError

__all__ = [
    "BigReal",
    "BigComplex",
    "PrecisionContext",
    "LogScaled",
    "make_context",
    "context_from_digits",
    "default_context",
    "log_gamma",
    "log_beta",
    "beta",
    "beta_asymptotic",
    "to_decimal",
    "from_decimal",
]

BigReal = mp.mpf
BigComplex = mp.mpc

#: Guard bits added inside kernels so that results are fully accurate at
#: context precision after the final rounding.
GUARD_BITS = 16


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision (bits) plus the relative series tolerance derived
    from it.  ``series_eps`` is what adaptive truncations compare tails
    against; it defaults to ``2**-(precision_bits - 8)`` so one knob
    controls accuracy everywhere."""

    precision_bits: int
    series_eps: mp.mpf

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")
        if not (0 < self.series_eps < mp.mpf(2) ** -(self.precision_bits // 2)):
            raise ValueError("series_eps out of range (0, 2^-(bits/2))")

    @property
    def decimal_digits(self) -> int:
        """Significant decimal digits representable at this precision."""
        return int(self.precision_bits * 0.3010299956639812)

    def workprec(self, extra: int = GUARD_BITS):
        """mpmath precision guard for computations under this context."""
        return mp.workprec(self.precision_bits + extra)


def make_context(precision_bits: int) -> PrecisionContext:
    """Build a context with the default tolerance tied to the precision.

    Rejects ``precision_bits < 64``.
    """
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64, got %r" % (precision_bits,))
    eps = mp.mpf(2) ** -(precision_bits - 8)
    return PrecisionContext(precision_bits=int(precision_bits), series_eps=eps)


def context_from_digits(digits: int) -> PrecisionContext:
    """Context sized for ``digits`` significant decimal digits."""
    if digits < 1:
        raise ValueError("digits must be positive")
    bits = max(64, int(mp.ceil(digits * 3.3219280948873626)) + 4)
    return PrecisionContext(precision_bits=bits, series_eps=mp.mpf(2) ** -(bits - 8))


@functools.lru_cache(maxsize=None)
def default_context() -> PrecisionContext:
    """The 50-digit context used when callers pass ``ctx=None``."""
    return context_from_digits(50)


def _ctx(ctx) -> PrecisionContext:
    return ctx if ctx is not None else default_context()


# ---------------------------------------------------------------------------
# LogScaled


@dataclass(frozen=True)
class LogScaled:
    """A number as (log10 of magnitude, phase in radians).

    ``phase`` lies in (-pi, pi]; real values carry phase 0 or pi, and an
    exact zero is represented by ``log10_magnitude = -inf`` with phase 0.
    This representation stays finite and exact-to-precision even when the
    magnitude is something like 10**(-3e21).
    """

    log10_magnitude: mp.mpf
    phase: mp.mpf

    @classmethod
    def from_number(cls, x) -> "LogScaled":
        x = mp.mpmathify(x)
        if x == 0:
            return cls(mp.mpf("-inf"), mp.mpf(0))
        if isinstance(x, mp.mpc) and x.imag == 0:
            x = x.real
        if isinstance(x, mp.mpf):
            mag = abs(x)
            ph = mp.mpf(0) if x > 0 else +mp.pi
        else:
            mag = abs(x)
            ph = mp.arg(x)
        return cls(mp.log10(mag), _reduce_phase(ph))

    @classmethod
    def from_log(cls, natural_log_magnitude, phase=0) -> "LogScaled":
        """Build from a natural-log magnitude (e.g. a log-gamma real part)."""
        return cls(mp.mpf(natural_log_magnitude) / mp.log(10), _reduce_phase(mp.mpf(phase)))

    @property
    def sign(self) -> int:
        """-1/0/+1 for real values; raises for genuinely complex phases."""
        if mp.isinf(self.log10_magnitude) and self.log10_magnitude < 0:
            return 0
        if abs(self.phase) < mp.mpf(2) ** -40:
            return 1
        if abs(self.phase - mp.pi) < mp.mpf(2) ** -40:
            return -1
        raise ValueError("LogScaled value has a non-real phase")

    def to_number(self):
        """Back to mpf/mpc at the current working precision.

        Overflows only if the decimal exponent itself exceeds what an mpf
        exponent can hold, which does not happen below ~10**(10**18).
        """
        if mp.isinf(self.log10_magnitude) and self.log10_magnitude < 0:
            return mp.mpf(0)
        mag = mp.power(10, self.log10_magnitude)
        try:
            s = self.sign
            return mag if s >= 0 else -mag
        except ValueError:
            return mag * mp.expjpi(self.phase / mp.pi)

    def serialize(self) -> str:
        digits = int(mp.mp.dps) + 2
        return "log10=%s;phase=%s" % (mp.nstr(self.log10_magnitude, digits),
                                      mp.nstr(self.phase, digits))

    @classmethod
    def parse(cls, text: str) -> "LogScaled":
        try:
            left, right = text.split(";")
            mag = mp.mpf(left.split("=", 1)[1])
            ph = mp.mpf(right.split("=", 1)[1])
        except (ValueError, IndexError) as exc:
            raise ValueError("not a LogScaled string: %r" % (text,)) from exc
        return cls(mag, ph)


def _reduce_phase(ph: mp.mpf) -> mp.mpf:
    """Reduce a phase to the principal interval (-pi, pi]."""
    if -mp.pi < ph <= mp.pi:
        return ph
    twopi = 2 * mp.pi
    ph = mp.fmod(ph, twopi)
    if ph > mp.pi:
        ph -= twopi
    elif ph <= -mp.pi:
        ph += twopi
    return ph


# ---------------------------------------------------------------------------
# Special functions


def _is_nonpositive_integer(z) -> bool:
    z = mp.mpmathify(z)
    if mp.im(z) != 0:
        return False
    r = mp.re(z)
    return r <= 0 and r == mp.floor(r)


def log_gamma(z, ctx: PrecisionContext | None = None):
    """Principal-branch log Gamma(z).

    Conjugation symmetry holds structurally: arguments in the lower half
    plane are evaluated as the conjugate of the mirrored point.  Raises
    :class:`PoleError` at the poles 0, -1, -2, ...
    """
    ctx = _ctx(ctx)
    z = mp.mpmathify(z)
    if _is_nonpositive_integer(z):
        raise PoleError("log_gamma pole at z=%s" % (z,))
    with ctx.workprec():
        if mp.im(z) < 0:
            v = mp.conj(mp.loggamma(mp.conj(z)))
        else:
            v = mp.loggamma(z)
    with ctx.workprec(0):
        return +v


def log_beta(a, b, ctx: PrecisionContext | None = None):
    """log B(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a+b)."""
    ctx = _ctx(ctx)
    a = mp.mpmathify(a)
    b = mp.mpmathify(b)
    for z, name in ((a, "a"), (b, "b"), (a + b, "a+b")):
        if _is_nonpositive_integer(z):
            raise PoleError("log_beta: %s=%s is a nonpositive integer" % (name, z))
    with ctx.workprec():
        v = log_gamma(a, ctx) + log_gamma(b, ctx) - log_gamma(a + b, ctx)
    with ctx.workprec(0):
        return +v


def beta(a, b, ctx: PrecisionContext | None = None):
    """Euler beta function B(a, b) as a plain scalar."""
    ctx = _ctx(ctx)
    with ctx.workprec():
        v = mp.exp(log_beta(a, b, ctx))
    with ctx.workprec(0):
        return +v


def beta_asymptotic(a, b, order: int = 1, ctx: PrecisionContext | None = None) -> LogScaled:
    """Large-first-argument expansion of B(a, b), returned log-scaled.

    Order 0 is Gamma(b) * a**(-b); order 1 multiplies in the correction
    factor 1 - b(b-1)/(2a).  Requires |a| >= 10*|b|**2 so the expansion is
    meaningful; relative accuracy is about |b(b-1)/(2a)| at order 0 and
    O(|b|^4/|a|^2) at order 1.
    """
    ctx = _ctx(ctx)
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    a = mp.mpmathify(a)
    b = mp.mpmathify(b)
    if abs(a) < 10 * abs(b) ** 2:
        raise ValueError("beta_asymptotic needs |a| >= 10*|b|^2")
    with ctx.workprec():
        lg = log_gamma(b, ctx) - b * mp.log(a)
        if order == 1:
            lg = lg + mp.log(1 - b * (b - 1) / (2 * a))
        return LogScaled.from_log(mp.re(lg), mp.im(lg))


# ---------------------------------------------------------------------------
# Decimal-string serialization


def to_decimal(x, ctx: PrecisionContext | None = None) -> str:
    """Decimal string carrying the context's full digit budget.

    Round-tripping through :func:`from_decimal` preserves all but the last
    couple of digits.  Complex values serialize as ``(re im)``.
    """
    ctx = _ctx(ctx)
    digits = ctx.decimal_digits
    x = mp.mpmathify(x)
    if isinstance(x, mp.mpc):
        return "(%s %s)" % (mp.nstr(x.real, digits), mp.nstr(x.imag, digits))
    return mp.nstr(x, digits)


def from_decimal(text: str, ctx: PrecisionContext | None = None):
    """Parse the output of :func:`to_decimal` at context precision."""
    ctx = _ctx(ctx)
    text = text.strip()
    with ctx.workprec():
        if text.startswith("("):
            re_s, im_s = text[1:-1].split()
            v = mp.mpc(mp.mpf(re_s), mp.mpf(im_s))
        else:
            v = mp.mpf(text)
    with ctx.workprec(0):
        return +v
