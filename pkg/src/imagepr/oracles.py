"""Colorings of the positive rationals, queried pointwise.

Built-in families are named by short strings:

* ``constant``            every value gets color 1
* ``dyadic-digit:k[:r]``  1 + (floor(q * 2**k) mod r), r defaults to 2
* ``numerator-mod:m``     1 + (numerator of q in lowest terms mod m), r = m

``hook:<command>`` runs an external program that reads one ``p/q`` per line
on stdin and answers with one color index per line.
"""
from __future__ import annotations

import shlex
import subprocess
from fractions import Fraction

__all__ = [
    "Oracle",
    "ConstantOracle",
    "DyadicDigitOracle",
    "NumeratorModOracle",
    "HookOracle",
    "RefinedOracle",
    "OracleError",
    "parse_oracle",
]


class OracleError(RuntimeError):
    pass


class Oracle:
    """Memoized coloring q -> {1..r}."""

    r: int = 1
    name: str = "oracle"

    def __init__(self):
        self._cache: dict[Fraction, int] = {}

    def color(self, q: Fraction) -> int:
        raise NotImplementedError

    def __call__(self, q) -> int:
        q = Fraction(q)
        if q <= 0:
            raise OracleError(f"oracles color positive rationals, got {q}")
        c = self._cache.get(q)
        if c is None:
            c = self.color(q)
            if not isinstance(c, int) or not 1 <= c <= self.r:
                raise OracleError(f"{self.name} returned {c!r} for {q}, expected 1..{self.r}")
            self._cache[q] = c
        return c

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class ConstantOracle(Oracle):
    def __init__(self, r: int = 1):
        super().__init__()
        self.r = r
        self.name = "constant"

    def color(self, q):
        return 1


class DyadicDigitOracle(Oracle):
    def __init__(self, k: int, r: int = 2):
        super().__init__()
        if r < 1:
            raise ValueError("r must be positive")
        self.k, self.r = k, r
        self.name = f"dyadic-digit:{k}:{r}"

    def color(self, q):
        return 1 + int((q * 2**self.k) // 1) % self.r


class NumeratorModOracle(Oracle):
    def __init__(self, m: int):
        super().__init__()
        if m < 1:
            raise ValueError("modulus must be positive")
        self.m = self.r = m
        self.name = f"numerator-mod:{m}"

    def color(self, q):
        return 1 + q.numerator % self.m


class HookOracle(Oracle):
    """External process answering ``p/q`` lines with color indices."""

    def __init__(self, command: str, r: int):
        super().__init__()
        self.r = r
        self.name = f"hook:{command}"
        self._proc = subprocess.Popen(
            shlex.split(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def color(self, q):
        try:
            self._proc.stdin.write(f"{q.numerator}/{q.denominator}\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise OracleError(f"hook oracle died: {exc}") from exc
        if not line:
            raise OracleError(f"hook oracle gave no answer for {q}")
        try:
            return int(line.strip())
        except ValueError:
            raise OracleError(f"hook oracle answered {line.strip()!r} for {q}") from None

    def close(self):
        if self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=5)


class RefinedOracle:
    """psi(q) = (phi(q), phi(2q), ..., phi(nq)); never tabulated."""

    def __init__(self, phi: Oracle, n: int):
        self.phi, self.n = phi, n
        self._cache: dict[Fraction, tuple[int, ...]] = {}

    def __call__(self, q) -> tuple[int, ...]:
        q = Fraction(q)
        c = self._cache.get(q)
        if c is None:
            c = self._cache[q] = tuple(self.phi(t * q) for t in range(1, self.n + 1))
        return c


def parse_oracle(spec: str, r: int | None = None) -> Oracle:
    kind, _, rest = spec.partition(":")
    try:
        if kind == "constant":
            return ConstantOracle(r or 1)
        if kind == "dyadic-digit":
            parts = rest.split(":")
            k = int(parts[0])
            colors = int(parts[1]) if len(parts) > 1 else (r or 2)
            return DyadicDigitOracle(k, colors)
        if kind == "numerator-mod":
            return NumeratorModOracle(int(rest))
    except (ValueError, IndexError):
        raise ValueError(f"malformed oracle spec {spec!r}") from None
    if kind == "hook":
        if not rest or r is None:
            raise ValueError("hook oracles need a command and an explicit color count r")
        return HookOracle(rest, r)
    raise ValueError(f"unknown oracle {spec!r}")
