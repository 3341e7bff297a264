"""Matrix-valued trigonometric polynomials on the circle.

Coefficients are stored sparsely as {frequency: (rows, cols) complex matrix};
a value v at frequency f contributes v * e^{i f x}.  These are the entries of
pseudodifferential coefficients and crossed symbols: everything downstream
(quantization, symbol products, grid sampling) reduces to convolution,
pointwise evaluation and phase rotation of these dictionaries.
"""

from __future__ import annotations

import numpy as np


class TrigMatrixPoly:
    __slots__ = ("shape", "coeffs")

    def __init__(self, shape, coeffs=None):
        self.shape = (int(shape[0]), int(shape[1]))
        self.coeffs: dict[int, np.ndarray] = {}
        if coeffs:
            for f, m in coeffs.items():
                m = np.asarray(m, dtype=complex)
                if m.shape != self.shape:
                    raise ValueError(f"coefficient at frequency {f} has shape {m.shape}, want {self.shape}")
                if np.any(m != 0):
                    self.coeffs[int(f)] = m.copy()

    @staticmethod
    def constant(matrix) -> "TrigMatrixPoly":
        m = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return TrigMatrixPoly(m.shape, {0: m})

    @staticmethod
    def identity(n: int) -> "TrigMatrixPoly":
        return TrigMatrixPoly.constant(np.eye(n))

    @staticmethod
    def zero(shape) -> "TrigMatrixPoly":
        return TrigMatrixPoly(shape, {})

    def copy(self) -> "TrigMatrixPoly":
        return TrigMatrixPoly(self.shape, self.coeffs)

    @property
    def bandwidth(self) -> int:
        return max((abs(f) for f in self.coeffs), default=0)

    def __add__(self, other: "TrigMatrixPoly") -> "TrigMatrixPoly":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = TrigMatrixPoly(self.shape, self.coeffs)
        for f, m in other.coeffs.items():
            if f in out.coeffs:
                s = out.coeffs[f] + m
                if np.any(s != 0):
                    out.coeffs[f] = s
                else:
                    del out.coeffs[f]
            else:
                out.coeffs[f] = m.copy()
        return out

    def __sub__(self, other: "TrigMatrixPoly") -> "TrigMatrixPoly":
        return self + other * (-1.0)

    def __mul__(self, scalar) -> "TrigMatrixPoly":
        return TrigMatrixPoly(self.shape, {f: m * scalar for f, m in self.coeffs.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "TrigMatrixPoly") -> "TrigMatrixPoly":
        """Pointwise matrix product; frequencies convolve."""
        if self.shape[1] != other.shape[0]:
            raise ValueError("inner dimensions differ")
        out = TrigMatrixPoly((self.shape[0], other.shape[1]))
        acc: dict[int, np.ndarray] = {}
        for f1, m1 in self.coeffs.items():
            for f2, m2 in other.coeffs.items():
                f = f1 + f2
                prod = m1 @ m2
                if f in acc:
                    acc[f] = acc[f] + prod
                else:
                    acc[f] = prod
        out.coeffs = {f: m for f, m in acc.items() if np.any(np.abs(m) > 0)}
        return out

    def rotate(self, alpha: float) -> "TrigMatrixPoly":
        """Pullback along rotation by alpha: x -> x + alpha, coefficient f gains e^{i f alpha}."""
        return TrigMatrixPoly(
            self.shape, {f: m * np.exp(1j * f * alpha) for f, m in self.coeffs.items()}
        )

    def dx(self) -> "TrigMatrixPoly":
        """d/dx: coefficient f becomes i*f times itself."""
        return TrigMatrixPoly(self.shape, {f: 1j * f * m for f, m in self.coeffs.items() if f != 0})

    def adjoint(self) -> "TrigMatrixPoly":
        """Pointwise conjugate transpose (frequency f -> -f)."""
        return TrigMatrixPoly(
            (self.shape[1], self.shape[0]),
            {-f: m.conj().T for f, m in self.coeffs.items()},
        )

    def eval(self, x) -> np.ndarray:
        """Sample on x (any array shape); returns shape self.shape + x.shape."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(self.shape + x.shape, dtype=complex)
        for f, m in self.coeffs.items():
            out += np.multiply.outer(m, np.exp(1j * f * x))
        return out

    def norm_sup(self) -> float:
        """Upper-style estimate of sup_x ||A(x)||_F via coefficient sum."""
        if not self.coeffs:
            return 0.0
        return float(sum(np.linalg.norm(m) for m in self.coeffs.values()))

    def __repr__(self):
        return f"TrigMatrixPoly(shape={self.shape}, freqs={sorted(self.coeffs)})"


class SheetSymbol:
    """A pair of TrigMatrixPoly, one per cosphere sheet xi = +1 / -1."""

    __slots__ = ("plus", "minus")

    def __init__(self, plus: TrigMatrixPoly, minus: TrigMatrixPoly):
        if plus.shape != minus.shape:
            raise ValueError("sheet shapes differ")
        self.plus = plus
        self.minus = minus

    @staticmethod
    def constant(matrix) -> "SheetSymbol":
        return SheetSymbol(TrigMatrixPoly.constant(matrix), TrigMatrixPoly.constant(matrix))

    @staticmethod
    def identity(n: int) -> "SheetSymbol":
        return SheetSymbol.constant(np.eye(n))

    @staticmethod
    def zero(shape) -> "SheetSymbol":
        return SheetSymbol(TrigMatrixPoly.zero(shape), TrigMatrixPoly.zero(shape))

    @staticmethod
    def from_sheets(plus_coeffs, minus_coeffs, shape) -> "SheetSymbol":
        return SheetSymbol(TrigMatrixPoly(shape, plus_coeffs), TrigMatrixPoly(shape, minus_coeffs))

    @property
    def shape(self):
        return self.plus.shape

    @property
    def bandwidth(self) -> int:
        return max(self.plus.bandwidth, self.minus.bandwidth)

    def sheet(self, xi: int) -> TrigMatrixPoly:
        return self.plus if xi >= 0 else self.minus

    def __add__(self, other):
        return SheetSymbol(self.plus + other.plus, self.minus + other.minus)

    def __sub__(self, other):
        return SheetSymbol(self.plus - other.plus, self.minus - other.minus)

    def __mul__(self, scalar):
        return SheetSymbol(self.plus * scalar, self.minus * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return SheetSymbol(self.plus @ other.plus, self.minus @ other.minus)

    def rotate(self, alpha: float) -> "SheetSymbol":
        return SheetSymbol(self.plus.rotate(alpha), self.minus.rotate(alpha))

    def dx(self) -> "SheetSymbol":
        return SheetSymbol(self.plus.dx(), self.minus.dx())

    def adjoint(self) -> "SheetSymbol":
        return SheetSymbol(self.plus.adjoint(), self.minus.adjoint())

    def norm_sup(self) -> float:
        return max(self.plus.norm_sup(), self.minus.norm_sup())

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.norm_sup() <= tol

    def __repr__(self):
        return f"SheetSymbol(shape={self.shape}, bw={self.bandwidth})"
