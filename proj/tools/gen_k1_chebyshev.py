#!/usr/bin/env python3
"""Generate Chebyshev coefficient tables for the modified Bessel function K1.

Regimes (x = argument):
  small  0 < x <= 2 :  t = x^2/2 - 1
                       I1(x)/x                          = sum a_k T_k(t)
                       x K1(x) - x ln(x/2) I1(x)        = sum b_k T_k(t)
  large  x >= 2     :  s = 4/x - 1
                       sqrt(x) e^x K1(x)                = sum c_k T_k(s)

Coefficients are computed at 60 significant digits by discrete cosine
projection on Chebyshev nodes and truncated once they fall below 1e-18
relative to the leading term.
"""
import sys
import mpmath as mp

mp.mp.dps = 60
NODES = 96


def cheb_coeffs(f):
    n = NODES
    vals = []
    for j in range(n):
        theta = mp.pi * (j + mp.mpf(1) / 2) / n
        vals.append(f(mp.cos(theta)))
    coeffs = []
    for k in range(n):
        s = mp.mpf(0)
        for j in range(n):
            theta = mp.pi * (j + mp.mpf(1) / 2) / n
            s += vals[j] * mp.cos(k * theta)
        c = 2 * s / n
        if k == 0:
            c /= 2
        coeffs.append(c)
    lead = abs(coeffs[0])
    last = 0
    for k, c in enumerate(coeffs):
        if abs(c) > mp.mpf("1e-18") * lead:
            last = k
    return coeffs[: last + 1]


def small_p(t):
    x = mp.sqrt(2 * (t + 1))
    if x == 0:
        return mp.mpf(1) / 2
    return mp.besseli(1, x) / x


def small_q(t):
    x = mp.sqrt(2 * (t + 1))
    if x < mp.mpf("1e-30"):
        return mp.mpf(1)
    return x * mp.besselk(1, x) - x * mp.log(x / 2) * mp.besseli(1, x)


def large_g(s):
    x = 4 / (s + 1)
    return mp.sqrt(x) * mp.exp(x) * mp.besselk(1, x)


def emit(name, coeffs):
    body = ",\n".join(f"    {mp.nstr(c, 20, min_fixed=1, max_fixed=0)}" for c in coeffs)
    return f"inline constexpr std::array<double, {len(coeffs)}> {name} = {{\n{body}}};\n"


def main():
    tables = [
        ("kK1SmallI1", cheb_coeffs(small_p)),
        ("kK1SmallRest", cheb_coeffs(small_q)),
        ("kK1LargeScaled", cheb_coeffs(large_g)),
    ]
    out = [
        "// Generated by tools/gen_k1_chebyshev.py. Do not edit.",
        "#pragma once",
        "",
        "#include <array>",
        "",
        "namespace acop::detail {",
        "",
    ]
    for name, c in tables:
        out.append(emit(name, c))
    out.append("}  // namespace acop::detail")
    sys.stdout.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
