#!/usr/bin/env python3
"""Reference values for the Coulomb distortion factor Phi(-i eta, 1, i w).

Values are obtained by direct Maclaurin summation of 1F1 in multiprecision
arithmetic (working precision grows with |w| so that the cancellation in the
alternating series is absorbed), summing until |term| < 1e-40 |partial sum|.
Each value is cross-checked against mpmath.hyp1f1. Derivatives use the
contiguous relations

    d/dw   1F1(a;1;iw) = i a 1F1(a+1;2;iw)
    d2/dw2 1F1(a;1;iw) = -a(a+1)/2 1F1(a+2;3;iw)

and the eta-derivative is a high-precision numerical derivative of
mpmath.hyp1f1 with respect to the parameter.

Run:  python3 gen_kummer_oracle.py > kummer_oracle.txt
"""
import mpmath as mp

BASE_DPS = 50


def maclaurin(a, b, z):
    """Sum 1F1(a;b;z) term by term with precision sized to the largest term."""
    extra = int(abs(z) / mp.log(10)) + 20 if abs(z) > 1 else 10
    with mp.workdps(BASE_DPS + extra):
        a = mp.mpc(a)
        b = mp.mpf(b)
        z = mp.mpc(z)
        term = mp.mpc(1)
        total = mp.mpc(1)
        n = 0
        peak = mp.mpf(1)
        while True:
            term *= (a + n) / ((b + n) * (n + 1)) * z
            n += 1
            total += term
            peak = max(peak, abs(term))
            if n > abs(z) + 5 and abs(term) < mp.mpf(10) ** (-40) * max(abs(total), mp.mpf(10) ** -300):
                break
        return +total


def row(eta, w):
    mp.mp.dps = BASE_DPS
    eta = mp.mpf(eta)
    w = mp.mpc(w)
    a = -1j * eta
    z = 1j * w
    v = maclaurin(a, 1, z)
    check = mp.hyp1f1(a, 1, z)
    rel = abs(v - check) / abs(check)
    assert rel < mp.mpf(10) ** -30, (eta, w, rel)
    d1 = 1j * a * mp.hyp1f1(a + 1, 2, z)
    d2 = -a * (a + 1) / 2 * mp.hyp1f1(a + 2, 3, z)
    deta = mp.diff(lambda e: mp.hyp1f1(-1j * e, 1, z), eta)
    return [eta, w.real, w.imag, v.real, v.imag, d1.real, d1.imag, d2.real, d2.imag, deta.real, deta.imag]


def fmt(x):
    return mp.nstr(x, 20, min_fixed=0, max_fixed=0) if x != 0 else "0"


def main():
    print("# Phi(-i eta, 1, i w) oracle table, 20 significant digits")
    print("# columns: eta w_re w_im phi_re phi_im d1_re d1_im d2_re d2_im deta_re deta_im")
    etas = ["0.1", "0.25", "0.5", "0.75", "1", "1.5", "2", "3", "4", "5"]
    ws = [mp.mpf(10) ** (mp.mpf(-3) + mp.mpf(7) * k / 19) for k in range(20)]
    print("[grid]")
    for e in etas:
        for w in ws:
            w = mp.mpf(mp.nstr(w, 17))
            print(" ".join(fmt(x) for x in row(e, w)))
    print("[complex]")
    for e in ["0.3", "1", "2.5"]:
        for (wr, wi) in [("0.5", "0.25"), ("2", "-1"), ("7.5", "1.5"), ("30", "-2"),
                         ("120", "3"), ("900", "-1.5"), ("3000", "2.5")]:
            print(" ".join(fmt(x) for x in row(e, mp.mpc(wr, wi))))
    print("[large-eta]")
    for e in ["10", "20", "50"]:
        for w in ["1", "10", "100", "1000", "10000"]:
            print(" ".join(fmt(x) for x in row(e, mp.mpf(w))))


if __name__ == "__main__":
    main()
