#!/usr/bin/env python3
"""Independent high-precision evaluation of the bound-constant chain.

Prints log-values (natural log) of every BoundSet entry at 50 digits so the
Rust regression test can freeze them. Run: python3 constants_oracle.py
"""
import mpmath as mp

mp.mp.dps = 60


def chain(G, nu, k0, cL, cA, gamma_max=40):
    G, nu, k0, cL, cA = map(mp.mpf, (G, nu, k0, cL, cA))
    s = 2 * cL**2 + cA
    lam = nu * k0**2
    rt1 = mp.sqrt(2) * G
    r2 = 2137 * cL**4 * G**3
    rt2 = mp.sqrt(3 * (mp.sqrt(2) * 16**2 * mp.mpf(24)**6 * cL**16) ** (mp.mpf(2) / 3)
                  / (4 * s ** (mp.mpf(4) / 3)) * G**6 + 4 * r2**2)
    d1 = 1 / (16 * mp.mpf(24)**3 * cL**8 * nu * k0**2 * G**4)
    inner = s ** (mp.mpf(8) / 3) * rt1 ** (mp.mpf(8) / 3) * (lam / (8 * d1**2)) ** (mp.mpf(2) / 3) \
        + s**4 * lam**2 * rt1**2 * r2**2
    d2 = min(d1, inner ** (-mp.mpf(1) / 2) / 16)
    d3 = d2 / 2
    n2 = r2**2 + 2 * d2 * rt1**2 / (lam * d1**2) + 16 * s**2 * lam * d2 * rt1 * rt2**3
    rt3 = 4 * mp.sqrt(n2) / (mp.sqrt(nu) * k0 * mp.sqrt(d3))
    da = d3

    def Gam(g):
        return mp.mpf(2) ** (g + mp.mpf(3) / 2) * cA * (mp.mpf(2) ** (g + 2) * cA * rt1 * rt2 + mp.sqrt(rt1 * rt3))

    def eps(g):
        return 1 / (2 * mp.sqrt(2) * Gam(g) * da * lam) + mp.sqrt(2) / (Gam(g) * lam**2 * da**2) \
            + mp.pi**2 / (72 * lam**2 * da**4 * Gam(g) * Gam(g + 1))

    def eta(g):
        return mp.sqrt(rt1 * rt3) / (mp.mpf(2) ** (g + 2) * cA * rt1 * rt2)

    # products to gamma_max, and the "exact" infinite products to 400 terms
    lc1 = mp.fsum(mp.log1p(eps(g)) for g in range(3, gamma_max + 1))
    lc2p = mp.fsum(mp.log1p(eta(g)) for g in range(3, gamma_max + 1))
    lc1_inf = mp.fsum(mp.log1p(eps(g)) for g in range(3, 400))
    lc2p_inf = mp.fsum(mp.log1p(eta(g)) for g in range(3, 400))
    c3 = 4 * (mp.mpf(2) ** mp.mpf(2.5) * cA**2 * rt1 * rt2 + mp.sqrt(2) * cA * mp.sqrt(rt1 * rt3))
    lb1 = 2 * mp.sqrt(2) * lam * c3 * da
    b2 = max(72 * mp.sqrt(2) / mp.pi**2, cA**2 * rt1 * rt2)
    lc2 = mp.log(mp.mpf(27) / 128 * cL**8 * rt1**2) + lc2p
    lcg = lc1 + lc2 + 2 * mp.log(rt3) - mp.mpf(19) / 2 * mp.log(b2)
    return dict(Rt1=rt1, R2=r2, Rt2=rt2, delta1=d1, delta2=d2, delta3=d3, N2=n2, Rt3=rt3,
                ln_C1=lc1, ln_C2=lc2, C3=c3, ln_beta1=lb1, beta2=b2, ln_Cg=lcg,
                ln_C1_tail=lc1_inf - lc1, ln_C2_tail=lc2p_inf - lc2p)


def ln_rtilde_alpha(b, alpha):
    alpha = mp.mpf(alpha)
    g = int(mp.floor(2 * alpha))
    return b['ln_Cg'] + 4**g * (6 * alpha + 1 - 3 * g) * b['ln_beta1'] \
        + (-g * g + (4 * alpha - 1) * g + 11 * alpha) * mp.log(b['beta2'])


if __name__ == '__main__':
    for args in [(1, 1, 1, 1, 1), (2.5, 0.3, 2.0, 0.8, 1.3)]:
        b = chain(*args)
        print('inputs', args)
        for k, v in b.items():
            print(f'  {k} = {mp.nstr(v, 20)}')
        for a in (3, 3.25, 4.5):
            print(f'  ln_rtilde_sq({a}) = {mp.nstr(ln_rtilde_alpha(b, a), 20)}')
