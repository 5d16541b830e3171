"""Reference values computed independently with mpmath at 30 digits.

Regenerate with ``python tests/oracles.py``; the frozen literals below are
what the tests assert against.
"""

AREA_R005_H03 = 0.0942477796076937971538793014984          # 2*pi*0.05*0.3
DRAG_CD1_RHO1025_A0942478_V1 = 48.3019975                    # 0.5*1025*0.0942478
REYNOLDS_SEAWATER_V1_L01 = 93181.8181818181818181818181818             # 1025*1*0.1/0.0011
VOLUME_R005_H03 = 0.00235619449019234492884698253746         # pi*0.05^2*0.3
ADDED_MASS_CM05 = 1.20754967622357677603407855045            # 0.5*1025*V
EFFECTIVE_MASS_EXACT_V = 27.5849006475528464479318428991     # 30 - 0.5*1025*2V
EFFECTIVE_MASS_V2356 = 27.5851                               # 30 - 0.5*1025*2*2.356e-3
BULLDOZING_A1000_N11_Z002 = 13.524866756124828402600247673   # 1000*0.02^1.1
FRICTION_MU06_FN100_X_EQ_K = 37.9272335297134607042685737903  # 60*(1-e^-1)
FRICTION_SLOPE_AT_K = 2207.27664702865392957314262097         # 60*e^-1/0.01


if __name__ == "__main__":
    from mpmath import exp, mp, mpf, pi

    mp.dps = 30
    v = pi * mpf("0.05") ** 2 * mpf("0.3")
    for name, value in [
        ("AREA_R005_H03", 2 * pi * mpf("0.05") * mpf("0.3")),
        ("DRAG_CD1_RHO1025_A0942478_V1", mpf("0.5") * 1025 * mpf("0.0942478")),
        ("REYNOLDS_SEAWATER_V1_L01", mpf(1025) * mpf("0.1") / mpf("0.0011")),
        ("VOLUME_R005_H03", v),
        ("ADDED_MASS_CM05", mpf("0.5") * 1025 * v),
        ("EFFECTIVE_MASS_EXACT_V", 30 - mpf("0.5") * 1025 * 2 * v),
        ("EFFECTIVE_MASS_V2356", 30 - mpf("0.5") * 1025 * 2 * mpf("2.356e-3")),
        ("BULLDOZING_A1000_N11_Z002", 1000 * mpf("0.02") ** mpf("1.1")),
        ("FRICTION_MU06_FN100_X_EQ_K", mpf("0.6") * 100 * (1 - exp(-1))),
        ("FRICTION_SLOPE_AT_K", mpf("0.6") * 100 * exp(-1) / mpf("0.01")),
    ]:
        print(name, value)
