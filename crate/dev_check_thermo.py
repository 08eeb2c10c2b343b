#!/usr/bin/env python3
"""Dev-only sanity check of NASA-7 coefficient sets before freezing them
into the shipped mechanism file. Not part of the deliverable."""
import math

R = 8.3144621  # J/(mol K)

# name: (W g/mol, low(200..1000), high(1000..3500/5000), dHf298 kJ/mol, S298 J/mol/K)
DATA = {
    "H2": (2.01588,
           [2.34433112, 7.98052075e-3, -1.9478151e-5, 2.01572094e-8, -7.37611761e-12, -917.935173, 0.683010238],
           [3.3372792, -4.94024731e-5, 4.99456778e-7, -1.79566394e-10, 2.00255376e-14, -950.158922, -3.20502331],
           0.0, 130.68),
    "H": (1.00794,
          [2.5, 7.05332819e-13, -1.99591964e-15, 2.30081632e-18, -9.27732332e-22, 25473.6599, -0.446682853],
          [2.50000001, -2.30842973e-11, 1.61561948e-14, -4.73515235e-18, 4.98197357e-22, 25473.6599, -0.446682914],
          217.999, 114.72),
    "O": (15.9994,
          [3.1682671, -3.27931884e-3, 6.64306396e-6, -6.12806624e-9, 2.11265971e-12, 29122.2592, 2.05193346],
          [2.56942078, -8.59741137e-5, 4.19484589e-8, -1.00177799e-11, 1.22833691e-15, 29217.5791, 4.78433864],
          249.18, 161.06),
    "O2": (31.9988,
           [3.78245636, -2.99673416e-3, 9.84730201e-6, -9.68129509e-9, 3.24372837e-12, -1063.94356, 3.65767573],
           [3.28253784, 1.48308754e-3, -7.57966669e-7, 2.09470555e-10, -2.16717794e-14, -1088.45772, 5.45323129],
           0.0, 205.15),
    "OH": (17.00734,
           [3.99201543, -2.40131752e-3, 4.61793841e-6, -3.88113333e-9, 1.3641147e-12, 3615.08056, -0.103925458],
           [3.09288767, 5.48429716e-4, 1.26505228e-7, -8.79461556e-11, 1.17412376e-14, 3858.657, 4.4766961],
           38.99, 183.7),
    "H2O": (18.01528,
            [4.19864056, -2.0364341e-3, 6.52040211e-6, -5.48797062e-9, 1.77197817e-12, -30293.7267, -0.849032208],
            [3.03399249, 2.17691804e-3, -1.64072518e-7, -9.7041987e-11, 1.68200992e-14, -30004.2971, 4.9667701],
            -241.826, 188.83),
    "HO2": (33.00674,
            [4.30179801, -4.74912051e-3, 2.11582891e-5, -2.42763894e-8, 9.29225124e-12, 294.80804, 3.71666245],
            [4.0172109, 2.23982013e-3, -6.3365815e-7, 1.1424637e-10, -1.07908535e-14, 111.856713, 3.78510215],
            12.0, 229.1),
    "H2O2": (34.01468,
             [4.27611269, -5.42822417e-4, 1.67335701e-5, -2.15770813e-8, 8.62454363e-12, -17702.5821, 3.43505074],
             [4.16500285, 4.90831694e-3, -1.90139225e-6, 3.71185986e-10, -2.87908305e-14, -17861.7877, 2.91615662],
             -135.88, 232.9),
    "N2": (28.0134,
           [3.298677, 1.4082404e-3, -3.963222e-6, 5.641515e-9, -2.444854e-12, -1020.8999, 3.950372],
           [2.92664, 1.4879768e-3, -5.68476e-7, 1.0097038e-10, -6.753351e-15, -922.7977, 5.980528],
           0.0, 191.61),
    "AR": (39.948,
           [2.5, 0.0, 0.0, 0.0, 0.0, -745.375, 4.366],
           [2.5, 0.0, 0.0, 0.0, 0.0, -745.375, 4.366],
           0.0, 154.846),
    "HE": (4.002602,
           [2.5, 0.0, 0.0, 0.0, 0.0, -745.375, 0.928723974],
           [2.5, 0.0, 0.0, 0.0, 0.0, -745.375, 0.928723974],
           0.0, 126.15),
}


def cp_R(a, T):
    return a[0] + a[1] * T + a[2] * T**2 + a[3] * T**3 + a[4] * T**4


def h_RT(a, T):
    return (a[0] + a[1] * T / 2 + a[2] * T**2 / 3 + a[3] * T**3 / 4
            + a[4] * T**4 / 5 + a[5] / T)


def s_R(a, T):
    return (a[0] * math.log(T) + a[1] * T + a[2] * T**2 / 2 + a[3] * T**3 / 3
            + a[4] * T**4 / 4 + a[6])


ok = True
for name, (W, lo, hi, dhf, s298) in DATA.items():
    T = 1000.0
    for what, f in (("cp", cp_R), ("h", h_RT), ("s", s_R)):
        a, b = f(lo, T), f(hi, T)
        rel = abs(a - b) / max(abs(a), abs(b))
        flag = "" if rel < 1e-6 else "  <-- JUNCTION MISMATCH"
        if rel >= 1e-6:
            ok = False
        print(f"{name:5s} {what:2s} lo={a:+.8e} hi={b:+.8e} rel={rel:.2e}{flag}")
    # standard-state checks at 298.15
    h298 = h_RT(lo, 298.15) * R * 298.15 / 1000.0  # kJ/mol
    s_abs = s_R(lo, 298.15) * R
    dh_err = h298 - dhf
    ds_err = s_abs - s298
    print(f"{name:5s} dHf298 = {h298:+9.3f} kJ/mol (lit {dhf:+9.3f}, diff {dh_err:+7.3f});"
          f" S298 = {s_abs:8.3f} (lit {s298:8.3f}, diff {ds_err:+6.3f})")
    # cv > 0 over [100, 4500]
    bad_cv = []
    for k in range(0, 441):
        T = 100.0 + 10.0 * k
        a = lo if T <= 1000 else hi
        if cp_R(a, T) <= 1.0:
            bad_cv.append(T)
    if bad_cv:
        ok = False
        print(f"{name:5s} cv<=0 at {bad_cv[:5]}")
print("ALL OK" if ok else "PROBLEMS FOUND")
