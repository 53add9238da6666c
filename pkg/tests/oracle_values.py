"""Reference values computed once with mpmath at 50 digits and frozen here.

The package itself never imports mpmath, so these are independent of the
``math.gamma`` path under test.
"""

# D^0.5 z and I^0.5 z coefficients
INV_GAMMA_1_5 = 1.1283791670955126
INV_GAMMA_2_5 = 0.7522527780636750
GAMMA_3_OVER_GAMMA_2_5 = 1.5045055561273501

# S*-preset, mu = 1, n = 2 extremal, delta = 0.5, r = 0.5
FRAC_INTEGRAL_BOUNDS_R_HALF = (0.21276921621409744, 0.31915382432114613)
FRAC_DERIVATIVE_BOUNDS_R_HALF = (0.5319230405352436, 1.0638460810704871)
FRAC_INTEGRAL_DISK_RADIUS = 1.0531538892891450

# 2 pi sum_jk c_j c_k r^(e_j + e_k) sinc(e_j - e_k) at r = 0.5
L2_IDENTITY_R_HALF = 1.5707963267948966
L2_Z_MINUS_QUARTER_Z2_R_HALF = 1.5953400194010669
L2_Z_MINUS_HALF_Z2_R_HALF = 1.6689710972195777
