# Generated by scripts/calibrate.py -- do not edit by hand.
SIGN_TABLE = (-1, -1, -1)
SASAKI_EPSILON = (-1.0, 1.0, 1.0)
D_ETA_COEFF = (2.0, 2.0, 2.0)
NORMALITY_COEFF = (-1.0, 1.0, 1.0)
BRACKET_SIGN = -1.0
