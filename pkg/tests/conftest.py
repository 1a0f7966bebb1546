import pytest

# Verbatim counterexample texts used across the suite: a limit-cycle record
# in the compact spelling and an overflow record in the verbose spelling
# (including its preamble and a missing comma between the last two inputs).

FIG_LCO_TEXT = """\
Property = LIMIT_CYCLE
Numerator  = { 2002,  -4000,  1998 }
Denominator  = { 1,  0,  -1 }
X_Size = 10
Sample_Time = 0.001
Implementation = <13,3>
Numerator (fixed-point) = { 2002, -4000, 1998 }
Denominator (fixed-point) = { 1, 0, -1 }
Realization = DFI
Dynamical_Range = { -1, 1 }
Initial_States = { -0.875, 0, -1 }
Inputs = { 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}
Outputs = { 0, -1, 0, -1, 0, -1, 0, -1, 0, -1}
"""

FIG_OVERFLOW_TEXT = """\
VERIFICATION FAILED
Counterexample Data:
  Property = OVERFLOW
  Numerator  = { 0.1, -0.09996 }
  Denominator  = { 1.0, -1.0 }
  X Size = 10
  Sample Time = 0.02
  Implementation = <10,6>
  Numerator (fixed-point) = { 384.0, -128.0 }
  Denominator (fixed-point) = { 256.0, 0.0 }
  Realization = DFI
  Dynamic Range = {-1,1}
  Inputs = { 85.328125, -0.0625, 0.0, -128.6875, -215.984375, -256.0, 256.0, -197.359375, 0.0 85.34375 }
  Outputs = { 128.0, -42.765625, 0.03125, -193.03125, -259.640625, -276.0, 512.0, -424.046875, 98.6875, 128.015625 }
"""

LCO_EXPECTED_OUTPUTS = (0.0, -1.0, 0.0, -1.0, 0.0, -1.0, 0.0, -1.0, 0.0, -1.0)

OVERFLOW_EXPECTED_RAW = (128.0, -42.765625, 0.03125, -193.03125, -259.640625,
                         -276.0, 512.0, -424.046875, 98.6875, 128.015625)

# Appendix demonstration system: stable denominator, and a numerator whose
# quantized version has one zero outside the unit circle.
DEMO_NUMERATOR = [0.1, -0.3, 0.3, -0.1]
DEMO_DENOMINATOR = [1.0, 1.8, 1.14, 0.272]


@pytest.fixture
def fig_lco_text():
    return FIG_LCO_TEXT


@pytest.fixture
def fig_overflow_text():
    return FIG_OVERFLOW_TEXT
