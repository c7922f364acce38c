"""
Application settings and configuration
"""
import os
from dotenv import load_dotenv

load_dotenv()

# Parallel sweeps
QG_JOBS = int(os.getenv("QG_JOBS") or 1)

# Integrator defaults
QG_RTOL = float(os.getenv("QG_RTOL") or 1e-10)
QG_ATOL = float(os.getenv("QG_ATOL") or 1e-12)
QG_MAX_STEP = float(os.getenv("QG_MAX_STEP") or "inf")

# Logging
QG_LOG_LEVEL = (os.getenv("QG_LOG_LEVEL") or "WARNING").upper()

# Sampling and search defaults
QG_SAMPLES_PER_PERIOD = int(os.getenv("QG_SAMPLES_PER_PERIOD") or 200)
QG_MAX_DENOMINATOR = int(os.getenv("QG_MAX_DENOMINATOR") or 10_000)
QG_COMMENSURABILITY_TOL = float(os.getenv("QG_COMMENSURABILITY_TOL") or 1e-9)
QG_INT_MAX = int(os.getenv("QG_INT_MAX") or 16)

# Numerical constants
UNIT_TOL = 1e-12
PURITY_TOL = 1e-10
UNITARY_TOL = 1e-10
NORM_BLOWUP = 1e-6
POLE_GUARD = 1e-6
DEGENERATE_Q_VARIANCE = 1e-14
GAMMA_Q_VARIANCE = 1e-12
REGIME_TOL = 1e-9
NOT_TOL_NUMERIC = 1e-3
NOT_TOL_EXACT = 1e-8
NOT_TIE_TOL = 1e-8
NR_DETECTION_PERIODS = 4
LOCALIZATION_TOL = 1e-6
RESONANCE_GTOL = 1e-6
RESONANCE_MAX_ITER = 60
GAMMA_PERIODS = 200
GAMMA_SEED = (0.5, 1.0)
RWA_GRID = 1000
CONTOUR_POINTS = 720

# Validation
if QG_JOBS < 1:
    raise ValueError("QG_JOBS must be >= 1")
if QG_RTOL <= 0 or QG_ATOL <= 0:
    raise ValueError("QG_RTOL and QG_ATOL must be positive")
if QG_MAX_STEP <= 0:
    raise ValueError("QG_MAX_STEP must be positive")
if QG_SAMPLES_PER_PERIOD < 200:
    raise ValueError("QG_SAMPLES_PER_PERIOD must be >= 200")
if QG_MAX_DENOMINATOR < 1:
    raise ValueError("QG_MAX_DENOMINATOR must be >= 1")
if QG_LOG_LEVEL not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
    raise ValueError(f"QG_LOG_LEVEL has an unknown level: {QG_LOG_LEVEL}")
