import os

from dotenv import load_dotenv

load_dotenv()

# Word-enumeration cap; scans beyond it must be unlocked with --max-words.
MAX_WORDS = int(os.getenv("MARGULIS_MAX_WORDS", "10000000"))

# Worker processes for sign scans. Output does not depend on this value.
WORKERS = int(os.getenv("MARGULIS_WORKERS", "1"))

LOG_LEVEL = os.getenv("MARGULIS_LOG_LEVEL", "WARNING")

LEMMA1_STEP = float(os.getenv("MARGULIS_LEMMA1_STEP", "1e-4"))

DEFAULT_SEED = int(os.getenv("MARGULIS_SEED", "1"))

# Numeric tolerances shared across modules
CLASSIFY_TOL = 1e-9
DET_TOL = 1e-9
RELATOR_TOL = 1e-8
NEAR_PARABOLIC_MARGIN = 1e-6
ZERO_TOL_SCALE = 1e-9
RANK_TOL = 1e-6
RANK_AMBIGUOUS_TOL = 1e-9

RNG_NAME = "PCG64"
REPORT_SCHEMA = 1

# Alpha values whose rounding bound exceeds this (relative) are recomputed
# in extended precision.
ALPHA_REFINE_TOL = 1e-12
ALPHA_BASE_DPS = 30
