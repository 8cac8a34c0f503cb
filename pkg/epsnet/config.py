"""Application wide configuration variables"""

import os

from configparser import ConfigParser
from fractions import Fraction
from pathlib import Path

config_path = Path(__file__).resolve().parents[1] / "epsnet.cfg"
config = ConfigParser()
config.read(str(config_path))

SEED = int(os.environ.get("EPSNET_SEED", config.get("RUN", "SEED", fallback="20240521")))
ETA = Fraction(config.get("RUN", "ETA", fallback="0.1"))
EPS_TILDE = Fraction(config.get("RUN", "EPS_TILDE", fallback="1/2"))
DEPTH_CAP = config.getint("RUN", "DEPTH_CAP", fallback=12)
MAX_ATTEMPTS = config.getint("RUN", "MAX_ATTEMPTS", fallback=20)

C0 = Fraction(config.get("CONSTANTS", "C0", fallback="1/8"))
C_HAT = Fraction(config.get("CONSTANTS", "C_HAT", fallback="1/64"))
C1 = Fraction(config.get("CONSTANTS", "C1", fallback="1/4"))
C_PRIME = Fraction(config.get("CONSTANTS", "C_PRIME", fallback="1/4"))
C_CUT = Fraction(config.get("CONSTANTS", "C_CUT", fallback="2"))
TRIANGLE_C = Fraction(config.get("CONSTANTS", "TRIANGLE_C", fallback="8"))

MAX_VERIFY_N = config.getint("VERIFY", "MAX_VERIFY_N", fallback=96)
MAX_BRUTE_N = config.getint("VERIFY", "MAX_BRUTE_N", fallback=16)
