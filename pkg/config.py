import os
from pathlib import Path

try:
    from dotenv import load_dotenv
    load_dotenv()
    load_dotenv(".env.local")  # local overrides (gitignored)
except ImportError:
    pass

BASE_DIR = Path(__file__).resolve().parent

# Simulation and session outputs default under DATA_DIR (default: project/data/).
_data_dir = os.getenv("DATA_DIR", "").strip()
DATA_DIR = Path(_data_dir) if _data_dir else (BASE_DIR / "data")
SCENARIO_DIR = BASE_DIR / "scenarios"
CONFIG_DIR = BASE_DIR / "configs"

LOG_LEVEL = os.getenv("CARDIORESP_LOG", "INFO").upper()

SAMPLE_RATE = float(os.getenv("SAMPLE_RATE", "100"))
DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "0"))

# Forward model
C1 = float(os.getenv("C1", "1.0"))
C2 = float(os.getenv("C2", "0.05"))
STANDARD_GRAVITY = 9.80665
COUGH_GAIN = float(os.getenv("COUGH_GAIN", "10"))
COUGH_WIDTH = float(os.getenv("COUGH_WIDTH", "0.1"))

# Pipeline defaults (seconds / Hz)
GRAVITY_WINDOW = float(os.getenv("GRAVITY_WINDOW", "2.0"))
INTEGRATION_DETREND_WINDOW = float(os.getenv("INTEGRATION_DETREND_WINDOW", "1.0"))
DRIFT_MODE = os.getenv("DRIFT_MODE", "linear").lower()
RESP_CUTOFF = float(os.getenv("RESP_CUTOFF", "0.7"))
HEART_BAND_LOW = float(os.getenv("HEART_BAND_LOW", "0.7"))
HEART_BAND_HIGH = float(os.getenv("HEART_BAND_HIGH", "10.0"))
BEAT_HIGHPASS = float(os.getenv("BEAT_HIGHPASS", "2.0"))
FILTER_ORDER = int(os.getenv("FILTER_ORDER", "4"))
HEART_REFRACTORY = float(os.getenv("HEART_REFRACTORY", "0.25"))
RESP_REFRACTORY = float(os.getenv("RESP_REFRACTORY", "1.5"))
PEAK_THRESHOLD_K = float(os.getenv("PEAK_THRESHOLD_K", "4.0"))
RESP_THRESHOLD_K = float(os.getenv("RESP_THRESHOLD_K", "0.5"))
RESP_PROMINENCE_K = float(os.getenv("RESP_PROMINENCE_K", "0.5"))
HEART_PROMINENCE_K = float(os.getenv("HEART_PROMINENCE_K", "0.0"))
HEART_RELATIVE_PROMINENCE = float(os.getenv("HEART_RELATIVE_PROMINENCE", "0.4"))
COUGH_THRESHOLD_K = float(os.getenv("COUGH_THRESHOLD_K", "10.0"))
COUGH_MIN_RATIO = float(os.getenv("COUGH_MIN_RATIO", "2.0"))
COUGH_MIN_SEPARATION = float(os.getenv("COUGH_MIN_SEPARATION", "0.5"))
COUGH_REFERENCE_WINDOW = float(os.getenv("COUGH_REFERENCE_WINDOW", "2.0"))
VITALS_WINDOW = float(os.getenv("VITALS_WINDOW", "7.2"))
ACTIVITY_LIGHT_RMS = float(os.getenv("ACTIVITY_LIGHT_RMS", "0.5"))
ACTIVITY_VIGOROUS_RMS = float(os.getenv("ACTIVITY_VIGOROUS_RMS", "2.0"))

# Healthy HRR range (inclusive)
HRR_LOW = 3
HRR_HIGH = 8

SEA_LEVEL_PRESSURE = float(os.getenv("SEA_LEVEL_PRESSURE", "101325"))

# Telemetry
NODE_ID = int(os.getenv("NODE_ID", "1"))
BATCH_N = int(os.getenv("BATCH_N", "16"))
GAP_FILL_MAX_FRAMES = int(os.getenv("GAP_FILL_MAX_FRAMES", "3"))
