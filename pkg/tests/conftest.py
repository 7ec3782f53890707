import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

# tests import sibling helper modules (oracles, multilingual pairs)
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

DATA_DIR = Path(__file__).parent / "data"
