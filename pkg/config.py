import os
import logging
from dotenv import load_dotenv

# Load environment variables from .env.local
load_dotenv('.env.local')

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logging.basicConfig(
    level=getattr(logging, os.getenv('TORUS_LOG_LEVEL', 'INFO').upper(), logging.INFO),
    format=LOG_FORMAT
)
logger = logging.getLogger(__name__)


class TorusConfig:
    """Numerical settings shared by the library modules and the CLI."""

    def __init__(self):
        self.ENV = os.getenv('TORUS_ENV', 'development')

        # Absolute tolerance for identity checks on unit-modulus matrix entries
        self.TOLERANCE = float(os.getenv('TORUS_TOLERANCE', '1e-10'))

        # Refuse multi-center path sums above this many estimated terms
        self.TERM_BUDGET = int(float(os.getenv('TORUS_TERM_BUDGET', '1e8')))

        # +1 keeps U_t = exp(+i t H / hbar); -1 flips to the common exp(-i t H / hbar)
        self.PROPAGATOR_SIGN = int(os.getenv('TORUS_PROPAGATOR_SIGN', '1'))

        self.DEFAULT_SEED = int(os.getenv('TORUS_SEED', '0'))

        # Floquet angles with a denominator up to this bound are carried as exact fractions
        self.MAX_CHI_DENOMINATOR = int(os.getenv('TORUS_MAX_CHI_DENOMINATOR', '1000000'))

        self.OUTPUT_DIR = os.getenv('TORUS_OUTPUT_DIR', 'outputs')

        if self.PROPAGATOR_SIGN not in (1, -1):
            logger.warning(f"TORUS_PROPAGATOR_SIGN={self.PROPAGATOR_SIGN} is not +1/-1, using +1")
            self.PROPAGATOR_SIGN = 1

    def get_output_path(self, filename: str) -> str:
        """Get the local path for an output file"""
        return os.path.join(self.OUTPUT_DIR, filename)


# Global configuration instance
config = TorusConfig()
