"""Configuration management module."""

import os
from pathlib import Path
from typing import Dict, Any

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

def get_project_root() -> Path:
    """Get the project root directory."""
    return Path(__file__).parent.parent

def load_config() -> Dict[str, Any]:
    """Load application configuration."""
    config = {
        # Application settings
        'APP_NAME': 'MGSSP Saddle-Point Toolkit',
        'VERSION': '0.1.0',
        'DEBUG': os.getenv('DEBUG', 'False').lower() == 'true',

        # Storage settings
        'LOG_DIR': os.getenv('LOG_DIR', str(get_project_root() / 'logs')),
        'RESULTS_DIR': os.getenv('RESULTS_DIR', str(get_project_root() / 'results')),

        # Logging settings
        'LOG_LEVEL': os.getenv('LOG_LEVEL', 'INFO'),

        # Solver defaults (stopping rule RES < tol, at most maxit steps)
        'DEFAULT_TOLERANCE': float(os.getenv('DEFAULT_TOLERANCE', '1e-6')),
        'DEFAULT_MAX_ITERATIONS': int(os.getenv('DEFAULT_MAX_ITERATIONS', '500')),

        # Desk-scale limits
        'TABLE_MAX_P': int(os.getenv('TABLE_MAX_P', '32')),
        'SPECTRAL_MAX_P': int(os.getenv('SPECTRAL_MAX_P', '8')),

        # Sweep settings
        'SWEEP_WORKERS': int(os.getenv('SWEEP_WORKERS', '1')),
    }
    return config
