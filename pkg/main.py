"""Main application entry point."""

import sys

from bench.cli import main as run_cli
from core import load_config, setup_logging, get_logger


def main():
    """Configure logging and run the benchmark command line."""
    # Load configuration
    config = load_config()

    # Setup logging
    setup_logging(config)
    logger = get_logger()

    logger.debug("Starting %s %s", config['APP_NAME'], config['VERSION'])

    return run_cli(sys.argv[1:], config)

if __name__ == "__main__":
    sys.exit(main())
