import logging
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent / "src"))

from config.settings import LOG_FILE, LOG_FORMAT, LOG_LEVEL, create_directories  # noqa: E402
from toolkit.cli import main  # noqa: E402


if __name__ == '__main__':
    create_directories()
    # documents go to stdout, logs to stderr and the log file
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT,
                        handlers=[logging.StreamHandler(sys.stderr), logging.FileHandler(LOG_FILE)])
    sys.exit(main())
