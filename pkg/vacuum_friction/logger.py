import logging
import logging.handlers
import sys

LOG_FORMAT = "%(asctime)s  %(levelname)8s  %(name)s - %(message)s"
LOG_FILE_MAX_BYTES = 10000000
LOG_FILE_BACKUPS = 2

# Loggers that emit one line per integral or per root find
NUMERICS_LOGGERS = ('vacfric.quadrature',)


def _level(name: str) -> int:
    level = logging.getLevelName(name.upper())
    return level if isinstance(level, int) else logging.INFO


def _handlers(path: str):
    formatter = logging.Formatter(LOG_FORMAT)

    # stdout is reserved for CSV/JSON results
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(formatter)
    yield stream

    if path:
        rotating = logging.handlers.RotatingFileHandler(
            path, maxBytes=LOG_FILE_MAX_BYTES, backupCount=LOG_FILE_BACKUPS)
        rotating.setFormatter(formatter)
        yield rotating


def setup_logging(logging_config, log_path=None, debug=False):
    if log_path:
        logging_config.path = log_path
    if debug:
        logging_config.level = 'DEBUG'

    root = logging.getLogger()
    level = _level(logging_config.level)
    root.setLevel(level)

    numerics_level = level if logging_config.log_numerics else max(level, logging.INFO)
    for name in NUMERICS_LOGGERS:
        logging.getLogger(name).setLevel(numerics_level)

    for hdlr in root.handlers[:]:
        root.removeHandler(hdlr)
        hdlr.close()
    for hdlr in _handlers(logging_config.path):
        root.addHandler(hdlr)
