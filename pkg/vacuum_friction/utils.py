from typing import Dict
import os
import platform
import logging
import tempfile

import numpy as np
import scipy
import sentry_sdk
from sentry_sdk.integrations.threading import ThreadingIntegration
from sentry_sdk.integrations.logging import LoggingIntegration
from pathvalidate import validate_filepath

from .version import VERSION

_logger = logging.getLogger('vacfric.utils')


class SentryWrapper:

    def __init__(self, config) -> None:
        self._enabled = (
            config.sentry_opt == 'in' and
            bool(config.sentry_dsn)
        )

        if not self._enabled:
            return

        def before_send(event, hint):
            # Bad input is the user's to fix, not a crash worth reporting
            if 'exc_info' in hint:
                exc_type, exc_value, tb = hint['exc_info']
                from .scenario import ScenarioError
                if isinstance(exc_value, (ScenarioError, KeyboardInterrupt)):
                    return None
            return event

        sentry_sdk.init(
            dsn=config.sentry_dsn,
            default_integrations=False,
            integrations=[
                ThreadingIntegration(propagate_hub=True), # Make sure context are propagated to sub-threads.
                LoggingIntegration(
                    level=logging.INFO, # Capture info and above as breadcrumbs
                    event_level=None  # Send logs as events above a logging level, disabled it
                ),
            ],
            before_send=before_send,
            send_default_pii=False,
            release='vacuum-friction@'+VERSION,
        )

        for (k, v) in self.get_tags().items():
            sentry_sdk.set_tag(k, v)

    def enabled(self) -> bool:
        return self._enabled

    def captureException(self, *args, **kwargs) -> None:
        _logger.exception('')
        if self.enabled():
            sentry_sdk.capture_exception(*args, **kwargs)

    def get_tags(self) -> Dict[str, str]:
        (os_name, _, ver, _, arch, _) = platform.uname()
        return dict(
            os=os_name,
            os_ver=ver,
            arch=arch,
            python=platform.python_version(),
            numpy=np.__version__,
            scipy=scipy.__version__,
        )


def validate_output_path(path: str) -> None:
    """Raises ValueError (pathvalidate.ValidationError included) for an unwritable target."""
    validate_filepath(path, platform='auto')
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise ValueError(f'directory does not exist: {parent}')


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.vacfric-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
