import dataclasses
from typing import Optional
from configparser import ConfigParser
import logging

from .scenario import Scenario, read_scenario_document, scenario_from_config

_logger = logging.getLogger('vacfric.config')


@dataclasses.dataclass
class LoggingConfig:
    path: str
    level: str = 'INFO'
    log_numerics: bool = False


class Config:
    """
    Application view of a scenario file: the [logging] and [misc] sections
    drive the process, everything else is physics and becomes a Scenario.
    """

    def __init__(self, config_path: str):
        self._config_path = config_path
        self._config: Optional[ConfigParser] = None
        self.scenario: Optional[Scenario] = None

    def load_from_config_file(self):
        with open(self._config_path, 'r', encoding='utf-8') as f:
            config = read_scenario_document(f.read())

        self._config = config

        self.logging = LoggingConfig(
            path=config.get(
                'logging', 'path',
                fallback=''
            ),
            level=config.get(
                'logging', 'level',
                fallback='INFO'
            ),
            log_numerics=config.getboolean(
                'logging', 'log_numerics',
                fallback=False
            ),
        )

        self.sentry_opt = config.get(
            'misc', 'sentry_opt',
            fallback='out'
        )
        self.sentry_dsn = config.get(
            'misc', 'sentry_dsn',
            fallback=''
        )
        if self.sentry_opt == 'in' and not self.sentry_dsn:
            _logger.warning('sentry_opt = in but no sentry_dsn is set; error reporting stays off')

    def load_scenario(self) -> Scenario:
        # Kept apart from load_from_config_file so logging is up before the physics sections are validated
        self.scenario = scenario_from_config(self._config)
        return self.scenario

    def as_dict(self):
        return {section: dict(self._config.items(section)) for section in self._config.sections()}
