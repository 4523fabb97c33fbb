"""
"""

import json
import logging
from abc import ABC
from datetime import datetime
from time import perf_counter
from typing import Any, Dict, Optional, Type

from gsdkit.event import Event, EventEngine
from .app import BaseApp
from .event import EVENT_LOG, EVENT_STAGE
from .object import LogData, StageData
from .setting import SETTINGS
from .utility import get_folder_path

LOGGER_NAME = "gsdkit"

logger = logging.getLogger(LOGGER_NAME)
logger.addHandler(logging.NullHandler())


class MainEngine:
    """
    Acts as the core of a gsdkit run: owns the event engine and the
    function engines of every added app.
    """

    def __init__(self, event_engine: EventEngine = None):
        """"""
        if event_engine:
            self.event_engine = event_engine
        else:
            self.event_engine = EventEngine()
        if not self.event_engine.active:
            self.event_engine.start()

        self.engines: Dict[str, "BaseEngine"] = {}
        self.apps: Dict[str, BaseApp] = {}

        self.init_engines()

    def add_engine(self, engine_class: Any):
        """
        Add function engine.
        """
        engine = engine_class(self, self.event_engine)
        self.engines[engine.engine_name] = engine
        return engine

    def add_app(self, app_class: Type[BaseApp]):
        """
        Add app.
        """
        app = app_class()
        self.apps[app.app_name] = app

        engine = self.add_engine(app.engine_class)
        return engine

    def init_engines(self):
        """
        Init all engines.
        """
        self.add_engine(LogEngine)

    def write_log(self, msg: str, source: str = "", level: int = logging.INFO):
        """
        Put log event with specific message.
        """
        log = LogData(msg=msg, level=level, source=source)
        event = Event(EVENT_LOG, log)
        self.event_engine.put(event)

    def get_engine(self, engine_name: str):
        """
        Return engine object by name.
        """
        engine = self.engines.get(engine_name, None)
        if not engine:
            self.write_log(f"engine is missing: {engine_name}", level=logging.WARNING)
        return engine

    def get_all_apps(self):
        """
        Get all app objects.
        """
        return list(self.apps.values())

    def close(self):
        """
        Flush pending events, then close every engine.
        """
        self.event_engine.stop()

        for engine in self.engines.values():
            engine.close()


class BaseEngine(ABC):
    """
    Abstract class for implementing an function engine.

    Works without a main engine too: logs then go straight to the
    gsdkit logger.
    """

    def __init__(
        self,
        main_engine: Optional[MainEngine],
        event_engine: Optional[EventEngine],
        engine_name: str,
    ):
        """"""
        self.main_engine = main_engine
        self.event_engine = event_engine
        self.engine_name = engine_name

    def write_log(self, msg: str, level: int = logging.INFO):
        """"""
        if self.event_engine:
            log = LogData(msg=msg, level=level, source=self.engine_name)
            self.event_engine.put(Event(EVENT_LOG, log))
        else:
            logger.log(level, f"[{self.engine_name}] {msg}")

    def get_peer(self, engine_name: str, engine_class: Any):
        """
        Engine of another app: the one registered in the main engine if
        there is one, else a detached instance.
        """
        if self.main_engine:
            engine = self.main_engine.engines.get(engine_name, None)
            if engine:
                return engine
        return engine_class(self.main_engine, self.event_engine)

    def put_stage(self, stage: str, start: float, **counts):
        """
        Report one finished stage; start is a perf_counter() reading.
        """
        data = StageData(stage=stage, counts=counts, elapsed=perf_counter() - start)
        if self.event_engine:
            self.event_engine.put(Event(EVENT_STAGE, data))
        else:
            logger.info(json.dumps(data.to_dict()))

    def close(self):
        """"""
        pass


class LogEngine(BaseEngine):
    """
    Processes log and stage events and output with logging module.
    """

    def __init__(self, main_engine: MainEngine, event_engine: EventEngine):
        """"""
        super(LogEngine, self).__init__(main_engine, event_engine, "log")

        self.handlers = []

        if not SETTINGS["log.active"]:
            return

        self.level = SETTINGS["log.level"]

        self.logger = logger
        self.logger.setLevel(self.level)

        self.formatter = logging.Formatter(
            "%(asctime)s  %(levelname)s: %(message)s"
        )

        if SETTINGS["log.console"]:
            self.add_console_handler()

        if SETTINGS["log.file"]:
            self.add_file_handler()

        self.register_event()

    def add_console_handler(self):
        """
        Add console output of log.
        """
        console_handler = logging.StreamHandler()
        console_handler.setLevel(self.level)
        console_handler.setFormatter(self.formatter)
        self.add_handler(console_handler)

    def add_file_handler(self):
        """
        Add file output of log.
        """
        today_date = datetime.now().strftime("%Y%m%d")
        filename = f"gsd_{today_date}.log"
        log_path = get_folder_path("log")
        file_path = log_path.joinpath(filename)

        file_handler = logging.FileHandler(
            file_path, mode="a", encoding="utf8"
        )
        file_handler.setLevel(self.level)
        file_handler.setFormatter(self.formatter)
        self.add_handler(file_handler)

    def add_handler(self, handler: logging.Handler):
        """"""
        self.logger.addHandler(handler)
        self.handlers.append(handler)

    def register_event(self):
        """"""
        self.event_engine.register(EVENT_LOG, self.process_log_event)
        self.event_engine.register(EVENT_STAGE, self.process_stage_event)

    def process_log_event(self, event: Event):
        """
        Process log event.
        """
        log = event.data
        if log.source:
            self.logger.log(log.level, f"[{log.source}] {log.msg}")
        else:
            self.logger.log(log.level, log.msg)

    def process_stage_event(self, event: Event):
        """
        One json line per finished stage.
        """
        stage = event.data
        self.logger.info(json.dumps(stage.to_dict()))

    def close(self):
        """"""
        for handler in self.handlers:
            self.logger.removeHandler(handler)
            handler.close()
        self.handlers.clear()
