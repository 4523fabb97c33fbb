from .engine import Event, EventEngine
