from .app import EventBus, MonitorRuntime, create_app, serve
from .schemas import ConfigModel, ReportModel, StatusEventModel, StatusResponse

__all__ = [
    "ConfigModel",
    "EventBus",
    "MonitorRuntime",
    "ReportModel",
    "StatusEventModel",
    "StatusResponse",
    "create_app",
    "serve",
]
