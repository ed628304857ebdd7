from .app import create_app
from .config import ServiceConfig, load_service_config
from .store import RatingStore

__all__ = ["create_app", "ServiceConfig", "load_service_config", "RatingStore"]
