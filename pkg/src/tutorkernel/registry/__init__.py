from .server import RegistryServer
from .client import RegistryClient, Watcher

__all__ = ["RegistryServer", "RegistryClient", "Watcher"]
