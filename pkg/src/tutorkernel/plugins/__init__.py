from .manifest import Trigger, PluginService, PluginManifest, ManifestError, validate_manifest
from .dispatch import PluginDispatcher
from .rephrase import RephraseRule, rephrase, ranking, RephraserPlugin

__all__ = [
    "Trigger",
    "PluginService",
    "PluginManifest",
    "ManifestError",
    "validate_manifest",
    "PluginDispatcher",
    "RephraseRule",
    "rephrase",
    "ranking",
    "RephraserPlugin",
]
