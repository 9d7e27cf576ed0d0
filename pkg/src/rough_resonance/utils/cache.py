"""On-disk cache of spectral models keyed by mesh and model parameters."""

import hashlib
import os
from pathlib import Path

from rough_resonance.logging import get_logger
from rough_resonance.mesh.textio import export_mesh
from rough_resonance.mesh.trimesh import TriMesh
from rough_resonance.ntd.model import ModelError, SpectralModel, load_model, save_model

logger = get_logger("cache")

CACHE_ENV = "ROUGH_RESONANCE_CACHE"


def cache_dir() -> Path:
    """$ROUGH_RESONANCE_CACHE, else $XDG_CACHE_HOME/rough-resonance."""
    override = os.environ.get(CACHE_ENV)
    if override:
        return Path(override)
    xdg = os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache"))
    return Path(xdg) / "rough-resonance"


def model_cache_key(mesh: TriMesh, k0: complex, N: int, J: int) -> str:
    """SHA-256 of the canonical mesh text and the model parameters."""
    k0 = complex(k0)
    digest = hashlib.sha256()
    digest.update(export_mesh(mesh).encode("utf-8"))
    digest.update(f"\nk0={k0.real!r},{k0.imag!r};N={N};J={J}\n".encode())
    return digest.hexdigest()


class ModelCache:
    """Directory of JSON models named by their cache key."""

    def __init__(self, directory: str | Path | None = None, enabled: bool = True) -> None:
        self.directory = Path(directory) if directory is not None else cache_dir()
        self.enabled = enabled

    def path_for(self, key: str) -> Path:
        return self.directory / "models" / f"{key}.json"

    def get(self, key: str) -> SpectralModel | None:
        if not self.enabled:
            return None
        path = self.path_for(key)
        if not path.exists():
            return None
        try:
            model = load_model(path)
        except (ModelError, OSError) as e:
            logger.warning(f"Ignoring unreadable cached model {path.name}: {e}")
            return None
        logger.info(f"Model cache hit {key[:12]}")
        return model

    def put(self, key: str, model: SpectralModel) -> Path | None:
        if not self.enabled:
            return None
        path = save_model(model, self.path_for(key))
        logger.debug(f"Cached model {key[:12]} at {path}")
        return path
