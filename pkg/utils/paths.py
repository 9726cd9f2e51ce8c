import os
from pathlib import Path


def project_root() -> Path:
    """
    Returns the root directory for the project.
    Assumes this file is under <root>/utils/paths.py.
    """
    return Path(__file__).resolve().parents[1]


def logs_dir() -> Path:
    path = project_root() / "logs"
    path.mkdir(parents=True, exist_ok=True)
    return path


def default_out_dir() -> Path:
    """
    Output directory for sweeps when none is given on the command line.
    BUNDLENEG_OUT_DIR overrides the default <root>/runs/latest.
    """
    override = os.getenv("BUNDLENEG_OUT_DIR")
    if override:
        return Path(override)
    return project_root() / "runs" / "latest"


def ensure_dir(path: Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
