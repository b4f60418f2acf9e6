"""Engine configuration from .env files and the process environment."""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Mapping, Optional


# -----------------------
# Minimal .env parser
# -----------------------
def load_env(path: str = ".env") -> Dict[str, str]:
    """Read KEY=VALUE lines. A missing file is an empty configuration."""
    out: Dict[str, str] = {}
    p = Path(path)
    if not p.exists():
        return out
    for raw in p.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip().strip('"').strip("'")
    return out


def get_float(env: Mapping[str, str], key: str, default: float) -> float:
    v = env.get(key, "")
    return default if v == "" else float(v)


def get_int(env: Mapping[str, str], key: str, default: int) -> int:
    v = env.get(key, "")
    return default if v == "" else int(float(v))


def get_str(env: Mapping[str, str], key: str, default: str) -> str:
    v = env.get(key, "")
    return default if v == "" else v


@dataclass(frozen=True)
class EngineConfig:
    # Precision
    precision_digits: int = 50
    k_max: int = 60

    # Path tracing
    r_max: float = 1e4
    eps_branch: float = 1e-6
    saddle_tol: float = 1e-9
    start_offset: float = 1e-8
    rtol: float = 1e-10
    max_steps: int = 200_000
    winding_cap: int = 8

    # Execution
    workers: int = 1
    log_level: str = "WARNING"


def read_config(env: Mapping[str, str]) -> EngineConfig:
    d = EngineConfig()
    return EngineConfig(
        precision_digits=get_int(env, "STRUVE_PRECISION_DIGITS", d.precision_digits),
        k_max=get_int(env, "STRUVE_K_MAX", d.k_max),
        r_max=get_float(env, "STRUVE_R_MAX", d.r_max),
        eps_branch=get_float(env, "STRUVE_EPS_BRANCH", d.eps_branch),
        saddle_tol=get_float(env, "STRUVE_SADDLE_TOL", d.saddle_tol),
        start_offset=get_float(env, "STRUVE_START_OFFSET", d.start_offset),
        rtol=get_float(env, "STRUVE_RTOL", d.rtol),
        max_steps=get_int(env, "STRUVE_MAX_STEPS", d.max_steps),
        winding_cap=get_int(env, "STRUVE_WINDING_CAP", d.winding_cap),
        workers=get_int(env, "STRUVE_WORKERS", d.workers),
        log_level=get_str(env, "STRUVE_LOG_LEVEL", d.log_level).upper(),
    )


def default_config(env_path: Optional[str] = ".env") -> EngineConfig:
    """.env values overlaid by the process environment."""
    env: Dict[str, str] = load_env(env_path) if env_path else {}
    env.update({k: v for k, v in os.environ.items() if k.startswith("STRUVE_")})
    return read_config(env)
