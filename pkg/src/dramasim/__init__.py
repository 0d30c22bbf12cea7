"""Grid agent simulation whose life logs are tagged with dramatic archetypes,
with a genetic search over agent personality profiles."""

from .chronicle import Chronicle, Event, Kind, check_coherence, render_log
from .evolver import GAConfig, evolve
from .fitness import NATALITY, REVENGE, band_score
from .profile import Profile, decode_profiles
from .tagger import builtin_specs, tag_run
from .world import WorldConfig, run_world

__version__ = "0.1.0"

__all__ = [
    "Chronicle", "Event", "Kind", "check_coherence", "render_log",
    "GAConfig", "evolve", "NATALITY", "REVENGE", "band_score",
    "Profile", "decode_profiles", "builtin_specs", "tag_run",
    "WorldConfig", "run_world",
]
