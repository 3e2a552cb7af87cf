from dataclasses import dataclass


@dataclass
class Caps:
    """Size limits for exponential searches. Exceeding one raises ``CapExceeded``."""

    brute_force_vertices: int = 20
    automorphism_vertices: int = 12
    canonical_vertices: int = 12
    pattern_vertices: int = 8
    pair_vertices: int = 10
    hm_vertices: int = 12
    game_vertices: int = 12
    game_rounds: int = 5


CAPS = Caps()


def cap(value, name: str) -> int:
    return getattr(CAPS, name) if value is None else value
