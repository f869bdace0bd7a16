from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional


@dataclass
class ParserOptions:
    """Knobs shared by the scene-description parsers.

    no_rendered_objects skips the named objects' visuals, no_tracked_objects
    excludes names from state updates, visible_geom_groups keeps only the
    listed MJCF geom groups (None keeps all), and asset_search_paths are
    tried in order when resolving mesh/texture/include files.
    """

    no_rendered_objects: List[str] = field(default_factory=list)
    no_tracked_objects: List[str] = field(default_factory=list)
    visible_geom_groups: Optional[List[int]] = None
    asset_search_paths: List[Path] = field(default_factory=list)

    def __post_init__(self):
        if self.visible_geom_groups is not None:
            for g in self.visible_geom_groups:
                if not 0 <= g <= 5:
                    raise ValueError(f"geom group {g} outside the valid range [0, 5]")
        self.asset_search_paths = [Path(p) for p in self.asset_search_paths]

    def resolve(self, relpath: str) -> Optional[Path]:
        """First existing file for relpath across the search paths."""
        candidate = Path(relpath)
        if candidate.is_absolute():
            return candidate if candidate.exists() else None
        for base in self.asset_search_paths:
            p = base / candidate
            if p.exists():
                return p
        return None
