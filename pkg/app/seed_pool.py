from typing import Dict, List, Optional, Tuple

from app.models import ControlParameters, ScenarioKind, ScenarioOverride, ScenarioSpec
from app.services.scenario import make_seed


class SeedPool:
    """In-memory catalogue of the seed collision scenarios"""

    def __init__(self):
        self.seeds: Dict[ScenarioKind, tuple] = self._init_seeds()

    def _init_seeds(self) -> Dict[ScenarioKind, tuple]:
        return {kind: make_seed(kind) for kind in ScenarioKind}

    def get_all_kinds(self) -> List[ScenarioKind]:
        return list(self.seeds.keys())

    def get_seed(
        self, kind: ScenarioKind, override: Optional[ScenarioOverride] = None
    ) -> Tuple[ScenarioSpec, ControlParameters]:
        if override is not None and override.model_fields_set:
            return make_seed(kind, override)
        return self.seeds[kind]


# Global seed pool instance
seed_pool = SeedPool()
