"""domtune: how many threads should a tree-traversal workload use?

The package parses pages into element trees, measures how structural
features relate to parallel traversal performance and energy, labels each
page with its best thread count through tunable cost models, and trains a
classifier that predicts that label from page features alone.
"""

from .dom import DomNode, DomTree, EmptyDocumentError, parse_html
from .features import (FEATURE_COLUMNS, PageFeatures, WidthProfile,
                       compute_features, width_profile)
from .labeling import (DEFAULT_BUCKETS, PET, PetBucketConfig, energy_label,
                       performance_energy_label, performance_label)
from .measurements import (AggregatedMeasurement, GreenupSet, SpeedupSet,
                           TrialMeasurement, aggregate, greenups, ingest_csv,
                           mad, speedups)
from .mnr import MnrHyperparams, MnrModel, mnr_fit
from .standardize import StandardizationParams, zscore_apply, zscore_fit
from .synthetic import SyntheticTreeSpec, generate_tree, tree_to_html
from .traversal import (PowerModel, TrialResult, WorkConfig, estimate_energy,
                        layout_pass, run_bench, styling_pass)

__version__ = "0.1.0"
