"""Mass channel similarity graphs for MSI data.

Turns a stack of mass-channel images into a weighted co-localization graph,
detects hierarchical communities, and supports interactive exploration:
NodeTrix submatrices, region-of-interest queries, per-node graph statistics,
manual cluster editing with undo, and lossless JSON round-trips. The
`service` module serves all of it over HTTP for the browser client.
"""

from .build import BuildConfig, build_mcsg
from .communities import (CommunityHierarchy, CommunityNode, Mcsg, McsgView,
                          compute_view, detect_communities, louvain_communities,
                          materialize_mcsg, modularity, set_expansion)
from .dataset import (MassChannelImage, MsiDataset, PixelGrid, load_dataset,
                      normalized_channel, save_dataset)
from .editing import (EditCommand, EditSession, apply_edit, export_document,
                      export_json, import_document, import_json, merge_command,
                      reassign_command, replay_log, split_command)
from .errors import (DatasetFormatError, DatasetValidationError, EditError,
                     EditNoOpWarning, EmptyRegionError, ImportDocumentError,
                     InsufficientDataError, IntegrityError, McsgError,
                     NotFoundError, PolygonError)
from .projection import RgbProjection, compute_projection
from .qgp import QgpReport, QgpThresholds, compute_qgp, rank_nodes
from .roi import RoiSelection, match_nodes, rasterize_polygon, select_roi
from .similarity import (ChannelGraph, NodeTrixMatrix, SimilarityMatrix,
                         build_channel_graph, compute_similarity, nodetrix_matrix)
from .synthetic import SyntheticTruth, generate_synthetic_dataset

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
