"""Link-prediction similarity indices, ranking metrics and link-hiding heuristics."""

from .graph import Edge, Graph, GraphError, edge, load_edge_list, save_edge_list
from .global_indices import GlobalIndex, GlobalParams, global_similarity
from .local_indices import LocalIndex, local_score, local_score_all
from .metrics import RankingEvaluation, ScoredRanking, auc, average_precision
from .scoring import evaluate_hidden, parse_index, score_graph

__version__ = "0.1.0"
