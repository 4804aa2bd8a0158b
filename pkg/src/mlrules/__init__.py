"""Multi-label rule learning with pruned multi-label head search."""

from .dataset import (AttributeSchema, Dataset, DatasetStats, LabelSpec,
                      RawRelation, bind_labels, dataset_stats, parse_arff,
                      parse_label_xml, to_arff)
from .head_search import (SearchConfig, SearchOutcome, best_head_decomposable,
                          best_head_exhaustive, best_head_pruned_bfs,
                          find_best_head)
from .induction import InductionConfig, candidate_conditions, learn_rule
from .kernels import BACKEND as KERNEL_BACKEND
from .metrics import (ConfusionMatrix, Metric, OutcomeGrid, classify_outcome,
                      evaluate_head, evaluate_rule, micro_aggregate,
                      rule_outcome_grid, score_micro, score_subset_accuracy)
from .model import (EvaluationReport, RuleList, evaluate_model, learn_model,
                    parse_model, predict, predict_dataset, render_rule,
                    serialize_model)
from .rules import Condition, Head, Rule, coverage_mask, covers

__version__ = "0.1.0"
