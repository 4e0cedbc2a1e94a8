from .ranking import MetricsSummary, aggregate, auprc, auroc, evaluate, to_anomaly_score

__all__ = ["MetricsSummary", "aggregate", "auprc", "auroc", "evaluate", "to_anomaly_score"]
