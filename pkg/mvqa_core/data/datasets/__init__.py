from .qa_dataset import QADataset

__all__ = ["QADataset"]
