"""Tweet corpus mining: preprocessing, rule-based sentiment, LDA topics and reports."""

__version__ = "0.1.0"
