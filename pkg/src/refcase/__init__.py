"""refcase: retrieval, parsing, labeling, training, and faceted search
over refugee-status case law."""

__version__ = "0.1.0"
