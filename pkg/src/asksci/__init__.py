"""Semantic question answering for science education.

Retrieves the closest textbook chunks and related past-exam Q&A pairs for
a student's question via exact cosine search over precomputed embeddings,
and tracks helpful/not-helpful feedback for accuracy reporting.
"""

__version__ = "0.1.0"
