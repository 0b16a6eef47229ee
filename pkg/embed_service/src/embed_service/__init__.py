"""HTTP sidecar serving batched sentence embeddings.

The mapping engine's remote embedding provider talks to this service over
GET /health and POST /embed; nothing else is shared between the two
packages.
"""

from .app import DEFAULT_MODEL, MAX_BATCH, MAX_TEXT_LENGTH, create_app
from .backends import (BackendError, HashedTrigramBackend,
                       SentenceModelBackend, build_backend)

__version__ = "0.1.0"
