from .app import MODEL_DIR_ENV, create_app
from .jobs import JobQueue, JobRecord, JobStateError, JobStore

__all__ = [
    "JobQueue",
    "JobRecord",
    "JobStateError",
    "JobStore",
    "MODEL_DIR_ENV",
    "create_app",
]
