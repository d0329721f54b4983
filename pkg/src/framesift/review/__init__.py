"""Human-in-the-loop box review: journaled session state and HTTP service."""

from .journal import Journal, replay_journal
from .session import ReviewSession
from .service import create_app

__all__ = ["Journal", "replay_journal", "ReviewSession", "create_app"]
