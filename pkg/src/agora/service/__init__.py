from .auth import (
    ROLE_ADMIN,
    ROLE_CURATOR,
    ROLE_FACILITATOR,
    ROLE_PARTICIPANT,
    Principal,
    TokenAuthenticator,
)
from .config import ServiceConfig, TokenEntry, load_config
from .eventlog import EventLog, LogRecord, RecoveryReport
from .hub import NotificationHub, record_messages, topic_discussion, topic_event
from .platform import Platform
from .state import PlatformState

__all__ = [
    "Platform",
    "PlatformState",
    "EventLog",
    "LogRecord",
    "RecoveryReport",
    "NotificationHub",
    "record_messages",
    "topic_discussion",
    "topic_event",
    "ServiceConfig",
    "TokenEntry",
    "load_config",
    "TokenAuthenticator",
    "Principal",
    "ROLE_PARTICIPANT",
    "ROLE_CURATOR",
    "ROLE_FACILITATOR",
    "ROLE_ADMIN",
]
