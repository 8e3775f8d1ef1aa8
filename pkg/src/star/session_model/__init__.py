from .catalog import CatalogError, activity_from_dict, activity_to_dict, load_catalog
from .codec import SCHEMA, MalformedRecord, UnknownPayloadKind, parse_log, serialize_log
from .crypto import (
    AuthenticationFailure,
    BadKeyLength,
    decrypt_log,
    encrypt_log,
    random_nonce,
    read_key_file,
)
from .types import (
    ActivityDefinition,
    ContentArea,
    CueingResponse,
    EngagementSample,
    ExpressionSample,
    GazeSample,
    GoalLevel,
    InteractionState,
    Phase,
    Question,
    Reward,
    SessionEvent,
    SessionLog,
    Speaker,
    SpeechTurn,
)
from .validation import InvalidLog, Violation, validate_log

__all__ = [
    "SCHEMA",
    "ActivityDefinition",
    "AuthenticationFailure",
    "BadKeyLength",
    "CatalogError",
    "ContentArea",
    "CueingResponse",
    "EngagementSample",
    "ExpressionSample",
    "GazeSample",
    "GoalLevel",
    "InteractionState",
    "InvalidLog",
    "MalformedRecord",
    "Phase",
    "Question",
    "Reward",
    "SessionEvent",
    "SessionLog",
    "Speaker",
    "SpeechTurn",
    "UnknownPayloadKind",
    "Violation",
    "activity_from_dict",
    "activity_to_dict",
    "decrypt_log",
    "encrypt_log",
    "load_catalog",
    "parse_log",
    "random_nonce",
    "read_key_file",
    "serialize_log",
    "validate_log",
]
