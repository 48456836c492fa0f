from .records import RecordStore

__all__ = ["RecordStore"]
