"""Schemas package initialization."""
from schemas.descriptor import SpaceDescriptor, parse_descriptor, serialize_descriptor
from schemas.reports import CommandReport

__all__ = [
    'CommandReport',
    'SpaceDescriptor',
    'parse_descriptor',
    'serialize_descriptor',
]
