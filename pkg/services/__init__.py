"""Services package initialization."""
from services.analysis_service import AnalysisService
from services.example_service import ExampleService, replay_example
from services.space_service import SpaceBundle, SpaceService

__all__ = ['AnalysisService', 'ExampleService', 'SpaceBundle', 'SpaceService', 'replay_example']
