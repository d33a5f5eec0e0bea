from .client import Gateway, mock_gateway
from .config import MODE_MOCK, MODE_REMOTE, GatewayConfig
from .templates import PromptTemplate, TemplateSet, load_templates

__all__ = [
    "Gateway",
    "mock_gateway",
    "GatewayConfig",
    "MODE_MOCK",
    "MODE_REMOTE",
    "PromptTemplate",
    "TemplateSet",
    "load_templates",
]
