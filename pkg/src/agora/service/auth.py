"""Roles and the endpoint access matrix.

Static bearer tokens map to exactly one (role, scope) pair. Scope limits a
token to a single discussion or event id; "*" grants the role everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

ROLE_PARTICIPANT = "Participant"
ROLE_CURATOR = "Curator"
ROLE_FACILITATOR = "Facilitator"
ROLE_ADMIN = "Admin"
ROLES = (ROLE_PARTICIPANT, ROLE_CURATOR, ROLE_FACILITATOR, ROLE_ADMIN)

# capability -> roles allowed; Admin is implicit everywhere
_MATRIX = {
    "read_public": {ROLE_PARTICIPANT, ROLE_CURATOR, ROLE_FACILITATOR},
    "contribute": {ROLE_PARTICIPANT, ROLE_CURATOR, ROLE_FACILITATOR},
    "reflect": {ROLE_PARTICIPANT, ROLE_CURATOR, ROLE_FACILITATOR},
    "imports": {ROLE_CURATOR},
    "analytics_refresh": {ROLE_CURATOR},
    "facilitate": {ROLE_FACILITATOR},
    "admin": set(),
}


@dataclass(frozen=True)
class Principal:
    role: str
    scope: str = "*"

    def allows(self, capability: str, resource_id: str | None = None) -> bool:
        if self.scope != "*" and resource_id is not None and self.scope != resource_id:
            return False
        if self.role == ROLE_ADMIN:
            return True
        return self.role in _MATRIX.get(capability, set())


class TokenAuthenticator:
    def __init__(self, tokens):
        self._by_token = {entry.token: Principal(entry.role, entry.scope)
                          for entry in tokens}

    def authenticate(self, token: str | None) -> Principal | None:
        if token is None:
            return None
        return self._by_token.get(token)
