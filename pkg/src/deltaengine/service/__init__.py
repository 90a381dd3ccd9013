from .app import create_app, role_view
from .battles import BattleManager, BattleSession, DoubleSubmissionError, PolicySpec
from .config import ServiceConfig, load_config
from .store import RoleRecord, RoleStore, StoreError, UnknownRoleError, code_hash

__all__ = [
    "create_app", "role_view",
    "BattleManager", "BattleSession", "DoubleSubmissionError", "PolicySpec",
    "ServiceConfig", "load_config",
    "RoleRecord", "RoleStore", "StoreError", "UnknownRoleError", "code_hash",
]
