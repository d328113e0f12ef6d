from . import api, schemas

__all__ = ["api", "schemas"]
