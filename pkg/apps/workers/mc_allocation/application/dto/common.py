from __future__ import annotations

from pydantic import BaseModel, ConfigDict

SCHEMA_VERSION = 1


class MyBaseModel(BaseModel):
    """
    Base Pydantic model for report and request payloads (populate_by_name, strict keys).
    Dump with `by_alias=True` so upper-case names such as `K` survive serialisation.
    """
    model_config = ConfigDict(
        populate_by_name=True,
        extra="forbid",
    )
