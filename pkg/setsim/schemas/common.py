"""Shared schemas."""
from pydantic import BaseModel


class ErrorDetail(BaseModel):
    code: str      # dotted config location, e.g. "dispersion.v_F"
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"
