"""Pydantic validation models for each configuration section."""

from pydantic import BaseModel, Field, field_validator


class NumericsSettings(BaseModel):
    tol: float = Field(default=1e-9, gt=0, le=1e-2)
    length_cap: int | None = Field(default=None, ge=0, le=256)
    max_iter: int = Field(default=100, ge=1, le=10000)
    damping: float = Field(default=1e-8, ge=0, le=1.0)
    solver_tol: float = Field(default=1e-10, gt=0, le=1e-2)
    attempts: int = Field(default=20, ge=1, le=1000)


class RunSettings(BaseModel):
    seed: int = Field(default=0, ge=0, le=2**32 - 1)
    output_format: str = Field(default="json", pattern=r"^(json|table|dot)$")


class LoggingSettings(BaseModel):
    level: str = Field(default="WARNING")
    format: str = Field(default="json", pattern=r"^(json|text)$")

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        v = v.upper()
        if v not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Invalid log level: {v}")
        return v


class ServerSettings(BaseModel):
    transport: str = Field(default="stdio", pattern=r"^(stdio|sse|streamable-http)$")
    host: str = Field(default="127.0.0.1")
    port: int = Field(default=8000, ge=1, le=65535)

    @field_validator("host")
    @classmethod
    def validate_host(cls, v: str) -> str:
        if not v or len(v) > 253:
            raise ValueError("Invalid host")
        return v


class QuivarConfig(BaseModel):
    """Root configuration model."""
    numerics: NumericsSettings = Field(default_factory=NumericsSettings)
    run: RunSettings = Field(default_factory=RunSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    server: ServerSettings = Field(default_factory=ServerSettings)
