"""Request/response models for the governance service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class CitizenState(BaseModel):
    id: int
    name: str
    status: Literal["unemployed", "employed", "owner"]
    race: str
    cash: int
    health: float
    food_stock: int
    qol: float
    sick: bool
    alive: bool


class JoinResponse(BaseModel):
    type: Literal["joined"] = "joined"
    protocol: int
    step: int
    session: str
    citizen: CitizenState


class ProposeRequest(BaseModel):
    session: str
    kind: str = Field(description="legislation kind, e.g. set_tax_rate or nationalize")
    sector: Optional[str] = None
    increments: int = Field(default=0, description="signed count of the lever's increment")


class BallotState(BaseModel):
    id: int
    kind: str
    sector: Optional[str]
    increments: int
    proposer_session: str
    opened_step: int
    deadline: int
    yes: int
    no: int
    status: Literal["open", "passed", "failed"]


class BallotResponse(BaseModel):
    type: Literal["ballot"] = "ballot"
    protocol: int
    step: int
    ballot: BallotState


class VoteRequest(BaseModel):
    session: str
    ballot: int
    choice: Literal["yes", "no"]


class AckResponse(BaseModel):
    type: Literal["ack"] = "ack"
    protocol: int
    step: int
    ballot: BallotState


class PersonGlyph(BaseModel):
    id: int
    status: Literal["unemployed", "employed", "owner"]
    race: str
    sick: bool
    alive: bool


class BuildingSlice(BaseModel):
    firm: int
    sector: str


class BuildingView(BaseModel):
    id: int
    slices: list[BuildingSlice]


class MetricsOut(BaseModel):
    step: int
    mean_qol: float
    bankruptcies: int
    mean_material_price: float
    mean_wage: float
    consumer_profit: float
    mean_consumer_price: float
    population: int
    sick: int
    unemployment: float


class Snapshot(BaseModel):
    type: Literal["snapshot"] = "snapshot"
    protocol: int
    step: int
    persons: list[PersonGlyph]
    buildings: list[BuildingView]
    metrics: Optional[MetricsOut]
    ballots: list[BallotState]
    current_turn: Optional[str]


class ControlRequest(BaseModel):
    command: Literal["step", "pause", "resume"]


class ControlResponse(BaseModel):
    type: Literal["ack"] = "ack"
    protocol: int
    step: int
    command: str


class ErrorResponse(BaseModel):
    type: Literal["error"] = "error"
    protocol: int
    step: int
    error: str
    detail: str
