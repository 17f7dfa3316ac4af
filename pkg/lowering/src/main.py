from typing import List, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.requests import Request

from branching import settings
from .combinatorics import BranchContext
from .criteria import CriterionQuery, check, exists_M_inner, exists_M_terminal
from .generator import ReachMode, reach_report, reachable
from .symbolic import RationalTag, expand_T, rho


EXISTENCE_MODES = ("part1", "part2")


class CriterionRequest(BaseModel):
    lam: List[int]
    mu: List[int]
    p: int
    i: int
    j: int
    d: int
    M: List[int] = []

    class Config:
        # this will be used as the example in Swagger docs
        json_schema_extra = {
            "example": {
                "lam": [3, 1, 0],
                "mu": [2, 1],
                "p": 3,
                "i": 1,
                "j": 3,
                "d": 1,
                "M": [2],
            }
        }


class ExistenceRequest(BaseModel):
    lam: List[int]
    mu: List[int]
    p: int
    i: int
    j: int
    d: int
    mode: str = "part2"

    class Config:
        # this will be used as the example in Swagger docs
        json_schema_extra = {
            "example": {
                "lam": [2, 1, 0],
                "mu": [2, 1],
                "p": 3,
                "i": 1,
                "j": 2,
                "d": 1,
                "mode": "part2",
            }
        }


class ExpandRequest(BaseModel):
    i: int
    j: int
    d: int
    M: List[int] = []
    n: Optional[int] = None

    class Config:
        # this will be used as the example in Swagger docs
        json_schema_extra = {
            "example": {
                "i": 1,
                "j": 3,
                "d": 1,
                "M": [2],
            }
        }


class RhoRequest(BaseModel):
    C: List[int]
    i: int
    j: int
    K: List[int]
    L: List[int]
    M: List[int] = []
    R: str = RationalTag.ONE.value

    class Config:
        # this will be used as the example in Swagger docs
        json_schema_extra = {
            "example": {
                "C": [0],
                "i": 1,
                "j": 2,
                "K": [2],
                "L": [0],
                "M": [],
                "R": "1",
            }
        }


class ReachRequest(BaseModel):
    lam: List[int]
    p: int
    mode: str = "both"

    class Config:
        # this will be used as the example in Swagger docs
        json_schema_extra = {
            "example": {
                "lam": [2, 1, 0],
                "p": 3,
                "mode": "both",
            }
        }


def value_error_handler(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


app = FastAPI()
app.add_exception_handler(ValueError, value_error_handler)


# start app with: uvicorn lowering.src.main:app --reload
# to view the docs: http://localhost:5000/docs


@app.post("/check")
def check_criterion(data: CriterionRequest) -> dict:
    ctx = BranchContext(tuple(data.lam), tuple(data.mu), data.p)
    verdict = check(CriterionQuery(ctx, data.i, data.j, data.d, tuple(data.M)))
    return {"schema": settings.JSON_SCHEMA, "verdict": verdict.to_dict()}


@app.post("/exists_m")
def exists_m(data: ExistenceRequest) -> dict:
    if data.mode not in EXISTENCE_MODES:
        raise ValueError(f"mode should be one of {EXISTENCE_MODES}, but received {data.mode}")
    ctx = BranchContext(tuple(data.lam), tuple(data.mu), data.p)
    if data.j == ctx.n:
        verdict = exists_M_terminal(ctx, data.i, data.d)
    else:
        verdict = exists_M_inner(ctx, data.i, data.j, data.d, mode=data.mode)
    return {"schema": settings.JSON_SCHEMA, "verdict": verdict.to_dict()}


@app.post("/expand")
def expand(data: ExpandRequest) -> dict:
    T = expand_T(data.i, data.j, data.d, tuple(sorted(set(data.M))), data.n)
    return {"schema": settings.JSON_SCHEMA, "terms": T.to_dict(), "text": T.to_text()}


@app.post("/rho")
def rho_polynomial(data: RhoRequest) -> dict:
    value = rho(data.C, data.i, data.j, data.K, data.L, data.M, RationalTag(data.R))
    return {"schema": settings.JSON_SCHEMA, "rho": str(value)}


@app.post("/reach")
def reach(data: ReachRequest) -> dict:
    lam = tuple(data.lam)
    if data.mode == "both":
        return {"schema": settings.JSON_SCHEMA, **reach_report(lam, data.p).to_dict()}
    result = reachable(lam, data.p, ReachMode(data.mode))
    return {
        "schema": settings.JSON_SCHEMA,
        "lambda": list(lam),
        "p": data.p,
        "mode": result.mode.value,
        "reached": [result.nodes[mu].to_dict() for mu in sorted(result.nodes, reverse=True)],
        "flagged": [f.to_dict() for f in result.flagged],
    }
