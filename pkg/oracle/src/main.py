from typing import List

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.requests import Request

from branching import settings
from lowering.src.symbolic import expand_T
from .modrep import build_weyl, dual_realization, lowering_verdict, oracle_summary


class OracleRequest(BaseModel):
    lam: List[int]
    p: int

    class Config:
        # this will be used as the example in Swagger docs
        json_schema_extra = {
            "example": {
                "lam": [2, 1, 0],
                "p": 3,
            }
        }


class LoweringVerdictRequest(BaseModel):
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
                "lam": [1, 0],
                "mu": [1],
                "p": 3,
                "i": 1,
                "j": 2,
                "d": 1,
                "M": [],
            }
        }


def value_error_handler(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


app = FastAPI()
app.add_exception_handler(ValueError, value_error_handler)


# start app with: uvicorn oracle.src.main:app --reload
# to view the docs: http://localhost:5001/docs


@app.post("/oracle")
def oracle(data: OracleRequest) -> dict:
    return {"schema": settings.JSON_SCHEMA, **oracle_summary(tuple(data.lam), data.p, settings.TENSOR_LIMIT)}


@app.post("/lowering_verdict")
def verdict(data: LoweringVerdictRequest) -> dict:
    lam = tuple(data.lam)
    nabla = dual_realization(build_weyl(lam, data.p, settings.TENSOR_LIMIT))
    T = expand_T(data.i, data.j, data.d, tuple(sorted(set(data.M))), len(lam))
    return {"schema": settings.JSON_SCHEMA, **lowering_verdict(nabla, T, tuple(data.mu)).to_dict()}
