# routes.py
from fastapi import FastAPI
from controller.workbench_controller import workbench_router


def register_routes(app: FastAPI) -> None:
    """Register controllers here."""
    app.include_router(workbench_router)
