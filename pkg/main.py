"""
Main FastAPI Application
Entry point for the solver API
"""
import uvicorn
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from contextlib import asynccontextmanager

from app.config import settings
from app.log_config import configure_logging

# Import routers
from app.api.routes import linear, solve, validation


@asynccontextmanager
async def lifespan(app: FastAPI):
    print(f"🚀 Starting {settings.APP_NAME}...")
    configure_logging()
    print(
        f"✅ Defaults: tau={settings.DEFAULT_TAU}, K_eff={settings.DEFAULT_K_EFF}, "
        f"A={settings.DEFAULT_ATWOOD}, N1={settings.DEFAULT_N1}, N2={settings.DEFAULT_N2}"
    )
    print(f"✅ Server running on {settings.HOST}:{settings.PORT}")

    yield

    # Shutdown
    print("👋 Shutting down...")


# Create FastAPI app
app = FastAPI(
    title=settings.APP_NAME,
    version=settings.APP_VERSION,
    description="Self-similar viscous fingering shapes as a nonlinear eigenvalue problem",
    lifespan=lifespan,
    docs_url="/api/docs",
    redoc_url="/api/redoc"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(linear.router, prefix="/api/linear", tags=["Linear Theory"])
app.include_router(solve.router, prefix="/api/solve", tags=["Solver"])
app.include_router(validation.router, prefix="/api/validate", tags=["Validation"])


@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": f"{settings.APP_NAME} API",
        "version": settings.APP_VERSION,
        "docs": "/api/docs"
    }


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {
        "status": "healthy",
        "version": settings.APP_VERSION
    }


if __name__ == "__main__":
    uvicorn.run(
        "main:app",
        host=settings.HOST,
        port=settings.PORT,
        reload=settings.DEBUG,
        log_level=settings.LOG_LEVEL.lower()
    )
