import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    TORUS_DEFAULT_Q = int(os.getenv('TORUS_DEFAULT_Q', 4096))
    TORUS_LATTICE_WORKERS = int(os.getenv('TORUS_LATTICE_WORKERS', 1))
    TORUS_WITNESS_CHECK_N = int(os.getenv('TORUS_WITNESS_CHECK_N', 100))
    TORUS_LOG_LEVEL = os.getenv('TORUS_LOG_LEVEL', 'INFO')


class TestConfig(Config):
    TESTING = True
    TORUS_DEFAULT_Q = 1024
    TORUS_WITNESS_CHECK_N = 30
    TORUS_LOG_LEVEL = 'WARNING'
