"""
Configuration file for obstrukt
Adjust these settings to trade exhaustiveness against running time
"""

import os

# Enumeration Settings
ENUMERATION_BUDGET = int(os.environ.get('OBSTRUKT_BUDGET', 10**8))  # max candidate maps per search
MATRIX_BUDGET = 250_000  # max entries of an integer matrix handed to Smith normal form
ORACLE_LIMIT = 10**6  # largest search space for brute-force oracles

# Finite Category Settings
MAX_CATEGORY_MORPHISMS = 200  # bound for generated and exhaustively checked categories
MAX_CHAIN_LENGTH = 3  # objects in the poset bases of random instances
MAX_FIBRE_GROUP = 3  # order of the cyclic groups acting in random fibres
MAX_FIBRE_SET = 3  # size of the sets they act on

# Verification Settings
DEFAULT_SEED = 0
RANDOM_INSTANCES = 100  # random fibrewise opfibrations in the torsor suite
RANDOM_COCHAINS = 1000  # random cochains for the d∘d = 0 check
SWEEP_MAX_ORDER = 4  # largest component group order in the fixture sweeps
SML_MAX_C = 3  # largest |C| in the Schreier sweep
SML_MAX_K = 6  # largest |K| in the Schreier sweep
CHAIN_LIMIT = 3  # endomorphisms per crossed extension used for composition chains

# Directory Settings
FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'fixtures')

# Logging Settings
LOG_LEVEL = 'INFO'  # DEBUG, INFO, WARNING, ERROR, CRITICAL
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# Performance Settings
MAX_WORKERS = 1  # joblib workers for independent suite items (1 = run in-process)
