__doc__ = 'default application wide settings'

import os
import logging


# default location to store output state files
state_dir = os.environ.get('COOPSIM_STATE_DIR') or os.path.join(os.getcwd(), '.coopsim')
cache_file = os.path.join(state_dir, 'cells.db') # file to use for the sweep cache
log_file = os.environ.get('COOPSIM_LOG_FILE') # None means console only

log_level = logging.INFO # logging level


def env_seed(default=0):
    try:
        return int(os.environ.get('COOPSIM_SEED', default))
    except ValueError:
        return default

default_seed = env_seed() # fallback seed when neither flag nor config sets one

# world geometry, in cell lengths
width = 13.0
height = 13.0
neighbor_radius = 1.0
step_length = 1.0
max_turn = 50 # random(50) draws an integer in [0, 50)

# game and population defaults
benefit = 4.0
cost = 2.0
population = 60
ipc = 0.5 # initial proportion of cooperators
icpc = 0.65 # initial cp of cooperators
icpd = 0.35 # initial cp of defectors

# run length and averaging
iterations = 100000
window = 5000
window_scaling_below = 50000 # shorter runs average over a fraction of the run
window_fraction = 0.1
delta = 0.01 # cp adjustment per tuning step

tie_tolerance = 1e-9
float_format = '.17g'
