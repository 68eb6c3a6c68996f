import os

from . import dataio, sim


def get():
    pth = os.path.join(os.path.abspath('.'), 'gyromag_example')
    os.makedirs(pth, exist_ok=True)
    dataio.write_run(pth, sim.simulate_run(0, seed=0))
