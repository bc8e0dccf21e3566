import numpy as np
import pytest

from macrotrack.Evolution import EvolutionParams
from macrotrack.Fixtures import FigureEight,TripleLoop,Straight
from macrotrack.Reconstruction import DomainMask


@pytest.fixture
def rng():
	return np.random.default_rng(1234)

@pytest.fixture
def figure_eight():
	return FigureEight()

@pytest.fixture
def triple_loop():
	return TripleLoop()

@pytest.fixture
def straight():
	return Straight()

@pytest.fixture
def fast_params():
	"""Ten times the default time step."""
	return EvolutionParams(delta_min=0.003,delta_max=0.01,lambda_max=20.0,
		tau=1e-5,omega=50.0,extra_steps=50,adaptive=True,max_iterations=20000)

@pytest.fixture
def strip_mask():
	return DomainMask(np.ones((12,4),dtype=bool),1.0)


def random_walk(rng,n_steps,low=2.0,high=3.0):
	'''
	Polyline with uniformly distributed directions and step lengths in [low,high].
	'''
	angle  = rng.uniform(0.0,2.0*np.pi,size=n_steps)
	length = rng.uniform(low,high,size=n_steps)
	steps  = length[:,None]*np.column_stack((np.cos(angle),np.sin(angle)))
	return np.concatenate([[[0.0,0.0]],np.cumsum(steps,axis=0)])
