'''
This file is part of Macrotrack.

	Macrotrack is free software: you can redistribute it and/or modify
	it under the terms of the GNU General Public License as published by
	the Free Software Foundation, either version 3 of the License, or
	(at your option) any later version.

	Macrotrack is distributed in the hope that it will be useful,
	but WITHOUT ANY WARRANTY; without even the implied warranty of
	MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
	GNU General Public License for more details.

	You should have received a copy of the GNU General Public License
	along with Macrotrack.  If not, see <http://www.gnu.org/licenses/>.
'''
import time
import numpy as np

from macrotrack.Functions import ThomasSolve,Perp,Cross,Hausdorff
from macrotrack.Functions import DegenerateCurveError
from macrotrack.Trajectories import Resample,DiscreteCurve
from macrotrack.Segments import EvolveSegmentLengths,NormalizeDiscreteLengths
from macrotrack.Segments import RelocateEndpoints,BuildAttractingField
from macrotrack.Intersections import DetectSelfIntersections,ThinPoints,AdaptiveParams

#------ Rows with a sharper vertex angle use the upwind form ------
UPWIND_ANGLE = 120.0

class EvolutionParams(object):
	'''
	Knobs of the curve evolution.

	Positions are divided by length_unit (micrometres) before evolving so that
	delta, tau and omega act on a dimensionless curve.
	'''
	def __init__(self,
		delta_min=0.003,
		delta_max=0.01,
		lambda_max=20.0,
		tau=1e-6,
		omega=50.0,
		extra_steps=50,
		adaptive=False,
		max_iterations=200000,
		stopping="intersections",
		hausdorff_tol=0.00065,
		length_unit=1000.0):

		assert 0.0 <= delta_min < delta_max, "Need 0 <= delta_min < delta_max"
		assert lambda_max > 0.0, "lambda_max must be positive"
		assert tau > 0.0, "tau must be positive"
		assert omega >= 0.0, "omega must be non-negative"
		assert extra_steps >= 0, "extra_steps must be non-negative"
		assert max_iterations > 0, "max_iterations must be positive"
		assert stopping in ["intersections","hausdorff"], "stopping must be intersections or hausdorff"
		assert hausdorff_tol > 0.0, "hausdorff_tol must be positive"
		assert length_unit > 0.0, "length_unit must be positive"

		self.delta_min      = delta_min
		self.delta_max      = delta_max
		self.lambda_max     = lambda_max
		self.tau            = tau
		self.omega          = omega
		self.extra_steps    = int(extra_steps)
		self.adaptive       = adaptive
		self.max_iterations = int(max_iterations)
		self.stopping       = stopping
		self.hausdorff_tol  = hausdorff_tol
		self.length_unit    = length_unit

	def to_dict(self):
		return dict(self.__dict__)


class StepState(object):
	def __init__(self,curvature,beta,alpha,delta,lam,w,length):
		self.curvature = curvature
		self.beta      = beta
		self.alpha     = alpha
		self.delta     = delta
		self.lam       = lam
		self.w         = w
		self.length    = length


class SmoothingResult(object):
	def __init__(self,trajectory,curve,ledger,steps,converged,history,scale):
		self.trajectory = trajectory
		self.curve      = curve
		self.ledger     = ledger
		self.steps      = steps
		self.converged  = converged
		self.history    = history
		self.scale      = scale


def ComputeCurvature(points):
	'''
	Element curvatures k_1..k_{n+1} from the turning angle between the
	neighbouring elements. The two end elements copy their neighbour.
	'''
	e = np.diff(points,axis=0)
	h = np.sqrt(np.sum(e**2,axis=1))

	if len(e) < 2:
		return np.zeros(len(e))

	if len(e) == 2:
		k = np.arctan2(Cross(e[0],e[1]),np.dot(e[0],e[1]))/(h[0] + h[1])
		return np.array([k,k])

	prev = e[:-2]
	succ = e[2:]
	#------ Signed turning angle, well conditioned near 0 and pi ------
	angle = np.arctan2(Cross(prev,succ),np.sum(prev*succ,axis=1))
	k     = angle/(2.0*h[1:-1])
	return np.concatenate([k[:1],k,k[-1:]])


def ComputeTangentialVelocity(points,k,beta,omega):
	'''
	Tangential velocity at the grid points, zero at both endpoints.

	Element lengths evolve as dh_i/dt = h_i k_i beta_i + alpha_i - alpha_{i-1},
	so alpha cancels the local stretching h k beta, hands every element the
	mean stretching rate B and relaxes it towards L/(n+1) at rate omega.
	'''
	h  = np.sqrt(np.sum(np.diff(points,axis=0)**2,axis=1))
	L  = np.sum(h)
	n1 = len(h)

	hkb = h*k*beta
	B   = np.sum(hkb)/L
	alpha = np.concatenate([[0.0],np.cumsum(h*B - hkb + omega*(L/n1 - h))])
	alpha[-1] = 0.0
	return alpha


def ElementAverage(values):
	return 0.5*(values[:-1] + values[1:])


def ComputeStepState(curve,field,delta,lam,omega):
	k    = ComputeCurvature(curve.points)
	beta = -ElementAverage(delta)*k + ElementAverage(lam)*ElementAverage(field.w)
	alpha = ComputeTangentialVelocity(curve.points,k,beta,omega)
	return StepState(k,beta,alpha,delta,lam,field.w,curve.length)


def UpwindRows(points,hbar):
	'''
	Interior rows whose vertex angle is below the threshold, or that touch
	an element shorter than 1e-12*hbar.
	'''
	e = np.diff(points,axis=0)
	h = np.sqrt(np.sum(e**2,axis=1))
	hl,hr = h[:-1],h[1:]
	short = (hl < 1e-12*hbar) | (hr < 1e-12*hbar)

	with np.errstate(divide="ignore",invalid="ignore"):
		cos = -np.sum(e[:-1]*e[1:],axis=1)/(hl*hr)
	cos = np.where(short,1.0,np.clip(cos,-1.0,1.0))
	return short | (cos > np.cos(np.deg2rad(UPWIND_ANGLE)))


class TridiagonalSystem(object):
	"""Full rows of the scheme, fixed endpoints still in the off-diagonals."""
	def __init__(self,lower,diag,upper,rhs,upwind):
		self.lower  = lower
		self.diag   = diag
		self.upper  = upper
		self.rhs    = rhs
		self.upwind = upwind

	def is_diagonally_dominant(self):
		return bool(np.all(self.diag > np.abs(self.lower) + np.abs(self.upper)))

	def solve(self,first,last):
		rhs = self.rhs.copy()
		rhs[0]  -= self.lower[0]*first
		rhs[-1] -= self.upper[-1]*last
		return ThomasSolve(self.lower,self.diag,self.upper,rhs)


def AssembleSystem(curve,state,tau):
	'''
	Semi-implicit scheme: inflow implicit, outflow explicit,
	with the implicit upwind form on rows with sharp vertices or fast tangential motion.
	'''
	x  = curve.points
	h  = curve.element_lengths
	hl = h[:-1]
	hr = h[1:]

	a     = state.alpha[1:-1]
	d     = state.delta[1:-1]
	lw    = (state.lam*state.w)[1:-1]
	in_l  = np.maximum(-a,0.0)
	out_l = np.minimum(-a,0.0)
	in_r  = np.maximum(a,0.0)
	out_r = np.minimum(a,0.0)

	upwind = UpwindRows(x,curve.hbar)
	#------ Rows whose explicit outflow would cross half an element ------
	with np.errstate(invalid="ignore"):
		upwind |= np.abs(a)*tau > 0.5*np.minimum(hl,hr)
	c    = np.where(upwind,1.0,0.5)
	mass = (hl + hr)/(2.0*tau)

	with np.errstate(divide="ignore",invalid="ignore"):
		lower = -d/hl - c*in_l
		upper = -d/hr - c*in_r
		diag  = mass + d/hl + d/hr + c*in_l + c*in_r

	xi  = x[1:-1]
	rhs = xi*mass[:,None] + lw[:,None]*Perp(0.5*(x[2:] - x[:-2]))
	explicit = np.where(upwind,0.0,0.5)[:,None]
	rhs -= explicit*(out_r[:,None]*(xi - x[2:]) + out_l[:,None]*(xi - x[:-2]))

	for name,values in [("lower",lower),("diag",diag),("upper",upper),("rhs",rhs)]:
		if not np.all(np.isfinite(values)):
			bad = np.where(~np.isfinite(values))[0][0]
			raise DegenerateCurveError("Non-finite {0} entry at row {1}: collapsed element".format(name,bad+1))

	return TridiagonalSystem(lower,diag,upper,rhs,upwind)


def EvolveStep(curve,state,tau):
	'''
	One time step of both coordinates. Endpoints are copied unchanged.
	'''
	if curve.n == 0:
		return curve.copy()
	system = AssembleSystem(curve,state,tau)
	inner  = system.solve(curve.points[0],curve.points[-1])
	points = np.concatenate([curve.points[:1],inner,curve.points[-1:]])
	return curve.with_points(points)


def SmoothTrajectory(trajectory,params,hbar,debug=False):
	'''
	Evolves the resampled trajectory until it is free of self-intersections,
	then performs params.extra_steps more steps.
	Returns a SmoothingResult in micrometres.
	'''
	assert hbar > 0.0, "hbar must be positive"
	unit = params.length_unit

	curve,ledger = Resample(trajectory,hbar)
	original = ledger.original
	curve  = DiscreteCurve(curve.points/unit,hbar/unit)
	ledger = ledger.copy()
	ledger.original = ledger.original/unit
	ledger.lengths  = ledger.lengths/unit
	ledger.discrete = ledger.discrete/unit

	history = {"spans":[],"length":[]}
	extra     = None
	steps     = 0
	converged = False
	start     = time.time()

	while steps < params.max_iterations:
		curve,ledger = ThinPoints(curve,ledger,curve.hbar)
		n_points = len(curve)

		#------ Also checked once the extra steps are spent ------
		spans = []
		if extra == 0 or (extra is None and (params.stopping == "intersections" or params.adaptive)):
			spans = DetectSelfIntersections(curve.points,curve.hbar)
			if debug:
				history["spans"].extend([(steps,i1,i2) for i1,i2 in spans])
			if params.stopping == "intersections" and len(spans) == 0:
				if extra == 0 or params.extra_steps == 0:
					converged = True
					break
				extra = params.extra_steps
			else:
				extra = None

		if extra is not None:
			extra -= 1
			delta = np.full(n_points,params.delta_min)
			lam   = np.full(n_points,params.lambda_max)
		elif params.adaptive and len(spans) > 0:
			delta,lam = AdaptiveParams(spans,n_points,params.delta_min,
							params.delta_max,params.lambda_max)
		else:
			delta = np.full(n_points,params.delta_min)
			lam   = np.full(n_points,params.lambda_max)

		field = BuildAttractingField(ledger,curve)
		state = ComputeStepState(curve,field,delta,lam,params.omega)
		new   = EvolveStep(curve,state,params.tau)

		ledger = EvolveSegmentLengths(ledger,curve,state.curvature,state.beta,params.tau)
		ledger = NormalizeDiscreteLengths(ledger,new)
		ledger,new = RelocateEndpoints(ledger,new)

		steps += 1
		if debug:
			history["length"].append(new.length*unit)

		if params.stopping == "hausdorff":
			if Hausdorff(curve.points,new.points) < params.hausdorff_tol:
				curve = new
				converged = True
				break
		curve = new

	history["wall_time"] = time.time() - start

	#------ Back to micrometres ----------
	curve = DiscreteCurve(curve.points*unit,hbar)
	ledger.original = original
	ledger.lengths  = ledger.lengths*unit
	ledger.discrete = ledger.discrete*unit
	#------ Endpoints are restored bitwise ---
	curve.points[0]  = trajectory.points[0]
	curve.points[-1] = trajectory.points[-1]

	return SmoothingResult(trajectory,curve,ledger,steps,converged,history,unit)
