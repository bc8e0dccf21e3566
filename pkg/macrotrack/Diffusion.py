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
import numpy as np
import pandas as pn

from macrotrack.Functions import InsufficientDataError
from macrotrack.Segments import DisappearedRuns
from macrotrack.Trajectories import Resample
from macrotrack.Intersections import DetectSelfIntersections

#------ Shortest random part kept -------
MIN_POINTS = 5

class RandomSubTrajectory(object):
	'''
	Contiguous slice [first,last] of the recorded points of a trajectory.
	'''
	def __init__(self,trajectory,first,last,method):
		assert 0 <= first < last < len(trajectory), "Invalid slice of the trajectory"
		self.source_id = trajectory.id
		self.first     = first
		self.points    = trajectory.points[first:last+1]
		self.times     = trajectory.times[first:last+1]
		self.frames    = trajectory.frames[first:last+1]
		self.dT        = trajectory.dT
		self.method    = method

	def __len__(self):
		return len(self.points)

	@property
	def lags(self):
		"""Lag index of every point counted from the first one."""
		return np.rint((self.times - self.times[0])/self.dT).astype(int)

	@property
	def K(self):
		return int(self.lags[-1])


class MsdSeries(object):
	def __init__(self,abscissae,values,counts,name="lag_minutes"):
		self.abscissae = np.asarray(abscissae,dtype=np.float64)
		self.values    = np.asarray(values,dtype=np.float64)
		self.counts    = np.asarray(counts,dtype=int)
		self.name      = name
		self.alpha     = np.nan
		self.hurst     = np.nan
		self.intercept = np.nan

	def __len__(self):
		return len(self.abscissae)

	def to_frame(self):
		return pn.DataFrame({self.name:self.abscissae,
				"msd_um2":self.values,
				"count":self.counts})

	@property
	def regime(self):
		return Regime(self.hurst)

	@property
	def diffusion_coefficient(self):
		"""D from the first abscissa, rho(t) = 4 D t."""
		if len(self) == 0:
			return np.nan
		return self.values[0]/(4.0*self.abscissae[0])


def Regime(hurst,tol=0.05):
	if not np.isfinite(hurst):
		return "undetermined"
	if hurst < 0.5 - tol:
		return "subdiffusive"
	if hurst <= 0.5 + tol:
		return "diffusive"
	if hurst < 1.0 - tol:
		return "superdiffusive"
	if hurst <= 1.0 + tol:
		return "ballistic"
	return "superballistic"


#================= Extraction ========================================
def ExtractRandomByDisappearance(ledger,trajectory,min_points=MIN_POINTS):
	'''
	Every run of disappeared segments, extended by one recorded point on each side.
	'''
	last = len(trajectory) - 1
	subs = []
	for a,b in DisappearedRuns(ledger.disappeared):
		lo = max(ledger.source_index[a] - 1,0)
		hi = min(ledger.source_index[b+1] + 1,last)
		if hi - lo + 1 >= min_points:
			subs.append(RandomSubTrajectory(trajectory,lo,hi,"disappeared-segments"))
	return subs


def SpanToSegments(knots,i1,i2):
	'''
	Segments covered by a span of grid indices. A shared start point belongs
	to the following segment, a shared end point to the preceding one.
	'''
	M = len(knots) - 1
	s = int(np.searchsorted(knots,i1,side="right")) - 1
	e = int(np.searchsorted(knots,i2,side="left")) - 1
	return min(max(s,0),M-1),min(max(e,0),M-1)


def ExtractRandomBySelfIntersection(trajectory,hbar,min_points=MIN_POINTS):
	curve,ledger = Resample(trajectory,hbar)
	spans = DetectSelfIntersections(curve.points,hbar)

	last = len(trajectory) - 1
	subs = []
	for i1,i2 in spans:
		s,e = SpanToSegments(ledger.knots,i1,i2)
		if s > e:
			continue
		lo = ledger.source_index[s]
		hi = min(ledger.source_index[e+1],last)
		if hi - lo + 1 >= min_points:
			subs.append(RandomSubTrajectory(trajectory,lo,hi,"self-intersections"))
	return subs
#=====================================================================


#================= Mean squared displacements ========================
def Eamsd(subs):
	'''
	Ensemble averaged MSD. The clock of every sub-trajectory starts at its first point.
	'''
	if len(subs) == 0:
		raise InsufficientDataError("insufficient data: no random sub-trajectories")

	dT   = subs[0].dT
	lags = np.concatenate([sub.lags for sub in subs])
	sqd  = np.concatenate([np.sum((sub.points - sub.points[0])**2,axis=1) for sub in subs])

	size   = np.max(lags) + 1
	sums   = np.bincount(lags,weights=sqd,minlength=size)
	counts = np.bincount(lags,minlength=size)

	idx = np.where(counts > 0)[0]
	idx = idx[idx > 0]
	return MsdSeries(idx*dT,sums[idx]/counts[idx],counts[idx],name="time_minutes")


def IsValidLag(n,K):
	"""Lag n is usable on a track with K lags when 1 <= n <= (K+1)/4."""
	return 1 <= n and 4*n <= K + 1


def Tamsd(sub,n):
	'''
	Time averaged MSD of one sub-trajectory at lag n.
	Returns None when the lag is not valid for this sub-trajectory.
	'''
	K = sub.K
	if not IsValidLag(n,K):
		return None

	grid = np.full((K+1,2),np.nan)
	grid[sub.lags] = sub.points
	sqd = np.sum((grid[n:] - grid[:-n])**2,axis=1)
	sqd = sqd[np.isfinite(sqd)]
	if len(sqd) == 0:
		return None
	return float(np.mean(sqd))


def Eatamsd(subs):
	'''
	Ensemble average of the time averaged MSDs. A lag enters only if
	it is valid in at least a quarter of the sub-trajectories.
	'''
	N = len(subs)
	if N == 0:
		raise InsufficientDataError("insufficient data: no random sub-trajectories")

	dT      = subs[0].dT
	max_lag = max((sub.K + 1)//4 for sub in subs)
	sums    = np.zeros(max_lag + 1)
	counts  = np.zeros(max_lag + 1,dtype=int)

	for sub in subs:
		for n in range(1,(sub.K + 1)//4 + 1):
			value = Tamsd(sub,n)
			if value is not None:
				sums[n]   += value
				counts[n] += 1

	lags = np.where((counts > 0) & (4*counts >= N))[0]
	lags = lags[lags > 0]
	if len(lags) == 0:
		raise InsufficientDataError("insufficient data: no lag satisfies the validity constraints")

	return MsdSeries(lags*dT,sums[lags]/counts[lags],counts[lags],name="lag_minutes")


def FitHurst(series):
	'''
	Least squares line of log MSD against log time. Sets and returns
	the slope alpha and the Hurst exponent alpha/2.
	'''
	ok = series.values > 0.0
	if np.sum(ok) < 2:
		raise InsufficientDataError("insufficient data: fewer than 2 positive MSD values")

	slope,intercept = np.polyfit(np.log(series.abscissae[ok]),np.log(series.values[ok]),1)

	series.alpha     = float(slope)
	series.hurst     = float(slope)/2.0
	series.intercept = float(intercept)
	return series.alpha,series.hurst
#=====================================================================
