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
from numba import njit
from scipy.spatial.distance import directed_hausdorff

#=================== Errors and warnings ===================================
class MacrotrackError(RuntimeError):
	"""Base class of the runtime failures. exit_code is used by the CLI."""
	exit_code = 1

class InputError(MacrotrackError):
	exit_code = 2

class InsufficientDataError(MacrotrackError):
	exit_code = 3

class BoundaryContactError(MacrotrackError):
	exit_code = 4

class ConvergenceError(MacrotrackError):
	exit_code = 5

	def __init__(self,message,residual=np.nan):
		super().__init__(message)
		self.residual = residual

class DegenerateCurveError(MacrotrackError):
	exit_code = 1

class MacrotrackWarning(UserWarning):
	"""Recoverable data problems: duplicated points, samples out of the domain, etc."""
	pass
#===========================================================================


#=================== Tridiagonal solver ====================================
@njit(cache=True)
def _thomas(lower,diag,upper,rhs):
	n = diag.shape[0]
	m = rhs.shape[1]
	cp = np.empty(n)
	dp = np.empty((n,m))

	cp[0] = upper[0]/diag[0]
	for k in range(m):
		dp[0,k] = rhs[0,k]/diag[0]

	for i in range(1,n):
		den   = diag[i] - lower[i]*cp[i-1]
		cp[i] = upper[i]/den
		for k in range(m):
			dp[i,k] = (rhs[i,k] - lower[i]*dp[i-1,k])/den

	x = np.empty((n,m))
	for k in range(m):
		x[n-1,k] = dp[n-1,k]
	for i in range(n-2,-1,-1):
		for k in range(m):
			x[i,k] = dp[i,k] - cp[i]*x[i+1,k]
	return x

def ThomasSolve(lower,diag,upper,rhs):
	"""Solve the tridiagonal system by the Thomas algorithm.

	Row i reads  lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i].
	lower[0] and upper[-1] are ignored. rhs may hold several columns
	(one per coordinate), they share the elimination.
	"""
	lower = np.ascontiguousarray(lower,dtype=np.float64)
	diag  = np.ascontiguousarray(diag, dtype=np.float64)
	upper = np.ascontiguousarray(upper,dtype=np.float64)
	rhs   = np.asarray(rhs,dtype=np.float64)

	assert lower.shape == diag.shape == upper.shape, "Diagonals must have equal length"
	assert rhs.shape[0] == diag.shape[0], "Right hand side does not match the system"

	if rhs.ndim == 1:
		return _thomas(lower,diag,upper,np.ascontiguousarray(rhs[:,None]))[:,0]
	return _thomas(lower,diag,upper,np.ascontiguousarray(rhs))
#===========================================================================


#=================== Geometry ==============================================
def Perp(v):
	"""Rotation by -90 degrees, (a,b) -> (b,-a). Unit normal of a unit tangent."""
	v = np.asarray(v)
	return np.stack([v[...,1],-v[...,0]],axis=-1)

def Cross(a,b):
	return a[...,0]*b[...,1] - a[...,1]*b[...,0]

def SegmentCrossings(a):
	'''
	Pairs (i,j), j > i+1, of elements of the polyline a that properly cross.
	Element i joins points i-1 and i (1-based element numbering as in the curve).
	This is the O(n^2) reference used to verify the grid detector.
	'''
	p = a[:-1]
	q = a[1:]
	d = q - p
	N = len(d)

	pairs = []
	for i in range(N):
		j  = np.arange(i+2,N)
		if len(j) == 0:
			break
		r  = d[i]
		s  = d[j]
		den = Cross(np.broadcast_to(r,s.shape),s)
		qp  = p[j] - p[i]
		with np.errstate(divide="ignore",invalid="ignore"):
			t = Cross(qp,s)/den
			u = Cross(qp,np.broadcast_to(r,s.shape))/den
		hit = (den != 0.0) & (t > 0.0) & (t < 1.0) & (u > 0.0) & (u < 1.0)
		for k in j[hit]:
			pairs.append((i+1,int(k)+1))
	return pairs

def PointToPolyline(points,polyline):
	'''
	Distance of every point to the polyline.
	'''
	p = polyline[:-1]
	d = polyline[1:] - p
	dd = np.einsum("ij,ij->i",d,d)
	dd[dd == 0.0] = 1.0

	dist = np.empty(len(points))
	for k,x in enumerate(points):
		t = np.clip(np.einsum("ij,ij->i",x - p,d)/dd,0.0,1.0)
		c = p + t[:,None]*d
		dist[k] = np.sqrt(np.min(np.sum((x - c)**2,axis=1)))
	return dist

def PolylineDistance(points,polyline):
	"""Mean point-to-polyline distance."""
	return float(np.mean(PointToPolyline(points,polyline)))

def Hausdorff(a,b):
	return max(directed_hausdorff(a,b)[0],directed_hausdorff(b,a)[0])
#===========================================================================


if __name__ == "__main__":
	"""
	Test the crossing reference on a figure-eight
	"""
	import matplotlib
	matplotlib.use("SVG")
	import matplotlib.pyplot as plt

	file_plot = "./Crossings.svg"

	s  = np.linspace(0,2*np.pi,200)
	xy = np.column_stack((np.sin(s),np.sin(s)*np.cos(s)))

	pairs = SegmentCrossings(xy)
	print("Crossings found: {0}".format(len(pairs)))

	plt.figure(0)
	plt.plot(xy[:,0],xy[:,1],"-",color="lightblue")
	for i,j in pairs:
		plt.plot(xy[[i-1,i,j-1,j],0],xy[[i-1,i,j-1,j],1],"r*")
	plt.xlabel("x")
	plt.ylabel("y")
	plt.savefig(file_plot,bbox_inches='tight')
	plt.close(0)
