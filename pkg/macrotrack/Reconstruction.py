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
import os
import warnings
import numpy as np
import pandas as pn
from numba import njit
from scipy import ndimage

from macrotrack.Functions import InputError,BoundaryContactError,ConvergenceError
from macrotrack.Functions import MacrotrackWarning

#------- Order of the three scalar problems -------
FIELDS = ("vx","vy","speed")

#================== Mask input/output ===========================
def ReadPGM(file_pgm):
	'''
	Plain text PGM (P2). Returns the image as an array of shape (rows,columns).
	'''
	if not os.path.isfile(file_pgm):
		raise InputError("Mask file not found: {0}".format(file_pgm))

	tokens = []
	with open(file_pgm,"r") as f:
		for line in f:
			tokens.extend(line.split("#")[0].split())

	if len(tokens) < 4 or tokens[0] != "P2":
		raise InputError("{0} is not a plain PGM (P2) file".format(file_pgm))
	try:
		width,height,maxval = int(tokens[1]),int(tokens[2]),int(tokens[3])
		values = np.array(tokens[4:],dtype=int)
	except ValueError:
		raise InputError("Invalid PGM content in {0}".format(file_pgm))

	if len(values) != width*height or maxval <= 0:
		raise InputError("PGM {0}: expected {1} values, found {2}".format(
			file_pgm,width*height,len(values)))
	return values.reshape((height,width))

def WritePGM(file_pgm,image,maxval=255):
	image = np.asarray(image,dtype=int)
	with open(file_pgm,"w") as f:
		f.write("P2\n{0} {1}\n{2}\n".format(image.shape[1],image.shape[0],maxval))
		for row in image:
			f.write(" ".join(str(v) for v in row) + "\n")
#================================================================


def VertexCounts(cells):
	"""Number of flagged cells around every vertex, shape (nx+1,ny+1)."""
	P = np.pad(cells.astype(int),1)
	return P[:-1,:-1] + P[1:,:-1] + P[:-1,1:] + P[1:,1:]


class DomainMask(object):
	'''
	Cells (i,j) of side h, i along x and j along the image rows.
	Cell (i,j) covers [i*h,(i+1)*h) x [j*h,(j+1)*h).
	Only the largest 4-connected inside component is kept.
	'''
	def __init__(self,inside,h):
		assert h > 0.0, "Cell size must be positive"
		inside = np.asarray(inside,dtype=bool)

		labels,n_labels = ndimage.label(inside)
		if n_labels == 0:
			raise InputError("The mask has no inside cells")
		if n_labels > 1:
			sizes = np.bincount(labels.ravel())[1:]
			keep  = np.argmax(sizes) + 1
			warnings.warn("Mask has {0} components, only the largest ({1} cells) is used".format(
				n_labels,sizes[keep-1]),MacrotrackWarning)
			inside = labels == keep

		self.inside = inside
		self.h      = h

	@property
	def shape(self):
		return self.inside.shape

	@property
	def vertex_counts(self):
		return VertexCounts(self.inside)

	@property
	def domain(self):
		"""Vertices touching at least one inside cell."""
		return self.vertex_counts > 0

	@property
	def boundary(self):
		"""Vertices on the outer boundary."""
		counts = self.vertex_counts
		return (counts > 0) & (counts < 4)

	@classmethod
	def from_image(cls,image,pixel_size,downscale=1):
		assert downscale >= 1, "downscale must be a positive integer"
		inside = np.asarray(image).T > 0
		if downscale > 1:
			nx = inside.shape[0]//downscale
			ny = inside.shape[1]//downscale
			blocks = inside[:nx*downscale,:ny*downscale].reshape((nx,downscale,ny,downscale))
			inside = blocks.mean(axis=(1,3)) >= 0.5
		return cls(inside,pixel_size*downscale)

	@classmethod
	def from_pgm(cls,file_pgm,pixel_size,downscale=1):
		return cls.from_image(ReadPGM(file_pgm),pixel_size,downscale)


class SparseSampleGrid(object):
	def __init__(self,squares,values,skipped=0):
		self.squares = np.asarray(squares,dtype=bool)
		self.values  = np.asarray(values,dtype=np.float64)
		self.skipped = skipped

	def copy(self):
		return SparseSampleGrid(self.squares.copy(),self.values.copy(),self.skipped)


def RasterizeSamples(samples,mask):
	'''
	Every cell holding samples becomes a Dirichlet square with the mean vx,
	the mean vy and the mean speed of its samples.
	'''
	nx,ny = mask.shape
	cell  = np.floor(samples.positions/mask.h).astype(np.int64)
	ok = (cell[:,0] >= 0) & (cell[:,0] < nx) & (cell[:,1] >= 0) & (cell[:,1] < ny)
	ok[ok] = mask.inside[cell[ok,0],cell[ok,1]]

	skipped = int(np.sum(~ok))
	if skipped > 0:
		warnings.warn("{0} sample(s) outside the domain were skipped".format(skipped),
			MacrotrackWarning)

	flat   = cell[ok,0]*ny + cell[ok,1]
	counts = np.bincount(flat,minlength=nx*ny)
	values = np.zeros((3,nx*ny))
	data   = [samples.velocities[ok,0],samples.velocities[ok,1],samples.speeds[ok]]
	for f in range(3):
		sums = np.bincount(flat,weights=data[f],minlength=nx*ny)
		values[f,counts > 0] = sums[counts > 0]/counts[counts > 0]

	return SparseSampleGrid((counts > 0).reshape((nx,ny)),values.reshape((3,nx,ny)),skipped)


def CornerContacts(squares):
	"""Lower left cells (i,j) of the 2x2 blocks whose squares meet only at a corner."""
	S = squares
	diag = S[:-1,:-1] & S[1:,1:] & ~S[1:,:-1] & ~S[:-1,1:]
	anti = S[1:,:-1] & S[:-1,1:] & ~S[:-1,:-1] & ~S[1:,1:]
	return np.argwhere(diag | anti)


def RepairLipschitz(spg,mask):
	'''
	Completes every 2x2 block where two squares share only a vertex, with the
	mean of the two diagonal squares, until no such block is left.
	'''
	new = spg.copy()
	S,V = new.squares,new.values
	while True:
		blocks = CornerContacts(S)
		if len(blocks) == 0:
			break
		for i,j in blocks:
			if S[i,j] and S[i+1,j+1] and not S[i+1,j] and not S[i,j+1]:
				mean  = 0.5*(V[:,i,j] + V[:,i+1,j+1])
				cells = [(i+1,j),(i,j+1)]
			elif S[i+1,j] and S[i,j+1] and not S[i,j] and not S[i+1,j+1]:
				mean  = 0.5*(V[:,i+1,j] + V[:,i,j+1])
				cells = [(i,j),(i+1,j+1)]
			else:
				continue
			for a,b in cells:
				if not mask.inside[a,b]:
					raise BoundaryContactError("sample too close to boundary: repair of cell ({0},{1}) leaves the domain".format(a,b))
				S[a,b]   = True
				V[:,a,b] = mean

	touching = (VertexCounts(S) > 0) & mask.boundary
	if np.any(touching):
		i,j = np.argwhere(touching)[0]
		raise BoundaryContactError("sample too close to boundary: vertex ({0},{1})".format(i,j))
	return new


class DirichletTrace(object):
	'''
	Prescribed values at the vertices of the Dirichlet squares,
	linear along every edge of their boundary.
	'''
	def __init__(self,fixed,values):
		self.fixed  = np.asarray(fixed,dtype=bool)
		self.values = np.asarray(values,dtype=np.float64)


def BuildDirichletTrace(spg):
	'''
	Vertex values are the mean of the adjacent squares.
	'''
	counts = VertexCounts(spg.squares)
	fixed  = counts > 0
	values = np.full((3,) + counts.shape,np.nan)
	for f in range(3):
		P = np.pad(np.where(spg.squares,spg.values[f],0.0),1)
		sums = P[:-1,:-1] + P[1:,:-1] + P[:-1,1:] + P[1:,1:]
		values[f,fixed] = sums[fixed]/counts[fixed]
	return DirichletTrace(fixed,values)


class ScalarField(object):
	def __init__(self,values,domain,fixed,residual,sweeps,h=1.0):
		self.h        = h
		self.values   = values
		self.domain   = domain
		self.fixed    = fixed
		self.residual = residual
		self.sweeps   = sweeps


class VectorField(object):
	def __init__(self,vx,vy,speed,domain,h):
		self.vx     = vx
		self.vy     = vy
		self.speed  = speed
		self.domain = domain
		self.h      = h

	def to_frame(self):
		i,j = np.nonzero(self.domain)
		return pn.DataFrame({"i":i,"j":j,
				"x":i*self.h,"y":j*self.h,
				"vx":self.vx[i,j],"vy":self.vy[i,j],
				"speed":self.speed[i,j]})


def EdgeWeights(inside):
	'''
	Weights of the four edges leaving every vertex: half the number of
	inside cells along the edge. Zero flux crosses the outer boundary.
	'''
	P = np.pad(inside.astype(np.float64),1)
	wE = 0.5*(P[1:,:-1]  + P[1:,1:])
	wW = 0.5*(P[:-1,:-1] + P[:-1,1:])
	wN = 0.5*(P[:-1,1:]  + P[1:,1:])
	wS = 0.5*(P[:-1,:-1] + P[1:,:-1])
	return wE,wW,wN,wS


@njit(cache=True,nogil=True)
def _residual(U,fi,fj,wE,wW,wN,wS):
	res = 0.0
	for t in range(fi.shape[0]):
		i = fi[t] + 1
		j = fj[t] + 1
		ws  = wE[t] + wW[t] + wN[t] + wS[t]
		acc = wE[t]*U[i+1,j] + wW[t]*U[i-1,j] + wN[t]*U[i,j+1] + wS[t]*U[i,j-1]
		r = abs(acc/ws - U[i,j])
		if r > res:
			res = r
	return res

@njit(cache=True,nogil=True)
def _sor(U,fi,fj,wE,wW,wN,wS,omega,tol,max_sweeps):
	sweeps = 0
	res    = _residual(U,fi,fj,wE,wW,wN,wS)
	while res > tol and sweeps < max_sweeps:
		change = 0.0
		for t in range(fi.shape[0]):
			i = fi[t] + 1
			j = fj[t] + 1
			ws  = wE[t] + wW[t] + wN[t] + wS[t]
			acc = wE[t]*U[i+1,j] + wW[t]*U[i-1,j] + wN[t]*U[i,j+1] + wS[t]*U[i,j-1]
			r = acc/ws - U[i,j]
			if abs(r) > change:
				change = abs(r)
			U[i,j] += omega*r
		sweeps += 1
		if change <= tol:
			res = _residual(U,fi,fj,wE,wW,wN,wS)
	return sweeps,res


def SolveLaplace(mask,trace,field,tol=1e-8,max_sweeps=1000000,omega=1.5,reverse=False):
	'''
	Harmonic interpolation of one of the three fields (0: vx, 1: vy, 2: speed)
	on the vertices of the domain. Dirichlet vertices keep their value and
	the outer boundary carries zero flux.
	Relaxation sweeps run in lexicographic order, or the reverse one, until
	the largest residual is below tol times the range of the Dirichlet values.
	'''
	assert 0.0 < omega < 2.0, "Relaxation factor must lie in (0,2)"
	assert tol > 0.0, "Tolerance must be positive"

	domain = mask.domain
	fixed  = trace.fixed & domain
	if not np.any(fixed):
		raise InputError("No Dirichlet data: the problem is singular")

	g    = trace.values[field]
	gmin = np.min(g[fixed])
	gmax = np.max(g[fixed])
	scale = gmax - gmin if gmax > gmin else max(abs(gmax),1.0)

	free  = domain & ~fixed
	fi,fj = np.nonzero(free)
	if reverse:
		fi,fj = fi[::-1].copy(),fj[::-1].copy()

	U = np.zeros((domain.shape[0]+2,domain.shape[1]+2))
	inner = U[1:-1,1:-1]
	inner[fixed] = g[fixed]
	inner[free]  = np.mean(g[fixed])

	wE,wW,wN,wS = EdgeWeights(mask.inside)
	sweeps,res = _sor(U,fi.astype(np.int64),fj.astype(np.int64),
				wE[fi,fj],wW[fi,fj],wN[fi,fj],wS[fi,fj],
				omega,tol*scale,int(max_sweeps))

	if res > tol*scale:
		raise ConvergenceError("Laplace solver for {0} did not converge after {1} sweeps, residual {2:.3g}".format(
			FIELDS[field],sweeps,res),residual=res)

	values = np.where(domain,U[1:-1,1:-1],np.nan)
	return ScalarField(values,domain,fixed,res,sweeps,mask.h)


def Recombine(vx,vy,speed,max_speed,eps=1e-10):
	'''
	Direction from the two component fields, length from the speed field.
	Where the components cancel the vector is set to zero.
	'''
	L = speed.values.copy()
	negative = speed.domain & (L < 0.0)
	if np.any(negative):
		warnings.warn("{0} negative speed value(s) clamped to zero".format(np.sum(negative)),
			MacrotrackWarning)
		L[negative] = 0.0

	norm = np.sqrt(vx.values**2 + vy.values**2)
	ok   = vx.domain & (norm >= eps*max_speed) & (norm > 0.0)

	ux = np.zeros_like(L)
	uy = np.zeros_like(L)
	ux[ok] = L[ok]*vx.values[ok]/norm[ok]
	uy[ok] = L[ok]*vy.values[ok]/norm[ok]
	L = np.where(vx.domain,np.where(ok,L,0.0),np.nan)
	return VectorField(ux,uy,L,vx.domain,vx.h)
