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
from __future__ import absolute_import, unicode_literals, print_function
import os
import json
import warnings
import numpy as np
import pandas as pn
import h5py
from concurrent.futures import ThreadPoolExecutor

import matplotlib
matplotlib.use('SVG')
import matplotlib.pyplot as plt

#------------ Local libraries ------------------------------------------
from macrotrack.Functions import MacrotrackError,InputError,InsufficientDataError,DegenerateCurveError
from macrotrack.Functions import MacrotrackWarning,SegmentCrossings,PolylineDistance
from macrotrack.Trajectories import LoadTrajectories,DiscreteCurve
from macrotrack.Segments import SegmentLedger
from macrotrack.Evolution import EvolutionParams,SmoothTrajectory,SmoothingResult
from macrotrack.Intersections import DetectSelfIntersections
from macrotrack.Diffusion import ExtractRandomByDisappearance,ExtractRandomBySelfIntersection
from macrotrack.Diffusion import Eamsd,Eatamsd,FitHurst
from macrotrack.Velocity import RedistributeTime,ComputeVelocities,VelocitySamples
from macrotrack.Reconstruction import DomainMask,RasterizeSamples,RepairLipschitz
from macrotrack.Reconstruction import BuildDirichletTrace,SolveLaplace,Recombine,FIELDS

#------- Deterministic SVG output ---------
matplotlib.rcParams["svg.hashsalt"] = "macrotrack"
SVG_METADATA  = {"Date":None}
FLOAT_FORMAT  = "%.10g"


class PipelineConfig(object):
	'''
	All the knobs of a run. Defaults live in DEFAULTS; a JSON file and
	then explicit keyword arguments override them.
	'''
	DEFAULTS = {
		#------ Input/output -------
		"trajectories":None,
		"mask":None,
		"velocities":None,
		"dir_out":"./Output",
		#------ Acquisition -------
		"scale":0.319489,          # micrometres per pixel
		"dT":2.5,                  # minutes between frames
		#------ Curve evolution ---
		"hbar":1.0,                # micrometres
		"delta_min":0.003,
		"delta_max":0.01,
		"lambda_max":20.0,
		"tau":1e-6,
		"omega":50.0,
		"extra_steps":50,
		"adaptive":False,
		"max_iterations":200000,
		"stopping":"intersections",
		"hausdorff_tol":0.00065,
		"length_unit":1000.0,      # micrometres
		#------ Random motion ------
		"method":"disappearance",
		#------ Reconstruction -----
		"downscale":1,
		"tol":1e-8,
		"max_sweeps":1000000,
		"relaxation":1.5,
		#------ Run ---------------
		"threads":1,
		"seed":0,
		"debug":False,
		}

	def __init__(self,**kwargs):
		unknown = set(kwargs.keys()) - set(self.DEFAULTS.keys())
		assert len(unknown) == 0, "Unknown configuration key(s): {0}".format(",".join(sorted(unknown)))

		values = dict(self.DEFAULTS)
		values.update({k:v for k,v in kwargs.items() if v is not None})
		for key,value in values.items():
			setattr(self,key,value)

		assert self.scale > 0.0, "scale must be positive"
		assert self.dT > 0.0, "dT must be positive"
		assert self.hbar > 0.0, "hbar must be positive"
		assert self.method in ["disappearance","intersections"], "method must be disappearance or intersections"
		assert int(self.downscale) >= 1, "downscale must be a positive integer"
		assert self.tol > 0.0, "tol must be positive"
		assert 0.0 < self.relaxation < 2.0, "relaxation must lie in (0,2)"
		assert int(self.threads) >= 1, "threads must be a positive integer"

		#------ Validates the evolution knobs -------
		self.evolution_params()

	@classmethod
	def from_json(cls,file_json,**kwargs):
		if not os.path.isfile(file_json):
			raise InputError("Configuration file not found: {0}".format(file_json))
		try:
			with open(file_json,"r") as f:
				values = json.load(f)
		except ValueError as error:
			raise InputError("Invalid configuration file {0}: {1}".format(file_json,error))
		values.update({k:v for k,v in kwargs.items() if v is not None})
		return cls(**values)

	def evolution_params(self):
		return EvolutionParams(
			delta_min=self.delta_min,
			delta_max=self.delta_max,
			lambda_max=self.lambda_max,
			tau=self.tau,
			omega=self.omega,
			extra_steps=self.extra_steps,
			adaptive=self.adaptive,
			max_iterations=self.max_iterations,
			stopping=self.stopping,
			hausdorff_tol=self.hausdorff_tol,
			length_unit=self.length_unit)

	def to_dict(self):
		return {key:getattr(self,key) for key in self.DEFAULTS.keys()}


class Pipeline(object):
	'''
	Driver of the analysis: smoothing, random motion statistics,
	velocities and field reconstruction.
	'''
	DEFAULTS = PipelineConfig.DEFAULTS

	def __init__(self,config=None,**kwargs):
		if config is None:
			config = PipelineConfig(**kwargs)
		self.config  = config
		self.dir_out = config.dir_out
		self.params  = config.evolution_params()

		os.makedirs(self.dir_out,exist_ok=True)

		self.file_curves     = os.path.join(self.dir_out,"Curves.h5")
		self.file_velocities = os.path.join(self.dir_out,"velocities.csv")

		self.trajectories = None
		self.results      = None
		self.failures     = {}
		self.subs         = None
		self.msd          = None
		self.eamsd        = None
		self.samples      = None
		self.field        = None
		self.mask         = None
		self.scalars      = None

	def _map(self,function,items):
		'''
		Applies function to every item. Results keep the input order.
		'''
		if int(self.config.threads) > 1 and len(items) > 1:
			with ThreadPoolExecutor(max_workers=int(self.config.threads)) as executor:
				return list(executor.map(function,items))
		return [function(item) for item in items]

	#======================= Data =========================================
	def load_data(self,file_data=None):
		file_data = file_data or self.config.trajectories
		if file_data is None:
			raise InputError("A trajectories file is required")

		print("Loading trajectories ...")
		self.trajectories = LoadTrajectories(file_data,scale=self.config.scale,dT=self.config.dT)
		print("Data correctly loaded: {0} track(s)".format(len(self.trajectories)))

	def load_curves(self):
		'''
		Reads the smoothing results of a previous run.
		'''
		assert self.trajectories is not None, "Load the trajectories first"
		if not os.path.isfile(self.file_curves):
			raise InputError("Smoothing results not found: {0}".format(self.file_curves))

		print("Loading smoothed curves ...")
		self.results = []
		with h5py.File(self.file_curves,'r') as hf:
			self.failures = json.loads(hf.attrs.get("failed","{}"))
			for trajectory in self.trajectories:
				name = str(trajectory.id)
				if name in self.failures:
					print("Track {0} was not smoothed, skipped".format(name))
					continue
				if name not in hf:
					raise InputError("Track {0} is missing in {1}".format(name,self.file_curves))
				grp = hf[name]
				ledger = SegmentLedger(original=grp["original"][:],
						knots=grp["knots"][:],
						time_budget=grp["time_budget"][:],
						source_index=grp["source_index"][:],
						lengths=grp["lengths"][:],
						discrete=grp["discrete_lengths"][:],
						disappeared=grp["disappeared"][:].astype(bool))
				curve = DiscreteCurve(grp["smoothed"][:],grp.attrs["hbar"])
				self.results.append(SmoothingResult(trajectory,curve,ledger,
						int(grp.attrs["steps"]),bool(grp.attrs["converged"]),{},
						grp.attrs["length_unit"]))
	#======================================================================

	#======================= Smoothing ====================================
	def _smooth_one(self,trajectory):
		print("Smoothing track {0} ...".format(trajectory.id))
		try:
			return SmoothTrajectory(trajectory,self.params,self.config.hbar,debug=self.config.debug)
		except MacrotrackError as error:
			warnings.warn("Track {0} could not be smoothed: {1}".format(
				trajectory.id,error),MacrotrackWarning)
			return error

	def smooth(self):
		'''
		Smooths every track. A track failing with a runtime error is recorded
		in self.failures and left out of the results.
		'''
		assert self.trajectories is not None, "Load the trajectories first"
		outcomes = self._map(self._smooth_one,self.trajectories)

		self.results  = [o for o in outcomes if isinstance(o,SmoothingResult)]
		self.failures = {str(t.id):str(o) for t,o in zip(self.trajectories,outcomes)
						if not isinstance(o,SmoothingResult)}

		print(50*"=")
		for result in self.results:
			print("Track {0}: {1} steps, converged: {2}".format(
				result.trajectory.id,result.steps,result.converged))
		for name,message in self.failures.items():
			print("Track {0}: failed, {1}".format(name,message))
		print(50*"=")

		if len(self.results) == 0:
			raise DegenerateCurveError("No track could be smoothed")

	def save_curves(self):
		'''
		Saves the smoothed curves (CSV and h5) and the run metadata.
		'''
		print("Saving smoothed curves ...")
		frames   = []
		metadata = {"config":self.config.to_dict(),"tracks":[],
			"failed":[{"track_id":name,"error":message} for name,message in self.failures.items()]}

		with h5py.File(self.file_curves,'w') as hf:
			hf.attrs["failed"] = json.dumps(self.failures)
			for result in self.results:
				curve,ledger = result.curve,result.ledger
				name = str(result.trajectory.id)

				frames.append(pn.DataFrame({
					"track_id":name,
					"point_index":np.arange(len(curve)),
					"x":curve.points[:,0],
					"y":curve.points[:,1],
					"segment_id":SegmentIds(ledger,len(curve))}))

				grp = hf.create_group(name)
				grp.create_dataset("original",data=ledger.original)
				grp.create_dataset("smoothed",data=curve.points)
				grp.create_dataset("knots",data=ledger.knots)
				grp.create_dataset("lengths",data=ledger.lengths)
				grp.create_dataset("discrete_lengths",data=ledger.discrete)
				grp.create_dataset("disappeared",data=ledger.disappeared.astype(np.int8))
				grp.create_dataset("time_budget",data=ledger.time_budget)
				grp.create_dataset("source_index",data=ledger.source_index)
				grp.attrs["steps"]       = result.steps
				grp.attrs["converged"]   = result.converged
				grp.attrs["hbar"]        = curve.hbar
				grp.attrs["length_unit"] = result.scale

				metadata["tracks"].append({
					"track_id":name,
					"steps":int(result.steps),
					"converged":bool(result.converged),
					"wall_time":float(result.history.get("wall_time",np.nan)),
					"points":int(len(curve)),
					"disappeared_segments":int(np.sum(ledger.disappeared)),
					"self_intersections":len(DetectSelfIntersections(curve.points,curve.hbar)),
					"crossings":len(SegmentCrossings(curve.points)),
					"distance_to_original":PolylineDistance(curve.points,result.trajectory.points)})

		pn.concat(frames,ignore_index=True).to_csv(os.path.join(self.dir_out,"smoothed.csv"),
			index=False,float_format=FLOAT_FORMAT)

		with open(os.path.join(self.dir_out,"run_metadata.json"),"w") as f:
			json.dump(metadata,f,indent=2)

		if self.config.debug:
			ledgers = []
			spans   = []
			for result in self.results:
				df = result.ledger.to_frame()
				df.insert(0,"track_id",str(result.trajectory.id))
				ledgers.append(df)
				sp = pn.DataFrame(result.history.get("spans",[]),columns=["step","i1","i2"])
				sp.insert(0,"track_id",str(result.trajectory.id))
				spans.append(sp)
			pn.concat(ledgers,ignore_index=True).to_csv(os.path.join(self.dir_out,"ledgers.csv"),
				index=False,float_format=FLOAT_FORMAT)
			pn.concat(spans,ignore_index=True).to_csv(os.path.join(self.dir_out,"spans.csv"),
				index=False)
	#======================================================================

	#======================= Random motion ================================
	def analyze(self):
		print("Extracting random parts by {0} ...".format(self.config.method))
		self.subs = []
		if self.config.method == "disappearance":
			assert self.results is not None, "Smooth or load the curves first"
			for result in self.results:
				self.subs.extend(ExtractRandomByDisappearance(result.ledger,result.trajectory))
		else:
			assert self.trajectories is not None, "Load the trajectories first"
			for trajectory in self.trajectories:
				self.subs.extend(ExtractRandomBySelfIntersection(trajectory,self.config.hbar))

		if len(self.subs) == 0:
			raise InsufficientDataError("insufficient data: no random part with at least 5 points")
		print("Random parts found: {0}".format(len(self.subs)))

		self.msd = Eatamsd(self.subs)
		FitHurst(self.msd)

		self.eamsd = Eamsd(self.subs)
		try:
			FitHurst(self.eamsd)
		except InsufficientDataError:
			warnings.warn("EAMSD has fewer than 2 positive values and was not fitted",MacrotrackWarning)

		print(50*"=")
		for name,series in [("EATAMSD",self.msd),("EAMSD",self.eamsd)]:
			print("{0} alpha: {1:2.4f}  H: {2:2.4f}  ({3})".format(
				name,series.alpha,series.hurst,series.regime))
		print(50*"=")

	def save_msd(self):
		print("Saving mean squared displacements ...")
		rows = []
		for sub in self.subs:
			rows.append(pn.DataFrame({
				"source_id":str(sub.source_id),
				"method":sub.method,
				"point_index":sub.first + np.arange(len(sub)),
				"frame":sub.frames,
				"x":sub.points[:,0],
				"y":sub.points[:,1]}))
		pn.concat(rows,ignore_index=True).to_csv(os.path.join(self.dir_out,"random_parts.csv"),
			index=False,float_format=FLOAT_FORMAT)

		self.msd.to_frame().to_csv(os.path.join(self.dir_out,"msd.csv"),
			index=False,float_format=FLOAT_FORMAT)
		self.eamsd.to_frame().to_csv(os.path.join(self.dir_out,"eamsd.csv"),
			index=False,float_format=FLOAT_FORMAT)

		fit = pn.DataFrame({
			"estimator":["EATAMSD","EAMSD"],
			"alpha":[self.msd.alpha,self.eamsd.alpha],
			"hurst":[self.msd.hurst,self.eamsd.hurst],
			"intercept":[self.msd.intercept,self.eamsd.intercept],
			"D_um2_per_min":[self.msd.diffusion_coefficient,self.eamsd.diffusion_coefficient],
			"regime":[self.msd.regime,self.eamsd.regime],
			"points":[len(self.msd),len(self.eamsd)]})
		fit.to_csv(os.path.join(self.dir_out,"msd_fit.txt"),index=False,float_format=FLOAT_FORMAT)

	def plot_msd(self):
		print("Plotting mean squared displacements ...")
		file_plot = os.path.join(self.dir_out,"msd.svg")

		plt.figure(0)
		for series,color,label in [(self.msd,"black","EATAMSD"),(self.eamsd,"grey","EAMSD")]:
			ok = series.values > 0.0
			t  = series.abscissae[ok]
			plt.scatter(np.log(t),np.log(series.values[ok]),s=8,color=color,label=label)
			if np.isfinite(series.alpha):
				plt.plot(np.log(t),series.intercept + series.alpha*np.log(t),"-",color=color,
					label=r"$\alpha$ = {0:2.3f}".format(series.alpha))
		plt.xlabel("log time [min]")
		plt.ylabel(r"log MSD [$\mu$m$^2$]")
		plt.legend(loc="best")
		plt.savefig(file_plot,bbox_inches='tight',metadata=SVG_METADATA)
		plt.close(0)
	#======================================================================

	#======================= Velocities ===================================
	def _velocities_one(self,result):
		try:
			ledger = RedistributeTime(result.ledger)
		except DegenerateCurveError:
			warnings.warn("Track {0} has no live segments, no velocities".format(
				result.trajectory.id),MacrotrackWarning)
			return None
		return ComputeVelocities(result.curve,ledger,source_id=str(result.trajectory.id))

	def velocities(self):
		assert self.results is not None, "Smooth or load the curves first"
		print("Computing velocities ...")
		samples = [s for s in self._map(self._velocities_one,self.results) if s is not None]
		self.samples = VelocitySamples.concatenate(samples)
		print("Velocity samples: {0}".format(len(self.samples)))

	def save_velocities(self):
		print("Saving velocities ...")
		self.samples.to_frame().to_csv(self.file_velocities,index=False,float_format=FLOAT_FORMAT)

	def load_velocities(self,file_velocities=None):
		file_velocities = file_velocities or self.config.velocities or self.file_velocities
		if not os.path.isfile(file_velocities):
			raise InputError("Velocities file not found: {0}".format(file_velocities))
		data = pn.read_csv(file_velocities,dtype={"track_id":str})
		missing = [c for c in ["track_id","x","y","vx","vy"] if c not in data.columns]
		if len(missing) > 0:
			raise InputError("Missing column(s) {0} in {1}".format(",".join(missing),file_velocities))
		self.samples = VelocitySamples.from_frame(data)
	#======================================================================

	#======================= Reconstruction ===============================
	def reconstruct(self,file_mask=None):
		'''
		Dense vector field from the velocity samples on the mask domain.
		'''
		file_mask = file_mask or self.config.mask
		if file_mask is None:
			raise InputError("A mask file is required for the reconstruction")
		assert self.samples is not None, "Compute or load the velocities first"

		print("Building reconstruction domain ...")
		self.mask = DomainMask.from_pgm(file_mask,self.config.scale,int(self.config.downscale))
		spg = RasterizeSamples(self.samples,self.mask)
		spg = RepairLipschitz(spg,self.mask)
		self.spg   = spg
		self.trace = BuildDirichletTrace(spg)

		def solve(field):
			return SolveLaplace(self.mask,self.trace,field,
					tol=self.config.tol,
					max_sweeps=int(self.config.max_sweeps),
					omega=self.config.relaxation)

		print("Solving Laplace problems ...")
		vx,vy,speed = self._map(solve,[0,1,2])

		print(50*"=")
		for name,scalar in zip(FIELDS,[vx,vy,speed]):
			print("{0}: {1} sweeps, residual {2:.3g}".format(name,scalar.sweeps,scalar.residual))
		print(50*"=")

		max_speed  = np.max(spg.values[2][spg.squares])
		self.field = Recombine(vx,vy,speed,max_speed)
		self.scalars = {"vx":vx,"vy":vy,"speed":speed}

	def save_field(self):
		print("Saving field ...")
		self.field.to_frame().to_csv(os.path.join(self.dir_out,"field.csv"),
			index=False,float_format=FLOAT_FORMAT)
	#======================================================================

	#======================= Plots ========================================
	def plot_curves(self):
		print("Plotting curves ...")
		file_plot = os.path.join(self.dir_out,"curves.svg")

		plt.figure(0)
		for result in self.results:
			plt.plot(result.trajectory.points[:,0],result.trajectory.points[:,1],
				"-",lw=0.8,color="lightblue")
			plt.plot(result.curve.points[:,0],result.curve.points[:,1],"-",lw=0.8,color="green")
		if self.subs is not None:
			for sub in self.subs:
				plt.plot(sub.points[:,0],sub.points[:,1],"-",lw=0.8,color="red")
		plt.gca().set_aspect("equal")
		plt.gca().invert_yaxis()
		plt.xlabel(r"x [$\mu$m]")
		plt.ylabel(r"y [$\mu$m]")
		plt.savefig(file_plot,bbox_inches='tight',metadata=SVG_METADATA)
		plt.close(0)

	def plot_field(self,stride=1):
		print("Plotting field ...")
		mask  = self.mask
		extent = [0,mask.shape[0]*mask.h,mask.shape[1]*mask.h,0]

		#------ Sparse samples --------
		plt.figure(0)
		plt.imshow(mask.inside.T,cmap="Greys_r",extent=extent,vmin=-1,vmax=1)
		plt.quiver(self.samples.positions[:,0],self.samples.positions[:,1],
			self.samples.velocities[:,0],-self.samples.velocities[:,1],
			self.samples.speeds,cmap="jet")
		plt.colorbar(label=r"speed [$\mu$m/min]")
		plt.savefig(os.path.join(self.dir_out,"samples.svg"),bbox_inches='tight',metadata=SVG_METADATA)
		plt.close(0)

		#------ Reconstructed field ---
		df = self.field.to_frame()
		df = df[(df["i"] % stride == 0) & (df["j"] % stride == 0)]
		plt.figure(0)
		plt.imshow(mask.inside.T,cmap="Greys_r",extent=extent,vmin=-1,vmax=1)
		plt.quiver(df["x"],df["y"],df["vx"],-df["vy"],df["speed"],cmap="jet")
		plt.colorbar(label=r"speed [$\mu$m/min]")
		plt.savefig(os.path.join(self.dir_out,"field.svg"),bbox_inches='tight',metadata=SVG_METADATA)
		plt.close(0)

		#------ Components ------------
		for name,values in [("vx",self.field.vx),("vy",self.field.vy),("speed",self.field.speed)]:
			plt.figure(0)
			plt.imshow(np.where(self.field.domain,values,np.nan).T,cmap="jet",
				extent=[0,(mask.shape[0]+1)*mask.h,(mask.shape[1]+1)*mask.h,0])
			plt.colorbar(label=name)
			plt.savefig(os.path.join(self.dir_out,"field_{0}.svg".format(name)),
				bbox_inches='tight',metadata=SVG_METADATA)
			plt.close(0)
	#======================================================================


def SegmentIds(ledger,n_points):
	'''
	1-based segment of every grid point. A live segment owns its
	points knot+1 .. next knot, the first point goes to the first live segment.
	'''
	ids  = np.zeros(n_points,dtype=int)
	live = np.where(ledger.live)[0]
	for j in live:
		ids[ledger.knots[j]+1:ledger.knots[j+1]+1] = j + 1
	ids[0] = live[0] + 1 if len(live) > 0 else 1
	return ids
