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
import sys
import argparse

from macrotrack.Functions import MacrotrackError,InputError
from macrotrack.pipeline import Pipeline,PipelineConfig
from macrotrack.Fixtures import GenerateFixtures

DEFAULTS = PipelineConfig.DEFAULTS

def str2bool(value):
	if isinstance(value,bool):
		return value
	if value.lower() in ["true","yes","1"]:
		return True
	if value.lower() in ["false","no","0"]:
		return False
	raise argparse.ArgumentTypeError("Boolean value expected")

#------ flag, type, help -----------
IO_FLAGS = [
	("trajectories",str,"CSV with header track_id,frame,x,y in pixels"),
	("dir_out",str,"output directory"),
	("scale",float,"micrometres per pixel"),
	("dT",float,"minutes between frames"),
	("threads",int,"tracks processed concurrently"),
	("debug",str2bool,"write ledgers and self-intersection spans"),
	]

SMOOTH_FLAGS = [
	("hbar",float,"target spacing of the grid points [um]; cells of the self-intersection grids are 2*hbar"),
	("delta_min",float,"curvature weight of the whole curve, and of the extra steps in adaptive mode"),
	("delta_max",float,"curvature weight inside self-intersecting parts, adaptive mode only"),
	("lambda_max",float,"weight of the attraction towards the recorded segments"),
	("tau",float,"time step, in evolution length units"),
	("omega",float,"rate at which the grid points are spread uniformly along the curve"),
	("extra_steps",int,"steps performed once no self-intersection is left, before the final check"),
	("adaptive",str2bool,"use delta_max and lambda_max inside self-intersections with 6 point ramps, zero elsewhere"),
	("max_iterations",int,"cap on evolution steps per track"),
	("stopping",str,"stopping rule: intersections (none left plus extra steps) or hausdorff (curve stalls)"),
	("hausdorff_tol",float,"largest Hausdorff distance between consecutive curves that counts as stalled"),
	("length_unit",float,"micrometres per evolution length unit; tau, delta and omega refer to it"),
	]

ANALYZE_FLAGS = [
	("method",str,"random part extraction: disappearance (of recorded segments) or intersections (of the raw track)"),
	]

RECONSTRUCT_FLAGS = [
	("mask",str,"plain PGM (P2) mask, 0 outside and 255 inside"),
	("velocities",str,"velocities CSV (default: dir_out/velocities.csv)"),
	("downscale",int,"mask pixels per reconstruction cell along each axis"),
	("tol",float,"solver tolerance relative to the range of the Dirichlet values"),
	("max_sweeps",int,"cap on relaxation sweeps"),
	("relaxation",float,"over-relaxation factor, in (0,2)"),
	]

GROUPS = {
	"io"         :("input and output",IO_FLAGS),
	"smooth"     :("curve smoothing",SMOOTH_FLAGS),
	"analyze"    :("random motion",ANALYZE_FLAGS),
	"reconstruct":("field reconstruction",RECONSTRUCT_FLAGS),
	}

#------ command: description, groups ----------
COMMANDS = {
	"smooth"     :("Untie the loops of every track and write the smoothed curves.",
					["io","smooth"]),
	"analyze"    :("Extract the random parts and fit the mean square displacements.",
					["io","smooth","analyze"]),
	"velocities" :("Velocities along the smoothed curves of a previous smooth run.",
					["io"]),
	"reconstruct":("Attractant field on the mask domain from the velocity samples.",
					["io","reconstruct"]),
	"pipeline"   :("All the steps in a row.",
					["io","smooth","analyze","reconstruct"]),
	}

def command_flags(command):
	return [flag for group in COMMANDS[command][1] for flag in GROUPS[group][1]]

def build_parser():
	parser = argparse.ArgumentParser(prog="macrotrack",
		description="Smoothing of cell trajectories, random motion statistics and attractant field reconstruction.")
	subparsers = parser.add_subparsers(dest="command")

	for command,(description,groups) in COMMANDS.items():
		sub = subparsers.add_parser(command,help=description,description=description)
		sub.add_argument("--config",type=str,default=None,help="JSON file with configuration keys")
		for group in groups:
			title,flags = GROUPS[group]
			arguments = sub.add_argument_group(title)
			for name,kind,text in flags:
				arguments.add_argument("--" + name.replace("_","-"),dest=name,type=kind,default=None,
					help="{0} (default: {1})".format(text,DEFAULTS[name]))

	sub = subparsers.add_parser("gen-fixtures",help="Write the synthetic test datasets.")
	sub.add_argument("--out",type=str,required=True,help="output directory")
	sub.add_argument("--seed",type=int,default=DEFAULTS["seed"],
		help="random seed (default: {0})".format(DEFAULTS["seed"]))
	sub.add_argument("--scale",type=float,default=DEFAULTS["scale"],
		help="micrometres per pixel (default: {0})".format(DEFAULTS["scale"]))
	sub.add_argument("--dT",type=float,default=DEFAULTS["dT"],
		help="minutes between frames (default: {0})".format(DEFAULTS["dT"]))
	return parser


def make_config(args):
	values = {name:getattr(args,name) for name,_,_ in command_flags(args.command)}
	if args.config is not None:
		return PipelineConfig.from_json(args.config,**values)
	return PipelineConfig(**values)


def run(args):
	if args.command == "gen-fixtures":
		GenerateFixtures(args.out,seed=args.seed,scale=args.scale,dT=args.dT)
		return

	config   = make_config(args)
	pipeline = Pipeline(config)

	if args.command in ["reconstruct","pipeline"] and config.mask is None:
		raise InputError("A mask file is required for the reconstruction")
	if args.command in ["reconstruct","pipeline"] and not os.path.isfile(config.mask):
		raise InputError("Mask file not found: {0}".format(config.mask))

	if args.command == "reconstruct":
		pipeline.load_velocities()
		pipeline.reconstruct()
		pipeline.save_field()
		pipeline.plot_field()
		return

	pipeline.load_data()

	if args.command == "smooth":
		pipeline.smooth()
		pipeline.save_curves()
		pipeline.plot_curves()

	elif args.command == "analyze":
		if config.method == "disappearance":
			pipeline.load_curves()
		pipeline.analyze()
		pipeline.save_msd()
		pipeline.plot_msd()

	elif args.command == "velocities":
		pipeline.load_curves()
		pipeline.velocities()
		pipeline.save_velocities()

	elif args.command == "pipeline":
		pipeline.smooth()
		pipeline.save_curves()
		pipeline.analyze()
		pipeline.save_msd()
		pipeline.plot_msd()
		pipeline.plot_curves()
		pipeline.velocities()
		pipeline.save_velocities()
		pipeline.reconstruct()
		pipeline.save_field()
		pipeline.plot_field()


def main(argv=None):
	parser = build_parser()
	args   = parser.parse_args(argv)
	if args.command is None:
		parser.print_help()
		return 2

	try:
		run(args)
	except MacrotrackError as error:
		print("Error: {0}".format(error),file=sys.stderr)
		return error.exit_code
	except AssertionError as error:
		print("Invalid parameter: {0}".format(error),file=sys.stderr)
		return 2
	return 0


if __name__ == "__main__":
	sys.exit(main())
