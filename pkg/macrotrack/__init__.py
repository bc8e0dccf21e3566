name = "Macrotrack"
from macrotrack.pipeline import Pipeline,PipelineConfig
