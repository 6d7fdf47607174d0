from .audit import *
from .compare import *
from .fitting import *
from .heatmap import *
from .sweep import *
